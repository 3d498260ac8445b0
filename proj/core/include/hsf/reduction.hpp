#pragma once

#include "hsf/hypergraph.hpp"

#include <map>
#include <set>

namespace hsf {

// n rank-r hypergraphs G_v on a shared vertex set B = [n], indexed by v in A = [n].
// Absent keys are empty graphs.
struct ReductionInput {
    int n = 0;
    int r = 0;
    std::map<int, Hypergraph> graphs;

    void check() const;
    static ReductionInput parse(std::string_view text);
    static ReductionInput read_file(const std::string& path);
    std::string to_text() const;
};

// equal (r+1)-way partition of B; block_of[b] in [0, parts) for b = 1..n (index 0 unused)
struct Partition {
    int parts = 0;
    std::vector<int> block_of;
};
Partition random_partition(int n, int parts, Rng& rng);

// Combined rank-(r+1) hypergraph on A ∪ B, A = 1..n, B = n+1..2n.
// Stored: {v} ∪ (e + n) for e in G_v. Implicit (free): complete (r+1)-partite on B.
Hypergraph build_reduction(const ReductionInput& in, const Partition& part);
Hypergraph build_reduction(const ReductionInput& in, std::uint64_t seed);

struct Decoded {
    int v = 0;             // label vertex in A
    Simplex simplex;       // r-simplex of G_v, in B-local ids 1..n
    bool operator<(const Decoded& o) const {
        return v != o.v ? v < o.v : simplex < o.simplex;
    }
};
// drop the unique A-vertex; nullopt if s does not have exactly one
std::optional<Decoded> decode(const Simplex& s, int n);

// exact Pr[r+1 fixed vertices of B land in distinct blocks]
Rational success_probability(int n, int r);

struct TrialResult {
    bool success = false;
    std::vector<Decoded> recovered;
    int decode_failures = 0;  // found simplices that do not decode to a simplex of G_v
};
// one fresh partition, one brute-force search; pure in (input, seed)
TrialResult reduction_trial(const ReductionInput& in, std::uint64_t trial_seed);

struct ReductionReport {
    long trials = 0;
    long successes = 0;
    double rate = 0;
    double stderr_ = 0;
    Rational exact = 0;
    bool within_3sigma = false;
    long decode_failures = 0;
    long foreign_decodes = 0;  // decoded simplices not among those of the inputs
    bool any_input_simplex = false;
    std::set<Decoded> recovered;
};
ReductionReport run_reduction_trials(const ReductionInput& in, long trials, std::uint64_t seed);

// G_1 holds a single planted r-simplex, all other inputs empty
ReductionInput single_planted_input(int n, int r, std::uint64_t seed);

}  // namespace hsf
