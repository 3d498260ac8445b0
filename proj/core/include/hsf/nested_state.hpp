#pragma once

#include "hsf/four_simplex.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hsf {

// Level sizes at a concrete n: every exponent e becomes round(n^e), at least 1
// and at most the size of the set it is drawn from.
struct ScaledSizes {
    int n = 0;
    std::array<int, 5> k{};            // |A_i|
    std::array<long, 10> pair_size{};  // |B_ij| within k_i k_j slot pairs
    std::array<long, 10> N3{}, C3{};   // triple index space ceil(11 n^m), |C_ijk|
    std::array<long, 5> N4{}, D4{};    // quadruple index space ceil(n^m), |D_ijkl|
};
ScaledSizes scale(const ParamSet& p, int n);

// row-major bit matrix
struct BitMatrix {
    int rows = 0, cols = 0, words = 0;
    std::vector<std::uint64_t> bits;
    void reset(int r, int c);
    const std::uint64_t* row(int r) const { return bits.data() + static_cast<std::size_t>(r) * words; }
    bool test(int r, int c) const { return row(r)[c >> 6] >> (c & 63) & 1; }
    void set(int r, int c) { bits[static_cast<std::size_t>(r) * words + (c >> 6)] |= 1ULL << (c & 63); }
    int row_count(int r) const;
};

// slot triples/quadruples packed 10 bits per slot, most significant first, so
// numeric order is lexicographic order
inline std::uint32_t pack3(int a, int b, int c) {
    return static_cast<std::uint32_t>(a) << 20 | static_cast<std::uint32_t>(b) << 10 | static_cast<std::uint32_t>(c);
}
inline int slot_of(std::uint64_t key, int pos, int width) {
    return static_cast<int>(key >> (10 * (width - 1 - pos)) & 1023);
}

struct NestedState {
    ScaledSizes sizes;
    std::array<std::vector<int>, 5> A;           // vertex ids (1-based) per slot
    std::array<std::array<BitMatrix, 5>, 5> adj; // adj[x][y]: slot x -> slots y with the pair in V_xy
    std::array<std::vector<std::uint32_t>, 10> gamma3, V3;
    std::array<std::vector<std::uint64_t>, 5> gamma4, V4;

    bool has_triple(int t, std::uint32_t key) const;
    // slots w such that the sorted triple of (fixed levels, free level) is in V;
    // fixed slots given in the order of the other two levels
    std::vector<int> third_slots(int t, int free_pos, int s0, int s1) const;
    void build_index();

private:
    // per triple level and free position: sorted (other-two-key << 10 | free slot)
    std::array<std::array<std::vector<std::uint32_t>, 3>, 10> idx_;
};

// Level bookkeeping with 0-based level numbers 0..4.
int pair_id(int x, int y);           // 0..9, any order
int triple_id(int x, int y, int z);  // 0..9, any order
int quad_id(const std::vector<int>& q);
std::array<int, 2> pair_levels(int p);
std::array<int, 3> triple_levels(int t);
std::array<int, 4> quad_levels(int q);

enum class SampleDepth { pairs, triples, quads };
NestedState sample_state(int n, const ParamSet& p, std::uint64_t seed, SampleDepth depth = SampleDepth::quads);

struct ConditionRate {
    int n = 0;
    std::string condition;
    long trials = 0;
    long violations = 0;
    double rate = 0;
    double stderr_ = 0;
};
struct CapStats {
    long checked = 0, failed = 0;          // Γ_ijk cap where the implying codegree condition held
    long checked_all = 0, failed_all = 0;  // every sample
    long quad_checked = 0, quad_failed = 0;
};
struct ViolationReport {
    std::vector<ConditionRate> rows;  // grouped by n, fixed condition order
    std::vector<std::string> nonmonotone;
    bool monotone = true;
    CapStats gamma_cap;
    std::string to_tsv() const;
};
// names of the rows evaluated per sample, in order
std::vector<std::string> condition_names();
ViolationReport violation_rate(const std::vector<int>& grid, const ParamSet& p, long trials, std::uint64_t seed,
                               int threads = 0);

enum class LoadKind { vertex, pair, triple };
struct ScalingRow {
    std::string level;  // loaded level label, e.g. "12"
    std::string quad;   // affected quadruple label
    double predicted = 0;
    double fitted = 0;
    double residual = 0;
    std::vector<double> mean_gamma;  // E|Γ' - Γ| per grid point
    std::vector<double> mean_v;      // E|V' - V| per grid point
};
struct ScalingReport {
    std::vector<int> grid;
    std::vector<ScalingRow> rows;
    double max_abs_residual = 0;
    std::string to_tsv() const;
};
// expected number of quadruples gained when a fresh element enters the level
ScalingReport update_size_scaling(const std::vector<int>& grid, const ParamSet& p, LoadKind kind, long trials,
                                  std::uint64_t seed, int threads = 0);

// expected quadruples gained by loading `element` into the level (0 if already present);
// element is a slot (vertex), a slot-pair index s_i*k_j+s_j (pair) or a C index (triple)
double load_delta(const NestedState& s, const ParamSet& p, int level, long element);

// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hsf
