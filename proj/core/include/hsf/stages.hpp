#pragma once

#include "hsf/learning_graph.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace hsf {

// One layer of a learning graph: arcs from begin vertices to end vertices,
// with a flow per 1-input. Flow entering a begin vertex is whatever leaves it.
struct Stage {
    struct Arc {
        int u = 0;  // index into begin
        int v = 0;  // index into end
        int length = 1;
    };
    std::vector<IndexSet> begin, end;
    std::vector<Arc> arcs;
    std::vector<std::map<int, Rational>> flows;  // per 1-input, positive entries only
    std::vector<Rational> weights;               // empty until weighted

    int num_inputs() const { return static_cast<int>(flows.size()); }
    // flow leaving each begin vertex / entering each end vertex
    std::vector<Rational> begin_flow(int y) const;
    std::vector<Rational> end_flow(int y) const;
};

struct SymmetricCounts {
    long c = 0, c1 = 0, d = 0, d1 = 0, e = 0, e1 = 0;  // c1 is c', d1 is d', e1 is e'
    Rational T;  // cd / (c'd')
    Rational L;  // average length of flow-carrying arcs, worst 1-input
};

// Checks the symmetric-stage conditions; throws DomainError naming the one
// that fails.
SymmetricCounts symmetric_counts(const Stage& s);

// Uniform weight L/(c'd'), which gives C1 = 1 exactly and C0 = T L Lall where
// Lall is the mean arc length; rejected when Lall > L.
SymmetricCounts weight_symmetric_stage(Stage& s);

Rational stage_c0(const Stage& s);
Rational stage_c1(const Stage& s, int y);
Rational stage_c1(const Stage& s);

// Every 1-input: unit total, begin-vertex outflow matches, no negative arcs.
bool conserves(const Stage& s);

// Vertices removed per 1-input (indices into begin / end).
struct BadSets {
    std::vector<std::vector<int>> begin, end;
};

// Drops flow outside V_{i,y} x V_{j,y} and spreads each surviving begin
// vertex's share over its surviving flow arcs in proportion to the base flow.
// Weights are copied from the (weighted) base stage.
Stage make_alpha_symmetric(const Stage& base, const BadSets& bad, const Rational& alpha, int s);

struct AlphaStats {
    Rational max_scale;         // largest new/base flow ratio on an arc
    Rational begin_flow_ratio;  // max/min flow over flow-carrying begin vertices
    Rational max_end_flow;      // largest end-vertex inflow, times e'
};
AlphaStats alpha_stats(const Stage& base, const Stage& alpha_stage);

// (1 - alpha)^k
Rational retain(const Rational& alpha, int k);

// ---- generators (begin/end labels are subsets of [n]) ----

// root to every singleton; one 1-input per marked position
Stage grover_stage(int n, const std::vector<int>& marked);
// root to every `load`-subset of [n]; flow on subsets avoiding the certificate
Stage johnson_setup_stage(int n, int load, const std::vector<IndexSet>& certs);
// m-subsets to (m+1)-subsets, m = base + h - 1; flow from sets holding h-1
// certificate elements (rest avoiding it) into the next certificate element
Stage johnson_update_stage(int n, int base, int h, const std::vector<IndexSet>& certs);

struct StageInstance {
    std::string kind;
    int n = 0;
    Stage stage;  // weighted
};
// random Grover / setup / update stage with n <= max_n and a few 1-inputs
StageInstance random_symmetric_stage(std::uint64_t seed, int max_n = 64);

struct AlphaInstance {
    StageInstance base;
    Rational alpha;
    int s = 0;
    BadSets bad;
    Stage stage;
};
// random base stage plus random bad sets within the retention budgets
AlphaInstance random_alpha_instance(std::uint64_t seed, const Rational& alpha, int s, int max_n = 64);

}  // namespace hsf
