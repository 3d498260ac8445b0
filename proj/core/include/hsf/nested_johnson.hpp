#pragma once

#include "hsf/exponent.hpp"
#include "hsf/learning_graph.hpp"
#include "hsf/stages.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hsf {

// ---- exponent-level calculus ----

// n_i = n^{n}, k_i = n^{k}; ell is a constant
struct LevelExp {
    LinearExponent n, k;
    int ell = 1;
};

// cost terms as exponents of n; nullopt is a zero term
struct ExponentProfile {
    std::optional<LinearExponent> S;
    std::vector<std::optional<LinearExponent>> U;  // one per level
    std::optional<LinearExponent> C;
};

// exponent of sqrt(S^2 + sum_i prod_{j<=i}(n_j/k_j)^{l_j} k_i U_i^2 + prod_i (n_i/k_i)^{l_i} C^2)
MaxExpr complexity_exponent(const std::vector<LevelExp>& levels, const ExponentProfile& p);

struct LevelDims {
    double n = 0, k = 0;
    int ell = 1;
};
struct NumericProfile {
    double S = 0;
    std::vector<double> U;
    double C = 0;
};
// the same expression with numbers, square root taken
double complexity_bound(const std::vector<LevelDims>& levels, const NumericProfile& p);

// How an insertion picks the star slot it fills: always the lowest one, or
// one L-edge per star.
enum class SlotRule { lowest, every };

struct StageCounts {
    Rational c, c1, d, d1;  // c1 = c', d1 = d'
    Rational speciality() const { return c * d / (c1 * d1); }
};
// exact counts of the explicit construction; h = 0 is the setup stage of
// level i, 1 <= h <= ell_i the update sub-steps (levels are 1-based)
StageCounts stage_counts(const std::vector<LevelDims>& levels, int i, int h, SlotRule rule = SlotRule::every);
Rational stage_speciality(const std::vector<LevelDims>& levels, int i, int h, SlotRule rule = SlotRule::every);
// leading exponent: 0 for setup, n_i + (h-1)(n_i - k_i) + sum_{j<i} l_j (n_j - k_j)
LinearExponent stage_speciality_exponent(const std::vector<LevelExp>& levels, int i, int h);

// ---- config files ----

// "level i: n k ell" and "S: x", "U_i: x", "C: x" lines; x is "none" for a
// zero term. "mode: numeric" switches from exponents to plain numbers.
struct NestedSpec {
    bool numeric = false;
    std::vector<LevelExp> levels;
    ExponentProfile exponents;
    std::vector<LevelDims> dims;
    NumericProfile values;
    static NestedSpec parse(const std::string& text);
    static NestedSpec read_file(const std::string& path);
};

// ---- explicit construction at toy scale ----

struct NestedLevel {
    int n = 0, k = 0, ell = 1;
};

using StateTuple = std::vector<OrderedPartialSubset>;

struct NestedConfig {
    std::vector<NestedLevel> levels;
    std::vector<Bits> inputs;
    std::vector<bool> value;  // f(inputs[i])
    // loaded input positions of a state tuple; must be monotone
    std::function<IndexSet(const StateTuple&)> data;
    // level-i certificate of 1-input y given the outer setup states
    // A'_1..A'_{i-1} (slots filled during setup only)
    std::function<IndexSet(int y, int level, const StateTuple& outer_setup)> certificate;
    // optional availability of a setup state A'_i; empty means trivial
    std::function<bool(int y, int level, const StateTuple& outer_setup, const OrderedPartialSubset& a)> available;
    Rational alpha = 0;
    // optional checking graph at a full state, labels relative to data(A);
    // flows keyed by the same input ids
    std::function<LearningGraph(const StateTuple& full)> check;
    // label contains a 1-certificate of y
    CertificateTest sink;
};

struct StageInfo {
    std::string name;  // "setup 1", "update 1.2", "check"
    int first_edge = 0, last_edge = 0;  // [first, last)
    SymmetricCounts counts;  // of the trivial-availability flow (not set for "check")
    Rational c0;
    Rational c1;  // worst 1-input
};

struct ExplicitBuild {
    LearningGraph graph;
    std::vector<StageInfo> stages;
    // inputs whose availability sets are not alpha-subsets, one line each
    std::vector<std::string> alpha_violations;
};

struct BuildOptions {
    SlotRule slots = SlotRule::lowest;
    long max_edges = 2'000'000;
};

ExplicitBuild build_explicit(const NestedConfig& cfg, const BuildOptions& opt = {});

// S^2, U_i^2 and C^2 of the hypotheses, by exhaustive averaging over the
// states of the construction
struct MeasuredProfile {
    Rational S2;
    std::vector<Rational> U2;
    Rational C2;
    NumericProfile numeric() const;
};
MeasuredProfile measure_profile(const NestedConfig& cfg, SlotRule rule = SlotRule::lowest);

// toy configurations
NestedConfig or_config(int n, int k, int ell, const std::vector<Bits>& inputs);
NestedConfig matrix_config(int n1, int k1, int n2, int k2, const std::vector<Bits>& inputs);
NestedConfig checked_or_config(int n, int k, const std::vector<Bits>& inputs);

}  // namespace hsf
