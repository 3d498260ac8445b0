#pragma once

#include "hsf/exponent.hpp"
#include "hsf/lp.hpp"

#include <array>
#include <string>
#include <vector>

namespace hsf {

// One nesting level of the 4-simplex walk: a nonempty proper subset of {1..5}.
struct Level {
    std::vector<int> idx;  // sorted
    std::string label() const;       // "12"
    std::string param_name() const;  // "b_12"
};

// 30 levels: 5 vertex, 10 pair, 10 triple, 5 quadruple, lexicographic within each class
const std::vector<Level>& levels();
int level_index(const std::vector<int>& idx);  // -1 if not a level

LinearExponent param(const std::vector<int>& idx);
// m_ijk = b_ij + b_ik + b_jk - a_i - a_j - a_k;  m_ijkl = sum c - sum b + sum a
LinearExponent m_expr(const std::vector<int>& idx);
LinearExponent nu(const Level& l);      // exponent of the walk's ground-set size
LinearExponent kappa(const Level& l);   // exponent of the walk's state size
std::vector<LinearExponent> upsilon(const Level& l);  // update-cost candidates

// exponent terms of stage s: 1/2 sum_{j<=s}(nu_j - kappa_j) + 1/2 kappa_s + upsilon
MaxExpr stage_expr(int s);
MaxExpr setup_expr();

class ParamSet {
public:
    ParamSet() { v_.fill(Rational(0)); }
    static ParamSet published();  // the five-decimal table of the optimal solution
    static ParamSet from_assignment(const Assignment& a);

    Rational& operator[](int level) { return v_.at(level); }
    const Rational& operator[](int level) const { return v_.at(level); }
    Rational& at(const std::vector<int>& idx);
    const Rational& at(const std::vector<int>& idx) const;
    Assignment assignment() const;
    Rational m(const std::vector<int>& idx) const { return m_expr(idx).evaluate(assignment()); }

    // "name=value" lines; other keys of the report format are skipped
    static ParamSet parse(std::string_view text);
    static ParamSet read_file(const std::string& path);

private:
    std::array<Rational, 30> v_;
};

struct Constraint {
    int family = 0;  // 1..7
    std::string label;
    LinearExponent lhs;  // constraint reads lhs <= 0, or lhs < 0 when strict
    bool strict = false;
};
// family 7 with l the largest index, or all 12 role assignments per quadruple
std::vector<Constraint> admissibility_constraints(bool all_roles = false);

struct ConstraintCheck {
    Constraint constraint;
    Rational margin;  // -lhs
};
struct AdmissibilityReport {
    bool ok = true;
    std::vector<ConstraintCheck> violations;
    std::vector<ConstraintCheck> tight_strict;  // strict ones failing only by being (near) tight
    Rational min_strict_margin;
};
// non-strict pass when lhs <= eps, strict when -lhs > eps
AdmissibilityReport admissible(const ParamSet& p, const Rational& eps, bool all_roles = false);

struct StageValues {
    Rational setup;
    std::vector<Rational> stages;  // 30, nesting order
    Rational objective;
};
StageValues stage_exponents(const ParamSet& p);
Rational objective(const ParamSet& p);

// upper bound per rank class: a <= 1, b <= 2, c <= 3, d <= 4
Rational class_bound(const Level& l);

struct LpSolution {
    ParamSet params;
    Rational t;
    long pivots = 0;
    std::size_t constraint_rows = 0;
    AdmissibilityReport check;  // strict families on the optimum, eps = 1e-9
};
LpSolution solve_lp(bool all_roles = false);
// min t over t only, with every parameter pinned
Rational solve_epigraph(const ParamSet& p);
// a feasible point of the non-strict system: vertex of a random direction
ParamSet random_vertex(std::uint64_t seed, bool all_roles = false);

std::string format_report(const ParamSet& p, bool exact);

}  // namespace hsf
