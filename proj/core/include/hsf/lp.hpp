#pragma once

#include "hsf/common.hpp"

#include <vector>

namespace hsf {

// maximize c.x  subject to  A x <= b, x >= 0   (exact)
struct LpProblem {
    int num_vars = 0;
    std::vector<std::vector<Rational>> A;
    std::vector<Rational> b;
    std::vector<Rational> c;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Rational value = 0;
    std::vector<Rational> x;
    long pivots = 0;
};

LpResult solve_exact(const LpProblem& p);

}  // namespace hsf
