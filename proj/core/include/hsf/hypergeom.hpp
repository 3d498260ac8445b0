#pragma once

#include "hsf/common.hpp"

#include <vector>

namespace hsf {

// draws K from N without replacement, M of them good; X = number of good draws
struct HyperGeom {
    long N = 0, M = 0, K = 0;
    HyperGeom(long n, long m, long k);
    Rational mean() const { return frac(K * M, N); }
    Rational pmf(long x) const;
};

// Pr[X >= k], exact
Rational exact_tail(const HyperGeom& h, long k);
// Pr[X >= (1+delta) mu] <= exp(-mu delta^2 / 3) for 0 < delta <= 1
double bound1(double mu, double delta);
// Pr[X > (1+delta) mu] < 2^{-(1+delta) mu} for delta > 2e - 1
double bound2(double mu, double delta);
// smallest integer k with k >= (1+delta) mu, and with k > (1+delta) mu
long threshold_ge(const Rational& mu, const Rational& delta);
long threshold_gt(const Rational& mu, const Rational& delta);

struct TailCheck {
    long N, M, K;
    Rational delta;
    int which;  // 1 or 2
    long threshold;
    Rational exact;
    double bound;
    bool ok;
};
// exact tail against the bound; `ok` compares in exact arithmetic against the
// double bound widened by 1e-12 relative
TailCheck check_tail(const HyperGeom& h, const Rational& delta, int which);

// default comparator grid: (N, M, K, delta) points
std::vector<TailCheck> tail_grid();

}  // namespace hsf
