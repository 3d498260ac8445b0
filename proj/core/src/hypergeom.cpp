#include "hsf/hypergeom.hpp"

#include <cmath>

namespace hsf {

HyperGeom::HyperGeom(long n, long m, long k) : N(n), M(m), K(k) {
    if (n <= 0 || m < 0 || k < 0 || m > n || k > n) throw DomainError("HyperGeom: need 0 <= M, K <= N, N > 0");
}

Rational HyperGeom::pmf(long x) const {
    if (x < 0 || x > M || x > K || K - x > N - M) return 0;
    return binomial(M, x) * binomial(N - M, K - x) / binomial(N, K);
}

Rational exact_tail(const HyperGeom& h, long k) {
    if (k <= 0) return 1;
    long hi = std::min(h.M, h.K);
    if (k > hi) return 0;
    // sum the shorter side
    mpz_class num = 0;
    if (hi - k + 1 <= k) {
        for (long x = k; x <= hi; ++x) {
            Rational a = binomial(h.M, x) * binomial(h.N - h.M, h.K - x);
            num += a.get_num();
        }
        Rational out(num, binomial(h.N, h.K).get_num());
        out.canonicalize();
        return out;
    }
    for (long x = 0; x < k; ++x) {
        Rational a = binomial(h.M, x) * binomial(h.N - h.M, h.K - x);
        num += a.get_num();
    }
    Rational below(num, binomial(h.N, h.K).get_num());
    below.canonicalize();
    return 1 - below;
}

double bound1(double mu, double delta) {
    if (!(delta > 0 && delta <= 1)) throw DomainError("bound1 needs 0 < delta <= 1");
    if (mu < 0) throw DomainError("bound1 needs mu >= 0");
    return std::exp(-mu * delta * delta / 3.0);
}

double bound2(double mu, double delta) {
    if (!(delta > 2 * std::exp(1.0) - 1)) throw DomainError("bound2 needs delta > 2e - 1");
    if (mu < 0) throw DomainError("bound2 needs mu >= 0");
    return std::exp2(-(1 + delta) * mu);
}

namespace {
long ceil_q(const Rational& q) {
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return c.get_si();
}
long floor_q(const Rational& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return f.get_si();
}
}  // namespace

long threshold_ge(const Rational& mu, const Rational& delta) { return ceil_q(mu * (1 + delta)); }
long threshold_gt(const Rational& mu, const Rational& delta) { return floor_q(mu * (1 + delta)) + 1; }

TailCheck check_tail(const HyperGeom& h, const Rational& delta, int which) {
    TailCheck c{h.N, h.M, h.K, delta, which, 0, 0, 0, false};
    Rational mu = h.mean();
    if (which == 1) {
        c.threshold = threshold_ge(mu, delta);
        c.bound = bound1(mu.get_d(), delta.get_d());
    } else if (which == 2) {
        c.threshold = threshold_gt(mu, delta);
        c.bound = bound2(mu.get_d(), delta.get_d());
    } else {
        throw DomainError("check_tail: bound 1 or 2");
    }
    c.exact = exact_tail(h, c.threshold);
    c.ok = c.exact <= Rational(c.bound) * frac(1000000000001L, 1000000000000L);
    return c;
}

std::vector<TailCheck> tail_grid() {
    std::vector<TailCheck> out;
    const long Ns[] = {20, 50, 100, 200, 400};
    const long fr[][2] = {{1, 10}, {1, 4}, {1, 2}, {3, 4}};
    const Rational d1[] = {frac(1, 10), frac(1, 4), frac(1, 2), frac(3, 4), Rational(1)};
    // 2e - 1 ~ 4.4366
    const Rational d2[] = {frac(45, 10), Rational(6), Rational(10)};
    for (long N : Ns)
        for (const auto& fm : fr)
            for (const auto& fk : fr) {
                HyperGeom h(N, N * fm[0] / fm[1], N * fk[0] / fk[1]);
                for (const auto& d : d1) out.push_back(check_tail(h, d, 1));
                for (const auto& d : d2) out.push_back(check_tail(h, d, 2));
            }
    return out;
}

}  // namespace hsf
