#include "hsf/hypergeom.hpp"
#include "hsf/nested_state.hpp"

#include <doctest.h>

#include <cmath>

using namespace hsf;

namespace {

// Pr[X >= k] from raw binomial coefficients in exact integers
Rational tail_by_counting(long N, long M, long K, long k) {
    mpz_class total, good;
    mpz_bin_uiui(total.get_mpz_t(), static_cast<unsigned long>(N), static_cast<unsigned long>(K));
    for (long x = std::max(k, 0L); x <= std::min(M, K); ++x) {
        if (K - x > N - M) continue;
        mpz_class a, b;
        mpz_bin_uiui(a.get_mpz_t(), static_cast<unsigned long>(M), static_cast<unsigned long>(x));
        mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(N - M), static_cast<unsigned long>(K - x));
        good += a * b;
    }
    Rational r(good, total);
    r.canonicalize();
    return r;
}

ParamSet uniform_params(const Rational& a, const Rational& b, const Rational& c, const Rational& d) {
    ParamSet p;
    for (const auto& l : levels()) {
        std::size_t s = l.idx.size();
        p.at(l.idx) = s == 1 ? a : s == 2 ? b : s == 3 ? c : d;
    }
    return p;
}

}  // namespace

TEST_CASE("HG(100, 10, 20) tail at delta = 1") {
    HyperGeom h(100, 10, 20);
    CHECK(h.mean() == 2);
    CHECK(threshold_ge(h.mean(), 1) == 4);
    Rational t = exact_tail(h, 4);
    CHECK(t == tail_by_counting(100, 10, 20, 4));
    CHECK(t == Rational(4986389, 45507938));  // frozen
    CHECK(bound1(2, 1) == doctest::Approx(std::exp(-2.0 / 3)));
    CHECK(bound1(2, 1) == doctest::Approx(0.5134).epsilon(1e-4));
    CHECK(to_double(t) <= bound1(2, 1));
}

TEST_CASE("bound domains") {
    CHECK(bound1(5, 1e-9) == doctest::Approx(1));
    CHECK_THROWS_AS(bound1(5, 0), DomainError);
    CHECK_THROWS_AS(bound1(5, 1.5), DomainError);
    CHECK_THROWS_AS(bound2(5, 4.0), DomainError);
    CHECK(bound2(1, 5) == doctest::Approx(std::pow(2.0, -6)));
    CHECK_THROWS_AS(HyperGeom(10, 11, 3), DomainError);
    CHECK_THROWS_AS(HyperGeom(10, 3, 11), DomainError);
}

TEST_CASE("exact tail is a tail") {
    CHECK(exact_tail(HyperGeom(30, 0, 7), 1) == 0);
    for (auto [N, M, K] : std::vector<std::array<long, 3>>{{20, 5, 8}, {50, 25, 10}, {12, 12, 4}, {40, 3, 39}}) {
        HyperGeom h(N, M, K);
        CHECK(exact_tail(h, 0) == 1);
        CHECK(exact_tail(h, std::min(M, K) + 1) == 0);
        Rational prev = 1, sum = 0;
        for (long k = 0; k <= std::min(M, K) + 1; ++k) {
            Rational t = exact_tail(h, k);
            CHECK(t <= prev);
            CHECK(t == tail_by_counting(N, M, K, k));
            prev = t;
        }
        for (long x = 0; x <= K; ++x) sum += h.pmf(x);
        CHECK(sum == 1);
    }
}

TEST_CASE("both bounds dominate the exact tail on the grid") {
    auto grid = tail_grid();
    long b1 = 0, b2 = 0;
    for (const auto& t : grid) {
        CHECK(t.ok);
        (t.which == 1 ? b1 : b2)++;
        if (t.which == 1) CHECK(t.delta > 0);
        if (t.which == 1) CHECK(t.delta <= 1);
        if (t.which == 2) CHECK(to_double(t.delta) > 2 * std::exp(1.0) - 1);
    }
    CHECK(b1 >= 200);
    CHECK(b2 > 0);
    // spot-check a few grid points against the counting oracle
    for (std::size_t i = 0; i < grid.size(); i += 37)
        CHECK(grid[i].exact == tail_by_counting(grid[i].N, grid[i].M, grid[i].K, grid[i].threshold));
}

TEST_CASE("full-density state") {
    // a = 1: A_i = [n]; b = a_i + a_j: every pair is present
    auto p = uniform_params(1, 2, 3, 4);
    auto s = sample_state(8, p, 5, SampleDepth::triples);
    for (int i = 0; i < 5; ++i) CHECK(s.A[static_cast<std::size_t>(i)].size() == 8);
    for (int x = 0; x < 5; ++x)
        for (int y = 0; y < 5; ++y)
            if (x != y)
                for (int r = 0; r < 8; ++r) CHECK(s.adj[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)].row_count(r) == 8);
    for (int t = 0; t < 10; ++t) CHECK(s.gamma3[static_cast<std::size_t>(t)].size() == 512);
}

TEST_CASE("zero pair exponents leave almost no triples") {
    auto p = uniform_params(frac(1, 2), 0, 0, 0);
    long triples = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto s = sample_state(256, p, seed, SampleDepth::triples);
        for (int q = 0; q < 10; ++q) CHECK(s.sizes.pair_size[static_cast<std::size_t>(q)] == 1);
        for (const auto& g : s.gamma3) triples += static_cast<long>(g.size());
    }
    // expected count per triple level is n^{-3/2} here
    CHECK(triples <= 2);
}

TEST_CASE("sampling is deterministic per seed") {
    auto p = ParamSet::published();
    auto a = sample_state(64, p, 99);
    auto b = sample_state(64, p, 99);
    CHECK(a.A == b.A);
    CHECK(a.gamma3 == b.gamma3);
    CHECK(a.gamma4 == b.gamma4);
    CHECK(a.V4 == b.V4);
}

TEST_CASE("violation report basics") {
    auto p = ParamSet::published();
    auto none = violation_rate({64, 128}, p, 0, 1);
    CHECK(none.rows.empty());
    auto rep = violation_rate({64, 128}, p, 30, 1);
    CHECK(rep.rows.size() == 2 * condition_names().size());
    CHECK(rep.gamma_cap.failed == 0);
    CHECK(rep.gamma_cap.checked > 0);
    auto tsv = rep.to_tsv();
    CHECK(tsv.rfind("64\tB12:deg1\t", 0) == 0);
}

TEST_CASE("negative control: degree windows fail at a constant rate when a = b") {
    // pair states of size n^{a}: expected degree one, so empty rows are common
    auto p = uniform_params(frac(1, 2), frac(1, 2), 0, 0);
    auto rep = violation_rate({64, 128, 256}, p, 40, 3);
    const auto names = condition_names();
    for (std::size_t g = 0; g < 3; ++g) {
        const auto& r = rep.rows[g * names.size()];
        CHECK(r.condition == "B12:deg1");
        CHECK(r.rate > 0.5);
    }
}

TEST_CASE("update scaling harness") {
    auto p = ParamSet::published();
    CHECK_THROWS_AS(update_size_scaling({64, 128}, p, LoadKind::vertex, 2, 1), DomainError);
    auto s = sample_state(64, p, 4);
    // vertex states are full: loading any slot changes nothing
    CHECK(load_delta(s, p, 0, 0) == 0);
    // a pair already present gains nothing
    bool found = false;
    for (int a = 0; a < s.sizes.k[0] && !found; ++a)
        for (int b = 0; b < s.sizes.k[1] && !found; ++b)
            if (s.adj[0][1].test(a, b)) {
                CHECK(load_delta(s, p, level_index({1, 2}), static_cast<long>(a) * s.sizes.k[1] + b) == 0);
                found = true;
            }
    CHECK(found);
    CHECK(loglog_slope({2, 4, 8, 16}, {3, 12, 48, 192}) == doctest::Approx(2));
}
