#include "hsf/nested_johnson.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace hsf;

namespace {

std::vector<Bits> all_bits(int n) {
    std::vector<Bits> v;
    for (int m = 0; m < (1 << n); ++m) {
        Bits b(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(m >> i & 1);
        v.push_back(b);
    }
    return v;
}

std::vector<Bits> random_bits(int n, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Bits> v;
    for (int t = 0; t < count; ++t) {
        Bits b(static_cast<std::size_t>(n));
        for (auto& x : b) x = static_cast<std::uint8_t>(rng.below(2));
        v.push_back(b);
    }
    return v;
}

std::vector<LevelDims> dims_of(const NestedConfig& cfg) {
    std::vector<LevelDims> d;
    for (const auto& L : cfg.levels) d.push_back({static_cast<double>(L.n), static_cast<double>(L.k), L.ell});
    return d;
}

// setup stage: n^(k-l) falling over (n-l)^(k-l) falling, bounded for fixed l
Rational setup_ratio(long n, long k, long ell) {
    Rational r = 1;
    for (long t = 0; t < k - ell; ++t) r *= Rational(n - t) / Rational(n - ell - t);
    return r;
}

LinearExponent random_exp(Rng& rng, const char* name) {
    LinearExponent e(frac(static_cast<long>(rng.below(7)), 1 + static_cast<long>(rng.below(4))));
    if (rng.below(2)) e += LinearExponent::var(name, frac(1 + static_cast<long>(rng.below(3)), 1 + static_cast<long>(rng.below(3))));
    return e;
}

struct Checked {
    ExplicitBuild build;
    Rational c0, c1;
    double bound2 = 0;
};

Checked build_and_check(const NestedConfig& cfg, SlotRule rule) {
    BuildOptions opt;
    opt.slots = rule;
    Checked out{build_explicit(cfg, opt), 0, 0, 0};
    auto rep = validate(out.build.graph, cfg.sink);
    CHECK_MESSAGE(rep.ok(), rep.str());
    auto cx = complexity(out.build.graph);
    out.c0 = cx.c0;
    out.c1 = cx.c1;
    double b = complexity_bound(dims_of(cfg), measure_profile(cfg, rule).numeric());
    out.bound2 = b * b;
    return out;
}

}  // namespace

TEST_CASE("single level matches the Johnson-walk formula on 20 random tuples") {
    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        LinearExponent kap = random_exp(rng, "kappa");
        LevelExp L{kap + random_exp(rng, "nu"), kap, 1 + static_cast<int>(rng.below(3))};
        ExponentProfile p;
        p.S = random_exp(rng, "sigma");
        p.U = {random_exp(rng, "upsilon")};
        p.C = random_exp(rng, "gamma");
        // S + (n/k)^{l/2} (sqrt(k) U + C)
        LinearExponent walk = (L.n - L.k) * frac(L.ell, 2);
        auto want = MaxExpr::max_of({*p.S, walk + L.k * frac(1, 2) + *p.U[0], walk + *p.C});
        CHECK(complexity_exponent({L}, p) == want);

        // numerically the two forms agree up to a factor sqrt(3)
        double n = 50 + static_cast<double>(rng.below(1000)), k = 1 + static_cast<double>(rng.below(40));
        int ell = L.ell;
        if (k < ell) k = ell;
        double S = rng.uniform01() * 100, U = rng.uniform01() * 3, C = rng.uniform01() * 10;
        double got = complexity_bound({{n, k, ell}}, {S, {U}, C});
        double ref = S + std::pow(n / k, ell / 2.0) * (std::sqrt(k) * U + C);
        CHECK(got <= ref * (1 + 1e-12));
        CHECK(ref <= std::sqrt(3.0) * got * (1 + 1e-12));
    }
}

TEST_CASE("element distinctness has exponent 2/3") {
    ExponentProfile p;
    p.S = LinearExponent(frac(2, 3));
    p.U = {LinearExponent(0)};
    auto e = complexity_exponent({{LinearExponent(1), LinearExponent(frac(2, 3)), 2}}, p);
    REQUIRE(e.terms().size() == 1);
    CHECK(e.terms()[0] == LinearExponent(frac(2, 3)));
    CHECK(e.evaluate({}) == frac(2, 3));
}

TEST_CASE("setup-only profile gives S") {
    ExponentProfile p;
    p.S = LinearExponent::var("s");
    p.U = {std::nullopt, std::nullopt};
    auto e = complexity_exponent({{1, frac(1, 2), 1}, {1, frac(1, 3), 2}}, p);
    CHECK(e == MaxExpr(LinearExponent::var("s")));
    CHECK(complexity_bound({{100, 10, 1}, {64, 8, 2}}, {7.5, {0, 0}, 0}) == doctest::Approx(7.5));
    CHECK_THROWS_AS(complexity_bound({{10, 20, 1}}, {1, {}, 0}), DomainError);
    CHECK_THROWS_AS(complexity_bound({{10, 5, 6}}, {1, {}, 0}), DomainError);
    CHECK_THROWS_AS(complexity_exponent({{1, frac(1, 2), 0}}, p), DomainError);
}

TEST_CASE("stage specialities") {
    for (auto [n, k] : std::vector<std::pair<int, int>>{{8, 4}, {10, 2}, {7, 7}}) {
        CHECK(stage_speciality({{double(n), double(k), 1}}, 1, 1) == n);
        CHECK(stage_speciality({{double(n), double(k), 1}}, 1, 1, SlotRule::lowest) == n);
        CHECK(stage_speciality({{double(n), double(k), 1}}, 1, 0) == setup_ratio(n, k, 1));
    }
    // second level, first step, one outer certificate element: n_2 n_1 / k_1
    for (auto [n1, k1, n2, k2] : std::vector<std::array<int, 4>>{{8, 4, 6, 3}, {9, 3, 5, 2}, {10, 5, 4, 1}}) {
        std::vector<LevelDims> d{{double(n1), double(k1), 1}, {double(n2), double(k2), 1}};
        CHECK(stage_speciality(d, 2, 1) == Rational(n2) * n1 / k1);
        CHECK(stage_speciality(d, 2, 0) == setup_ratio(n1, k1, 1) * setup_ratio(n2, k2, 1));
        CHECK(stage_speciality(d, 1, 0) == setup_ratio(n1, k1, 1));
    }
    std::vector<LevelExp> e{{LinearExponent(1), LinearExponent::var("a"), 2}, {LinearExponent::var("b"), LinearExponent::var("c"), 1}};
    CHECK(stage_speciality_exponent(e, 1, 1) == LinearExponent(1));
    CHECK(stage_speciality_exponent(e, 1, 2) == LinearExponent::parse("2 - a"));
    CHECK(stage_speciality_exponent(e, 2, 1) == LinearExponent::parse("b + 2 - 2*a"));
    CHECK(stage_speciality_exponent(e, 2, 0) == LinearExponent(0));
    CHECK_THROWS_AS(stage_speciality({{8, 4, 1}}, 1, 2), DomainError);
    CHECK_THROWS_AS(stage_speciality({{8, 4, 1}}, 2, 1), DomainError);
}

TEST_CASE("count formulas agree with the built graphs") {
    std::vector<NestedConfig> cfgs = {
        or_config(5, 3, 1, all_bits(5)),
        or_config(5, 3, 2, all_bits(5)),
        or_config(6, 2, 2, all_bits(6)),
        matrix_config(3, 2, 3, 2, random_bits(12, 10, 4)),
    };
    for (const auto& cfg : cfgs) {
        for (auto rule : {SlotRule::lowest, SlotRule::every}) {
            BuildOptions opt;
            opt.slots = rule;
            auto b = build_explicit(cfg, opt);
            auto d = dims_of(cfg);
            std::map<std::string, SymmetricCounts> by_name;
            for (const auto& s : b.stages) by_name[s.name] = s.counts;
            for (int i = 1; i <= static_cast<int>(d.size()); ++i) {
                auto it = by_name.find("setup " + std::to_string(i));
                const auto& L = d[static_cast<std::size_t>(i - 1)];
                if (L.k == L.ell) {
                    CHECK(it == by_name.end());
                    continue;
                }
                REQUIRE(it != by_name.end());
                auto c = stage_counts(d, i, 0, rule);
                const auto& m = it->second;
                CHECK(c.c * c.d == m.c * m.d);
                CHECK(c.c1 * c.d1 == m.c1 * m.d1);
            }
            for (int i = 1; i <= static_cast<int>(d.size()); ++i) {
                for (int h = 1; h <= d[static_cast<std::size_t>(i - 1)].ell; ++h) {
                    auto c = stage_counts(d, i, h, rule);
                    const auto& m = by_name.at("update " + std::to_string(i) + "." + std::to_string(h));
                    CHECK(c.c == m.c);
                    CHECK(c.c1 == m.c1);
                    CHECK(c.d == m.d);
                    CHECK(c.d1 == m.d1);
                    CHECK(c.speciality() == m.T);
                }
            }
        }
    }
}

TEST_CASE("single-level OR build") {
    auto cfg = or_config(4, 2, 1, all_bits(4));
    auto r = build_and_check(cfg, SlotRule::lowest);
    std::vector<std::string> names;
    for (const auto& s : r.build.stages) names.push_back(s.name);
    CHECK(names == std::vector<std::string>{"setup 1", "update 1.1"});
    // trivial availability: every stage is exactly symmetric
    for (const auto& s : r.build.stages) CHECK(s.c1 == 1);
    CHECK(r.c1 <= 2);
    CHECK(to_double(r.c0) <= 8 * r.bound2);
    CHECK(r.build.alpha_violations.empty());
}

TEST_CASE("toy builds stay within 8x of the bound") {
    struct Case {
        const char* name;
        NestedConfig cfg;
    };
    std::vector<Case> cases = {
        {"or 5 3 1", or_config(5, 3, 1, all_bits(5))},
        {"or 6 3 2", or_config(6, 3, 2, all_bits(6))},
        {"or 8 3 1", or_config(8, 3, 1, random_bits(8, 40, 1))},
        {"checked or 4 2", checked_or_config(4, 2, all_bits(8))},
        {"matrix 3 2 3 2", matrix_config(3, 2, 3, 2, random_bits(12, 16, 2))},
        {"matrix 4 2 4 2", matrix_config(4, 2, 4, 2, random_bits(20, 16, 3))},
    };
    for (auto& c : cases) {
        for (auto rule : {SlotRule::lowest, SlotRule::every}) {
            INFO(c.name);
            auto r = build_and_check(c.cfg, rule);
            CHECK(to_double(r.c0) <= 8 * r.bound2);
            CHECK(r.c1 <= static_cast<long>(r.build.stages.size()));
            for (const auto& s : r.build.stages) CHECK(s.c1 <= 1);
        }
    }
}

TEST_CASE("setup stages cost at most a constant times S^2") {
    for (auto cfg : {or_config(6, 4, 1, all_bits(6)), matrix_config(4, 2, 4, 2, random_bits(20, 12, 9))}) {
        auto b = build_explicit(cfg);
        auto prof = measure_profile(cfg);
        Rational setup = 0;
        for (const auto& s : b.stages)
            if (s.name.rfind("setup", 0) == 0) setup += s.c0;
        CHECK(setup <= 8 * prof.S2);
    }
}

TEST_CASE("inner certificates follow the outer setup") {
    // n_i = 4, k_i = 2; the level-2 certificate depends on slot 0 of the outer setup
    auto inputs = random_bits(4 + 16, 30, 12);
    auto cfg = matrix_config(4, 2, 4, 2, inputs);
    auto b = build_explicit(cfg);
    const auto& g = b.graph;
    auto cell = [](int a, int col) { return 4 + a * 4 + col; };
    // brute-force sink test written out again
    auto holds = [&](const IndexSet& lab, int y) {
        const auto& z = inputs[static_cast<std::size_t>(y)];
        for (int a = 0; a < 4; ++a)
            for (int col = 0; col < 4; ++col)
                if (z[static_cast<std::size_t>(a)] && z[static_cast<std::size_t>(cell(a, col))] &&
                    std::binary_search(lab.begin(), lab.end(), a) && std::binary_search(lab.begin(), lab.end(), cell(a, col)))
                    return true;
        return false;
    };
    int ones = 0;
    for (int y : g.one_inputs()) {
        ++ones;
        std::vector<Rational> in(static_cast<std::size_t>(g.num_vertices())), out(in.size());
        for (const auto& [e, f] : g.flow(y)) {
            out[static_cast<std::size_t>(g.edge(e).from)] += f;
            in[static_cast<std::size_t>(g.edge(e).to)] += f;
        }
        Rational absorbed = 0;
        for (int v = 0; v < g.num_vertices(); ++v) {
            Rational net = in[static_cast<std::size_t>(v)] - out[static_cast<std::size_t>(v)];
            if (net == 0 || v == g.root()) continue;
            CHECK(holds(g.label(v), y));
            absorbed += net;
        }
        CHECK(absorbed == 1);
    }
    CHECK(ones > 5);
}

TEST_CASE("availability below alpha keeps a valid graph") {
    auto inputs = all_bits(6);
    auto cfg = or_config(6, 3, 1, inputs);
    // drop setup states starting with element 5
    cfg.available = [](int, int, const StateTuple&, const OrderedPartialSubset& a) { return a[0] != 5; };
    cfg.alpha = frac(1, 4);
    auto b = build_explicit(cfg);
    CHECK(validate(b.graph, cfg.sink).ok());
    CHECK(b.alpha_violations.empty());
    auto cx = complexity(b.graph);
    CHECK(cx.c1 <= 2 / retain(cfg.alpha, 2));

    cfg.alpha = frac(1, 10);
    auto tight = build_explicit(cfg);
    CHECK_FALSE(tight.alpha_violations.empty());
}

TEST_CASE("oversized builds are rejected with an estimate") {
    auto cfg = or_config(10, 6, 2, random_bits(10, 4, 1));
    BuildOptions opt;
    opt.max_edges = 1000;
    try {
        build_explicit(cfg, opt);
        FAIL("expected rejection");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("about") != std::string::npos);
    }
}

TEST_CASE("measured profile of the OR toy") {
    auto prof = measure_profile(or_config(5, 3, 1, all_bits(5)));
    CHECK(prof.S2 == 4);
    REQUIRE(prof.U2.size() == 1);
    CHECK(prof.U2[0] == 1);
    CHECK(prof.C2 == 0);
}

TEST_CASE("config files") {
    auto spec = NestedSpec::parse(
        "# element distinctness\n"
        "level 1: 1 2/3 2\n"
        "S: 2/3\n"
        "U_1: 0\n"
        "C: none\n");
    CHECK_FALSE(spec.numeric);
    REQUIRE(spec.levels.size() == 1);
    CHECK(complexity_exponent(spec.levels, spec.exponents).evaluate({}) == frac(2, 3));

    auto num = NestedSpec::parse("mode: numeric\nlevel 1: 100 10 1\nlevel 2: 64 8 2\nS: 10\nU_2: 1\nC: 0\n");
    CHECK(num.numeric);
    REQUIRE(num.dims.size() == 2);
    CHECK(num.values.U.size() == 2);
    CHECK(num.values.U[0] == 0);
    CHECK(complexity_bound(num.dims, num.values) ==
          doctest::Approx(std::sqrt(100.0 + 10.0 * 64.0 * 8.0)));

    auto line_of = [](const std::string& text) {
        try {
            NestedSpec::parse(text);
        } catch (const FormatError& e) {
            return e.line;
        }
        return -1;
    };
    CHECK(line_of("level 1: 1 1/2 1\nbogus: 3\n") == 2);
    CHECK(line_of("level 2: 1 1/2 1\n") == 1);
    CHECK(line_of("level 1: 1 1/2 0\n") == 1);
    CHECK(line_of("level 1: 1 1/2 1\nU_3: 1\n") == 2);
    CHECK(line_of("level 1: 1 1/2\n") == 1);
    CHECK(line_of("level 1: 1 1/2 1\nS: 1\nS: 2\n") == 3);
}
