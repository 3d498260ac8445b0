// Acceptance gate: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; "--criterion N" runs one.

#include "hsf/four_simplex.hpp"
#include "hsf/hypergeom.hpp"
#include "hsf/hypergraph.hpp"
#include "hsf/learning_graph.hpp"
#include "hsf/nested_johnson.hpp"
#include "hsf/nested_state.hpp"
#include "hsf/reduction.hpp"
#include "hsf/stages.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>

using namespace hsf;

namespace {

constexpr std::uint64_t kSeed = 20240601;
constexpr long kScalingTrials = 200;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int digits = 6) { return to_fixed(x, digits); }

void lp_reproduction(Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    auto p = ParamSet::published();
    auto sv = stage_exponents(p);
    double obj = to_double(sv.objective);
    double worst = 0;
    for (const auto& s : sv.stages) worst = std::max(worst, to_double(s));
    auto adm = admissible(p, parse_rational("1e-4"));
    double dt = seconds_since(t0);
    o.detail << "objective=" << fmt(obj) << " max_stage=" << fmt(worst) << " setup=" << fmt(to_double(sv.setup))
             << " admissible=" << (adm.ok ? "yes" : "no") << " time=" << fmt(dt, 3) << "s";
    o.require(std::abs(obj - 2.4548) <= 1e-3, "objective");
    o.require(worst <= 2.4549, "stage exponents");
    o.require(std::abs(to_double(sv.setup) - 2.25911) <= 1e-4, "setup exponent");
    o.require(adm.ok, "admissibility");
    o.require(dt < 1, "runtime");
}

void lp_optimum(Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    auto sol = solve_lp();
    double dt = seconds_since(t0);
    double t = to_double(sol.t);
    Rational pub = objective(ParamSet::published());
    o.detail << "t*=" << fmt(t) << " (" << to_string(sol.t) << ") objective(published)=" << fmt(to_double(pub))
             << " pivots=" << sol.pivots << " time=" << fmt(dt, 3) << "s";
    o.require(std::abs(t - 2.4548) <= 5e-3, "distance to 2.4548");
    o.require(sol.t <= pub + parse_rational("1e-6"), "not above published objective");
    o.require(t >= 2.4537, "suspiciously low optimum");
    o.require(dt < 10, "runtime");
}

void spot_exponents(Outcome& o) {
    auto sv = stage_exponents(ParamSet::published());
    double v1 = to_double(sv.stages[static_cast<std::size_t>(level_index({1}))]);
    double v12 = to_double(sv.stages[static_cast<std::size_t>(level_index({1, 2}))]);
    o.detail << "stage:1=" << fmt(v1) << " stage:12=" << fmt(v12);
    o.require(std::abs(v1 - 2.45476) <= 1e-4, "vertex level 1");
    o.require(std::abs(v12 - 2.45476) <= 1e-4, "pair level 12");
}

void rank_reduction(Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    auto in = single_planted_input(12, 2, kSeed);
    auto planted = planted_instance(12, 2, 0.0, kSeed).planted;
    auto rep = run_reduction_trials(in, 10000, kSeed);
    double dt = seconds_since(t0);
    bool all_planted = true;
    for (const auto& d : rep.recovered) all_planted = all_planted && d.v == 1 && d.simplex == planted;
    o.detail << "exact=" << to_string(rep.exact) << " empirical=" << fmt(rep.rate) << " stderr=" << fmt(rep.stderr_)
             << " successes=" << rep.successes << " decode_failures=" << rep.decode_failures + rep.foreign_decodes
             << " time=" << fmt(dt, 3) << "s";
    o.require(rep.exact == frac(16, 55), "exact probability");
    o.require(rep.within_3sigma, "3 standard errors");
    o.require(rep.decode_failures == 0 && rep.foreign_decodes == 0 && all_planted && rep.successes > 0,
              "decoding to the planted triangle");
    o.require(dt < 30, "runtime");
}

void learning_graphs(Outcome& o) {
    const Rational tol = 1 + parse_rational("1e-9");
    int sym_bad = 0, alpha_bad = 0, conserve_bad = 0;
    Rational worst_sym = 0, worst_ratio = 0, worst_alpha = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto inst = random_symmetric_stage(Rng::split(kSeed, seed), 64);
        const Stage& s = inst.stage;
        auto cnt = symmetric_counts(s);
        Rational c1 = stage_c1(s), c0 = stage_c0(s);
        Rational cap = cnt.T * cnt.L * cnt.L;
        worst_sym = std::max(worst_sym, c1);
        worst_ratio = std::max(worst_ratio, Rational(c0 / cap));
        if (c1 > tol || c0 > cap * tol) ++sym_bad;
        if (!conserves(s)) ++conserve_bad;
    }
    const Rational alphas[] = {frac(1, 16), frac(1, 32), frac(1, 64)};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rational alpha = alphas[seed % 3];
        int s = static_cast<int>(seed % 5);
        auto inst = random_alpha_instance(Rng::split(kSeed + 1, seed), alpha, s, 64);
        Rational cap = 1 / retain(alpha, 2 * (s + 1));
        Rational c1 = stage_c1(inst.stage);
        worst_alpha = std::max(worst_alpha, Rational(c1 / cap));
        if (c1 > cap) ++alpha_bad;
        if (!conserves(inst.stage)) ++conserve_bad;
    }
    o.detail << "symmetric: max C1=" << fmt(to_double(worst_sym)) << " max C0/(T L^2)=" << fmt(to_double(worst_ratio))
             << "; alpha: max C1/cap=" << fmt(to_double(worst_alpha)) << "; conservation failures=" << conserve_bad;
    o.require(sym_bad == 0, "symmetric stage bounds");
    o.require(alpha_bad == 0, "alpha-symmetric C1 cap");
    o.require(conserve_bad == 0, "exact conservation");
}

std::vector<Bits> random_inputs(int n, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Bits> v;
    for (int t = 0; t < count; ++t) {
        Bits b(static_cast<std::size_t>(n));
        for (auto& x : b) x = static_cast<std::uint8_t>(rng.below(2));
        v.push_back(b);
    }
    return v;
}

void nested_calculus(Outcome& o) {
    Rng rng(kSeed);
    int symbolic_bad = 0;
    for (int t = 0; t < 20; ++t) {
        auto rnd = [&](const char* name) {
            LinearExponent e(frac(static_cast<long>(rng.below(9)), 1 + static_cast<long>(rng.below(5))));
            if (rng.below(2)) e += LinearExponent::var(name, frac(1 + static_cast<long>(rng.below(4)), 1 + static_cast<long>(rng.below(3))));
            return e;
        };
        LinearExponent kap = rnd("kappa");
        LevelExp L{kap + rnd("nu"), kap, 1 + static_cast<int>(rng.below(3))};
        ExponentProfile p;
        p.S = rnd("sigma");
        p.U = {rnd("upsilon")};
        p.C = rnd("gamma");
        LinearExponent walk = (L.n - L.k) * frac(L.ell, 2);
        auto want = MaxExpr::max_of({*p.S, walk + L.k * frac(1, 2) + *p.U[0], walk + *p.C});
        if (!(complexity_exponent({L}, p) == want)) ++symbolic_bad;
    }
    ExponentProfile ed;
    ed.S = LinearExponent(frac(2, 3));
    ed.U = {LinearExponent(0)};
    auto ed_exp = complexity_exponent({{LinearExponent(1), LinearExponent(frac(2, 3)), 2}}, ed);
    bool ed_ok = ed_exp.terms().size() == 1 && ed_exp.terms()[0] == LinearExponent(frac(2, 3));

    struct Toy {
        std::string name;
        NestedConfig cfg;
    };
    std::vector<Toy> toys = {
        {"or(8,3,1)", or_config(8, 3, 1, random_inputs(8, 40, 1))},
        {"or(6,3,2)", or_config(6, 3, 2, random_inputs(6, 40, 2))},
        {"checked_or(4,2)", checked_or_config(4, 2, random_inputs(8, 40, 3))},
        {"matrix(4,2,4,2)", matrix_config(4, 2, 4, 2, random_inputs(20, 24, 4))},
        {"matrix(3,2,8,3)", matrix_config(3, 2, 8, 3, random_inputs(27, 16, 5))},
    };
    int invalid = 0;
    double worst = 0;
    for (auto& toy : toys) {
        for (auto rule : {SlotRule::lowest, SlotRule::every}) {
            BuildOptions opt;
            opt.slots = rule;
            auto b = build_explicit(toy.cfg, opt);
            if (!validate(b.graph, toy.cfg.sink).ok()) ++invalid;
            std::vector<LevelDims> d;
            for (const auto& L : toy.cfg.levels) d.push_back({double(L.n), double(L.k), L.ell});
            double bound = complexity_bound(d, measure_profile(toy.cfg, rule).numeric());
            double ratio = to_double(complexity(b.graph).c0) / (bound * bound);
            worst = std::max(worst, ratio);
        }
    }
    o.detail << "symbolic mismatches=" << symbolic_bad << " element distinctness=" << ed_exp.str()
             << " toys invalid=" << invalid << " max C0/bound=" << fmt(worst);
    o.require(symbolic_bad == 0, "single-level formula");
    o.require(ed_ok, "element distinctness exponent");
    o.require(invalid == 0, "toy validation");
    o.require(worst <= 8, "C0 within 8x");
}

void tails(Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    auto grid = tail_grid();
    long b1 = 0, b2 = 0, bad = 0;
    for (const auto& t : grid) {
        (t.which == 1 ? b1 : b2)++;
        if (!t.ok) ++bad;
    }
    double dt = seconds_since(t0);
    o.detail << "bound1 points=" << b1 << " bound2 points=" << b2 << " violations=" << bad << " time=" << fmt(dt, 3) << "s";
    o.require(b1 >= 200, "grid size");
    o.require(b2 > 0, "bound2 coverage");
    o.require(bad == 0, "bounds dominate");
    o.require(dt < 60, "runtime");
}

void concentration(Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    auto rep = violation_rate({64, 128, 256}, ParamSet::published(), 1000, kSeed);
    double dt = seconds_since(t0);
    o.detail << "nonmonotone=" << rep.nonmonotone.size() << " gamma cap checked=" << rep.gamma_cap.checked
             << " failed=" << rep.gamma_cap.failed << " time=" << fmt(dt, 1) << "s";
    for (const auto& s : rep.nonmonotone) o.detail << "\n    nonmonotone: " << s;
    o.require(rep.monotone, "violation rates nonincreasing in n");
    o.require(rep.gamma_cap.failed == 0, "gamma cap");
    o.require(dt < 600, "runtime");
}

void update_scaling(Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    double worst = 0;
    std::uint64_t stream = 0;
    for (auto kind : {LoadKind::vertex, LoadKind::pair, LoadKind::triple}) {
        auto rep = update_size_scaling({64, 128, 256, 512}, ParamSet::published(), kind, kScalingTrials,
                                       Rng::split(kSeed, stream++));
        worst = std::max(worst, rep.max_abs_residual);
        const char* label = kind == LoadKind::vertex ? "vertex" : kind == LoadKind::pair ? "pair" : "triple";
        o.detail << label << " max residual=" << fmt(rep.max_abs_residual, 3) << "; ";
    }
    double dt = seconds_since(t0);
    o.detail << "time=" << fmt(dt, 1) << "s";
    o.require(worst <= 0.15, "slopes within 0.15");
    o.require(dt < 600, "runtime");
}

struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> all = {
        {1, "LP reproduction", lp_reproduction},
        {2, "LP optimum", lp_optimum},
        {3, "spot exponents", spot_exponents},
        {4, "rank reduction", rank_reduction},
        {5, "learning-graph framework", learning_graphs},
        {6, "nested calculus", nested_calculus},
        {7, "hypergeometric tails", tails},
        {8, "concentration scaling", concentration},
        {9, "update scaling", update_scaling},
    };
    int only = 0;
    if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) only = std::atoi(argv[2]);
    else if (argc != 1) {
        std::cerr << "usage: acceptance [--criterion N]\n";
        return 2;
    }
    int failed = 0, ran = 0;
    for (const auto& c : all) {
        if (only && c.id != only) continue;
        ++ran;
        Outcome o;
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        std::cout << "criterion " << c.id << " (" << c.name << "): " << (o.pass ? "PASS" : "FAIL") << "  "
                  << o.detail.str() << std::endl;
        failed += !o.pass;
    }
    if (!ran) {
        std::cerr << "no such criterion\n";
        return 2;
    }
    return failed ? 1 : 0;
}
