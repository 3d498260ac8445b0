#include "hsf/four_simplex.hpp"
#include "hsf/hypergeom.hpp"
#include "hsf/hypergraph.hpp"
#include "hsf/learning_graph.hpp"
#include "hsf/nested_johnson.hpp"
#include "hsf/nested_state.hpp"
#include "hsf/reduction.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace hsf;

constexpr int kOk = 0, kFailed = 1, kUsage = 2;

struct Common {
    std::uint64_t seed = 0;
    long trials = -1;
    int n = 0, r = 0;
    std::string eps = "1e-9";
    bool exact = false;
    std::string grid;
    std::string in, out;
};

std::vector<int> parse_grid(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            int v = std::stoi(tok, &used);
            if (used != tok.size() || v < 1) throw std::invalid_argument("");
            out.push_back(v);
        } catch (const std::exception&) {
            throw DomainError("bad --grid entry '" + tok + "'");
        }
    }
    return out;
}

std::string num(const Rational& q, bool exact) { return exact ? to_string(q) : to_fixed(q, 6); }

int simplex_find(const Common& o, std::ostream& os) {
    if (o.in.empty()) throw DomainError("simplex-find needs --in");
    Hypergraph g = Hypergraph::read_file(o.in);
    OracleView view(g);
    auto s = find_simplex(view);
    if (!s) {
        os << "no simplex\nqueries=" << view.query_count() << '\n';
        return kFailed;
    }
    os << "simplex";
    for (int v : s->vertices) os << ' ' << v;
    os << "\nqueries=" << view.query_count() << '\n';
    return kOk;
}

int reduce(const Common& o, std::ostream& os) {
    ReductionInput in;
    if (!o.in.empty()) {
        in = ReductionInput::read_file(o.in);
    } else {
        if (o.n <= 0 || o.r <= 0) throw DomainError("reduce needs --in or both --n and --r");
        in = single_planted_input(o.n, o.r, o.seed);
    }
    long trials = o.trials < 0 ? 10000 : o.trials;
    auto rep = run_reduction_trials(in, trials, o.seed);
    os << "exact=" << to_string(rep.exact) << '\n';
    os << "exact_value=" << to_fixed(rep.exact, 6) << '\n';
    os << "trials=" << rep.trials << '\n';
    os << "successes=" << rep.successes << '\n';
    os << "empirical=" << to_fixed(rep.rate, 6) << '\n';
    os << "stderr=" << to_fixed(rep.stderr_, 6) << '\n';
    os << "within_3sigma=" << (rep.within_3sigma ? "yes" : "no") << '\n';
    os << "decode_failures=" << rep.decode_failures + rep.foreign_decodes << '\n';
    for (const auto& d : rep.recovered) {
        os << "recovered " << d.v << ':';
        for (int v : d.simplex.vertices) os << ' ' << v;
        os << '\n';
    }
    if (!rep.any_input_simplex) {
        os << "note=no input hypergraph contains a simplex\n";
        return kFailed;
    }
    if (trials == 0) return kOk;
    return rep.within_3sigma && rep.decode_failures == 0 && rep.foreign_decodes == 0 ? kOk : kFailed;
}

int lg_eval(const Common& o, std::ostream& os) {
    if (o.in.empty()) throw DomainError("lg-eval needs --in");
    LearningGraph g = LearningGraph::read_file(o.in);
    auto rep = validate(g);
    os << "vertices=" << g.num_vertices() << "\nedges=" << g.num_edges() << "\ninputs=" << g.num_inputs() << '\n';
    for (const auto& is : rep.issues) os << "issue\t" << is.clause << '\t' << is.message << '\n';
    os << "valid=" << (rep.ok() ? "yes" : "no") << '\n';
    if (!rep.ok()) return kFailed;
    auto cx = complexity(g);
    for (int x = 0; x < g.num_inputs(); ++x) {
        os << "input " << x << "\tc0=" << num(c0(g, x), o.exact);
        if (g.is_one_input(x)) os << "\tc1=" << num(c1(g, x), o.exact);
        os << '\n';
    }
    os << "C0=" << num(cx.c0, o.exact) << "\nC1=" << num(cx.c1, o.exact) << "\ncomplexity=" << to_fixed(cx.value(), 6)
       << '\n';
    return kOk;
}

int nested_bound(const Common& o, std::ostream& os) {
    if (o.in.empty()) throw DomainError("nested-bound needs --in");
    NestedSpec spec = NestedSpec::read_file(o.in);
    if (spec.numeric) {
        double b = complexity_bound(spec.dims, spec.values);
        os << "bound=" << to_fixed(b, 6) << '\n';
        for (std::size_t i = 0; i < spec.dims.size(); ++i)
            for (int h = 1; h <= spec.dims[i].ell; ++h)
                os << "speciality " << i + 1 << '.' << h << '='
                   << num(stage_speciality(spec.dims, static_cast<int>(i) + 1, h), o.exact) << '\n';
        return kOk;
    }
    MaxExpr e = complexity_exponent(spec.levels, spec.exponents);
    os << "exponent=" << e.str() << '\n';
    if (e.names().empty()) os << "exponent_value=" << num(e.evaluate({}), o.exact) << '\n';
    for (std::size_t i = 0; i < spec.levels.size(); ++i)
        for (int h = 1; h <= spec.levels[i].ell; ++h)
            os << "speciality " << i + 1 << '.' << h << "=n^(" << stage_speciality_exponent(spec.levels, static_cast<int>(i) + 1, h).str()
               << ")\n";
    return kOk;
}

int lp_solve(const Common& o, bool all_roles, std::ostream& os) {
    auto sol = solve_lp(false);
    os << format_report(sol.params, o.exact);
    os << "lp_optimum=" << num(sol.t, o.exact) << '\n';
    os << "min_strict_margin=" << num(sol.check.min_strict_margin, o.exact) << '\n';
    for (const auto& c : sol.check.tight_strict) os << "tight\t" << c.constraint.label << '\n';
    if (all_roles) {
        auto alt = solve_lp(true);
        os << "lp_optimum_all_roles=" << num(alt.t, o.exact) << '\n';
    }
    return kOk;
}

int lp_check(const Common& o, bool all_roles, std::ostream& os) {
    ParamSet p = o.in.empty() ? ParamSet::published() : ParamSet::read_file(o.in);
    Rational eps = parse_rational(o.eps);
    os << format_report(p, o.exact);
    auto rep = admissible(p, eps, all_roles);
    for (const auto& v : rep.violations)
        os << "violation\t" << v.constraint.label << "\tmargin=" << num(v.margin, o.exact) << '\n';
    os << "admissible=" << (rep.ok ? "yes" : "no") << '\n';
    return rep.ok ? kOk : kFailed;
}

int concentration(const Common& o, const std::string& kind, std::ostream& os) {
    ParamSet p = o.in.empty() ? ParamSet::published() : ParamSet::read_file(o.in);
    if (kind == "tails") {
        bool ok = true;
        for (const auto& t : tail_grid()) {
            os << t.N << '\t' << t.M << '\t' << t.K << '\t' << num(t.delta, o.exact) << "\tbound" << t.which << '\t'
               << t.threshold << '\t' << to_fixed(to_double(t.exact), 6) << '\t' << to_fixed(t.bound, 6) << '\t'
               << (t.ok ? "ok" : "FAIL") << '\n';
            ok = ok && t.ok;
        }
        return ok ? kOk : kFailed;
    }
    std::vector<int> grid = parse_grid(o.grid.empty() ? (kind == "violations" ? "64,128,256" : "64,128,256,512") : o.grid);
    long trials = o.trials < 0 ? (kind == "violations" ? 1000 : 200) : o.trials;
    if (kind == "violations") {
        auto rep = violation_rate(grid, p, trials, o.seed);
        os << rep.to_tsv();
        for (const auto& s : rep.nonmonotone) os << "nonmonotone\t" << s << '\n';
        const auto& g = rep.gamma_cap;
        os << "gamma_cap\tchecked=" << g.checked << "\tfailed=" << g.failed << '\n';
        os << "gamma_cap_all\tchecked=" << g.checked_all << "\tfailed=" << g.failed_all << '\n';
        os << "quad_cap\tchecked=" << g.quad_checked << "\tfailed=" << g.quad_failed << '\n';
        return rep.monotone && g.failed == 0 ? kOk : kFailed;
    }
    LoadKind lk;
    if (kind == "vertex") lk = LoadKind::vertex;
    else if (kind == "pair") lk = LoadKind::pair;
    else if (kind == "triple") lk = LoadKind::triple;
    else throw DomainError("unknown --kind '" + kind + "'");
    auto rep = update_size_scaling(grid, p, lk, trials, o.seed);
    os << rep.to_tsv();
    os << "max_abs_residual=" << to_fixed(rep.max_abs_residual, 6) << '\n';
    return rep.max_abs_residual <= 0.15 ? kOk : kFailed;
}

void add_common(CLI::App* sub, Common& o, bool random) {
    sub->add_option("--in", o.in, "input file");
    sub->add_option("--out", o.out, "write the report here instead of stdout");
    sub->add_flag("--exact", o.exact, "print exact rationals");
    if (random) {
        sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
        sub->add_option("--trials", o.trials, "Monte Carlo trials");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hypergraph simplex finding: reductions, learning graphs and exponent programs"};
    app.require_subcommand(1);
    Common o;
    bool all_roles = false;
    std::string kind = "violations";

    auto* sf = app.add_subcommand("simplex-find", "search a hypergraph file for a simplex");
    add_common(sf, o, false);
    auto* rd = app.add_subcommand("reduce", "rank-increase reduction trials");
    add_common(rd, o, true);
    rd->add_option("--n", o.n, "vertices per side (planted instance)");
    rd->add_option("--r", o.r, "input rank (planted instance)");
    auto* lg = app.add_subcommand("lg-eval", "validate a learning graph and compute its complexities");
    add_common(lg, o, false);
    auto* nb = app.add_subcommand("nested-bound", "nested-walk learning-graph bound from a config file");
    add_common(nb, o, false);
    auto* ls = app.add_subcommand("lp-solve", "solve the 4-simplex exponent program");
    add_common(ls, o, false);
    ls->add_flag("--all-roles", all_roles, "also solve with every role assignment of the last constraint family");
    auto* lc = app.add_subcommand("lp-check", "evaluate a parameter file (default: published values)");
    add_common(lc, o, false);
    lc->add_option("--eps", o.eps, "margin for strict constraints")->capture_default_str();
    lc->add_flag("--all-roles", all_roles, "check every role assignment of the last constraint family");
    auto* cc = app.add_subcommand("concentration", "tail bounds and Monte Carlo concentration checks");
    add_common(cc, o, true);
    cc->add_option("--kind", kind, "tails | violations | vertex | pair | triple")->capture_default_str();
    cc->add_option("--grid", o.grid, "comma-separated n values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    std::ostringstream os;
    int rc = kOk;
    try {
        if (*sf) rc = simplex_find(o, os);
        else if (*rd) rc = reduce(o, os);
        else if (*lg) rc = lg_eval(o, os);
        else if (*nb) rc = nested_bound(o, os);
        else if (*ls) rc = lp_solve(o, all_roles, os);
        else if (*lc) rc = lp_check(o, all_roles, os);
        else if (*cc) rc = concentration(o, kind, os);
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    if (o.out.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) {
            std::cerr << "error: cannot write " << o.out << '\n';
            return kUsage;
        }
        f << os.str();
    }
    return rc;
}
