#include "hsf/four_simplex.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace hsf {

std::string Level::label() const {
    std::string s;
    for (int i : idx) s += static_cast<char>('0' + i);
    return s;
}

std::string Level::param_name() const {
    static const char cls[] = {'a', 'b', 'c', 'd'};
    return std::string(1, cls[idx.size() - 1]) + "_" + label();
}

const std::vector<Level>& levels() {
    static const std::vector<Level> all = [] {
        std::vector<Level> out;
        for (int size = 1; size <= 4; ++size)
            for (int mask = 1; mask < 32; ++mask) {
                if (__builtin_popcount(mask) != size) continue;
                Level l;
                for (int i = 0; i < 5; ++i)
                    if (mask >> i & 1) l.idx.push_back(i + 1);
                out.push_back(l);
            }
        // masks are not lexicographic; sort within class
        std::stable_sort(out.begin(), out.end(), [](const Level& x, const Level& y) {
            return x.idx.size() != y.idx.size() ? x.idx.size() < y.idx.size() : x.idx < y.idx;
        });
        return out;
    }();
    return all;
}

int level_index(const std::vector<int>& idx) {
    const auto& ls = levels();
    for (std::size_t i = 0; i < ls.size(); ++i)
        if (ls[i].idx == idx) return static_cast<int>(i);
    return -1;
}

namespace {
std::vector<int> sorted(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
}
// all subsets of idx with `size` elements
std::vector<std::vector<int>> subsets(const std::vector<int>& idx, std::size_t size) {
    std::vector<std::vector<int>> out;
    int n = static_cast<int>(idx.size());
    for (int mask = 0; mask < (1 << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != size) continue;
        std::vector<int> s;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1) s.push_back(idx[i]);
        out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
}
}  // namespace

LinearExponent param(const std::vector<int>& idx) {
    int li = level_index(sorted(idx));
    if (li < 0) throw DomainError("no parameter for that index set");
    return LinearExponent::var(levels()[li].param_name());
}

LinearExponent m_expr(const std::vector<int>& idx) {
    auto s = sorted(idx);
    LinearExponent e;
    if (s.size() == 3) {
        for (const auto& t : subsets(s, 2)) e += param(t);
        for (const auto& t : subsets(s, 1)) e -= param(t);
    } else if (s.size() == 4) {
        for (const auto& t : subsets(s, 3)) e += param(t);
        for (const auto& t : subsets(s, 2)) e -= param(t);
        for (const auto& t : subsets(s, 1)) e += param(t);
    } else {
        throw DomainError("m is defined for triples and quadruples");
    }
    return e;
}

LinearExponent nu(const Level& l) {
    switch (l.idx.size()) {
        case 1: return LinearExponent(1);
        case 2: return param({l.idx[0]}) + param({l.idx[1]});
        default: return m_expr(l.idx);
    }
}

LinearExponent kappa(const Level& l) { return param(l.idx); }

std::vector<LinearExponent> upsilon(const Level& l) {
    if (l.idx.size() == 4) return {LinearExponent(0)};
    std::vector<LinearExponent> out;
    for (const auto& q : levels()) {
        if (q.idx.size() != 4) continue;
        if (std::includes(q.idx.begin(), q.idx.end(), l.idx.begin(), l.idx.end()))
            out.push_back(param(q.idx) - param(l.idx));
    }
    return out;
}

MaxExpr stage_expr(int s) {
    const auto& ls = levels();
    if (s < 0 || s >= static_cast<int>(ls.size())) throw DomainError("stage index out of range");
    LinearExponent base;
    for (int j = 0; j <= s; ++j) base += nu(ls[j]) - kappa(ls[j]);
    base = base * Rational(1, 2) + kappa(ls[s]) * Rational(1, 2);
    std::vector<LinearExponent> terms;
    for (const auto& u : upsilon(ls[s])) terms.push_back(base + u);
    return MaxExpr::max_of(terms);
}

MaxExpr setup_expr() {
    std::vector<LinearExponent> terms;
    for (const auto& q : levels())
        if (q.idx.size() == 4) terms.push_back(param(q.idx));
    return MaxExpr::max_of(terms);
}

ParamSet ParamSet::published() {
    static const std::map<std::string, const char*> table = {
        {"a_1", "0.30435"},  {"a_2", "0.65217"},  {"a_3", "0.82609"},  {"a_4", "0.91304"},
        {"a_5", "0.95652"},  {"b_12", "0.95652"}, {"b_13", "1.13043"}, {"b_14", "1.21739"},
        {"b_15", "1.16579"}, {"b_23", "1.45059"}, {"b_24", "1.45059"}, {"b_25", "1.54567"},
        {"b_34", "1.49802"}, {"b_35", "1.64032"}, {"b_45", "1.75494"}, {"c_123", "1.75494"},
        {"c_124", "1.75494"}, {"c_125", "1.75494"}, {"c_134", "1.80237"}, {"c_135", "1.84958"},
        {"c_145", "1.87440"}, {"c_234", "1.95477"}, {"c_235", "2.04985"}, {"c_245", "2.13966"},
        {"c_345", "2.07817"}, {"d_1234", "2.25911"}, {"d_1235", "2.25911"}, {"d_1245", "2.25911"},
        {"d_1345", "2.16864"}, {"d_2345", "2.13966"},
    };
    Assignment a;
    for (const auto& [k, v] : table) a[k] = parse_rational(v);
    return from_assignment(a);
}

ParamSet ParamSet::from_assignment(const Assignment& a) {
    ParamSet p;
    std::string missing;
    const auto& ls = levels();
    for (std::size_t i = 0; i < ls.size(); ++i) {
        auto it = a.find(ls[i].param_name());
        if (it == a.end())
            missing += (missing.empty() ? "" : ", ") + ls[i].param_name();
        else
            p.v_[i] = it->second;
    }
    if (!missing.empty()) throw DomainError("missing parameters: " + missing);
    return p;
}

Rational& ParamSet::at(const std::vector<int>& idx) {
    int li = level_index(sorted(idx));
    if (li < 0) throw DomainError("no parameter for that index set");
    return v_[li];
}

const Rational& ParamSet::at(const std::vector<int>& idx) const {
    int li = level_index(sorted(idx));
    if (li < 0) throw DomainError("no parameter for that index set");
    return v_[li];
}

Assignment ParamSet::assignment() const {
    Assignment a;
    const auto& ls = levels();
    for (std::size_t i = 0; i < ls.size(); ++i) a[ls[i].param_name()] = v_[i];
    return a;
}

ParamSet ParamSet::parse(std::string_view text) {
    Assignment a;
    std::map<std::string, int> valid;
    for (const auto& l : levels()) valid[l.param_name()] = 1;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw FormatError(line_no, "expected name=value");
        std::string key(trim(line.substr(0, eq)));
        if (key == "setup_exponent" || key == "objective" || key.rfind("stage:", 0) == 0) continue;
        if (!valid.count(key)) throw FormatError(line_no, "unknown parameter '" + key + "'");
        if (a.count(key)) throw FormatError(line_no, "parameter '" + key + "' given twice");
        try {
            a[key] = parse_rational(line.substr(eq + 1));
        } catch (const DomainError& e) {
            throw FormatError(line_no, e.what());
        }
    }
    try {
        return from_assignment(a);
    } catch (const DomainError& e) {
        throw FormatError(line_no, e.what());
    }
}

ParamSet ParamSet::read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError(0, "cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::vector<Constraint> admissibility_constraints(bool all_roles) {
    std::vector<Constraint> out;
    auto add = [&](int fam, std::string label, LinearExponent lhs, bool strict) {
        out.push_back(Constraint{fam, std::move(label), std::move(lhs), strict});
    };
    const auto& ls = levels();
    auto cls = [&](std::size_t size) {
        std::vector<Level> v;
        for (const auto& l : ls)
            if (l.idx.size() == size) v.push_back(l);
        return v;
    };
    for (const auto& l : cls(2))
        add(1, "b_" + l.label() + " <= a_" + std::to_string(l.idx[0]) + " + a_" + std::to_string(l.idx[1]),
            kappa(l) - nu(l), false);
    for (const auto& l : cls(3)) add(2, "c_" + l.label() + " <= m_" + l.label(), kappa(l) - m_expr(l.idx), false);
    for (const auto& l : cls(4)) add(3, "d_" + l.label() + " <= m_" + l.label(), kappa(l) - m_expr(l.idx), false);
    for (const auto& l : cls(2))
        for (int e : l.idx)
            add(4, "a_" + std::to_string(e) + " < b_" + l.label(), param({e}) - param(l.idx), true);
    for (const auto& l : cls(3))
        for (const auto& p : subsets(l.idx, 2))
            add(5, "b_" + Level{p}.label() + " < m_" + l.label(), param(p) - m_expr(l.idx), true);
    for (const auto& l : cls(4))
        for (const auto& t : subsets(l.idx, 3))
            add(6, "c_" + Level{t}.label() + " < m_" + l.label(), param(t) - m_expr(l.idx), true);
    for (const auto& q : cls(4)) {
        for (int li = 0; li < 4; ++li) {
            if (!all_roles && li != 3) continue;
            int el = q.idx[li];
            std::vector<int> rest;
            for (int x : q.idx)
                if (x != el) rest.push_back(x);
            for (int ii = 0; ii < 3; ++ii) {
                if (!all_roles && ii != 0) continue;
                int i = rest[ii], j = rest[(ii + 1) % 3], k = rest[(ii + 2) % 3];
                LinearExponent lhs = param({i, el}) + param({j, el}) + param({k, el}) - param({el}) -
                                     param({i, j, el}) - param({i, k, el});
                add(7, "quad " + q.label() + " i=" + std::to_string(i) + " l=" + std::to_string(el), lhs, true);
            }
        }
    }
    return out;
}

AdmissibilityReport admissible(const ParamSet& p, const Rational& eps, bool all_roles) {
    AdmissibilityReport rep;
    auto a = p.assignment();
    bool first = true;
    for (const auto& c : admissibility_constraints(all_roles)) {
        Rational margin = -c.lhs.evaluate(a);
        if (c.strict) {
            if (first || margin < rep.min_strict_margin) rep.min_strict_margin = margin;
            first = false;
        }
        bool pass = c.strict ? margin > eps : margin >= -eps;
        if (!pass) {
            rep.ok = false;
            rep.violations.push_back({c, margin});
            if (c.strict && margin >= 0) rep.tight_strict.push_back({c, margin});
        }
    }
    return rep;
}

StageValues stage_exponents(const ParamSet& p) {
    StageValues sv;
    auto a = p.assignment();
    sv.setup = setup_expr().evaluate(a);
    sv.objective = sv.setup;
    for (int s = 0; s < 30; ++s) {
        sv.stages.push_back(stage_expr(s).evaluate(a));
        sv.objective = std::max(sv.objective, sv.stages.back());
    }
    return sv;
}

Rational objective(const ParamSet& p) { return stage_exponents(p).objective; }

Rational class_bound(const Level& l) { return static_cast<long>(l.idx.size()); }

namespace {

constexpr int kT = 30;  // epigraph variable index

std::vector<Rational> row_of(const LinearExponent& e, Rational& constant) {
    std::vector<Rational> row(31, Rational(0));
    const auto& ls = levels();
    for (const auto& [name, coef] : e.coeffs()) {
        int idx = -1;
        for (std::size_t i = 0; i < ls.size(); ++i)
            if (ls[i].param_name() == name) idx = static_cast<int>(i);
        if (idx < 0) throw DomainError("unknown LP variable " + name);
        row[idx] = coef;
    }
    constant = e.constant();
    return row;
}

// non-strict admissibility plus class boxes; t column zero
void add_feasibility(LpProblem& lp, bool all_roles) {
    for (const auto& c : admissibility_constraints(all_roles)) {
        Rational k;
        auto row = row_of(c.lhs, k);
        lp.A.push_back(row);
        lp.b.push_back(-k);
    }
    const auto& ls = levels();
    for (std::size_t i = 0; i < ls.size(); ++i) {
        std::vector<Rational> row(31, Rational(0));
        row[i] = 1;
        lp.A.push_back(row);
        lp.b.push_back(class_bound(ls[i]));
    }
}

// every stage term and every d_q at most t
void add_epigraph(LpProblem& lp) {
    std::vector<LinearExponent> terms;
    for (int s = 0; s < 30; ++s) {
        auto e = stage_expr(s);
        terms.insert(terms.end(), e.terms().begin(), e.terms().end());
    }
    auto setup = setup_expr();
    terms.insert(terms.end(), setup.terms().begin(), setup.terms().end());
    for (const auto& t : terms) {
        Rational k;
        auto row = row_of(t, k);
        row[kT] = -1;
        lp.A.push_back(row);
        lp.b.push_back(-k);
    }
}

}  // namespace

LpSolution solve_lp(bool all_roles) {
    LpProblem lp;
    lp.num_vars = 31;
    add_feasibility(lp, all_roles);
    add_epigraph(lp);
    lp.c.assign(31, Rational(0));
    lp.c[kT] = -1;
    auto res = solve_exact(lp);
    if (res.status != LpStatus::optimal)
        throw DomainError(res.status == LpStatus::infeasible ? "LP infeasible" : "LP unbounded");
    LpSolution sol;
    for (int i = 0; i < 30; ++i) sol.params[i] = res.x[i];
    sol.t = res.x[kT];
    sol.pivots = res.pivots;
    // box rows are not part of the constraint count
    sol.constraint_rows = lp.A.size() - 30;
    sol.check = admissible(sol.params, Rational(1, 1000000000), all_roles);
    return sol;
}

Rational solve_epigraph(const ParamSet& p) {
    auto a = p.assignment();
    LpProblem lp;
    lp.num_vars = 1;
    lp.c = {Rational(-1)};
    auto pin = [&](const LinearExponent& t) {
        lp.A.push_back({Rational(-1)});
        lp.b.push_back(-t.evaluate(a));
    };
    for (int s = 0; s < 30; ++s) {
        auto e = stage_expr(s);
        for (const auto& t : e.terms()) pin(t);
    }
    auto setup = setup_expr();
    for (const auto& t : setup.terms()) pin(t);
    auto res = solve_exact(lp);
    if (res.status != LpStatus::optimal) throw DomainError("epigraph LP not optimal");
    return res.x[0];
}

ParamSet random_vertex(std::uint64_t seed, bool all_roles) {
    Rng rng(seed);
    LpProblem lp;
    lp.num_vars = 31;
    add_feasibility(lp, all_roles);
    lp.c.assign(31, Rational(0));
    for (int i = 0; i < 30; ++i) lp.c[i] = Rational(static_cast<long>(rng.below(2001)) - 1000, 1000);
    for (auto& x : lp.c) x.canonicalize();
    auto res = solve_exact(lp);
    if (res.status != LpStatus::optimal) throw DomainError("random_vertex: LP not optimal");
    ParamSet p;
    for (int i = 0; i < 30; ++i) p[i] = res.x[i];
    return p;
}

std::string format_report(const ParamSet& p, bool exact) {
    auto fmt = [&](const Rational& q) { return exact ? to_string(q) : to_fixed(q, 6); };
    std::ostringstream os;
    const auto& ls = levels();
    for (std::size_t i = 0; i < ls.size(); ++i) os << ls[i].param_name() << '=' << fmt(p[static_cast<int>(i)]) << '\n';
    auto sv = stage_exponents(p);
    os << "setup_exponent=" << fmt(sv.setup) << '\n';
    for (std::size_t i = 0; i < ls.size(); ++i) os << "stage:" << ls[i].label() << '=' << fmt(sv.stages[i]) << '\n';
    os << "objective=" << fmt(sv.objective) << '\n';
    return os.str();
}

}  // namespace hsf
