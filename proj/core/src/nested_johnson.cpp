#include "hsf/nested_johnson.hpp"

#include "hsf/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace hsf {

// ---- exponent calculus ----

MaxExpr complexity_exponent(const std::vector<LevelExp>& levels, const ExponentProfile& p) {
    if (levels.empty()) throw DomainError("need at least one level");
    if (p.U.size() > levels.size()) throw DomainError("more U terms than levels");
    std::vector<LinearExponent> terms;
    if (p.S) terms.push_back(*p.S * Rational(2));
    LinearExponent outer;  // sum_{j<=i} l_j (n_j - k_j)
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto& L = levels[i];
        if (L.ell < 1) throw DomainError("ell must be at least 1 at level " + std::to_string(i + 1));
        if (L.n.is_constant() && L.k.is_constant() && (L.k.constant() < 0 || L.k.constant() > L.n.constant()))
            throw DomainError("need 0 <= k <= n at level " + std::to_string(i + 1));
        outer += (L.n - L.k) * Rational(L.ell);
        if (i < p.U.size() && p.U[i]) terms.push_back(outer + L.k + *p.U[i] * Rational(2));
    }
    if (p.C) terms.push_back(outer + *p.C * Rational(2));
    if (terms.empty()) throw DomainError("every cost term is zero");
    return MaxExpr::max_of(terms).sqrt();
}

double complexity_bound(const std::vector<LevelDims>& levels, const NumericProfile& p) {
    if (levels.empty()) throw DomainError("need at least one level");
    if (p.U.size() > levels.size()) throw DomainError("more U terms than levels");
    if (p.S < 0 || p.C < 0) throw DomainError("cost terms must be nonnegative");
    double sum = p.S * p.S, outer = 1;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto& L = levels[i];
        if (L.ell < 1 || L.k < L.ell || L.n < L.k)
            throw DomainError("need 1 <= ell <= k <= n at level " + std::to_string(i + 1));
        outer *= std::pow(L.n / L.k, L.ell);
        double u = i < p.U.size() ? p.U[i] : 0.0;
        if (u < 0) throw DomainError("cost terms must be nonnegative");
        sum += outer * L.k * u * u;
    }
    sum += outer * p.C * p.C;
    return std::sqrt(sum);
}

namespace {

long as_long(double x, const char* what) {
    long v = std::lround(x);
    if (std::fabs(x - static_cast<double>(v)) > 1e-9) throw DomainError(std::string(what) + " must be an integer");
    return v;
}

struct IntDims {
    long n, k, ell;
};

std::vector<IntDims> int_dims(const std::vector<LevelDims>& levels) {
    std::vector<IntDims> out;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        IntDims d{as_long(levels[i].n, "n"), as_long(levels[i].k, "k"), levels[i].ell};
        if (d.ell < 1 || d.k < d.ell || d.n < d.k)
            throw DomainError("need 1 <= ell <= k <= n at level " + std::to_string(i + 1));
        out.push_back(d);
    }
    return out;
}

// state counts for one level
Rational setup_all(const IntDims& d, SlotRule r) {
    Rational x = falling(d.n, d.k - d.ell);
    return r == SlotRule::every ? Rational(x * binomial(d.k, d.ell)) : x;
}
Rational setup_flow(const IntDims& d, SlotRule r) {
    Rational x = falling(d.n - d.ell, d.k - d.ell);
    return r == SlotRule::every ? Rational(x * binomial(d.k, d.ell)) : x;
}
// h-1 certificate elements loaded on top of the setup
Rational partial_all(const IntDims& d, long h, SlotRule r) {
    Rational x = falling(d.n, d.k - d.ell + h - 1);
    return r == SlotRule::every ? Rational(x * binomial(d.k, d.ell - h + 1)) : x;
}
Rational partial_flow(const IntDims& d, long h, SlotRule r) {
    Rational x = setup_flow(d, r) * falling(d.ell, h - 1);
    return r == SlotRule::every ? Rational(x * binomial(d.ell, h - 1)) : x;
}

}  // namespace

StageCounts stage_counts(const std::vector<LevelDims>& levels, int i, int h, SlotRule rule) {
    auto dims = int_dims(levels);
    const int r = static_cast<int>(dims.size());
    if (i < 1 || i > r) throw DomainError("level index out of range");
    const auto& di = dims[static_cast<std::size_t>(i - 1)];
    if (h < 0 || h > di.ell) throw DomainError("sub-step h must lie in [0, ell_i]");
    StageCounts s{1, 1, 1, 1};
    if (h == 0) {
        for (int j = 0; j < i - 1; ++j) {
            s.c *= setup_all(dims[static_cast<std::size_t>(j)], rule);
            s.c1 *= setup_flow(dims[static_cast<std::size_t>(j)], rule);
        }
        s.d = setup_all(di, rule);
        s.d1 = setup_flow(di, rule);
        return s;
    }
    for (int j = 0; j < r; ++j) {
        const auto& dj = dims[static_cast<std::size_t>(j)];
        if (j < i - 1) {
            s.c *= partial_all(dj, dj.ell + 1, rule);
            s.c1 *= partial_flow(dj, dj.ell + 1, rule);
        } else if (j == i - 1) {
            s.c *= partial_all(dj, h, rule);
            s.c1 *= partial_flow(dj, h, rule);
        } else {
            s.c *= setup_all(dj, rule);
            s.c1 *= setup_flow(dj, rule);
        }
    }
    const long stars = di.ell - h + 1;
    const long free = di.n - (di.k - di.ell + h - 1);
    s.d = rule == SlotRule::every ? stars * free : free;
    s.d1 = rule == SlotRule::every ? stars * stars : stars;
    return s;
}

Rational stage_speciality(const std::vector<LevelDims>& levels, int i, int h, SlotRule rule) {
    return stage_counts(levels, i, h, rule).speciality();
}

LinearExponent stage_speciality_exponent(const std::vector<LevelExp>& levels, int i, int h) {
    if (i < 1 || i > static_cast<int>(levels.size())) throw DomainError("level index out of range");
    const auto& L = levels[static_cast<std::size_t>(i - 1)];
    if (h < 0 || h > L.ell) throw DomainError("sub-step h must lie in [0, ell_i]");
    if (h == 0) return LinearExponent(0);
    LinearExponent e = L.n + (L.n - L.k) * Rational(h - 1);
    for (int j = 0; j < i - 1; ++j) {
        const auto& O = levels[static_cast<std::size_t>(j)];
        e += (O.n - O.k) * Rational(O.ell);
    }
    return e;
}

// ---- config files ----

NestedSpec NestedSpec::parse(const std::string& text) {
    NestedSpec spec;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::map<int, std::pair<int, std::vector<std::string>>> level_lines;
    std::map<std::string, std::pair<int, std::string>> cost;
    bool mode_seen = false;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string_view::npos) throw FormatError(line_no, "expected 'key: value'");
        std::string key(trim(line.substr(0, colon)));
        std::string val(trim(line.substr(colon + 1)));
        if (key == "mode") {
            if (mode_seen) throw FormatError(line_no, "duplicate mode");
            if (val != "numeric" && val != "exponent") throw FormatError(line_no, "mode must be numeric or exponent");
            spec.numeric = val == "numeric";
            mode_seen = true;
        } else if (key.rfind("level", 0) == 0) {
            auto tok = split_ws(key);
            if (tok.size() != 2) throw FormatError(line_no, "expected 'level <i>: n k ell'");
            int idx = 0;
            try {
                std::size_t used = 0;
                idx = std::stoi(tok[1], &used);
                if (used != tok[1].size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw FormatError(line_no, "bad level index '" + tok[1] + "'");
            }
            auto vals = split_ws(val);
            if (vals.size() != 3) throw FormatError(line_no, "level needs n k ell");
            if (!level_lines.emplace(idx, std::make_pair(line_no, vals)).second)
                throw FormatError(line_no, "duplicate level " + tok[1]);
        } else if (key == "S" || key == "C" || key.rfind("U_", 0) == 0) {
            if (!cost.emplace(key, std::make_pair(line_no, val)).second) throw FormatError(line_no, "duplicate " + key);
        } else {
            throw FormatError(line_no, "unknown key '" + key + "'");
        }
    }
    if (level_lines.empty()) throw FormatError(line_no, "no levels given");
    int expect = 1;
    for (const auto& [idx, entry] : level_lines) {
        const auto& [ln, vals] = entry;
        if (idx != expect) throw FormatError(ln, "levels must be numbered 1.." + std::to_string(level_lines.size()));
        ++expect;
        int ell = 0;
        try {
            Rational e = parse_rational(vals[2]);
            if (e.get_den() != 1 || e < 1) throw DomainError("");
            ell = static_cast<int>(e.get_num().get_si());
        } catch (const std::exception&) {
            throw FormatError(ln, "ell must be a positive integer");
        }
        try {
            if (spec.numeric) {
                spec.dims.push_back({to_double(parse_rational(vals[0])), to_double(parse_rational(vals[1])), ell});
            } else {
                spec.levels.push_back({LinearExponent::parse(vals[0]), LinearExponent::parse(vals[1]), ell});
            }
        } catch (const FormatError& e) {
            throw FormatError(ln, e.what());
        } catch (const std::exception& e) {
            throw FormatError(ln, e.what());
        }
    }
    const std::size_t r = level_lines.size();
    spec.exponents.U.assign(r, std::nullopt);
    spec.values.U.assign(r, 0.0);
    for (const auto& [key, entry] : cost) {
        const auto& [ln, val] = entry;
        std::size_t slot = 0;
        if (key.rfind("U_", 0) == 0) {
            try {
                std::size_t used = 0;
                int i = std::stoi(key.substr(2), &used);
                if (used != key.size() - 2 || i < 1 || static_cast<std::size_t>(i) > r) throw std::invalid_argument("");
                slot = static_cast<std::size_t>(i);
            } catch (const std::exception&) {
                throw FormatError(ln, "bad update term '" + key + "'");
            }
        }
        try {
            if (spec.numeric) {
                double x = val == "none" ? 0.0 : to_double(parse_rational(val));
                if (x < 0) throw FormatError(ln, "cost terms must be nonnegative");
                if (key == "S") spec.values.S = x;
                else if (key == "C") spec.values.C = x;
                else spec.values.U[slot - 1] = x;
            } else {
                std::optional<LinearExponent> x;
                if (val != "none") x = LinearExponent::parse(val);
                if (key == "S") spec.exponents.S = x;
                else if (key == "C") spec.exponents.C = x;
                else spec.exponents.U[slot - 1] = x;
            }
        } catch (const FormatError& e) {
            throw FormatError(ln, e.what());
        } catch (const std::exception& e) {
            throw FormatError(ln, e.what());
        }
    }
    return spec;
}

NestedSpec NestedSpec::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(0, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

// ---- explicit construction ----

namespace {

struct Arc {
    int u, v;  // state ids
};

struct StageSkeleton {
    std::string name;
    int level = 0;  // 1-based
    int h = 0;      // 0 = setup
    std::vector<int> begin;  // state ids, sorted
    std::vector<Arc> arcs;
};

struct Skeleton {
    std::vector<StateTuple> states;
    std::map<StateTuple, int> id;
    std::vector<IndexSet> labels;
    std::vector<StageSkeleton> stages;
    std::vector<int> full;  // state ids after the last update

    int intern(const StateTuple& s, const NestedConfig& cfg) {
        auto [it, fresh] = id.emplace(s, static_cast<int>(states.size()));
        if (fresh) {
            states.push_back(s);
            IndexSet lab = cfg.data(s);
            std::sort(lab.begin(), lab.end());
            labels.push_back(std::move(lab));
        }
        return it->second;
    }
};

// every ordered choice of m distinct elements of [n] avoiding `taken`
void for_each_sequence(int n, int m, std::vector<int>& cur, std::vector<char>& used,
                       const std::function<void(const std::vector<int>&)>& f) {
    if (static_cast<int>(cur.size()) == m) {
        f(cur);
        return;
    }
    for (int x = 0; x < n; ++x) {
        if (used[static_cast<std::size_t>(x)]) continue;
        used[static_cast<std::size_t>(x)] = 1;
        cur.push_back(x);
        for_each_sequence(n, m, cur, used, f);
        cur.pop_back();
        used[static_cast<std::size_t>(x)] = 0;
    }
}

std::vector<LevelDims> dims_of(const NestedConfig& cfg) {
    std::vector<LevelDims> d;
    for (const auto& L : cfg.levels) d.push_back({static_cast<double>(L.n), static_cast<double>(L.k), L.ell});
    return d;
}

Skeleton build_skeleton(const NestedConfig& cfg, SlotRule rule, long max_edges) {
    const int r = static_cast<int>(cfg.levels.size());
    if (r < 1) throw DomainError("need at least one level");
    if (!cfg.data) throw DomainError("config has no data structure");
    auto dims = dims_of(cfg);
    {
        Rational total = 0;
        for (int i = 1; i <= r; ++i)
            for (int h = 0; h <= cfg.levels[static_cast<std::size_t>(i - 1)].ell; ++h) {
                auto c = stage_counts(dims, i, h, rule);
                total += c.c * c.d;
            }
        if (total > max_edges)
            throw DomainError("explicit build needs about " + to_string(total) + " L-edges (limit " +
                              std::to_string(max_edges) + ")");
    }
    Skeleton sk;
    StateTuple root;
    for (const auto& L : cfg.levels) root.emplace_back(L.k);
    std::vector<int> frontier{sk.intern(root, cfg)};

    auto run = [&](StageSkeleton st, const std::function<void(const StateTuple&, std::vector<StateTuple>&)>& expand) {
        st.begin = frontier;
        std::vector<int> next;
        for (int u : frontier) {
            std::vector<StateTuple> outs;
            StateTuple s = sk.states[static_cast<std::size_t>(u)];
            expand(s, outs);
            for (auto& o : outs) {
                int v = sk.intern(o, cfg);
                st.arcs.push_back({u, v});
                next.push_back(v);
            }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        frontier = std::move(next);
        sk.stages.push_back(std::move(st));
    };

    for (int i = 0; i < r; ++i) {
        const auto L = cfg.levels[static_cast<std::size_t>(i)];
        const int m = L.k - L.ell;
        if (m == 0) continue;  // nothing to load; the all-star state is already set up
        StageSkeleton st;
        st.name = "setup " + std::to_string(i + 1);
        st.level = i + 1;
        run(std::move(st), [&](const StateTuple& s, std::vector<StateTuple>& outs) {
            std::vector<std::vector<int>> slot_sets;
            if (rule == SlotRule::lowest) {
                std::vector<int> sl(static_cast<std::size_t>(m));
                for (int t = 0; t < m; ++t) sl[static_cast<std::size_t>(t)] = t;
                slot_sets.push_back(sl);
            } else {
                for_each_subset(L.k, m, [&](const std::vector<int>& sub) {
                    std::vector<int> sl(sub);
                    for (int& x : sl) --x;
                    slot_sets.push_back(std::move(sl));
                    return true;
                });
                if (m == 0) slot_sets.assign(1, {});
            }
            std::vector<int> cur;
            std::vector<char> used(static_cast<std::size_t>(L.n), 0);
            for_each_sequence(L.n, m, cur, used, [&](const std::vector<int>& seq) {
                for (const auto& sl : slot_sets) {
                    std::vector<int> slots(static_cast<std::size_t>(L.k), OrderedPartialSubset::kStar);
                    for (int t = 0; t < m; ++t) slots[static_cast<std::size_t>(sl[static_cast<std::size_t>(t)])] = seq[static_cast<std::size_t>(t)];
                    StateTuple o = s;
                    o[static_cast<std::size_t>(i)] = OrderedPartialSubset::from_slots(std::move(slots));
                    outs.push_back(std::move(o));
                }
            });
        });
    }
    for (int i = 0; i < r; ++i) {
        const auto L = cfg.levels[static_cast<std::size_t>(i)];
        for (int h = 1; h <= L.ell; ++h) {
            StageSkeleton st;
            st.name = "update " + std::to_string(i + 1) + "." + std::to_string(h);
            st.level = i + 1;
            st.h = h;
            run(std::move(st), [&](const StateTuple& s, std::vector<StateTuple>& outs) {
                const auto& a = s[static_cast<std::size_t>(i)];
                for (int v = 0; v < L.n; ++v) {
                    if (a.contains(v)) continue;
                    if (rule == SlotRule::lowest) {
                        StateTuple o = s;
                        o[static_cast<std::size_t>(i)] = a.with(v);
                        outs.push_back(std::move(o));
                    } else {
                        for (int p = 0; p < a.capacity(); ++p) {
                            if (a[p] != OrderedPartialSubset::kStar) continue;
                            auto slots = a.slots();
                            slots[static_cast<std::size_t>(p)] = v;
                            StateTuple o = s;
                            o[static_cast<std::size_t>(i)] = OrderedPartialSubset::from_slots(std::move(slots));
                            outs.push_back(std::move(o));
                        }
                    }
                }
            });
        }
    }
    sk.full = frontier;
    return sk;
}

OrderedPartialSubset without(const OrderedPartialSubset& a, const IndexSet& cert) {
    auto slots = a.slots();
    for (int& x : slots)
        if (x != OrderedPartialSubset::kStar && std::binary_search(cert.begin(), cert.end(), x)) x = OrderedPartialSubset::kStar;
    return OrderedPartialSubset::from_slots(std::move(slots));
}

IndexSet sorted_cert(IndexSet c) {
    std::sort(c.begin(), c.end());
    return c;
}

// setup parts A'_1..A'_upto of s for input y, peeling certificates level by level
StateTuple setup_parts(const NestedConfig& cfg, int y, const StateTuple& s, int upto) {
    StateTuple outer;
    for (int j = 0; j < upto; ++j) {
        IndexSet c = sorted_cert(cfg.certificate(y, j + 1, outer));
        outer.push_back(without(s[static_cast<std::size_t>(j)], c));
    }
    return outer;
}

bool disjoint(const std::vector<int>& elems, const IndexSet& cert) {
    for (int x : elems)
        if (x != OrderedPartialSubset::kStar && std::binary_search(cert.begin(), cert.end(), x)) return false;
    return true;
}

// per-arc flows of one stage for input y given the inflow at begin states
std::map<int, Rational> stage_flow(const NestedConfig& cfg, const Skeleton& sk, const StageSkeleton& st, int y,
                                   const std::map<int, Rational>& inflow, bool use_availability,
                                   std::vector<std::string>* alpha_report) {
    std::map<int, std::vector<int>> eligible;  // begin state -> arc indices
    std::map<int, std::pair<long, long>> avoid_counts;  // begin state -> (avoiding, unavailable)
    const int i = st.level - 1;
    for (std::size_t a = 0; a < st.arcs.size(); ++a) {
        const auto& arc = st.arcs[a];
        auto it = inflow.find(arc.u);
        if (it == inflow.end()) continue;
        const StateTuple& s = sk.states[static_cast<std::size_t>(arc.u)];
        const StateTuple& t = sk.states[static_cast<std::size_t>(arc.v)];
        if (st.h == 0) {
            StateTuple outer(s.begin(), s.begin() + i);  // levels < i are setup states here
            IndexSet c = sorted_cert(cfg.certificate(y, i + 1, outer));
            if (!disjoint(t[static_cast<std::size_t>(i)].slots(), c)) continue;
            bool ok = true;
            if (cfg.available) {
                ok = cfg.available(y, i + 1, outer, t[static_cast<std::size_t>(i)]);
                auto& cnt = avoid_counts[arc.u];
                ++cnt.first;
                if (!ok) ++cnt.second;
            }
            if (ok || !use_availability) eligible[arc.u].push_back(static_cast<int>(a));
        } else {
            StateTuple outer = setup_parts(cfg, y, s, i);
            IndexSet c = sorted_cert(cfg.certificate(y, i + 1, outer));
            auto added = set_minus(t[static_cast<std::size_t>(i)].elements(), s[static_cast<std::size_t>(i)].elements());
            if (added.size() == 1 && std::binary_search(c.begin(), c.end(), added[0]))
                eligible[arc.u].push_back(static_cast<int>(a));
        }
    }
    if (alpha_report && cfg.available) {
        for (const auto& [u, cnt] : avoid_counts) {
            if (cnt.first == 0) continue;
            if (Rational(cnt.second, cnt.first) > cfg.alpha)
                alpha_report->push_back(st.name + ": input " + std::to_string(y) + " loses " + std::to_string(cnt.second) +
                                        " of " + std::to_string(cnt.first) + " avoiding states");
        }
    }
    std::map<int, Rational> out;
    for (const auto& [u, p] : inflow) {
        auto it = eligible.find(u);
        if (it == eligible.end()) continue;  // reported by validation as a conservation failure
        Rational share = p / static_cast<long>(it->second.size());
        share.canonicalize();
        for (int a : it->second) out[a] = share;
    }
    return out;
}

std::map<int, Rational> end_inflow(const StageSkeleton& st, const std::map<int, Rational>& flow) {
    std::map<int, Rational> in;
    for (const auto& [a, f] : flow) in[st.arcs[static_cast<std::size_t>(a)].v] += f;
    return in;
}

// level certificates pushed through the data structure, outer setups empty
IndexSet certificate_positions(const NestedConfig& cfg, int y) {
    StateTuple outer, tuple;
    for (std::size_t j = 0; j < cfg.levels.size(); ++j) {
        const int k = cfg.levels[j].k;
        IndexSet c = cfg.certificate(y, static_cast<int>(j) + 1, outer);
        if (static_cast<int>(c.size()) > k) throw DomainError("certificate larger than k at level " + std::to_string(j + 1));
        std::vector<int> slots(c.begin(), c.end());
        slots.resize(static_cast<std::size_t>(k), OrderedPartialSubset::kStar);
        tuple.push_back(OrderedPartialSubset::from_slots(std::move(slots)));
        outer.emplace_back(k);
    }
    IndexSet d = cfg.data(tuple);
    std::sort(d.begin(), d.end());
    return d;
}

}  // namespace

ExplicitBuild build_explicit(const NestedConfig& cfg, const BuildOptions& opt) {
    if (!cfg.certificate) throw DomainError("config has no certificate function");
    if (cfg.value.size() != cfg.inputs.size()) throw DomainError("every input needs a function value");
    std::vector<int> ones;
    for (std::size_t y = 0; y < cfg.inputs.size(); ++y)
        if (cfg.value[y]) ones.push_back(static_cast<int>(y));
    if (ones.empty()) throw DomainError("need at least one 1-input to weight the stages");

    Skeleton sk = build_skeleton(cfg, opt.slots, opt.max_edges);
    ExplicitBuild out;
    LearningGraph& g = out.graph;
    for (const auto& lab : sk.labels) g.add_vertex(lab);
    for (std::size_t y = 0; y < cfg.inputs.size(); ++y) {
        int id = g.add_input(cfg.inputs[y]);
        if (cfg.value[y]) g.set_certificate(id, certificate_positions(cfg, static_cast<int>(y)));
    }

    const int root = 0;
    std::map<int, std::map<int, Rational>> base_in, real_in;  // per 1-input, state -> inflow
    for (int y : ones) {
        base_in[y][root] = 1;
        real_in[y][root] = 1;
    }

    for (const auto& st : sk.stages) {
        Stage stage;
        std::map<int, int> bidx, eidx;
        for (const auto& arc : st.arcs) {
            if (bidx.emplace(arc.u, static_cast<int>(bidx.size())).second) stage.begin.push_back(sk.labels[static_cast<std::size_t>(arc.u)]);
            if (eidx.emplace(arc.v, static_cast<int>(eidx.size())).second) stage.end.push_back(sk.labels[static_cast<std::size_t>(arc.v)]);
        }
        for (const auto& arc : st.arcs) {
            int len = static_cast<int>(set_minus(sk.labels[static_cast<std::size_t>(arc.v)], sk.labels[static_cast<std::size_t>(arc.u)]).size());
            stage.arcs.push_back({bidx[arc.u], eidx[arc.v], len});
        }
        std::map<int, std::map<int, Rational>> real_flow;
        for (int y : ones) {
            auto bf = stage_flow(cfg, sk, st, y, base_in[y], false, nullptr);
            stage.flows.push_back(bf);
            base_in[y] = end_inflow(st, bf);
            auto rf = stage_flow(cfg, sk, st, y, real_in[y], true, &out.alpha_violations);
            real_in[y] = end_inflow(st, rf);
            real_flow[y] = std::move(rf);
        }
        StageInfo info;
        info.name = st.name;
        try {
            info.counts = weight_symmetric_stage(stage);
        } catch (const DomainError& e) {
            throw DomainError(st.name + " is not symmetric: " + e.what());
        }
        info.first_edge = g.num_edges();
        for (std::size_t a = 0; a < st.arcs.size(); ++a)
            g.add_edge(st.arcs[a].u, st.arcs[a].v, stage.arcs[a].length, Weight{stage.weights[a], {}});
        info.last_edge = g.num_edges();
        for (int y : ones)
            for (const auto& [a, f] : real_flow[y]) g.set_flow(y, info.first_edge + a, f);
        out.stages.push_back(std::move(info));
    }

    if (cfg.check) {
        StageInfo info;
        info.name = "check";
        info.first_edge = g.num_edges();
        // exact number of flow-carrying full states under the trivial availability
        const long carrying = static_cast<long>(base_in[ones[0]].size());
        for (int u : sk.full) {
            LearningGraph sub = cfg.check(sk.states[static_cast<std::size_t>(u)]);
            int sroot = sub.root();
            if (sroot < 0) throw DomainError("checking graph has no root");
            Rational sc1 = 0;
            for (int y : ones)
                if (y < sub.num_inputs()) sc1 = std::max(sc1, c1(sub, y));
            if (sc1 == 0) sc1 = 1;  // carries no flow: weights only enter C0
            Rational lambda = sc1 / carrying;
            lambda.canonicalize();
            std::vector<int> vmap(static_cast<std::size_t>(sub.num_vertices()), -1);
            const auto& base_label = sk.labels[static_cast<std::size_t>(u)];
            for (int v = 0; v < sub.num_vertices(); ++v)
                vmap[static_cast<std::size_t>(v)] = v == sroot ? u : g.add_vertex(set_union(base_label, sub.label(v)));
            std::vector<int> emap(static_cast<std::size_t>(sub.num_edges()));
            for (int e = 0; e < sub.num_edges(); ++e) {
                const auto& ed = sub.edge(e);
                int a = vmap[static_cast<std::size_t>(ed.from)], b = vmap[static_cast<std::size_t>(ed.to)];
                Weight w = ed.weight;
                w.constant *= lambda;
                for (auto& [k, val] : w.table) val *= lambda;
                int len = static_cast<int>(set_minus(g.label(b), g.label(a)).size());
                emap[static_cast<std::size_t>(e)] = g.add_edge(a, b, len, std::move(w));
            }
            for (int y : ones) {
                if (y >= sub.num_inputs()) continue;
                auto it = real_in[y].find(u);
                if (it == real_in[y].end()) continue;
                for (const auto& [e, f] : sub.flow(y)) g.set_flow(y, emap[static_cast<std::size_t>(e)], f * it->second);
            }
        }
        info.last_edge = g.num_edges();
        out.stages.push_back(std::move(info));
    }

    for (auto& info : out.stages) {
        std::vector<int> ids;
        for (int e = info.first_edge; e < info.last_edge; ++e) ids.push_back(e);
        Rational worst0 = 0;
        auto zeros = g.zero_inputs();
        if (zeros.empty()) zeros = ones;
        for (int x : zeros) worst0 = std::max(worst0, c0(g, x, &ids));
        info.c0 = worst0;
        for (int y : ones) info.c1 = std::max(info.c1, c1(g, y, &ids));
    }
    return out;
}

NumericProfile MeasuredProfile::numeric() const {
    NumericProfile p;
    p.S = std::sqrt(to_double(S2));
    for (const auto& u : U2) p.U.push_back(std::sqrt(to_double(u)));
    p.C = std::sqrt(to_double(C2));
    return p;
}

MeasuredProfile measure_profile(const NestedConfig& cfg, SlotRule rule) {
    Skeleton sk = build_skeleton(cfg, rule, 2'000'000);
    const int r = static_cast<int>(cfg.levels.size());
    MeasuredProfile m;
    m.U2.assign(static_cast<std::size_t>(r), Rational(0));
    // setup states are the begin states of the first update stage
    const auto& first_update = sk.stages[static_cast<std::size_t>(r)];
    Rational s2 = 0;
    for (int u : first_update.begin) {
        long d = static_cast<long>(sk.labels[static_cast<std::size_t>(u)].size());
        s2 += d * d;
    }
    m.S2 = s2 / static_cast<long>(first_update.begin.size());
    for (const auto& st : sk.stages) {
        if (st.h == 0) continue;
        Rational sum = 0;
        for (const auto& arc : st.arcs) {
            long d = static_cast<long>(set_minus(sk.labels[static_cast<std::size_t>(arc.v)], sk.labels[static_cast<std::size_t>(arc.u)]).size());
            sum += d * d;
        }
        Rational avg = sum / static_cast<long>(st.arcs.size());
        auto& slot = m.U2[static_cast<std::size_t>(st.level - 1)];
        if (avg > slot) slot = avg;
    }
    if (cfg.check) {
        std::vector<int> ones;
        for (std::size_t y = 0; y < cfg.inputs.size(); ++y)
            if (cfg.value[y]) ones.push_back(static_cast<int>(y));
        Rational sum = 0;
        for (int u : sk.full) {
            LearningGraph sub = cfg.check(sk.states[static_cast<std::size_t>(u)]);
            auto cx = complexity(sub);
            Rational worst1 = 0;
            for (int y : ones)
                if (y < sub.num_inputs()) worst1 = std::max(worst1, c1(sub, y));
            sum += cx.c0 * worst1;
        }
        m.C2 = sum / static_cast<long>(sk.full.size());
    }
    return m;
}

// ---- toy configurations ----

namespace {
int popcount_at(const Bits& z, const IndexSet& s) {
    int c = 0;
    for (int i : s)
        if (static_cast<std::size_t>(i) < z.size() && z[static_cast<std::size_t>(i)]) ++c;
    return c;
}
}  // namespace

NestedConfig or_config(int n, int k, int ell, const std::vector<Bits>& inputs) {
    if (n < k || k < ell || ell < 1) throw DomainError("need 1 <= ell <= k <= n");
    NestedConfig cfg;
    cfg.levels = {{n, k, ell}};
    cfg.inputs = inputs;
    for (const auto& z : inputs) {
        if (static_cast<int>(z.size()) != n) throw DomainError("inputs must have n bits");
        cfg.value.push_back(popcount_at(z, [&] { IndexSet a(static_cast<std::size_t>(n)); for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = i; return a; }()) >= ell);
    }
    cfg.data = [](const StateTuple& s) { return s[0].elements(); };
    cfg.certificate = [inputs, ell](int y, int, const StateTuple&) {
        IndexSet c;
        const auto& z = inputs[static_cast<std::size_t>(y)];
        for (std::size_t i = 0; i < z.size() && static_cast<int>(c.size()) < ell; ++i)
            if (z[i]) c.push_back(static_cast<int>(i));
        return c;
    };
    cfg.sink = [inputs, ell](const IndexSet& label, int y) { return popcount_at(inputs[static_cast<std::size_t>(y)], label) >= ell; };
    return cfg;
}

NestedConfig matrix_config(int n1, int k1, int n2, int k2, const std::vector<Bits>& inputs) {
    if (n1 < k1 || n2 < k2 || k1 < 2 || k2 < 1) throw DomainError("need 2 <= k1 <= n1 and 1 <= k2 <= n2");
    NestedConfig cfg;
    cfg.levels = {{n1, k1, 1}, {n2, k2, 1}};
    cfg.inputs = inputs;
    const int N = n1 + n1 * n2;
    auto cell = [n1, n2](int a, int b) { return n1 + a * n2 + b; };
    // columns b with row a and (a, b) both set
    auto good = [=](const Bits& z, int a) {
        std::vector<int> out;
        if (!z[static_cast<std::size_t>(a)]) return out;
        for (int b = 0; b < n2; ++b)
            if (z[static_cast<std::size_t>(cell(a, b))]) out.push_back(b);
        return out;
    };
    for (const auto& z : inputs) {
        if (static_cast<int>(z.size()) != N) throw DomainError("inputs must have n1 + n1*n2 bits");
        bool v = false;
        for (int a = 0; a < n1; ++a) v = v || !good(z, a).empty();
        cfg.value.push_back(v);
    }
    cfg.data = [=](const StateTuple& s) {
        IndexSet d;
        for (int a : s[0].elements()) {
            d.push_back(a);
            for (int b : s[1].elements()) d.push_back(cell(a, b));
        }
        std::sort(d.begin(), d.end());
        return d;
    };
    // the column is picked through slot 0 of the outer setup state, so the
    // inner certificate moves with the outer walk
    cfg.certificate = [=](int y, int level, const StateTuple& outer) -> IndexSet {
        const auto& z = inputs[static_cast<std::size_t>(y)];
        int row = -1;
        for (int a = 0; a < n1 && row < 0; ++a)
            if (!good(z, a).empty()) row = a;
        if (row < 0) return {};
        if (level == 1) return {row};
        auto cols = good(z, row);
        int pick = outer[0][0] == OrderedPartialSubset::kStar ? 0 : outer[0][0];
        return {cols[static_cast<std::size_t>(pick) % cols.size()]};
    };
    cfg.sink = [=](const IndexSet& label, int y) {
        const auto& z = inputs[static_cast<std::size_t>(y)];
        for (int a = 0; a < n1; ++a) {
            if (!z[static_cast<std::size_t>(a)] || !std::binary_search(label.begin(), label.end(), a)) continue;
            for (int b = 0; b < n2; ++b)
                if (z[static_cast<std::size_t>(cell(a, b))] && std::binary_search(label.begin(), label.end(), cell(a, b))) return true;
        }
        return false;
    };
    return cfg;
}

NestedConfig checked_or_config(int n, int k, const std::vector<Bits>& inputs) {
    if (n < k || k < 1) throw DomainError("need 1 <= k <= n");
    NestedConfig cfg;
    cfg.levels = {{n, k, 1}};
    cfg.inputs = inputs;
    auto hit = [n](const Bits& z, int i) { return z[static_cast<std::size_t>(i)] && z[static_cast<std::size_t>(n + i)]; };
    for (const auto& z : inputs) {
        if (static_cast<int>(z.size()) != 2 * n) throw DomainError("inputs must have 2n bits");
        bool v = false;
        for (int i = 0; i < n; ++i) v = v || hit(z, i);
        cfg.value.push_back(v);
    }
    cfg.data = [](const StateTuple& s) { return s[0].elements(); };
    cfg.certificate = [=](int y, int, const StateTuple&) -> IndexSet {
        for (int i = 0; i < n; ++i)
            if (hit(inputs[static_cast<std::size_t>(y)], i)) return {i};
        return {};
    };
    // Grover over the second bits of the loaded elements
    cfg.check = [=](const StateTuple& full) {
        LearningGraph g;
        g.add_vertex({});
        for (const auto& z : inputs) g.add_input(z);
        auto elems = full[0].elements();
        for (int i : elems) {
            int v = g.add_vertex({n + i});
            g.add_edge(0, v, Rational(1));
        }
        for (std::size_t y = 0; y < inputs.size(); ++y) {
            for (std::size_t t = 0; t < elems.size(); ++t) {
                if (hit(inputs[y], elems[t])) {
                    g.set_certificate(static_cast<int>(y), {n + elems[t]});
                    g.set_flow(static_cast<int>(y), static_cast<int>(t), Rational(1));
                    break;
                }
            }
        }
        return g;
    };
    cfg.sink = [=](const IndexSet& label, int y) {
        for (int i : label)
            if (i < n && hit(inputs[static_cast<std::size_t>(y)], i) && std::binary_search(label.begin(), label.end(), n + i)) return true;
        return false;
    };
    return cfg;
}

}  // namespace hsf
