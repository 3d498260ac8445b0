#include "hsf/stages.hpp"

#include <algorithm>
#include <numeric>

#include "hsf/hypergraph.hpp"

namespace hsf {

std::vector<Rational> Stage::begin_flow(int y) const {
    std::vector<Rational> out(begin.size(), Rational(0));
    for (const auto& [a, f] : flows.at(static_cast<std::size_t>(y))) out[static_cast<std::size_t>(arcs[static_cast<std::size_t>(a)].u)] += f;
    return out;
}

std::vector<Rational> Stage::end_flow(int y) const {
    std::vector<Rational> out(end.size(), Rational(0));
    for (const auto& [a, f] : flows.at(static_cast<std::size_t>(y))) out[static_cast<std::size_t>(arcs[static_cast<std::size_t>(a)].v)] += f;
    return out;
}

namespace {

std::vector<std::vector<int>> out_arcs(const Stage& s) {
    std::vector<std::vector<int>> out(s.begin.size());
    for (std::size_t a = 0; a < s.arcs.size(); ++a) out[static_cast<std::size_t>(s.arcs[a].u)].push_back(static_cast<int>(a));
    return out;
}

// positive entries of v, all equal; returns the count
long uniform_positive(const std::vector<Rational>& v, const char* what, int y) {
    long count = 0;
    const Rational* first = nullptr;
    for (const auto& x : v) {
        if (x == 0) continue;
        if (x < 0) throw DomainError(std::string(what) + ": negative flow for input " + std::to_string(y));
        if (first && x != *first)
            throw DomainError(std::string(what) + ": unequal positive flows for input " + std::to_string(y));
        first = &x;
        ++count;
    }
    if (count == 0) throw DomainError(std::string(what) + ": no flow for input " + std::to_string(y));
    if (*first * count != 1)
        throw DomainError(std::string(what) + ": flows for input " + std::to_string(y) + " do not sum to 1");
    return count;
}

}  // namespace

SymmetricCounts symmetric_counts(const Stage& s) {
    if (s.flows.empty()) throw DomainError("stage has no 1-inputs");
    if (s.begin.empty() || s.arcs.empty()) throw DomainError("empty stage");
    SymmetricCounts k;
    k.c = static_cast<long>(s.begin.size());
    k.e = static_cast<long>(s.end.size());
    auto out = out_arcs(s);
    k.d = static_cast<long>(out[0].size());
    for (std::size_t v = 0; v < out.size(); ++v)
        if (static_cast<long>(out[v].size()) != k.d)
            throw DomainError("outdegree: begin vertex " + std::to_string(v) + " has outdegree " +
                              std::to_string(out[v].size()) + ", expected " + std::to_string(k.d));

    for (int y = 0; y < s.num_inputs(); ++y) {
        const auto& fl = s.flows[static_cast<std::size_t>(y)];
        for (const auto& [a, f] : fl)
            if (f <= 0) throw DomainError("flow entries must be positive (arc " + std::to_string(a) + ")");
        long c1 = uniform_positive(s.begin_flow(y), "begin flow", y);
        long e1 = uniform_positive(s.end_flow(y), "end flow", y);
        if (y == 0) {
            k.c1 = c1;
            k.e1 = e1;
        } else if (c1 != k.c1) {
            throw DomainError("begin flow: c' differs between 1-inputs");
        } else if (e1 != k.e1) {
            throw DomainError("end flow: e' differs between 1-inputs");
        }
        auto bf = s.begin_flow(y);
        long total_len = 0, flow_arcs = 0;
        for (std::size_t v = 0; v < out.size(); ++v) {
            if (bf[v] == 0) continue;
            long d1 = 0;
            const Rational* first = nullptr;
            for (int a : out[v]) {
                auto it = fl.find(a);
                if (it == fl.end()) continue;
                if (first && it->second != *first)
                    throw DomainError("out-flow: begin vertex " + std::to_string(v) + " splits unevenly");
                first = &it->second;
                ++d1;
                total_len += s.arcs[static_cast<std::size_t>(a)].length;
            }
            if (k.d1 == 0) k.d1 = d1;
            if (d1 != k.d1) throw DomainError("out-flow: d' differs between flow-carrying vertices");
            flow_arcs += d1;
        }
        Rational L = frac(total_len, flow_arcs);
        if (L > k.L) k.L = L;
    }
    k.T = Rational(k.c * k.d) / (k.c1 * k.d1);
    k.T.canonicalize();
    return k;
}

SymmetricCounts weight_symmetric_stage(Stage& s) {
    auto k = symmetric_counts(s);
    long total = 0;
    for (const auto& a : s.arcs) {
        if (a.length < 1) throw DomainError("arc length must be at least 1");
        total += a.length;
    }
    Rational l_all = frac(total, static_cast<long>(s.arcs.size()));
    if (l_all > k.L)
        throw DomainError("length: mean arc length " + to_string(l_all) + " exceeds flow-carrying mean " + to_string(k.L));
    Rational w = k.L / (k.c1 * k.d1);
    w.canonicalize();
    s.weights.assign(s.arcs.size(), w);
    return k;
}

Rational stage_c0(const Stage& s) {
    if (s.weights.size() != s.arcs.size()) throw DomainError("stage is not weighted");
    Rational sum = 0;
    for (std::size_t a = 0; a < s.arcs.size(); ++a) sum += s.arcs[a].length * s.weights[a];
    return sum;
}

Rational stage_c1(const Stage& s, int y) {
    if (s.weights.size() != s.arcs.size()) throw DomainError("stage is not weighted");
    Rational sum = 0;
    for (const auto& [a, f] : s.flows.at(static_cast<std::size_t>(y))) {
        const Rational& w = s.weights[static_cast<std::size_t>(a)];
        if (w <= 0) throw DomainError("arc " + std::to_string(a) + " carries flow but has weight " + to_string(w));
        sum += s.arcs[static_cast<std::size_t>(a)].length * f * f / w;
    }
    return sum;
}

Rational stage_c1(const Stage& s) {
    Rational best = 0;
    for (int y = 0; y < s.num_inputs(); ++y) best = std::max(best, stage_c1(s, y));
    return best;
}

bool conserves(const Stage& s) {
    for (int y = 0; y < s.num_inputs(); ++y) {
        Rational in = 0, out = 0;
        for (const auto& f : s.begin_flow(y)) {
            if (f < 0) return false;
            out += f;
        }
        for (const auto& f : s.end_flow(y)) in += f;
        for (const auto& [a, f] : s.flows[static_cast<std::size_t>(y)])
            if (f <= 0 || a < 0 || a >= static_cast<int>(s.arcs.size())) return false;
        if (out != 1 || in != 1) return false;
    }
    return true;
}

Rational retain(const Rational& alpha, int k) {
    Rational r = 1;
    for (int i = 0; i < k; ++i) r *= 1 - alpha;
    return r;
}

Stage make_alpha_symmetric(const Stage& base, const BadSets& bad, const Rational& alpha, int s) {
    if (alpha < 0 || alpha >= 1) throw DomainError("alpha must lie in [0, 1)");
    if (s < 0) throw DomainError("stage constant s must be nonnegative");
    if (base.weights.size() != base.arcs.size()) throw DomainError("base stage is not weighted");
    auto k = symmetric_counts(base);
    const int ny = base.num_inputs();
    if ((!bad.begin.empty() && static_cast<int>(bad.begin.size()) != ny) ||
        (!bad.end.empty() && static_cast<int>(bad.end.size()) != ny))
        throw DomainError("bad sets must be given per 1-input");
    auto out = out_arcs(base);
    const Rational keep = 1 - alpha;

    Stage st = base;
    for (int y = 0; y < ny; ++y) {
        const auto& fl = base.flows[static_cast<std::size_t>(y)];
        auto bf = base.begin_flow(y), ef = base.end_flow(y);
        std::vector<char> vi(base.begin.size(), 0), vj(base.end.size(), 0), vj0(base.end.size(), 0);
        for (std::size_t v = 0; v < bf.size(); ++v) vi[v] = bf[v] > 0;
        for (std::size_t w = 0; w < ef.size(); ++w) vj[w] = vj0[w] = ef[w] > 0;
        if (!bad.begin.empty())
            for (int v : bad.begin[static_cast<std::size_t>(y)]) vi.at(static_cast<std::size_t>(v)) = 0;
        if (!bad.end.empty())
            for (int w : bad.end[static_cast<std::size_t>(y)]) vj.at(static_cast<std::size_t>(w)) = 0;
        long ci = std::count(vi.begin(), vi.end(), 1), cj = std::count(vj.begin(), vj.end(), 1);
        const std::string who = " for input " + std::to_string(y);
        if (Rational(ci) < retain(alpha, s) * k.c1)
            throw DomainError("begin retention: |V_i| = " + std::to_string(ci) + " < (1-alpha)^s c'" + who);
        if (Rational(cj) < retain(alpha, s + 1) * k.e1)
            throw DomainError("end retention: |V_j| = " + std::to_string(cj) + " < (1-alpha)^(s+1) e'" + who);

        std::map<int, Rational> nf;
        for (std::size_t v = 0; v < out.size(); ++v) {
            if (!vi[v]) continue;
            long nb0 = 0, nb = 0;
            std::vector<int> kept;
            for (int a : out[v]) {
                int w = base.arcs[static_cast<std::size_t>(a)].v;
                if (vj0[static_cast<std::size_t>(w)]) {
                    ++nb0;
                    if (vj[static_cast<std::size_t>(w)]) ++nb;
                }
                if (fl.count(a) && vj[static_cast<std::size_t>(w)]) kept.push_back(a);
            }
            if (Rational(nb) < keep * nb0)
                throw DomainError("neighbour retention: begin vertex " + std::to_string(v) + " keeps " +
                                  std::to_string(nb) + " of " + std::to_string(nb0) + who);
            if (kept.empty() || Rational(static_cast<long>(kept.size())) < keep * k.d1)
                throw DomainError("neighbour retention: begin vertex " + std::to_string(v) + " keeps " +
                                  std::to_string(kept.size()) + " of " + std::to_string(k.d1) + " flow arcs" + who);
            Rational share = Rational(1) / (ci * static_cast<long>(kept.size()));
            share.canonicalize();
            for (int a : kept) nf[a] = share;
        }
        st.flows[static_cast<std::size_t>(y)] = std::move(nf);
    }
    return st;
}

AlphaStats alpha_stats(const Stage& base, const Stage& st) {
    AlphaStats out;
    auto k = symmetric_counts(base);
    for (int y = 0; y < st.num_inputs(); ++y) {
        const auto& b = base.flows[static_cast<std::size_t>(y)];
        for (const auto& [a, f] : st.flows[static_cast<std::size_t>(y)]) {
            auto it = b.find(a);
            if (it == b.end()) throw DomainError("flow on an arc outside the base flow");
            out.max_scale = std::max(out.max_scale, Rational(f / it->second));
        }
        Rational lo = -1, hi = 0;
        for (const auto& f : st.begin_flow(y)) {
            if (f == 0) continue;
            if (lo < 0 || f < lo) lo = f;
            hi = std::max(hi, f);
        }
        if (lo > 0) out.begin_flow_ratio = std::max(out.begin_flow_ratio, Rational(hi / lo));
        for (const auto& f : st.end_flow(y)) out.max_end_flow = std::max(out.max_end_flow, Rational(f * k.e1));
    }
    return out;
}

// ---- generators ----

namespace {

// all k-subsets of {0..n-1} in lexicographic order
std::vector<IndexSet> subsets(int n, int k) {
    std::vector<IndexSet> out;
    for_each_subset(n, k, [&](const std::vector<int>& s) {
        IndexSet t(s);
        for (int& x : t) --x;
        out.push_back(std::move(t));
        return true;
    });
    return out;
}

struct SubsetIndex {
    std::map<IndexSet, int> at;
    explicit SubsetIndex(const std::vector<IndexSet>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) at.emplace(v[i], static_cast<int>(i));
    }
    int operator()(const IndexSet& s) const { return at.at(s); }
};

void check_cert(int n, const IndexSet& c) {
    for (int x : c)
        if (x < 0 || x >= n) throw DomainError("certificate index out of range");
}

long ceil_of(const Rational& q) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r.get_si();
}

}  // namespace

Stage grover_stage(int n, const std::vector<int>& marked) {
    if (n < 1) throw DomainError("grover stage needs n >= 1");
    Stage s;
    s.begin.push_back({});
    for (int i = 0; i < n; ++i) {
        s.end.push_back({i});
        s.arcs.push_back({0, i, 1});
    }
    for (int m : marked) {
        if (m < 0 || m >= n) throw DomainError("marked position out of range");
        s.flows.push_back({{m, Rational(1)}});
    }
    return s;
}

Stage johnson_setup_stage(int n, int load, const std::vector<IndexSet>& certs) {
    if (load < 1 || load > n) throw DomainError("setup load must lie in [1, n]");
    Stage s;
    s.begin.push_back({});
    s.end = subsets(n, load);
    for (std::size_t i = 0; i < s.end.size(); ++i) s.arcs.push_back({0, static_cast<int>(i), load});
    for (const auto& c : certs) {
        check_cert(n, c);
        if (load > n - static_cast<int>(c.size())) throw DomainError("setup load leaves no room to avoid the certificate");
        std::vector<int> avoid;
        for (std::size_t i = 0; i < s.end.size(); ++i)
            if (set_minus(s.end[i], c).size() == s.end[i].size()) avoid.push_back(static_cast<int>(i));
        Rational f = frac(1, static_cast<long>(avoid.size()));
        std::map<int, Rational> m;
        for (int a : avoid) m.emplace(a, f);
        s.flows.push_back(std::move(m));
    }
    return s;
}

Stage johnson_update_stage(int n, int base, int h, const std::vector<IndexSet>& certs) {
    if (certs.empty()) throw DomainError("update stage needs a 1-input");
    const int ell = static_cast<int>(certs[0].size());
    for (const auto& c : certs)
        if (static_cast<int>(c.size()) != ell) throw DomainError("certificates must share one size");
    if (h < 1 || h > ell) throw DomainError("update step h must lie in [1, ell]");
    if (base < 0 || base + ell > n) throw DomainError("base size too large for n");
    const int m = base + h - 1;
    Stage s;
    s.begin = subsets(n, m);
    s.end = subsets(n, m + 1);
    SubsetIndex idx(s.end);
    std::map<std::pair<int, int>, int> arc_of;
    for (std::size_t u = 0; u < s.begin.size(); ++u) {
        for (int x = 0; x < n; ++x) {
            const auto& a = s.begin[u];
            if (std::binary_search(a.begin(), a.end(), x)) continue;
            int v = idx(set_union(a, {x}));
            arc_of[{static_cast<int>(u), x}] = static_cast<int>(s.arcs.size());
            s.arcs.push_back({static_cast<int>(u), v, 1});
        }
    }
    const long c1 = static_cast<long>(binomial(ell, h - 1).get_num().get_si() * binomial(n - ell, base).get_num().get_si());
    const Rational f = frac(1, c1 * (ell - h + 1));
    for (const auto& c : certs) {
        check_cert(n, c);
        std::map<int, Rational> fl;
        for (std::size_t u = 0; u < s.begin.size(); ++u) {
            const auto& a = s.begin[u];
            if (static_cast<int>(a.size() - set_minus(a, c).size()) != h - 1) continue;
            for (int x : set_minus(c, a)) fl.emplace(arc_of.at({static_cast<int>(u), x}), f);
        }
        s.flows.push_back(std::move(fl));
    }
    return s;
}

namespace {

IndexSet random_set(Rng& rng, int n, int k) {
    auto v = sample_distinct(rng, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(k));
    IndexSet s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    return s;
}

int uniform_int(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); }

}  // namespace

StageInstance random_symmetric_stage(std::uint64_t seed, int max_n) {
    if (max_n < 4) throw DomainError("max_n must be at least 4");
    Rng rng(seed);
    StageInstance inst;
    int kind = static_cast<int>(rng.below(3));
    int inputs = uniform_int(rng, 1, 3);
    if (kind == 0) {
        inst.kind = "grover";
        inst.n = uniform_int(rng, 2, max_n);
        auto marked = sample_distinct(rng, static_cast<std::uint32_t>(inst.n), static_cast<std::uint32_t>(std::min(inputs, inst.n)));
        inst.stage = grover_stage(inst.n, std::vector<int>(marked.begin(), marked.end()));
    } else if (kind == 1) {
        inst.kind = "setup";
        inst.n = uniform_int(rng, 4, max_n);
        int ell = uniform_int(rng, 1, 3), load = uniform_int(rng, 1, 2);
        std::vector<IndexSet> certs;
        for (int i = 0; i < inputs; ++i) certs.push_back(random_set(rng, inst.n, ell));
        inst.stage = johnson_setup_stage(inst.n, load, certs);
    } else {
        inst.kind = "update";
        int ell = uniform_int(rng, 1, 2), h = uniform_int(rng, 1, ell), base = uniform_int(rng, 0, 2);
        int m = base + h - 1;
        int n = uniform_int(rng, std::max(4, base + ell + 1), max_n);
        // keep the arc count modest
        while (n > base + ell + 1 && binomial(n, m) * (n - m) > 40000) --n;
        inst.n = n;
        std::vector<IndexSet> certs;
        for (int i = 0; i < inputs; ++i) certs.push_back(random_set(rng, n, ell));
        inst.stage = johnson_update_stage(n, base, h, certs);
    }
    weight_symmetric_stage(inst.stage);
    return inst;
}

AlphaInstance random_alpha_instance(std::uint64_t seed, const Rational& alpha, int s, int max_n) {
    AlphaInstance inst;
    inst.base = random_symmetric_stage(Rng::split(seed, 0), max_n);
    inst.alpha = alpha;
    inst.s = s;
    const Stage& b = inst.base.stage;
    auto k = symmetric_counts(b);
    auto out = out_arcs(b);
    std::vector<std::vector<int>> in(b.end.size());
    for (std::size_t a = 0; a < b.arcs.size(); ++a) in[static_cast<std::size_t>(b.arcs[a].v)].push_back(static_cast<int>(a));
    Rng rng(Rng::split(seed, 1));
    const Rational keep = 1 - alpha;

    for (int y = 0; y < b.num_inputs(); ++y) {
        const auto& fl = b.flows[static_cast<std::size_t>(y)];
        auto bf = b.begin_flow(y), ef = b.end_flow(y);
        std::vector<int> vi, vj;
        for (std::size_t v = 0; v < bf.size(); ++v)
            if (bf[v] > 0) vi.push_back(static_cast<int>(v));
        for (std::size_t w = 0; w < ef.size(); ++w)
            if (ef[w] > 0) vj.push_back(static_cast<int>(w));

        // begin: drop up to c' - ceil((1-alpha)^s c')
        Rational need = retain(alpha, s) * k.c1;
        long drop = k.c1 - ceil_of(need);
        if (drop > 0) drop = static_cast<long>(rng.below(static_cast<std::uint64_t>(drop + 1)));
        rng.shuffle(vi);
        std::vector<int> bad_b(vi.begin(), vi.begin() + drop);
        std::vector<char> alive_b(b.begin.size(), 0);
        for (std::size_t i = static_cast<std::size_t>(drop); i < vi.size(); ++i) alive_b[static_cast<std::size_t>(vi[i])] = 1;

        // end: greedy random removals that keep every retention inequality
        std::vector<long> nb0(b.begin.size(), 0), nb(b.begin.size(), 0), fa(b.begin.size(), 0);
        std::vector<char> in_vj0(b.end.size(), 0);
        for (int w : vj) in_vj0[static_cast<std::size_t>(w)] = 1;
        for (std::size_t v = 0; v < out.size(); ++v)
            for (int a : out[v]) {
                int w = b.arcs[static_cast<std::size_t>(a)].v;
                if (in_vj0[static_cast<std::size_t>(w)]) ++nb0[v], ++nb[v];
                if (fl.count(a)) ++fa[v];
            }
        Rational end_need = retain(alpha, s + 1) * k.e1;
        long cj = static_cast<long>(vj.size());
        long target = static_cast<long>(rng.below(static_cast<std::uint64_t>(vj.size()) + 1));
        rng.shuffle(vj);
        std::vector<int> bad_e;
        for (int w : vj) {
            if (static_cast<long>(bad_e.size()) >= target) break;
            if (Rational(cj - 1) < end_need) break;
            bool ok = true;
            for (int a : in[static_cast<std::size_t>(w)]) {
                auto v = static_cast<std::size_t>(b.arcs[static_cast<std::size_t>(a)].u);
                if (!alive_b[v]) continue;
                if (Rational(nb[v] - 1) < keep * nb0[v]) ok = false;
                if (fl.count(a) && (fa[v] - 1 < 1 || Rational(fa[v] - 1) < keep * k.d1)) ok = false;
            }
            if (!ok) continue;
            for (int a : in[static_cast<std::size_t>(w)]) {
                auto v = static_cast<std::size_t>(b.arcs[static_cast<std::size_t>(a)].u);
                --nb[v];
                if (fl.count(a)) --fa[v];
            }
            --cj;
            bad_e.push_back(w);
        }
        inst.bad.begin.push_back(std::move(bad_b));
        inst.bad.end.push_back(std::move(bad_e));
    }
    inst.stage = make_alpha_symmetric(b, inst.bad, alpha, s);
    return inst;
}

}  // namespace hsf
