#include "hsf/nested_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace hsf {

namespace {

double dv(const Rational& q) { return q.get_d(); }

struct LevelTables {
    std::array<std::array<int, 5>, 5> pair{};
    std::array<std::array<std::array<int, 5>, 5>, 5> triple{};
    std::array<std::array<int, 2>, 10> pairs{};
    std::array<std::array<int, 3>, 10> triples{};
    std::array<std::array<int, 4>, 5> quads{};
    LevelTables() {
        for (auto& r : pair) r.fill(-1);
        for (auto& a : triple)
            for (auto& b : a) b.fill(-1);
        const auto& ls = levels();
        int p = 0, t = 0, q = 0;
        for (const auto& l : ls) {
            std::vector<int> z;
            for (int i : l.idx) z.push_back(i - 1);
            if (z.size() == 2) {
                pairs[p] = {z[0], z[1]};
                pair[z[0]][z[1]] = pair[z[1]][z[0]] = p++;
            } else if (z.size() == 3) {
                triples[t] = {z[0], z[1], z[2]};
                std::array<int, 3> perm = {z[0], z[1], z[2]};
                std::sort(perm.begin(), perm.end());
                do triple[perm[0]][perm[1]][perm[2]] = t;
                while (std::next_permutation(perm.begin(), perm.end()));
                ++t;
            } else if (z.size() == 4) {
                quads[q++] = {z[0], z[1], z[2], z[3]};
            }
        }
    }
};

const LevelTables& tables() {
    static const LevelTables t;
    return t;
}

long clamp_size(double x, long lo, long hi) {
    long v = std::llround(x);
    return std::clamp(v, lo, std::max(lo, hi));
}

std::vector<int> one_based(std::initializer_list<int> xs) {
    std::vector<int> v;
    for (int x : xs) v.push_back(x + 1);
    std::sort(v.begin(), v.end());
    return v;
}

int popcount_and(const std::uint64_t* a, const std::uint64_t* b, int words) {
    int c = 0;
    for (int w = 0; w < words; ++w) c += __builtin_popcountll(a[w] & b[w]);
    return c;
}

// max multiplicity in a vector of keys (sorted in place)
long max_run(std::vector<std::uint64_t>& keys) {
    std::sort(keys.begin(), keys.end());
    long best = 0, run = 0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        run = (i && keys[i] == keys[i - 1]) ? run + 1 : 1;
        best = std::max(best, run);
    }
    return best;
}

template <class F>
void parallel_trials(long trials, int threads, F&& body) {
    int t = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (t <= 1 || trials < 2) {
        for (long i = 0; i < trials; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < t; ++w)
        pool.emplace_back([&, w] {
            for (long i = w; i < trials; i += t) body(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

int pair_id(int x, int y) { return tables().pair.at(x).at(y); }
int triple_id(int x, int y, int z) { return tables().triple.at(x).at(y).at(z); }
int quad_id(const std::vector<int>& q) {
    const auto& qs = tables().quads;
    auto s = q;
    std::sort(s.begin(), s.end());
    for (int i = 0; i < 5; ++i)
        if (std::equal(s.begin(), s.end(), qs[i].begin(), qs[i].end())) return i;
    return -1;
}
std::array<int, 2> pair_levels(int p) { return tables().pairs.at(p); }
std::array<int, 3> triple_levels(int t) { return tables().triples.at(t); }
std::array<int, 4> quad_levels(int q) { return tables().quads.at(q); }

void BitMatrix::reset(int r, int c) {
    rows = r;
    cols = c;
    words = (c + 63) / 64;
    bits.assign(static_cast<std::size_t>(r) * words, 0);
}

int BitMatrix::row_count(int r) const {
    int c = 0;
    const auto* p = row(r);
    for (int w = 0; w < words; ++w) c += __builtin_popcountll(p[w]);
    return c;
}

ScaledSizes scale(const ParamSet& p, int n) {
    if (n < 2 || n > 1023) throw DomainError("sample_state: desk scale needs 2 <= n <= 1023");
    ScaledSizes s;
    s.n = n;
    double ln = std::log(static_cast<double>(n));
    auto pw = [&](const Rational& e) { return std::exp(dv(e) * ln); };
    for (int x = 0; x < 5; ++x) s.k[x] = static_cast<int>(clamp_size(pw(p.at({x + 1})), 1, n));
    for (int q = 0; q < 10; ++q) {
        auto [x, y] = pair_levels(q);
        s.pair_size[q] = clamp_size(pw(p.at(one_based({x, y}))), 1, static_cast<long>(s.k[x]) * s.k[y]);
    }
    for (int t = 0; t < 10; ++t) {
        auto [x, y, z] = triple_levels(t);
        auto idx = one_based({x, y, z});
        s.N3[t] = std::max(1L, static_cast<long>(std::ceil(11 * pw(p.m(idx)))));
        s.C3[t] = clamp_size(pw(p.at(idx)), 1, s.N3[t]);
    }
    for (int q = 0; q < 5; ++q) {
        auto l = quad_levels(q);
        auto idx = one_based({l[0], l[1], l[2], l[3]});
        s.N4[q] = std::max(1L, static_cast<long>(std::ceil(pw(p.m(idx)))));
        s.D4[q] = clamp_size(pw(p.at(idx)), 1, s.N4[q]);
    }
    return s;
}

bool NestedState::has_triple(int t, std::uint32_t key) const {
    return std::binary_search(V3[t].begin(), V3[t].end(), key);
}

void NestedState::build_index() {
    for (int t = 0; t < 10; ++t)
        for (int f = 0; f < 3; ++f) {
            auto& ix = idx_[t][f];
            ix.clear();
            ix.reserve(V3[t].size());
            for (auto key : V3[t]) {
                int s[3] = {slot_of(key, 0, 3), slot_of(key, 1, 3), slot_of(key, 2, 3)};
                int o0 = f == 0 ? s[1] : s[0];
                int o1 = f == 2 ? s[1] : s[2];
                ix.push_back(static_cast<std::uint32_t>(o0) << 20 | static_cast<std::uint32_t>(o1) << 10 |
                             static_cast<std::uint32_t>(s[f]));
            }
            std::sort(ix.begin(), ix.end());
        }
}

std::vector<int> NestedState::third_slots(int t, int free_pos, int s0, int s1) const {
    const auto& ix = idx_[t][free_pos];
    std::uint32_t lo = static_cast<std::uint32_t>(s0) << 20 | static_cast<std::uint32_t>(s1) << 10;
    std::vector<int> out;
    for (auto it = std::lower_bound(ix.begin(), ix.end(), lo); it != ix.end() && (*it >> 10) == (lo >> 10); ++it)
        out.push_back(static_cast<int>(*it & 1023));
    return out;
}

namespace {

// positions of levels x and w inside the sorted triple containing both plus `other`
struct TripleView {
    int t;        // triple id
    int pos[5];   // position of each level within the triple, -1 if absent
};
TripleView view_of(int x, int y, int z) {
    TripleView v{triple_id(x, y, z), {-1, -1, -1, -1, -1}};
    auto l = triple_levels(v.t);
    for (int i = 0; i < 3; ++i) v.pos[l[i]] = i;
    return v;
}

// key of a slot assignment (slot[level]) restricted to the triple's levels
std::uint32_t key_of(const TripleView& v, const int* slot) {
    auto l = triple_levels(v.t);
    return pack3(slot[l[0]], slot[l[1]], slot[l[2]]);
}

// slots w of level `free_level` such that the triple {a, b, free_level} is in V,
// given slots for levels a and b
std::vector<int> lookup_third(const NestedState& s, int a, int sa, int b, int sb, int free_level) {
    auto v = view_of(a, b, free_level);
    int slot[5] = {0, 0, 0, 0, 0};
    slot[a] = sa;
    slot[b] = sb;
    auto l = triple_levels(v.t);
    int f = v.pos[free_level];
    int o[2], j = 0;
    for (int i = 0; i < 3; ++i)
        if (i != f) o[j++] = slot[l[i]];
    return s.third_slots(v.t, f, o[0], o[1]);
}

void guard_triples(const ScaledSizes& sz) {
    // rough expected triple counts from pair densities
    double total = 0;
    for (int t = 0; t < 10; ++t) {
        auto [x, y, z] = triple_levels(t);
        double d = 1;
        for (auto pr : {pair_id(x, y), pair_id(x, z), pair_id(y, z)}) {
            auto [a, b] = pair_levels(pr);
            d *= static_cast<double>(sz.pair_size[pr]) / (static_cast<double>(sz.k[a]) * sz.k[b]);
        }
        total += d * sz.k[x] * sz.k[y] * sz.k[z];
    }
    if (total > 4e7)
        throw DomainError("sample_state: about " + std::to_string(static_cast<long long>(total)) +
                          " candidate triples, above the 4e7 guard");
}

}  // namespace

NestedState sample_state(int n, const ParamSet& p, std::uint64_t seed, SampleDepth depth) {
    NestedState st;
    st.sizes = scale(p, n);
    const auto& sz = st.sizes;
    Rng rng(seed);
    for (int x = 0; x < 5; ++x) {
        for (auto v : sample_distinct(rng, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(sz.k[x])))
            st.A[x].push_back(static_cast<int>(v) + 1);
    }
    for (int q = 0; q < 10; ++q) {
        auto [x, y] = pair_levels(q);
        st.adj[x][y].reset(sz.k[x], sz.k[y]);
        st.adj[y][x].reset(sz.k[y], sz.k[x]);
        auto cells = static_cast<std::uint32_t>(sz.k[x]) * static_cast<std::uint32_t>(sz.k[y]);
        for (auto c : sample_distinct(rng, cells, static_cast<std::uint32_t>(sz.pair_size[q]))) {
            int a = static_cast<int>(c / sz.k[y]), b = static_cast<int>(c % sz.k[y]);
            st.adj[x][y].set(a, b);
            st.adj[y][x].set(b, a);
        }
    }
    if (depth == SampleDepth::pairs) return st;
    guard_triples(sz);

    for (int t = 0; t < 10; ++t) {
        auto [x, y, z] = triple_levels(t);
        auto& g = st.gamma3[t];
        const auto& xy = st.adj[x][y];
        const auto& xz = st.adj[x][z];
        const auto& yz = st.adj[y][z];
        for (int a = 0; a < sz.k[x]; ++a) {
            const auto* rxy = xy.row(a);
            const auto* rxz = xz.row(a);
            for (int wb = 0; wb < xy.words; ++wb) {
                for (std::uint64_t mb = rxy[wb]; mb; mb &= mb - 1) {
                    int b = wb * 64 + __builtin_ctzll(mb);
                    const auto* ryz = yz.row(b);
                    for (int wc = 0; wc < yz.words; ++wc)
                        for (std::uint64_t mc = rxz[wc] & ryz[wc]; mc; mc &= mc - 1)
                            g.push_back(pack3(a, b, wc * 64 + __builtin_ctzll(mc)));
                }
            }
        }
        // C is a uniform |C|-subset of [N]; only its part below |Γ| matters
        long need = sz.C3[t];
        auto& v = st.V3[t];
        for (std::size_t pos = 0; pos < g.size() && need > 0; ++pos) {
            auto pool = static_cast<std::uint64_t>(sz.N3[t] - static_cast<long>(pos));
            if (rng.below(pool) < static_cast<std::uint64_t>(need)) {
                v.push_back(g[pos]);
                --need;
            }
        }
    }
    st.build_index();
    if (depth == SampleDepth::triples) return st;

    for (int q = 0; q < 5; ++q) {
        auto l = quad_levels(q);
        int ab_d = triple_id(l[0], l[1], l[3]);
        int acd = triple_id(l[0], l[2], l[3]);
        int bcd = triple_id(l[1], l[2], l[3]);
        auto& g = st.gamma4[q];
        for (auto key : st.V3[triple_id(l[0], l[1], l[2])]) {
            int a = slot_of(key, 0, 3), b = slot_of(key, 1, 3), c = slot_of(key, 2, 3);
            for (int d : st.third_slots(ab_d, 2, a, b)) {
                if (!st.has_triple(acd, pack3(a, c, d)) || !st.has_triple(bcd, pack3(b, c, d))) continue;
                g.push_back(static_cast<std::uint64_t>(a) << 30 | static_cast<std::uint64_t>(b) << 20 |
                            static_cast<std::uint64_t>(c) << 10 | static_cast<std::uint64_t>(d));
            }
        }
        if (g.size() > 40'000'000) throw DomainError("sample_state: quadruple set above guard");
        long need = sz.D4[q];
        for (std::size_t pos = 0; pos < g.size() && need > 0; ++pos) {
            auto pool = static_cast<std::uint64_t>(sz.N4[q] - static_cast<long>(pos));
            if (rng.below(pool) < static_cast<std::uint64_t>(need)) {
                st.V4[q].push_back(g[pos]);
                --need;
            }
        }
    }
    return st;
}

// ---------------------------------------------------------------------------
// marked-state conditions

namespace {

enum class Cond { deg_first, deg_second, codeg, cap_yz, cap_xz, cap_xy, quad };

struct CondSpec {
    std::string name;
    Cond kind;
    int level;  // pair or triple id
    std::vector<int> extra;  // qualifying third/fourth levels
};

std::vector<CondSpec> cond_specs() {
    std::vector<CondSpec> out;
    for (int q = 0; q < 10; ++q) {
        auto [x, y] = pair_levels(q);
        std::string lab = "B" + std::to_string(x + 1) + std::to_string(y + 1);
        out.push_back({lab + ":deg" + std::to_string(x + 1), Cond::deg_first, q, {}});
        out.push_back({lab + ":deg" + std::to_string(y + 1), Cond::deg_second, q, {}});
        std::vector<int> ks;
        // level xk (or kx) comes before xy
        for (int k = 0; k < y; ++k)
            if (k != x) ks.push_back(k);
        if (!ks.empty()) out.push_back({lab + ":codeg", Cond::codeg, q, ks});
    }
    for (int t = 0; t < 10; ++t) {
        auto [x, y, z] = triple_levels(t);
        std::string lab = "C" + std::to_string(x + 1) + std::to_string(y + 1) + std::to_string(z + 1);
        out.push_back({lab + ":cap" + std::to_string(y + 1) + std::to_string(z + 1), Cond::cap_yz, t, {}});
        out.push_back({lab + ":cap" + std::to_string(x + 1) + std::to_string(z + 1), Cond::cap_xz, t, {}});
        out.push_back({lab + ":cap" + std::to_string(x + 1) + std::to_string(y + 1), Cond::cap_xy, t, {}});
        std::vector<int> ls;
        // levels xyl and xzl come before xyz
        for (int l = 0; l < y; ++l)
            if (l != x) ls.push_back(l);
        if (!ls.empty()) out.push_back({lab + ":quad", Cond::quad, t, ls});
    }
    return out;
}

struct Thresholds {
    double n;
    const ParamSet* p;
    double pw(const Rational& e) const { return std::exp(dv(e) * std::log(n)); }
    double e(std::initializer_list<int> lv) const { return dv(p->at(one_based(lv))); }
    double m(std::initializer_list<int> lv) const { return dv(p->m(one_based(lv))); }
    double pwd(double e) const { return std::exp(e * std::log(n)); }
};

struct SampleResult {
    std::vector<char> violated;
    // codeg instance (pair x<z, third y) per triple id: did it hold
    std::array<char, 10> codeg_ok{};
    std::array<char, 5> quadcond_ok{};
    std::array<char, 10> gamma_cap_ok{};
    std::array<char, 5> gamma4_cap_ok{};
};

bool codeg_violated(const NestedState& st, int x, int y, int k, double thr) {
    const auto& yx = st.adj[y][x];
    const auto& kx = st.adj[k][x];
    for (int b = 0; b < yx.rows; ++b)
        for (int c = 0; c < kx.rows; ++c)
            if (popcount_and(yx.row(b), kx.row(c), yx.words) > thr) return true;
    return false;
}

// count, per (y, z, l) slots, the x slots whose three triples xyz, xyl, xzl are all in V
bool quadcond_violated(const NestedState& st, int t, int l, double thr) {
    auto [x, y, z] = triple_levels(t);
    std::vector<std::uint64_t> keys;
    auto xzl = view_of(x, z, l);
    for (auto key : st.V3[t]) {
        int slot[5] = {0, 0, 0, 0, 0};
        slot[x] = slot_of(key, 0, 3);
        slot[y] = slot_of(key, 1, 3);
        slot[z] = slot_of(key, 2, 3);
        for (int sl : lookup_third(st, x, slot[x], y, slot[y], l)) {
            slot[l] = sl;
            if (!st.has_triple(xzl.t, key_of(xzl, slot))) continue;
            if (thr < 1) return true;
            keys.push_back(static_cast<std::uint64_t>(slot[y]) << 20 | static_cast<std::uint64_t>(slot[z]) << 10 |
                           static_cast<std::uint64_t>(sl));
        }
    }
    return max_run(keys) > thr;
}

SampleResult evaluate_sample(const NestedState& st, const ParamSet& p, const std::vector<CondSpec>& specs) {
    const auto& sz = st.sizes;
    Thresholds th{static_cast<double>(sz.n), &p};
    SampleResult res;
    res.violated.assign(specs.size(), 0);
    res.codeg_ok.fill(1);
    res.quadcond_ok.fill(1);
    // codeg outcome per (pair, third) instance
    std::array<std::array<char, 5>, 10> codeg_inst{};
    for (auto& r : codeg_inst) r.fill(1);
    std::array<std::array<char, 5>, 10> quad_inst{};
    for (auto& r : quad_inst) r.fill(1);

    for (std::size_t ci = 0; ci < specs.size(); ++ci) {
        const auto& s = specs[ci];
        bool bad = false;
        switch (s.kind) {
            case Cond::deg_first:
            case Cond::deg_second: {
                auto [x, y] = pair_levels(s.level);
                if (s.kind == Cond::deg_second) std::swap(x, y);
                double e = th.e({x, y}) - th.e({x});
                double lo = th.pwd(e) / 2, hi = 2 * th.pwd(e);
                const auto& m = st.adj[x][y];
                for (int a = 0; a < m.rows && !bad; ++a) {
                    int d = m.row_count(a);
                    bad = d < lo || d > hi;
                }
                break;
            }
            case Cond::codeg: {
                auto [x, y] = pair_levels(s.level);
                for (int k : s.extra) {
                    double thr = 11 * th.pwd(th.m({x, y, k}) - th.e({y, k}));
                    bool v = codeg_violated(st, x, y, k, thr);
                    codeg_inst[s.level][k] = !v;
                    bad = bad || v;
                }
                break;
            }
            case Cond::cap_yz:
            case Cond::cap_xz:
            case Cond::cap_xy: {
                auto [x, y, z] = triple_levels(s.level);
                int drop = s.kind == Cond::cap_yz ? 0 : s.kind == Cond::cap_xz ? 1 : 2;
                int lv[3] = {x, y, z};
                int o0 = lv[drop == 0 ? 1 : 0], o1 = lv[drop == 2 ? 1 : 2];
                double thr = th.pwd(th.e({x, y, z}) - th.e({o0, o1})) / 6;
                if (thr < 1) {
                    bad = !st.V3[s.level].empty();
                    break;
                }
                std::vector<std::uint64_t> keys;
                keys.reserve(st.V3[s.level].size());
                for (auto key : st.V3[s.level]) {
                    int sl[3] = {slot_of(key, 0, 3), slot_of(key, 1, 3), slot_of(key, 2, 3)};
                    int a = sl[drop == 0 ? 1 : 0], b = sl[drop == 2 ? 1 : 2];
                    keys.push_back(static_cast<std::uint64_t>(a) << 10 | static_cast<std::uint64_t>(b));
                }
                bad = max_run(keys) > thr;
                break;
            }
            case Cond::quad: {
                auto [x, y, z] = triple_levels(s.level);
                for (int l : s.extra) {
                    double thr = th.pwd(th.m({x, y, z, l}) - th.e({y, z, l})) / 11;
                    bool v = quadcond_violated(st, s.level, l, thr);
                    quad_inst[s.level][l] = !v;
                    bad = bad || v;
                }
                break;
            }
        }
        res.violated[ci] = bad;
    }
    // Γ_xyz <= 11 n^m follows from the codegree cap at level xz with third level y
    for (int t = 0; t < 10; ++t) {
        auto [x, y, z] = triple_levels(t);
        res.codeg_ok[t] = codeg_inst[pair_id(x, z)][y];
        double cap = 11 * th.pwd(th.m({x, y, z}));
        res.gamma_cap_ok[t] = static_cast<double>(st.gamma3[t].size()) <= cap;
    }
    // Γ_abcd <= n^{c_bcd} (1/11) n^{m - c_bcd} follows from the quad condition at acd with l = b
    for (int q = 0; q < 5; ++q) {
        auto l = quad_levels(q);
        res.quadcond_ok[q] = quad_inst[triple_id(l[0], l[2], l[3])][l[1]];
        double cbcd = th.e({l[1], l[2], l[3]});
        double cap = th.pwd(cbcd) * th.pwd(th.m({l[0], l[1], l[2], l[3]}) - cbcd) / 11;
        res.gamma4_cap_ok[q] = static_cast<double>(st.gamma4[q].size()) <= cap;
    }
    return res;
}

}  // namespace

std::vector<std::string> condition_names() {
    std::vector<std::string> out;
    for (const auto& s : cond_specs()) out.push_back(s.name);
    return out;
}

ViolationReport violation_rate(const std::vector<int>& grid, const ParamSet& p, long trials, std::uint64_t seed,
                               int threads) {
    ViolationReport rep;
    if (trials <= 0) return rep;
    auto specs = cond_specs();
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        int n = grid[gi];
        std::vector<SampleResult> results(static_cast<std::size_t>(trials));
        std::uint64_t nseed = Rng::split(seed, static_cast<std::uint64_t>(n));
        parallel_trials(trials, threads, [&](long i) {
            auto st = sample_state(n, p, Rng::split(nseed, static_cast<std::uint64_t>(i)), SampleDepth::quads);
            results[static_cast<std::size_t>(i)] = evaluate_sample(st, p, specs);
        });
        for (std::size_t ci = 0; ci < specs.size(); ++ci) {
            ConditionRate r;
            r.n = n;
            r.condition = specs[ci].name;
            r.trials = trials;
            for (const auto& s : results) r.violations += s.violated[ci];
            r.rate = static_cast<double>(r.violations) / static_cast<double>(trials);
            r.stderr_ = std::sqrt(r.rate * (1 - r.rate) / static_cast<double>(trials));
            rep.rows.push_back(r);
        }
        for (const auto& s : results) {
            for (int t = 0; t < 10; ++t) {
                ++rep.gamma_cap.checked_all;
                rep.gamma_cap.failed_all += !s.gamma_cap_ok[t];
                if (s.codeg_ok[t]) {
                    ++rep.gamma_cap.checked;
                    rep.gamma_cap.failed += !s.gamma_cap_ok[t];
                }
            }
            for (int q = 0; q < 5; ++q)
                if (s.quadcond_ok[q]) {
                    ++rep.gamma_cap.quad_checked;
                    rep.gamma_cap.quad_failed += !s.gamma4_cap_ok[q];
                }
        }
    }
    std::size_t nc = specs.size();
    for (std::size_t ci = 0; ci < nc; ++ci)
        for (std::size_t gi = 1; gi < grid.size(); ++gi) {
            const auto& prev = rep.rows[(gi - 1) * nc + ci];
            const auto& cur = rep.rows[gi * nc + ci];
            // exact comparison of violations/trials
            if (cur.violations * prev.trials > prev.violations * cur.trials) {
                rep.monotone = false;
                rep.nonmonotone.push_back(cur.condition + " n=" + std::to_string(prev.n) + "->" + std::to_string(cur.n));
            }
        }
    return rep;
}

std::string ViolationReport::to_tsv() const {
    std::ostringstream os;
    for (const auto& r : rows)
        os << r.n << '\t' << r.condition << '\t' << to_fixed(r.rate, 6) << '\t' << to_fixed(r.stderr_, 6) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// update sizes

namespace {

double inclusion(const ScaledSizes& sz, int t) {
    return static_cast<double>(sz.C3[t]) / static_cast<double>(sz.N3[t]);
}

// The estimators below average over the triple-level states analytically: a
// slot triple of Γ_T lies in V_T with probability |C_T|/N_T, independently
// across levels. What is left depends on the vertex and pair states only.

// slots of level w adjacent (in the pair states) to all three given slots
int common_neighbours(const NestedState& st, const int* lv, const int* slots, int w) {
    const auto& m0 = st.adj[lv[0]][w];
    const auto* r0 = m0.row(slots[0]);
    const auto* r1 = st.adj[lv[1]][w].row(slots[1]);
    const auto* r2 = st.adj[lv[2]][w].row(slots[2]);
    int c = 0;
    for (int i = 0; i < m0.words; ++i) c += __builtin_popcountll(r0[i] & r1[i] & r2[i]);
    return c;
}

// sum over triples t in Γ_t of the number of w-slots completing a quadruple
// whose four faces all lie in Γ
double gamma_completions(const NestedState& st, int t, int w) {
    auto l = triple_levels(t);
    int lv[3] = {l[0], l[1], l[2]};
    double total = 0;
    for (auto key : st.gamma3[t]) {
        int sl[3] = {slot_of(key, 0, 3), slot_of(key, 1, 3), slot_of(key, 2, 3)};
        total += common_neighbours(st, lv, sl, w);
    }
    return total;
}

// expected new quadruples through a fresh slot of level x, summed over its slots
double vertex_total(const NestedState& st, int x, int q) {
    auto l = quad_levels(q);
    int o[3], j = 0;
    for (int v : l)
        if (v != x) o[j++] = v;
    const auto& sz = st.sizes;
    return gamma_completions(st, triple_id(o[0], o[1], o[2]), x) * inclusion(sz, triple_id(o[0], o[1], o[2])) *
           inclusion(sz, triple_id(x, o[0], o[1])) * inclusion(sz, triple_id(x, o[0], o[2])) *
           inclusion(sz, triple_id(x, o[1], o[2]));
}

// Γ_t projected onto the two levels other than `drop`, sorted
std::vector<std::uint32_t> project(const NestedState& st, int t, int drop_level) {
    auto l = triple_levels(t);
    std::vector<std::uint32_t> keys;
    keys.reserve(st.gamma3[t].size());
    for (auto key : st.gamma3[t]) {
        int s[2] = {0, 0}, j = 0;
        for (int i = 0; i < 3; ++i)
            if (l[i] != drop_level) s[j++] = slot_of(key, i, 3);
        keys.push_back(static_cast<std::uint32_t>(s[0]) << 10 | static_cast<std::uint32_t>(s[1]));
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

// expected new quadruples through a fresh pair of level (x, y), summed over all slot pairs
double pair_total(const NestedState& st, int x, int y, int q) {
    auto l = quad_levels(q);
    int o[2], j = 0;
    for (int v : l)
        if (v != x && v != y) o[j++] = v;
    int t1 = triple_id(x, o[0], o[1]), t2 = triple_id(y, o[0], o[1]);
    auto k1 = project(st, t1, x);
    auto k2 = project(st, t2, y);
    double total = 0;
    std::size_t i1 = 0, i2 = 0;
    while (i1 < k1.size() && i2 < k2.size()) {
        if (k1[i1] < k2[i2]) {
            ++i1;
        } else if (k2[i2] < k1[i1]) {
            ++i2;
        } else {
            auto key = k1[i1];
            double c1 = 0, c2 = 0;
            while (i1 < k1.size() && k1[i1] == key) ++i1, ++c1;
            while (i2 < k2.size() && k2[i2] == key) ++i2, ++c2;
            total += c1 * c2;
        }
    }
    const auto& sz = st.sizes;
    return total * inclusion(sz, t1) * inclusion(sz, t2) * inclusion(sz, triple_id(x, y, o[0])) *
           inclusion(sz, triple_id(x, y, o[1]));
}

// quadruples completed by the slot triple `key` of level t together with level w,
// counted against the sampled V (used for concrete loads)
int triple_count(const NestedState& st, int t, std::uint32_t key, int w) {
    auto l = triple_levels(t);
    int slot[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < 3; ++i) slot[l[i]] = slot_of(key, i, 3);
    auto v2 = view_of(l[0], l[2], w);
    auto v3 = view_of(l[1], l[2], w);
    int c = 0;
    for (int sw : lookup_third(st, l[0], slot[l[0]], l[1], slot[l[1]], w)) {
        slot[w] = sw;
        if (st.has_triple(v2.t, key_of(v2, slot)) && st.has_triple(v3.t, key_of(v3, slot))) ++c;
    }
    return c;
}

struct ScaleCase {
    LoadKind kind;
    int level;  // vertex level, pair id or triple id
    int quad;
    std::string level_label, quad_label;
    double predicted;
};

std::vector<ScaleCase> scale_cases(const ParamSet& p, LoadKind kind) {
    std::vector<ScaleCase> out;
    const auto& ls = levels();
    for (std::size_t li = 0; li < 25; ++li) {
        const auto& lev = ls[li];
        LoadKind k = lev.idx.size() == 1 ? LoadKind::vertex : lev.idx.size() == 2 ? LoadKind::pair : LoadKind::triple;
        if (k != kind) continue;
        for (int q = 0; q < 5; ++q) {
            const auto& ql = ls[25 + q];
            if (!std::includes(ql.idx.begin(), ql.idx.end(), lev.idx.begin(), lev.idx.end())) continue;
            ScaleCase c;
            c.kind = k;
            std::vector<int> z;
            for (int i : lev.idx) z.push_back(i - 1);
            c.level = k == LoadKind::vertex ? z[0] : k == LoadKind::pair ? pair_id(z[0], z[1]) : triple_id(z[0], z[1], z[2]);
            c.quad = q;
            c.level_label = lev.label();
            c.quad_label = ql.label();
            c.predicted = dv(p.m(ql.idx) - p.at(lev.idx));
            out.push_back(c);
        }
    }
    return out;
}

double case_value(const NestedState& st, const ScaleCase& c) {
    const auto& sz = st.sizes;
    switch (c.kind) {
        case LoadKind::vertex:
            return vertex_total(st, c.level, c.quad) / sz.k[c.level];
        case LoadKind::pair: {
            auto [x, y] = pair_levels(c.level);
            return pair_total(st, x, y, c.quad) / (static_cast<double>(sz.k[x]) * sz.k[y]);
        }
        case LoadKind::triple: {
            // a fresh index of [N_t] hits Γ_t[s] with probability 1/N_t per position
            auto tl = triple_levels(c.level);
            int w = -1;
            for (int v : quad_levels(c.quad))
                if (v != tl[0] && v != tl[1] && v != tl[2]) w = v;
            return gamma_completions(st, c.level, w) / static_cast<double>(sz.N3[c.level]) *
                   inclusion(sz, triple_id(tl[0], tl[1], w)) * inclusion(sz, triple_id(tl[0], tl[2], w)) *
                   inclusion(sz, triple_id(tl[1], tl[2], w));
        }
    }
    return 0;
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: need matching series of length >= 2");
    double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) return std::nan("");
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ScalingReport update_size_scaling(const std::vector<int>& grid, const ParamSet& p, LoadKind kind, long trials,
                                  std::uint64_t seed, int threads) {
    if (grid.size() < 3) throw DomainError("update_size_scaling: need at least 3 grid points");
    if (trials <= 0) throw DomainError("update_size_scaling: need trials > 0");
    ScalingReport rep;
    rep.grid = grid;
    auto cases = scale_cases(p, kind);
    std::vector<std::vector<double>> means(cases.size(), std::vector<double>(grid.size(), 0.0));
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        int n = grid[gi];
        std::uint64_t nseed = Rng::split(seed, static_cast<std::uint64_t>(n));
        std::vector<std::vector<double>> vals(static_cast<std::size_t>(trials));
        parallel_trials(trials, threads, [&](long i) {
            std::uint64_t ts = Rng::split(nseed, static_cast<std::uint64_t>(i));
            auto st = sample_state(n, p, ts, SampleDepth::triples);
            auto& out = vals[static_cast<std::size_t>(i)];
            for (const auto& c : cases) out.push_back(case_value(st, c));
        });
        for (std::size_t ci = 0; ci < cases.size(); ++ci) {
            double s = 0;
            for (const auto& v : vals) s += v[ci];
            means[ci][gi] = s / static_cast<double>(trials);
        }
    }
    std::vector<double> xs(grid.begin(), grid.end());
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        ScalingRow r;
        r.level = cases[ci].level_label;
        r.quad = cases[ci].quad_label;
        r.predicted = cases[ci].predicted;
        r.mean_gamma = means[ci];
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            auto sz = scale(p, grid[gi]);
            r.mean_v.push_back(means[ci][gi] * static_cast<double>(sz.D4[cases[ci].quad]) /
                               static_cast<double>(sz.N4[cases[ci].quad]));
        }
        r.fitted = loglog_slope(xs, r.mean_gamma);
        r.residual = r.fitted - r.predicted;
        double a = std::isnan(r.residual) ? INFINITY : std::abs(r.residual);
        rep.max_abs_residual = std::max(rep.max_abs_residual, a);
        rep.rows.push_back(r);
    }
    return rep;
}

std::string ScalingReport::to_tsv() const {
    std::ostringstream os;
    for (const auto& r : rows)
        os << r.level << "/" << r.quad << '\t' << to_fixed(r.predicted, 6) << '\t' << to_fixed(r.fitted, 6) << '\t'
           << to_fixed(r.residual, 6) << '\n';
    return os.str();
}

double load_delta(const NestedState& s, const ParamSet& p, int level, long element) {
    (void)p;
    const auto& ls = levels();
    if (level < 0 || level >= 25) throw DomainError("load_delta: level must be a vertex, pair or triple level");
    const auto& lev = ls[level];
    std::vector<int> z;
    for (int i : lev.idx) z.push_back(i - 1);
    const auto& sz = s.sizes;
    if (z.size() == 1) {
        if (element < 0 || element >= sz.k[z[0]]) throw DomainError("load_delta: slot out of range");
        return 0;  // sampled vertex states have every slot filled
    }
    if (z.size() == 2) {
        int x = z[0], y = z[1];
        long cells = static_cast<long>(sz.k[x]) * sz.k[y];
        if (element < 0 || element >= cells) throw DomainError("load_delta: pair index out of range");
        int a = static_cast<int>(element / sz.k[y]), b = static_cast<int>(element % sz.k[y]);
        if (s.adj[x][y].test(a, b)) return 0;
        double total = 0;
        for (int q = 0; q < 5; ++q) {
            auto l = quad_levels(q);
            if (std::find(l.begin(), l.end(), x) == l.end() || std::find(l.begin(), l.end(), y) == l.end()) continue;
            int o[2], j = 0;
            for (int v : l)
                if (v != x && v != y) o[j++] = v;
            auto v1 = view_of(x, o[0], o[1]);
            auto v2 = view_of(y, o[0], o[1]);
            double c = 0;
            int slot[5] = {0, 0, 0, 0, 0};
            slot[x] = a;
            slot[y] = b;
            for (auto key : s.V3[v1.t]) {
                if (slot_of(key, v1.pos[x], 3) != a) continue;
                slot[o[0]] = slot_of(key, v1.pos[o[0]], 3);
                slot[o[1]] = slot_of(key, v1.pos[o[1]], 3);
                if (s.has_triple(v2.t, key_of(v2, slot))) ++c;
            }
            total += c * inclusion(sz, triple_id(x, y, o[0])) * inclusion(sz, triple_id(x, y, o[1]));
        }
        return total;
    }
    int t = triple_id(z[0], z[1], z[2]);
    if (element < 0 || element >= sz.N3[t]) throw DomainError("load_delta: triple index out of range");
    const auto& g = s.gamma3[t];
    if (element >= static_cast<long>(g.size())) return 0;
    auto key = g[static_cast<std::size_t>(element)];
    if (s.has_triple(t, key)) return 0;
    double total = 0;
    for (int w = 0; w < 5; ++w)
        if (w != z[0] && w != z[1] && w != z[2]) total += triple_count(s, t, key, w);
    return total;
}

}  // namespace hsf
