#include "hsf/hypergraph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace hsf {

Hypergraph::Hypergraph(int n, int r) : n_(n), r_(r) {
    if (r < 1) throw DomainError("rank must be >= 1");
    if (n < r) throw DomainError("need n >= r");
}

bool Hypergraph::add_edge(Edge e) {
    if (static_cast<int>(e.size()) != r_)
        throw DomainError("edge of size " + std::to_string(e.size()) + " in rank-" + std::to_string(r_) + " hypergraph");
    std::sort(e.begin(), e.end());
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] < 1 || e[i] > n_) throw DomainError("vertex " + std::to_string(e[i]) + " outside [1, n]");
        if (i && e[i] == e[i - 1]) throw DomainError("repeated vertex in edge");
    }
    return edges_.insert(std::move(e)).second;
}

std::string Hypergraph::to_text() const {
    std::ostringstream os;
    os << n_ << ' ' << r_ << '\n';
    for (const auto& e : edges_) {
        for (std::size_t i = 0; i < e.size(); ++i) os << (i ? " " : "") << e[i];
        os << '\n';
    }
    return os.str();
}

namespace {
int parse_int(const std::string& tok, int line) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(tok, &used);
    } catch (const std::exception&) {
        throw FormatError(line, "expected integer, got '" + tok + "'");
    }
    if (used != tok.size()) throw FormatError(line, "expected integer, got '" + tok + "'");
    return static_cast<int>(v);
}
}  // namespace

Hypergraph Hypergraph::parse(std::string_view text) {
    if (!text.empty() && text.back() != '\n') {
        int lines = 1 + static_cast<int>(std::count(text.begin(), text.end(), '\n'));
        throw FormatError(lines, "missing trailing newline");
    }
    std::optional<Hypergraph> g;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.front() == '#') continue;
        auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (!g) {
            if (tok.size() != 2) throw FormatError(line_no, "header must be 'n r'");
            int n = parse_int(tok[0], line_no), r = parse_int(tok[1], line_no);
            try {
                g.emplace(n, r);
            } catch (const DomainError& e) {
                throw FormatError(line_no, e.what());
            }
            continue;
        }
        if (static_cast<int>(tok.size()) != g->r())
            throw FormatError(line_no, "edge needs " + std::to_string(g->r()) + " vertices");
        Edge e;
        for (const auto& t : tok) e.push_back(parse_int(t, line_no));
        for (std::size_t i = 1; i < e.size(); ++i)
            if (e[i] <= e[i - 1]) throw FormatError(line_no, "edge vertices must be strictly ascending");
        bool fresh = false;
        try {
            fresh = g->add_edge(e);
        } catch (const DomainError& ex) {
            throw FormatError(line_no, ex.what());
        }
        if (!fresh) throw FormatError(line_no, "duplicate edge");
    }
    if (!g) throw FormatError(line_no, "missing 'n r' header");
    return std::move(*g);
}

Hypergraph Hypergraph::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(0, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::vector<Edge> faces(const std::vector<int>& s) {
    std::vector<Edge> out;
    for (std::size_t drop = s.size(); drop-- > 0;) {
        Edge f;
        f.reserve(s.size() - 1);
        for (std::size_t i = 0; i < s.size(); ++i)
            if (i != drop) f.push_back(s[i]);
        out.push_back(std::move(f));
    }
    return out;
}

bool is_simplex(const Hypergraph& g, const std::vector<int>& s) {
    if (static_cast<int>(s.size()) != g.r() + 1) return false;
    for (const auto& f : faces(s))
        if (!g.has_edge(f)) return false;
    return true;
}

bool for_each_subset(int n, int k, const std::function<bool(const std::vector<int>&)>& f) {
    if (k < 0 || k > n) return true;
    std::vector<int> s(k);
    for (int i = 0; i < k; ++i) s[i] = i + 1;
    for (;;) {
        if (!f(s)) return false;
        int i = k - 1;
        while (i >= 0 && s[i] == n - k + i + 1) --i;
        if (i < 0) return true;
        ++s[i];
        for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
    }
}

std::optional<Simplex> find_simplex(OracleView& view) {
    const Hypergraph& g = view.graph();
    int k = g.r() + 1;
    if (k > g.n()) throw DomainError("find_simplex: r+1 > n");
    std::optional<Simplex> found;
    for_each_subset(g.n(), k, [&](const std::vector<int>& s) {
        for (std::size_t drop = s.size(); drop-- > 0;) {
            Edge f;
            for (std::size_t i = 0; i < s.size(); ++i)
                if (i != drop) f.push_back(s[i]);
            if (!view.query(f)) return true;
        }
        found = Simplex{s};
        return false;
    });
    return found;
}

namespace {
void extend(const Hypergraph& g, std::vector<int>& cur, int next, std::vector<Simplex>& out) {
    int r = g.r();
    if (static_cast<int>(cur.size()) == r + 1) {
        out.push_back(Simplex{cur});
        return;
    }
    int need = r + 1 - static_cast<int>(cur.size());
    for (int v = next; v <= g.n() - need + 1; ++v) {
        cur.push_back(v);
        bool ok = true;
        if (static_cast<int>(cur.size()) >= r) {
            // r-subsets of cur that contain v: drop one of the earlier elements
            int m = static_cast<int>(cur.size());
            if (m == r) {
                ok = g.has_edge(cur);
            } else {
                for (int drop = 0; drop < m - 1 && ok; ++drop) {
                    Edge f;
                    for (int i = 0; i < m; ++i)
                        if (i != drop) f.push_back(cur[i]);
                    ok = g.has_edge(f);
                }
            }
        }
        if (ok) extend(g, cur, v + 1, out);
        cur.pop_back();
    }
}
}  // namespace

std::vector<Simplex> find_all_simplices(const Hypergraph& g) {
    std::vector<Simplex> out;
    std::vector<int> cur;
    extend(g, cur, 1, out);
    return out;
}

namespace {
void check_density(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("density must lie in [0, 1]");
}
void guard_subsets(int n, int r) {
    if (binomial(n, r) > 20'000'000) throw DomainError("too many potential edges to enumerate");
}
}  // namespace

PlantedInstance planted_instance(int n, int r, double noise_density, std::uint64_t seed) {
    if (r < 1 || r + 1 > n) throw DomainError("planted_instance: need 1 <= r and r+1 <= n");
    check_density(noise_density);
    guard_subsets(n, r);
    Rng rng(seed);
    auto pick = sample_distinct(rng, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(r + 1));
    std::vector<int> s;
    for (auto x : pick) s.push_back(static_cast<int>(x) + 1);
    std::sort(s.begin(), s.end());
    Hypergraph g(n, r);
    for (auto& f : faces(s)) g.add_edge(f);
    for_each_subset(n, r, [&](const std::vector<int>& e) {
        if (!g.stored(e) && rng.bernoulli(noise_density)) g.add_edge(e);
        return true;
    });
    return {std::move(g), Simplex{s}};
}

Hypergraph random_hypergraph(int n, int r, double density, std::uint64_t seed) {
    check_density(density);
    guard_subsets(n, r);
    Rng rng(seed);
    Hypergraph g(n, r);
    for_each_subset(n, r, [&](const std::vector<int>& e) {
        if (rng.bernoulli(density)) g.add_edge(e);
        return true;
    });
    return g;
}

std::pair<Rational, Rational> trivial_exponents(int r) {
    if (r < 1) throw DomainError("trivial_exponents: r >= 1");
    return {frac(r, 2), frac(r + 1, 2)};
}

}  // namespace hsf
