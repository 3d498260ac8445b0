#include "hsf/reduction.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace hsf {

void ReductionInput::check() const {
    if (r < 0 || n <= r) throw DomainError("reduction: need 0 <= r < n");
    if (n % (r + 1) != 0) throw DomainError("reduction: n must be divisible by r+1");
    for (const auto& [v, g] : graphs) {
        if (v < 1 || v > n) throw DomainError("reduction: label vertex " + std::to_string(v) + " outside [1, n]");
        if (g.n() != n || g.r() != r) throw DomainError("reduction: input graph for v=" + std::to_string(v) + " has mismatched n or r");
    }
}

Partition random_partition(int n, int parts, Rng& rng) {
    if (parts <= 0 || n % parts != 0) throw DomainError("partition: n must be divisible by the block count");
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i + 1;
    rng.shuffle(perm);
    Partition p;
    p.parts = parts;
    p.block_of.assign(n + 1, -1);
    int size = n / parts;
    for (int i = 0; i < n; ++i) p.block_of[perm[i]] = i / size;
    return p;
}

Hypergraph build_reduction(const ReductionInput& in, const Partition& part) {
    in.check();
    if (part.parts != in.r + 1 || static_cast<int>(part.block_of.size()) != in.n + 1)
        throw DomainError("reduction: partition does not match (n, r)");
    std::vector<int> count(part.parts, 0);
    for (int b = 1; b <= in.n; ++b) {
        int k = part.block_of[b];
        if (k < 0 || k >= part.parts) throw DomainError("reduction: vertex outside partition");
        ++count[k];
    }
    for (int c : count)
        if (c != in.n / part.parts) throw DomainError("reduction: partition blocks must be equal");

    int n = in.n;
    Hypergraph g(2 * n, in.r + 1);
    for (const auto& [v, gv] : in.graphs) {
        for (const auto& e : gv.edges()) {
            Edge lifted{v};
            for (int x : e) lifted.push_back(x + n);
            g.add_edge(lifted);
        }
    }
    auto blocks = part.block_of;
    int parts = part.parts;
    g.set_implicit([n, parts, blocks](const Edge& e) {
        std::vector<char> used(parts, 0);
        for (int x : e) {
            if (x <= n) return false;
            int k = blocks[x - n];
            if (used[k]) return false;
            used[k] = 1;
        }
        return true;
    });
    return g;
}

Hypergraph build_reduction(const ReductionInput& in, std::uint64_t seed) {
    Rng rng(seed);
    return build_reduction(in, random_partition(in.n, in.r + 1, rng));
}

std::optional<Decoded> decode(const Simplex& s, int n) {
    Decoded d;
    int a_count = 0;
    for (int x : s.vertices) {
        if (x <= n) {
            d.v = x;
            ++a_count;
        } else {
            d.simplex.vertices.push_back(x - n);
        }
    }
    if (a_count != 1) return std::nullopt;
    return d;
}

Rational success_probability(int n, int r) {
    if (r < 0 || n <= r || n % (r + 1) != 0) throw DomainError("success_probability: need r >= 0, n > r, (r+1) | n");
    Rational p = 1;
    for (int i = 1; i <= r; ++i) p *= frac(r + 1 - i, r + 1) * frac(n, n - i);
    return p;
}

TrialResult reduction_trial(const ReductionInput& in, std::uint64_t trial_seed) {
    Hypergraph g = build_reduction(in, trial_seed);
    TrialResult t;
    for (const auto& s : find_all_simplices(g)) {
        t.success = true;
        auto d = decode(s, in.n);
        bool ok = false;
        if (d) {
            auto it = in.graphs.find(d->v);
            ok = it != in.graphs.end() && is_simplex(it->second, d->simplex.vertices);
        }
        if (ok)
            t.recovered.push_back(*d);
        else
            ++t.decode_failures;
    }
    return t;
}

ReductionReport run_reduction_trials(const ReductionInput& in, long trials, std::uint64_t seed) {
    in.check();
    ReductionReport rep;
    rep.exact = success_probability(in.n, in.r);
    std::set<Decoded> truth;
    for (const auto& [v, g] : in.graphs)
        for (const auto& s : find_all_simplices(g)) truth.insert(Decoded{v, s});
    rep.any_input_simplex = !truth.empty();
    if (trials <= 0) return rep;
    rep.trials = trials;
    for (long i = 0; i < trials; ++i) {
        auto t = reduction_trial(in, Rng::split(seed, static_cast<std::uint64_t>(i)));
        if (t.success) ++rep.successes;
        rep.decode_failures += t.decode_failures;
        for (const auto& d : t.recovered) {
            if (!truth.count(d)) ++rep.foreign_decodes;
            rep.recovered.insert(d);
        }
    }
    rep.rate = static_cast<double>(rep.successes) / static_cast<double>(trials);
    double p = rep.exact.get_d();
    // standard error under the exact success probability
    rep.stderr_ = std::sqrt(p * (1 - p) / static_cast<double>(trials));
    if (!rep.any_input_simplex)
        rep.within_3sigma = rep.successes == 0;
    else
        rep.within_3sigma = std::abs(rep.rate - p) <= 3 * rep.stderr_;
    return rep;
}

ReductionInput single_planted_input(int n, int r, std::uint64_t seed) {
    ReductionInput in;
    in.n = n;
    in.r = r;
    in.graphs.emplace(1, planted_instance(n, r, 0.0, seed).graph);
    in.check();
    return in;
}

namespace {
std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        out.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return out;
}
bool skippable(std::string_view l) { return trim(l).empty() || (!l.empty() && l.front() == '#'); }
}  // namespace

ReductionInput ReductionInput::parse(std::string_view text) {
    if (!text.empty() && text.back() != '\n')
        throw FormatError(static_cast<int>(lines_of(text).size()), "missing trailing newline");
    auto lines = lines_of(text);
    std::size_t i = 0;
    auto ints = [](std::string_view l, int line_no) {
        std::vector<long> out;
        for (const auto& t : split_ws(l)) {
            std::size_t used = 0;
            try {
                out.push_back(std::stol(t, &used));
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != t.size() || t.empty()) throw FormatError(line_no, "expected integer, got '" + t + "'");
        }
        return out;
    };
    while (i < lines.size() && skippable(lines[i])) ++i;
    if (i == lines.size()) throw FormatError(static_cast<int>(i), "missing 'n r m' header");
    auto head = ints(lines[i], static_cast<int>(i + 1));
    if (head.size() != 3) throw FormatError(static_cast<int>(i + 1), "header must be 'n r m'");
    ReductionInput in;
    in.n = static_cast<int>(head[0]);
    in.r = static_cast<int>(head[1]);
    long m = head[2];
    ++i;
    for (long b = 0; b < m; ++b) {
        while (i < lines.size() && skippable(lines[i])) ++i;
        if (i == lines.size()) throw FormatError(static_cast<int>(i), "expected " + std::to_string(m) + " blocks");
        int v_line = static_cast<int>(i + 1);
        auto v = ints(lines[i], v_line);
        if (v.size() != 1) throw FormatError(v_line, "block must start with a single label vertex");
        ++i;
        std::size_t start = i;
        std::string block;
        while (i < lines.size() && !trim(lines[i]).empty()) {
            block.append(lines[i]);
            block.push_back('\n');
            ++i;
        }
        if (in.graphs.count(static_cast<int>(v[0]))) throw FormatError(v_line, "duplicate label vertex");
        try {
            Hypergraph g = Hypergraph::parse(block);
            if (g.n() != in.n || g.r() != in.r) throw FormatError(1, "block graph must be '" + std::to_string(in.n) + " " + std::to_string(in.r) + "'");
            in.graphs.emplace(static_cast<int>(v[0]), std::move(g));
        } catch (const FormatError& e) {
            // re-anchor the block-relative line number
            std::string msg = e.what();
            auto colon = msg.find(": ");
            if (e.line > 0 && colon != std::string::npos) msg = msg.substr(colon + 2);
            throw FormatError(static_cast<int>(start) + std::max(e.line, 1), msg);
        }
    }
    while (i < lines.size() && skippable(lines[i])) ++i;
    if (i != lines.size()) throw FormatError(static_cast<int>(i + 1), "trailing content after last block");
    try {
        in.check();
    } catch (const DomainError& e) {
        throw FormatError(1, e.what());
    }
    return in;
}

ReductionInput ReductionInput::read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError(0, "cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::string ReductionInput::to_text() const {
    std::ostringstream os;
    os << n << ' ' << r << ' ' << graphs.size() << '\n';
    for (const auto& [v, g] : graphs) os << '\n' << v << '\n' << g.to_text();
    return os.str();
}

}  // namespace hsf
