#include "hsf/learning_graph.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

namespace hsf {

bool is_subset(const IndexSet& a, const IndexSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

IndexSet set_minus(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// ---- ordered partial subsets ----

OrderedPartialSubset OrderedPartialSubset::from_slots(std::vector<int> slots) {
    std::vector<int> seen;
    for (int x : slots) {
        if (x == kStar) continue;
        if (x < 0) throw DomainError("negative element in ordered partial subset");
        seen.push_back(x);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw DomainError("repeated element in ordered partial subset");
    OrderedPartialSubset a;
    a.slots_ = std::move(slots);
    return a;
}

int OrderedPartialSubset::size() const {
    return static_cast<int>(std::count_if(slots_.begin(), slots_.end(), [](int x) { return x != kStar; }));
}

bool OrderedPartialSubset::contains(int x) const { return position(x) >= 0; }

int OrderedPartialSubset::position(int x) const {
    if (x == kStar) return -1;
    auto it = std::find(slots_.begin(), slots_.end(), x);
    return it == slots_.end() ? -1 : static_cast<int>(it - slots_.begin());
}

OrderedPartialSubset OrderedPartialSubset::with(int v) const {
    if (v < 0) throw DomainError("cannot insert a star");
    if (contains(v)) throw DomainError("element " + std::to_string(v) + " already present");
    auto it = std::find(slots_.begin(), slots_.end(), kStar);
    if (it == slots_.end()) throw DomainError("ordered partial subset is full");
    OrderedPartialSubset out = *this;
    out.slots_[static_cast<std::size_t>(it - slots_.begin())] = v;
    return out;
}

OrderedPartialSubset OrderedPartialSubset::with(int v, Rng& rng) const {
    if (v < 0) throw DomainError("cannot insert a star");
    if (contains(v)) throw DomainError("element " + std::to_string(v) + " already present");
    std::vector<std::size_t> stars;
    for (std::size_t i = 0; i < slots_.size(); ++i)
        if (slots_[i] == kStar) stars.push_back(i);
    if (stars.empty()) throw DomainError("ordered partial subset is full");
    OrderedPartialSubset out = *this;
    out.slots_[stars[rng.below(stars.size())]] = v;
    return out;
}

bool OrderedPartialSubset::subset_of(const OrderedPartialSubset& b) const {
    if (b.capacity() != capacity()) return false;
    for (std::size_t i = 0; i < slots_.size(); ++i)
        if (slots_[i] != kStar && slots_[i] != b.slots_[i]) return false;
    return true;
}

IndexSet OrderedPartialSubset::elements() const {
    IndexSet out;
    for (int x : slots_)
        if (x != kStar) out.push_back(x);
    std::sort(out.begin(), out.end());
    return out;
}

std::string OrderedPartialSubset::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (i) s += ',';
        s += slots_[i] == kStar ? std::string("*") : std::to_string(slots_[i]);
    }
    return s + ")";
}

// ---- graph ----

int LearningGraph::add_vertex(IndexSet label) {
    std::sort(label.begin(), label.end());
    if (std::adjacent_find(label.begin(), label.end()) != label.end())
        throw DomainError("vertex label has repeated index");
    if (!label.empty() && label.front() < 0) throw DomainError("negative index in vertex label");
    labels_.push_back(std::move(label));
    return num_vertices() - 1;
}

int LearningGraph::add_edge(int u, int v, Rational w) {
    if (u < 0 || v < 0 || u >= num_vertices() || v >= num_vertices()) throw DomainError("edge endpoint out of range");
    int len = static_cast<int>(set_minus(label(v), label(u)).size());
    Weight wt;
    wt.constant = std::move(w);
    return add_edge(u, v, len, std::move(wt));
}

int LearningGraph::add_edge(int u, int v, int length, Weight w) {
    if (u < 0 || v < 0 || u >= num_vertices() || v >= num_vertices()) throw DomainError("edge endpoint out of range");
    edges_.push_back(LgEdge{u, v, length, std::move(w)});
    return num_edges() - 1;
}

int LearningGraph::add_input(Bits z) {
    for (auto b : z)
        if (b > 1) throw DomainError("input bits must be 0 or 1");
    inputs_.push_back(std::move(z));
    certs_.emplace_back();
    flows_.emplace_back();
    return num_inputs() - 1;
}

void LearningGraph::set_certificate(int input, IndexSet cert) {
    std::sort(cert.begin(), cert.end());
    cert.erase(std::unique(cert.begin(), cert.end()), cert.end());
    certs_.at(static_cast<std::size_t>(input)) = std::move(cert);
}

void LearningGraph::set_flow(int input, int e, const Rational& f) {
    if (e < 0 || e >= num_edges()) throw DomainError("flow on unknown edge " + std::to_string(e));
    auto& m = flows_.at(static_cast<std::size_t>(input));
    if (f == 0)
        m.erase(e);
    else
        m[e] = f;
}

void LearningGraph::add_flow(int input, int e, const Rational& f) {
    Rational cur = 0;
    auto& m = flows_.at(static_cast<std::size_t>(input));
    if (auto it = m.find(e); it != m.end()) cur = it->second;
    set_flow(input, e, cur + f);
}

std::vector<int> LearningGraph::one_inputs() const {
    std::vector<int> out;
    for (int i = 0; i < num_inputs(); ++i)
        if (is_one_input(i)) out.push_back(i);
    return out;
}

std::vector<int> LearningGraph::zero_inputs() const {
    std::vector<int> out;
    for (int i = 0; i < num_inputs(); ++i)
        if (!is_one_input(i)) out.push_back(i);
    return out;
}

int LearningGraph::root() const {
    for (int v = 0; v < num_vertices(); ++v)
        if (label(v).empty()) return v;
    return -1;
}

namespace {
std::string loaded_key(const IndexSet& label, const Bits& z) {
    std::string key;
    key.reserve(label.size());
    for (int i : label) {
        if (static_cast<std::size_t>(i) >= z.size()) throw DomainError("input too short for label index " + std::to_string(i));
        key += z[static_cast<std::size_t>(i)] ? '1' : '0';
    }
    return key;
}
}  // namespace

Rational LearningGraph::weight(int e, const Bits& z) const {
    const auto& ed = edge(e);
    if (!ed.weight.adaptive()) return ed.weight.constant;
    std::string key = loaded_key(label(ed.to), z);
    auto it = ed.weight.table.find(key);
    if (it == ed.weight.table.end())
        throw DomainError("edge " + std::to_string(e) + " has no weight for loaded bits '" + key + "'");
    return it->second;
}

// ---- text format ----

namespace {
std::string join(const IndexSet& s) {
    std::string out;
    for (int x : s) out += " " + std::to_string(x);
    return out;
}

int to_int(const std::string& tok, int line) {
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

Rational to_rat(const std::string& tok, int line) {
    try {
        return parse_rational(tok);
    } catch (const std::exception& e) {
        throw FormatError(line, e.what());
    }
}
}  // namespace

std::string LearningGraph::to_text() const {
    std::ostringstream out;
    for (int v = 0; v < num_vertices(); ++v) out << "vertex " << v << join(label(v)) << '\n';
    for (int e = 0; e < num_edges(); ++e) {
        const auto& ed = edge(e);
        out << "edge " << e << ' ' << ed.from << ' ' << ed.to << ' ' << ed.length << '\n';
    }
    for (int e = 0; e < num_edges(); ++e) {
        const auto& w = edge(e).weight;
        out << "weight " << e;
        if (w.adaptive()) {
            out << " table";
            for (const auto& [k, val] : w.table) out << ' ' << (k.empty() ? "-" : k) << '=' << to_string(val);
        } else {
            out << ' ' << to_string(w.constant);
        }
        out << '\n';
    }
    for (int i = 0; i < num_inputs(); ++i) {
        out << "input " << i << ' ';
        for (auto b : input(i)) out << static_cast<char>('0' + b);
        out << '\n';
        if (certificate(i)) out << "certificate " << i << join(*certificate(i)) << '\n';
    }
    for (int i = 0; i < num_inputs(); ++i)
        for (const auto& [e, f] : flow(i)) out << "flow " << i << ' ' << e << ' ' << to_string(f) << '\n';
    return out.str();
}

LearningGraph LearningGraph::parse(const std::string& text) {
    LearningGraph g;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::vector<bool> weighted;
    auto expect_id = [&](const std::string& tok, int next, const char* what) {
        int id = to_int(tok, line_no);
        if (id != next)
            throw FormatError(line_no, std::string(what) + " ids must be consecutive from 0; expected " +
                                           std::to_string(next) + ", got " + tok);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto tok = split_ws(line);
        const std::string& kw = tok[0];
        try {
            if (kw == "vertex") {
                if (tok.size() < 2) throw FormatError(line_no, "vertex needs an id");
                expect_id(tok[1], g.num_vertices(), "vertex");
                IndexSet label;
                for (std::size_t i = 2; i < tok.size(); ++i) label.push_back(to_int(tok[i], line_no));
                if (!std::is_sorted(label.begin(), label.end()))
                    throw FormatError(line_no, "vertex label must be sorted");
                g.add_vertex(std::move(label));
            } else if (kw == "edge") {
                if (tok.size() != 5) throw FormatError(line_no, "edge needs 'edge <id> <u> <v> <length>'");
                expect_id(tok[1], g.num_edges(), "edge");
                int u = to_int(tok[2], line_no), v = to_int(tok[3], line_no), len = to_int(tok[4], line_no);
                g.add_edge(u, v, len, Weight{});
                weighted.push_back(false);
            } else if (kw == "weight") {
                if (tok.size() < 3) throw FormatError(line_no, "weight needs an edge id and a value");
                int e = to_int(tok[1], line_no);
                if (e < 0 || e >= g.num_edges()) throw FormatError(line_no, "weight for unknown edge " + tok[1]);
                if (weighted[static_cast<std::size_t>(e)]) throw FormatError(line_no, "duplicate weight for edge " + tok[1]);
                Weight w;
                if (tok[2] == "table") {
                    if (tok.size() < 4) throw FormatError(line_no, "empty weight table");
                    for (std::size_t i = 3; i < tok.size(); ++i) {
                        auto eq = tok[i].find('=');
                        if (eq == std::string::npos) throw FormatError(line_no, "table entry must be bits=value");
                        std::string key = tok[i].substr(0, eq);
                        if (key == "-") key.clear();
                        if (key.find_first_not_of("01") != std::string::npos)
                            throw FormatError(line_no, "table key must be a bit string");
                        if (!w.table.emplace(key, to_rat(tok[i].substr(eq + 1), line_no)).second)
                            throw FormatError(line_no, "duplicate table key " + key);
                    }
                } else {
                    if (tok.size() != 3) throw FormatError(line_no, "weight takes one value or a table");
                    w.constant = to_rat(tok[2], line_no);
                }
                g.set_weight(e, std::move(w));
                weighted[static_cast<std::size_t>(e)] = true;
            } else if (kw == "input") {
                if (tok.size() != 3) throw FormatError(line_no, "input needs 'input <id> <bits>'");
                expect_id(tok[1], g.num_inputs(), "input");
                Bits z;
                for (char c : tok[2]) {
                    if (c != '0' && c != '1') throw FormatError(line_no, "input bits must be 0 or 1");
                    z.push_back(static_cast<std::uint8_t>(c - '0'));
                }
                g.add_input(std::move(z));
            } else if (kw == "certificate") {
                if (tok.size() < 2) throw FormatError(line_no, "certificate needs an input id");
                int i = to_int(tok[1], line_no);
                if (i < 0 || i >= g.num_inputs()) throw FormatError(line_no, "certificate for unknown input " + tok[1]);
                IndexSet c;
                for (std::size_t k = 2; k < tok.size(); ++k) c.push_back(to_int(tok[k], line_no));
                g.set_certificate(i, std::move(c));
            } else if (kw == "flow") {
                if (tok.size() != 4) throw FormatError(line_no, "flow needs 'flow <input> <edge> <value>'");
                int i = to_int(tok[1], line_no), e = to_int(tok[2], line_no);
                if (i < 0 || i >= g.num_inputs()) throw FormatError(line_no, "flow for unknown input " + tok[1]);
                if (e < 0 || e >= g.num_edges()) throw FormatError(line_no, "flow on unknown edge " + tok[2]);
                if (g.flow(i).count(e)) throw FormatError(line_no, "duplicate flow entry");
                g.set_flow(i, e, to_rat(tok[3], line_no));
            } else {
                throw FormatError(line_no, "unknown keyword '" + kw + "'");
            }
        } catch (const DomainError& e) {
            throw FormatError(line_no, e.what());
        }
    }
    for (std::size_t e = 0; e < weighted.size(); ++e)
        if (!weighted[e]) throw FormatError(line_no, "edge " + std::to_string(e) + " has no weight");
    return g;
}

LearningGraph LearningGraph::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(0, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

// ---- validation ----

bool ValidationReport::has(const std::string& clause) const {
    return std::any_of(issues.begin(), issues.end(), [&](const auto& i) { return i.clause == clause; });
}

std::string ValidationReport::str() const {
    if (ok()) return "valid\n";
    std::string s;
    for (const auto& i : issues) s += i.clause + ": " + i.message + "\n";
    return s;
}

ValidationReport validate(const LearningGraph& g) {
    return validate(g, [&g](const IndexSet& label, int y) {
        const auto& c = g.certificate(y);
        return c && is_subset(*c, label);
    });
}

ValidationReport validate(const LearningGraph& g, const CertificateTest& test) {
    ValidationReport rep;
    auto issue = [&](std::string clause, std::string msg) { rep.issues.push_back({std::move(clause), std::move(msg)}); };
    const int nv = g.num_vertices(), ne = g.num_edges();
    int root = g.root();
    if (root < 0) issue("root", "no vertex with an empty label");

    int max_index = -1;
    for (int v = 0; v < nv; ++v)
        if (!g.label(v).empty()) max_index = std::max(max_index, g.label(v).back());

    std::vector<std::vector<int>> out(static_cast<std::size_t>(nv));
    std::vector<int> indeg(static_cast<std::size_t>(nv), 0);
    for (int e = 0; e < ne; ++e) {
        const auto& ed = g.edge(e);
        const std::string where = "edge " + std::to_string(e) + " (" + std::to_string(ed.from) + "->" + std::to_string(ed.to) + ")";
        out[static_cast<std::size_t>(ed.from)].push_back(ed.to);
        ++indeg[static_cast<std::size_t>(ed.to)];
        const auto& su = g.label(ed.from);
        const auto& sv = g.label(ed.to);
        if (!is_subset(su, sv)) issue("monotone labels", where + ": s(u) is not contained in s(v)");
        int diff = static_cast<int>(set_minus(sv, su).size());
        if (ed.length != diff)
            issue("length", where + ": length " + std::to_string(ed.length) + " but |s(v)-s(u)| = " + std::to_string(diff));
        if (ed.length < 1) issue("length", where + ": length must be at least 1");
        const auto& w = ed.weight;
        if (!w.adaptive()) {
            if (w.constant <= 0) issue("positive weight", where + ": weight " + to_string(w.constant));
        } else {
            for (const auto& [k, val] : w.table) {
                if (val <= 0) issue("positive weight", where + ": weight " + to_string(val) + " at '" + k + "'");
                if (k.size() != sv.size())
                    issue("weight table", where + ": key '" + k + "' does not match label size " + std::to_string(sv.size()));
            }
            for (int i = 0; i < g.num_inputs(); ++i) {
                if (static_cast<int>(g.input(i).size()) <= max_index) continue;  // reported below
                try {
                    (void)g.weight(e, g.input(i));
                } catch (const DomainError& ex) {
                    issue("weight table", std::string(ex.what()) + " (input " + std::to_string(i) + ")");
                }
            }
        }
    }

    // Kahn
    {
        std::vector<int> deg = indeg;
        std::queue<int> q;
        for (int v = 0; v < nv; ++v)
            if (deg[static_cast<std::size_t>(v)] == 0) q.push(v);
        int seen = 0;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            ++seen;
            for (int w : out[static_cast<std::size_t>(v)])
                if (--deg[static_cast<std::size_t>(w)] == 0) q.push(w);
        }
        if (seen != nv) issue("acyclic", std::to_string(nv - seen) + " vertices lie on or behind a cycle");
    }

    for (int i = 0; i < g.num_inputs(); ++i) {
        if (static_cast<int>(g.input(i).size()) <= max_index)
            issue("input length", "input " + std::to_string(i) + " has " + std::to_string(g.input(i).size()) +
                                      " bits but labels reach index " + std::to_string(max_index));
        if (!g.is_one_input(i)) {
            if (!g.flow(i).empty()) issue("flow value", "0-input " + std::to_string(i) + " carries flow");
            continue;
        }
        const std::string who = "input " + std::to_string(i);
        std::vector<Rational> net(static_cast<std::size_t>(nv), Rational(0));  // out - in
        for (const auto& [e, f] : g.flow(i)) {
            if (f < 0) issue("flow sign", who + ": negative flow " + to_string(f) + " on edge " + std::to_string(e));
            const auto& ed = g.edge(e);
            net[static_cast<std::size_t>(ed.from)] += f;
            net[static_cast<std::size_t>(ed.to)] -= f;
        }
        if (root >= 0 && net[static_cast<std::size_t>(root)] != 1)
            issue("flow value", who + ": flow value " + to_string(net[static_cast<std::size_t>(root)]) + ", expected 1");
        Rational absorbed = 0;
        for (int v = 0; v < nv; ++v) {
            if (v == root) continue;
            const Rational& x = net[static_cast<std::size_t>(v)];
            if (x == 0) continue;
            if (test(g.label(v), i)) {
                if (x > 0)
                    issue("conservation", who + ": sink " + std::to_string(v) + " emits net flow " + to_string(x));
                absorbed -= x;
            } else {
                issue("conservation", who + ": vertex " + std::to_string(v) + " has net outflow " + to_string(x));
            }
        }
        if (root >= 0 && test(g.label(root), i)) absorbed -= net[static_cast<std::size_t>(root)];
        if (root >= 0 && absorbed != 1 && !rep.has("conservation"))
            issue("flow value", who + ": sinks absorb " + to_string(absorbed) + ", expected 1");
    }
    return rep;
}

// ---- complexity ----

Rational c0(const LearningGraph& g, int x, const std::vector<int>* edges) {
    Rational sum = 0;
    const Bits& z = g.input(x);
    auto add = [&](int e) { sum += g.edge(e).length * g.weight(e, z); };
    if (edges)
        for (int e : *edges) add(e);
    else
        for (int e = 0; e < g.num_edges(); ++e) add(e);
    return sum;
}

Rational c1(const LearningGraph& g, int y, const std::vector<int>* edges) {
    Rational sum = 0;
    const Bits& z = g.input(y);
    const auto& fl = g.flow(y);
    auto add = [&](int e, const Rational& f) {
        Rational w = g.weight(e, z);
        if (w <= 0) throw DomainError("edge " + std::to_string(e) + " carries flow but has weight " + to_string(w));
        sum += g.edge(e).length * f * f / w;
    };
    if (edges) {
        for (int e : *edges)
            if (auto it = fl.find(e); it != fl.end()) add(e, it->second);
    } else {
        for (const auto& [e, f] : fl) add(e, f);
    }
    return sum;
}

Complexity complexity(const LearningGraph& g) {
    Complexity c;
    auto zeros = g.zero_inputs();
    if (zeros.empty())
        for (int i = 0; i < g.num_inputs(); ++i) zeros.push_back(i);
    if (zeros.empty()) {
        // no inputs at all: only meaningful for constant weights
        for (int e = 0; e < g.num_edges(); ++e) {
            if (g.edge(e).weight.adaptive()) throw DomainError("adaptive weights need at least one input");
            c.c0 += g.edge(e).length * g.edge(e).weight.constant;
        }
    } else {
        for (int x : zeros) c.c0 = std::max(c.c0, c0(g, x));
    }
    for (int y : g.one_inputs()) c.c1 = std::max(c.c1, c1(g, y));
    return c;
}

}  // namespace hsf
