#pragma once

#include "hsf/common.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hsf {

using Edge = std::vector<int>;  // sorted, 1-based vertex ids

// r-uniform hypergraph on vertices 1..n. A subset is an edge if it is stored
// or accepted by the optional implicit predicate (which is free to query).
class Hypergraph {
public:
    using Predicate = std::function<bool(const Edge&)>;

    Hypergraph(int n, int r);

    int n() const { return n_; }
    int r() const { return r_; }
    const std::set<Edge>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

    // returns false if the edge was already present
    bool add_edge(Edge e);
    void set_implicit(Predicate p) { implicit_ = std::move(p); }
    bool has_implicit() const { return static_cast<bool>(implicit_); }

    bool stored(const Edge& e) const { return edges_.count(e) > 0; }
    bool implicit(const Edge& e) const { return implicit_ && implicit_(e); }
    bool has_edge(const Edge& e) const { return implicit(e) || stored(e); }

    // stored edges only; the implicit predicate is not serializable
    std::string to_text() const;
    static Hypergraph parse(std::string_view text);
    static Hypergraph read_file(const std::string& path);

private:
    int n_, r_;
    std::set<Edge> edges_;
    Predicate implicit_;
};

class OracleView {
public:
    explicit OracleView(const Hypergraph& g) : g_(&g) {}
    const Hypergraph& graph() const { return *g_; }
    std::uint64_t query_count() const { return queries_; }

    // implicit edges answer for free; otherwise one query
    bool query(const Edge& e) {
        if (g_->implicit(e)) return true;
        ++queries_;
        return g_->stored(e);
    }

private:
    const Hypergraph* g_;
    std::uint64_t queries_ = 0;
};

struct Simplex {
    std::vector<int> vertices;  // r+1 sorted ids
    bool operator==(const Simplex& o) const { return vertices == o.vertices; }
    bool operator<(const Simplex& o) const { return vertices < o.vertices; }
};

// all r-subsets of s (s sorted), dropping index r, r-1, ..., 0 in turn
std::vector<Edge> faces(const std::vector<int>& s);
bool is_simplex(const Hypergraph& g, const std::vector<int>& s);

// lexicographic over (r+1)-subsets, stops at the first missing face
std::optional<Simplex> find_simplex(OracleView& view);
// every simplex, by backtracking; does not go through an oracle
std::vector<Simplex> find_all_simplices(const Hypergraph& g);

struct PlantedInstance {
    Hypergraph graph;
    Simplex planted;
};
PlantedInstance planted_instance(int n, int r, double noise_density, std::uint64_t seed);
// each r-subset present independently with probability density
Hypergraph random_hypergraph(int n, int r, double density, std::uint64_t seed);

// (r/2, (r+1)/2): exponents of the trivial lower and upper query bounds
std::pair<Rational, Rational> trivial_exponents(int r);

// calls f on every k-subset of {1..n} in lexicographic order; f returns false to stop
bool for_each_subset(int n, int k, const std::function<bool(const std::vector<int>&)>& f);

}  // namespace hsf
