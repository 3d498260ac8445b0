#pragma once

#include "hsf/common.hpp"

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hsf {

// sorted, distinct input positions
using IndexSet = std::vector<int>;
using Bits = std::vector<std::uint8_t>;

bool is_subset(const IndexSet& a, const IndexSet& b);
IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_minus(const IndexSet& a, const IndexSet& b);

// Tuple over X u {*} with no repeated non-star entries. Insertion fills the
// lowest star slot unless an Rng is supplied.
class OrderedPartialSubset {
public:
    static constexpr int kStar = -1;

    OrderedPartialSubset() = default;
    explicit OrderedPartialSubset(int k) : slots_(static_cast<std::size_t>(k), kStar) {}
    static OrderedPartialSubset from_slots(std::vector<int> slots);

    int capacity() const { return static_cast<int>(slots_.size()); }
    int size() const;
    bool full() const { return size() == capacity(); }
    bool contains(int x) const;
    // slot holding x, or -1
    int position(int x) const;
    const std::vector<int>& slots() const { return slots_; }
    int operator[](int i) const { return slots_[static_cast<std::size_t>(i)]; }

    OrderedPartialSubset with(int v) const;
    OrderedPartialSubset with(int v, Rng& rng) const;
    // A <= B: every filled slot of A holds the same value in B
    bool subset_of(const OrderedPartialSubset& b) const;
    IndexSet elements() const;
    std::string str() const;

    auto operator<=>(const OrderedPartialSubset&) const = default;

private:
    std::vector<int> slots_;
};

// Edge weight: a constant, or a table keyed by the loaded bits z_{s(v)}
// (written in label order, e.g. "011").
struct Weight {
    Rational constant = 1;
    std::map<std::string, Rational> table;
    bool adaptive() const { return !table.empty(); }
};

struct LgEdge {
    int from = 0;
    int to = 0;
    int length = 0;
    Weight weight;
};

class LearningGraph {
public:
    int add_vertex(IndexSet label);
    // length taken from the labels
    int add_edge(int u, int v, Rational w);
    int add_edge(int u, int v, int length, Weight w);
    int add_input(Bits z);
    // marks the input as a 1-input whose certificate is `cert`
    void set_certificate(int input, IndexSet cert);
    void set_flow(int input, int edge, const Rational& f);
    void add_flow(int input, int edge, const Rational& f);
    void set_weight(int edge, Weight w) { edges_.at(static_cast<std::size_t>(edge)).weight = std::move(w); }

    int num_vertices() const { return static_cast<int>(labels_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_inputs() const { return static_cast<int>(inputs_.size()); }
    const IndexSet& label(int v) const { return labels_.at(static_cast<std::size_t>(v)); }
    const LgEdge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }
    const Bits& input(int i) const { return inputs_.at(static_cast<std::size_t>(i)); }
    const std::optional<IndexSet>& certificate(int i) const { return certs_.at(static_cast<std::size_t>(i)); }
    bool is_one_input(int i) const { return certificate(i).has_value(); }
    std::vector<int> one_inputs() const;
    std::vector<int> zero_inputs() const;
    // positive flow entries only
    const std::map<int, Rational>& flow(int input) const { return flows_.at(static_cast<std::size_t>(input)); }
    // first vertex with an empty label, or -1
    int root() const;

    // w_z(e); throws if a table lacks the loaded assignment
    Rational weight(int e, const Bits& z) const;

    std::string to_text() const;
    static LearningGraph parse(const std::string& text);
    static LearningGraph read_file(const std::string& path);

private:
    std::vector<IndexSet> labels_;
    std::vector<LgEdge> edges_;
    std::vector<Bits> inputs_;
    std::vector<std::optional<IndexSet>> certs_;
    std::vector<std::map<int, Rational>> flows_;
};

// label contains a 1-certificate of input y
using CertificateTest = std::function<bool(const IndexSet& label, int y)>;

struct ValidationIssue {
    std::string clause;  // "acyclic", "monotone labels", "flow value", ...
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
    bool has(const std::string& clause) const;
    std::string str() const;
};

// default test: the label contains the stored certificate
ValidationReport validate(const LearningGraph& g);
ValidationReport validate(const LearningGraph& g, const CertificateTest& test);

// restricted to the listed edge ids when `edges` is given
Rational c0(const LearningGraph& g, int x, const std::vector<int>* edges = nullptr);
Rational c1(const LearningGraph& g, int y, const std::vector<int>* edges = nullptr);

struct Complexity {
    Rational c0;  // max over 0-inputs (all inputs when there are none)
    Rational c1;  // max over 1-inputs
    double value() const { return std::sqrt(to_double(c0) * to_double(c1)); }
};
Complexity complexity(const LearningGraph& g);

}  // namespace hsf
