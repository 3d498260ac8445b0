#include "hsf/hypergraph.hpp"

#include <doctest.h>

#include <set>

using namespace hsf;

namespace {

// bitmask enumeration, highest mask first: a different order from the library
std::set<std::vector<int>> all_simplices_bitmask(const Hypergraph& g) {
    std::set<std::vector<int>> edges(g.edges().begin(), g.edges().end());
    const int n = g.n(), r = g.r();
    std::set<std::vector<int>> out;
    for (long mask = (1L << n) - 1; mask > 0; --mask) {
        if (__builtin_popcountl(static_cast<unsigned long>(mask)) != r + 1) continue;
        std::vector<int> s;
        for (int v = 0; v < n; ++v)
            if (mask >> v & 1) s.push_back(v + 1);
        bool ok = true;
        for (int drop = 0; drop <= r && ok; ++drop) {
            std::vector<int> f;
            for (int i = 0; i <= r; ++i)
                if (i != drop) f.push_back(s[static_cast<std::size_t>(i)]);
            ok = edges.count(f) > 0;
        }
        if (ok) out.insert(s);
    }
    return out;
}

long choose(int n, int k) {
    long c = 1;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

}  // namespace

TEST_CASE("complete graph on three vertices is a triangle") {
    Hypergraph g(3, 2);
    g.add_edge({1, 2});
    g.add_edge({1, 3});
    g.add_edge({2, 3});
    OracleView v(g);
    auto s = find_simplex(v);
    REQUIRE(s);
    CHECK(s->vertices == std::vector<int>{1, 2, 3});
}

TEST_CASE("empty hypergraph has no simplex") {
    Hypergraph g(6, 3);
    OracleView v(g);
    CHECK_FALSE(find_simplex(v));
}

TEST_CASE("rank one: two marked positions form a simplex") {
    Hypergraph g(4, 1);
    g.add_edge({1});
    g.add_edge({3});
    OracleView v(g);
    auto s = find_simplex(v);
    REQUIRE(s);
    CHECK(s->vertices == std::vector<int>{1, 3});
}

TEST_CASE("r + 1 > n is rejected") {
    Hypergraph g(3, 3);
    OracleView v(g);
    CHECK_THROWS_AS(find_simplex(v), DomainError);
}

TEST_CASE("planted instances") {
    auto a = planted_instance(5, 2, 0.0, 3);
    CHECK(a.graph.edge_count() == 3);
    CHECK(is_simplex(a.graph, a.planted.vertices));

    auto b = planted_instance(6, 3, 0.0, 1);
    CHECK(b.graph.edge_count() == 4);
    auto oracle = all_simplices_bitmask(b.graph);
    REQUIRE(oracle.size() == 1);
    CHECK(*oracle.begin() == b.planted.vertices);
    OracleView v(b.graph);
    auto s = find_simplex(v);
    REQUIRE(s);
    CHECK(s->vertices == b.planted.vertices);

    auto c = planted_instance(5, 2, 1.0, 9);
    CHECK(c.graph.edge_count() == 10);
    OracleView vc(c.graph);
    CHECK(find_simplex(vc));

    CHECK_THROWS_AS(planted_instance(3, 3, 0.0, 1), DomainError);
    CHECK_THROWS_AS(planted_instance(6, 2, 1.5, 1), DomainError);
}

TEST_CASE("planted instances are deterministic per seed") {
    auto a = planted_instance(8, 3, 0.3, 42);
    auto b = planted_instance(8, 3, 0.3, 42);
    CHECK(a.graph.to_text() == b.graph.to_text());
    CHECK(a.planted == b.planted);
}

TEST_CASE("search agrees with bitmask enumeration on 1000 random instances") {
    Rng rng(2024);
    int disagreements = 0, found = 0;
    for (int t = 0; t < 1000; ++t) {
        int r = 1 + static_cast<int>(rng.below(4));
        int n = r + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(8 - r)));
        double density = 0.2 + 0.7 * rng.uniform01();
        auto g = random_hypergraph(n, r, density, rng.next());
        auto oracle = all_simplices_bitmask(g);
        OracleView v(g);
        auto s = find_simplex(v);
        if (s.has_value() != !oracle.empty()) ++disagreements;
        if (s) {
            ++found;
            // lexicographic search returns the smallest simplex
            if (s->vertices != *oracle.begin()) ++disagreements;
            if (!is_simplex(g, s->vertices)) ++disagreements;
        }
        CHECK(v.query_count() <= static_cast<std::uint64_t>((r + 1) * choose(n, r + 1)));
        auto all = find_all_simplices(g);
        CHECK(all.size() == oracle.size());
    }
    CHECK(disagreements == 0);
    CHECK(found > 100);
}

TEST_CASE("implicit edges cost no queries") {
    Hypergraph g(4, 2);
    g.set_implicit([](const Edge& e) { return e[0] == 1; });
    g.add_edge({2, 3});
    OracleView v(g);
    CHECK(v.query({1, 4}));
    CHECK(v.query_count() == 0);
    CHECK(v.query({2, 3}));
    CHECK_FALSE(v.query({3, 4}));
    CHECK(v.query_count() == 2);
}

TEST_CASE("text format round trip and errors") {
    auto g = Hypergraph::parse("# comment\n5 2\n1 2\n2 5\n");
    CHECK(g.n() == 5);
    CHECK(g.edge_count() == 2);
    CHECK(g.to_text() == "5 2\n1 2\n2 5\n");
    CHECK(Hypergraph::parse(g.to_text()).to_text() == g.to_text());
    CHECK_THROWS_AS(Hypergraph::parse("5 2\n1 2"), FormatError);
    CHECK_THROWS_AS(Hypergraph::parse("5 2\n1 2 3\n"), FormatError);
    CHECK_THROWS_AS(Hypergraph::parse("5 2\n2 1\n"), FormatError);
    CHECK_THROWS_AS(Hypergraph::parse("5 2\n1 2\n1 2\n"), FormatError);
    CHECK_THROWS_AS(Hypergraph::parse("5 2\n1 9\n"), FormatError);
    try {
        Hypergraph::parse("5 2\n1 2\n1 x\n");
        FAIL("expected a format error");
    } catch (const FormatError& e) {
        CHECK(e.line == 3);
    }
    Hypergraph h(4, 2);
    CHECK_THROWS_AS(h.add_edge({1}), DomainError);
}

TEST_CASE("trivial exponents") {
    CHECK(trivial_exponents(2) == std::make_pair(Rational(1), frac(3, 2)));
    CHECK(trivial_exponents(4) == std::make_pair(Rational(2), frac(5, 2)));
    CHECK(trivial_exponents(1) == std::make_pair(frac(1, 2), Rational(1)));
    CHECK_THROWS_AS(trivial_exponents(0), DomainError);
}
