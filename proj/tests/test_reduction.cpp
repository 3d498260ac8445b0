#include "hsf/reduction.hpp"

#include <doctest.h>

#include <functional>

using namespace hsf;

namespace {

// Assign the 12 vertices to 3 labelled blocks of 4 in every possible way and
// count assignments where vertices 0, 1, 2 are in different blocks.
Rational separating_fraction_12_3() {
    std::array<int, 3> room{4, 4, 4};
    std::array<int, 12> block{};
    long total = 0, good = 0;
    std::function<void(int)> rec = [&](int v) {
        if (v == 12) {
            ++total;
            if (block[0] != block[1] && block[0] != block[2] && block[1] != block[2]) ++good;
            return;
        }
        for (int b = 0; b < 3; ++b) {
            if (!room[static_cast<std::size_t>(b)]) continue;
            --room[static_cast<std::size_t>(b)];
            block[static_cast<std::size_t>(v)] = b;
            rec(v + 1);
            ++room[static_cast<std::size_t>(b)];
        }
    };
    rec(0);
    CHECK(total == 34650);
    return frac(good, total);
}

ReductionInput triangle_input(int n, std::vector<int> tri) {
    ReductionInput in;
    in.n = n;
    in.r = 2;
    Hypergraph g(n, 2);
    g.add_edge({tri[0], tri[1]});
    g.add_edge({tri[0], tri[2]});
    g.add_edge({tri[1], tri[2]});
    in.graphs.emplace(1, std::move(g));
    return in;
}

}  // namespace

TEST_CASE("success probability against exhaustive partition count") {
    Rational oracle = separating_fraction_12_3();
    CHECK(oracle == frac(16, 55));
    CHECK(success_probability(12, 2) == oracle);
    CHECK(success_probability(5, 0) == 1);
    CHECK_THROWS_AS(success_probability(10, 2), DomainError);
    CHECK_THROWS_AS(success_probability(2, 2), DomainError);
}

TEST_CASE("success probability tends to 2/9 at rank two") {
    // closed form of the product at r = 2: (2/9) n^2 / ((n-1)(n-2))
    Rational prev = 1;
    for (int n : {12, 30, 300, 3000, 30000}) {
        Rational p = success_probability(n, 2);
        CHECK(p == frac(2, 9) * Rational(n) * Rational(n) / (Rational(n - 1) * Rational(n - 2)));
        CHECK(p > frac(2, 9));
        CHECK(p < prev);
        prev = p;
    }
    CHECK(to_double(success_probability(30000, 2)) == doctest::Approx(2.0 / 9).epsilon(1e-3));
}

TEST_CASE("separated triangle lifts to a 3-simplex") {
    auto in = triangle_input(6, {1, 2, 3});
    Partition part;
    part.parts = 3;
    part.block_of = {-1, 0, 1, 2, 0, 1, 2};
    Hypergraph g = build_reduction(in, part);
    CHECK(is_simplex(g, {1, 7, 8, 9}));
    auto all = find_all_simplices(g);
    REQUIRE(all.size() == 1);
    auto d = decode(all[0], 6);
    REQUIRE(d);
    CHECK(d->v == 1);
    CHECK(d->simplex.vertices == std::vector<int>{1, 2, 3});
}

TEST_CASE("triangle with two vertices in one block does not lift") {
    auto in = triangle_input(6, {1, 2, 3});
    Partition part;
    part.parts = 3;
    part.block_of = {-1, 0, 0, 1, 1, 2, 2};
    Hypergraph g = build_reduction(in, part);
    CHECK_FALSE(is_simplex(g, {1, 7, 8, 9}));
    CHECK(find_all_simplices(g).empty());
}

TEST_CASE("empty inputs: only type-2 edges and no simplex") {
    ReductionInput in;
    in.n = 9;
    in.r = 2;
    Rng rng(5);
    Hypergraph g = build_reduction(in, random_partition(9, 3, rng));
    CHECK(g.edge_count() == 0);
    // oracle: every 4-subset of B has two vertices in one block
    int simplices = 0;
    for_each_subset(18, 4, [&](const std::vector<int>& s) {
        if (is_simplex(g, s)) ++simplices;
        return true;
    });
    CHECK(simplices == 0);
    OracleView v(g);
    CHECK_FALSE(find_simplex(v));
}

TEST_CASE("stored edges have exactly one vertex in A and type-2 costs nothing") {
    auto in = single_planted_input(12, 2, 3);
    Hypergraph g = build_reduction(in, 77);
    for (const auto& e : g.edges()) {
        int in_a = 0;
        for (int x : e) in_a += x <= 12;
        CHECK(in_a == 1);
    }
    OracleView v(g);
    int implicit_seen = 0;
    for_each_subset(24, 3, [&](const std::vector<int>& e) {
        if (e[0] > 12 && g.implicit(e)) {
            ++implicit_seen;
            CHECK(v.query(e));
        }
        return true;
    });
    CHECK(implicit_seen == 4 * 4 * 4);
    CHECK(v.query_count() == 0);
}

TEST_CASE("mismatched inputs are rejected") {
    ReductionInput in;
    in.n = 6;
    in.r = 2;
    in.graphs.emplace(1, Hypergraph(6, 3));
    CHECK_THROWS_AS(build_reduction(in, 1), DomainError);
    ReductionInput bad;
    bad.n = 7;
    bad.r = 2;
    CHECK_THROWS_AS(build_reduction(bad, 1), DomainError);
}

TEST_CASE("empirical success rate matches 16/55") {
    auto in = single_planted_input(12, 2, 11);
    auto rep = run_reduction_trials(in, 10000, 7);
    CHECK(rep.exact == frac(16, 55));
    CHECK(rep.within_3sigma);
    CHECK(rep.decode_failures == 0);
    CHECK(rep.foreign_decodes == 0);
    REQUIRE(rep.recovered.size() == 1);
    CHECK(rep.recovered.begin()->simplex.vertices == planted_instance(12, 2, 0.0, 11).planted.vertices);
}

TEST_CASE("rank three: every success decodes to the planted tetrahedron") {
    auto in = single_planted_input(8, 3, 4);
    auto planted = planted_instance(8, 3, 0.0, 4).planted;
    long successes = 0;
    for (std::uint64_t t = 0; t < 300; ++t) {
        auto tr = reduction_trial(in, Rng::split(99, t));
        CHECK(tr.decode_failures == 0);
        if (!tr.success) continue;
        ++successes;
        REQUIRE(tr.recovered.size() == 1);
        CHECK(tr.recovered[0].v == 1);
        CHECK(tr.recovered[0].simplex == planted);
    }
    CHECK(successes > 0);
}

TEST_CASE("degenerate reports") {
    auto in = single_planted_input(12, 2, 1);
    auto zero = run_reduction_trials(in, 0, 1);
    CHECK(zero.trials == 0);
    CHECK(zero.recovered.empty());
    ReductionInput empty;
    empty.n = 6;
    empty.r = 2;
    auto rep = run_reduction_trials(empty, 50, 1);
    CHECK_FALSE(rep.any_input_simplex);
    CHECK(rep.successes == 0);
}

TEST_CASE("multi-instance file format") {
    const char* text =
        "6 2 2\n"
        "\n"
        "1\n6 2\n1 2\n1 3\n2 3\n"
        "\n"
        "4\n6 2\n4 5\n";
    auto in = ReductionInput::parse(text);
    CHECK(in.graphs.size() == 2);
    CHECK(in.graphs.at(1).edge_count() == 3);
    CHECK(in.graphs.at(4).edge_count() == 1);
    CHECK(ReductionInput::parse(in.to_text()).to_text() == in.to_text());
    CHECK_THROWS_AS(ReductionInput::parse("6 2 1\n\n1\n6 3\n1 2 3\n"), FormatError);
    CHECK_THROWS_AS(ReductionInput::parse("7 2 0\n"), FormatError);
    try {
        ReductionInput::parse("6 2 1\n\n1\n6 2\n1 2\n1 x\n");
        FAIL("expected a format error");
    } catch (const FormatError& e) {
        CHECK(e.line == 6);
    }
}
