#include "hsf/exponent.hpp"
#include "hsf/four_simplex.hpp"

#include <doctest.h>

using namespace hsf;

namespace {

LinearExponent random_form(Rng& rng) {
    static const char* names[] = {"a_1", "a_2", "b_12", "c_123"};
    LinearExponent e(frac(static_cast<long>(rng.below(21)) - 10, 1 + static_cast<long>(rng.below(6))));
    for (const char* nm : names)
        if (rng.below(2)) e += LinearExponent::var(nm, frac(static_cast<long>(rng.below(13)) - 6, 1 + static_cast<long>(rng.below(4))));
    return e;
}

Assignment random_point(Rng& rng) {
    Assignment a;
    for (const char* nm : {"a_1", "a_2", "b_12", "c_123"}) a[nm] = frac(static_cast<long>(rng.below(41)) - 20, 7);
    return a;
}

}  // namespace

TEST_CASE("m_123 at the published parameters") {
    // typed in from the published table
    Assignment p{{"a_1", parse_rational("0.30435")}, {"a_2", parse_rational("0.65217")},
                 {"a_3", parse_rational("0.82609")}, {"b_12", parse_rational("0.95652")},
                 {"b_13", parse_rational("1.13043")}, {"b_23", parse_rational("1.45059")}};
    auto m = LinearExponent::parse("b_12 + b_13 + b_23 - a_1 - a_2 - a_3");
    CHECK(m == m_expr({1, 2, 3}));
    CHECK(m.evaluate(p) == parse_rational("1.75493"));
    CHECK(std::abs(to_double(m.evaluate(p)) - 1.75494) <= 2e-5);
}

TEST_CASE("evaluation basics") {
    auto m = m_expr({1, 2, 3});
    Assignment zero;
    for (const auto& nm : m.names()) zero[nm] = 0;
    CHECK(m.evaluate(zero) == 0);
    auto e = LinearExponent::parse("1/2*a_1 + b_12 - 3/2");
    Assignment z{{"a_1", 0}, {"b_12", 0}};
    CHECK(e.evaluate(z) == frac(-3, 2));
    try {
        e.evaluate({{"a_1", 1}});
        FAIL("expected unbound name error");
    } catch (const DomainError& ex) {
        CHECK(std::string(ex.what()).find("b_12") != std::string::npos);
    }
}

TEST_CASE("combine and max") {
    CHECK(combine({LinearExponent(frac(1, 2)), LinearExponent(frac(1, 3))}) == LinearExponent(frac(5, 6)));
    auto mx = MaxExpr::max_of({LinearExponent(2), LinearExponent(frac(3, 2))});
    CHECK(mx.evaluate({}) == 2);
    CHECK(mx.terms().size() == 1);
    auto a = LinearExponent::var("a");
    CHECK(MaxExpr(a).sqrt() == MaxExpr(a * frac(1, 2)));
    CHECK(MaxExpr(a).sqrt().evaluate({{"a", 3}}) == frac(3, 2));
}

TEST_CASE("parse and print round trip") {
    for (const char* s : {"1/2*a_1 + b_12 - 3/2", "0", "-a_5", "2/3", "d_1234 - c_123"}) {
        auto e = LinearExponent::parse(s);
        CHECK(LinearExponent::parse(e.str()) == e);
    }
    CHECK(LinearExponent::parse("a + a - a") == LinearExponent::var("a"));
    CHECK(LinearExponent::parse("a - a").is_constant());
    CHECK_THROWS_AS(LinearExponent::parse("a +"), DomainError);
    CHECK_THROWS_AS(LinearExponent::parse("2*"), DomainError);
    auto m = MaxExpr::parse("max(a_1, 1/2)");
    CHECK(MaxExpr::parse(m.str()) == m);
}

TEST_CASE("algebraic laws on random forms") {
    Rng rng(17);
    for (int t = 0; t < 300; ++t) {
        auto x = random_form(rng), y = random_form(rng), z = random_form(rng);
        CHECK(combine({x, y}) == combine({y, x}));
        CHECK(combine({combine({x, y}), z}) == combine({x, combine({y, z})}));
        auto m1 = MaxExpr::max_of({MaxExpr::max_of({x, y}), MaxExpr(z)});
        auto m2 = MaxExpr::max_of({MaxExpr(x), MaxExpr::max_of({z, y})});
        auto pt = random_point(rng);
        CHECK(m1.evaluate(pt) == m2.evaluate(pt));
        Rational want = std::max({x.evaluate(pt), y.evaluate(pt), z.evaluate(pt)});
        CHECK(m1.evaluate(pt) == want);
        // product distributes over max
        auto prod = MaxExpr::max_of({x, y}).combine(MaxExpr(z));
        CHECK(prod.evaluate(pt) == std::max(x.evaluate(pt), y.evaluate(pt)) + z.evaluate(pt));
    }
}
