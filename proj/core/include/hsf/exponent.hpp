#pragma once

#include "hsf/common.hpp"

#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace hsf {

using Assignment = std::map<std::string, Rational>;

// constant + sum coef*name, representing the exponent of n in n^(...)
class LinearExponent {
public:
    LinearExponent() = default;
    LinearExponent(Rational c) : constant_(std::move(c)) { constant_.canonicalize(); }  // NOLINT
    LinearExponent(long c) : constant_(c) {}                                           // NOLINT
    static LinearExponent var(const std::string& name, const Rational& coef = 1);

    const Rational& constant() const { return constant_; }
    const std::map<std::string, Rational>& coeffs() const { return coeffs_; }
    Rational coeff(const std::string& name) const;
    std::set<std::string> names() const;
    bool is_constant() const { return coeffs_.empty(); }

    LinearExponent& operator+=(const LinearExponent& o);
    LinearExponent& operator-=(const LinearExponent& o);
    LinearExponent& operator*=(const Rational& s);
    friend LinearExponent operator+(LinearExponent a, const LinearExponent& b) { return a += b; }
    friend LinearExponent operator-(LinearExponent a, const LinearExponent& b) { return a -= b; }
    friend LinearExponent operator*(LinearExponent a, const Rational& s) { return a *= s; }
    friend LinearExponent operator*(const Rational& s, LinearExponent a) { return a *= s; }
    LinearExponent operator-() const { return *this * Rational(-1); }
    bool operator==(const LinearExponent& o) const { return constant_ == o.constant_ && coeffs_ == o.coeffs_; }
    bool operator<(const LinearExponent& o) const;

    // throws DomainError naming every unbound parameter
    Rational evaluate(const Assignment& at) const;

    std::string str() const;
    static LinearExponent parse(std::string_view text);

private:
    Rational constant_ = 0;
    std::map<std::string, Rational> coeffs_;  // no zero entries
};

// exponent of a product of terms
LinearExponent combine(const std::vector<LinearExponent>& factors);

// exponent of a sum of terms: the max of their exponents
class MaxExpr {
public:
    MaxExpr(LinearExponent t);  // NOLINT
    static MaxExpr max_of(const std::vector<LinearExponent>& terms);
    static MaxExpr max_of(const std::vector<MaxExpr>& exprs);
    static MaxExpr max_of(std::initializer_list<LinearExponent> terms) {
        return max_of(std::vector<LinearExponent>(terms));
    }

    const std::vector<LinearExponent>& terms() const { return terms_; }

    // product: pairwise sums of terms
    MaxExpr combine(const MaxExpr& o) const;
    MaxExpr scaled(const Rational& s) const;  // s >= 0
    MaxExpr sqrt() const { return scaled(Rational(1, 2)); }

    Rational evaluate(const Assignment& at) const;
    std::set<std::string> names() const;
    std::string str() const;
    static MaxExpr parse(std::string_view text);

    bool operator==(const MaxExpr& o) const { return terms_ == o.terms_; }

private:
    MaxExpr() = default;
    void normalize();
    std::vector<LinearExponent> terms_;  // sorted, unique, nonempty
};

}  // namespace hsf
