#include "hsf/common.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace hsf {

Rational parse_rational(std::string_view s) {
    s = trim(s);
    if (s.empty()) throw DomainError("empty number");
    std::string str(s);
    auto slash = str.find('/');
    if (slash != std::string::npos) {
        Rational q;
        try {
            mpz_class num(str.substr(0, slash)), den(str.substr(slash + 1));
            if (den == 0) throw DomainError("zero denominator in '" + str + "'");
            q = Rational(num, den);
        } catch (const std::invalid_argument&) {
            throw DomainError("bad rational '" + str + "'");
        }
        q.canonicalize();
        return q;
    }
    // decimal with optional exponent
    std::size_t i = 0;
    bool neg = false;
    if (str[i] == '+' || str[i] == '-') neg = str[i++] == '-';
    mpz_class digits = 0;
    long scale = 0;
    bool any = false, dot = false;
    for (; i < str.size(); ++i) {
        char c = str[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = digits * 10 + (c - '0');
            if (dot) ++scale;
            any = true;
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            break;
        }
    }
    if (!any) throw DomainError("bad number '" + str + "'");
    long ex = 0;
    if (i < str.size()) {
        if (str[i] != 'e' && str[i] != 'E') throw DomainError("bad number '" + str + "'");
        std::size_t used = 0;
        try {
            ex = std::stol(str.substr(i + 1), &used);
        } catch (const std::exception&) {
            throw DomainError("bad exponent in '" + str + "'");
        }
        if (i + 1 + used != str.size()) throw DomainError("bad number '" + str + "'");
    }
    ex -= scale;
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(ex)));
    Rational q = ex >= 0 ? Rational(digits * p10) : Rational(digits, p10);
    q.canonicalize();
    return neg ? Rational(-q) : q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_fixed(const Rational& q, int digits) {
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    Rational a = abs(q) * p10 + Rational(1, 2);
    mpz_class r = a.get_num() / a.get_den();  // floor, a >= 0
    std::string s = r.get_str();
    if (static_cast<int>(s.size()) <= digits) s.insert(0, digits + 1 - s.size(), '0');
    if (digits > 0) s.insert(s.size() - digits, ".");
    bool zero = r == 0;
    return (q < 0 && !zero ? "-" : "") + s;
}

std::string to_fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    std::string s(buf);
    if (s == "-0.000000") s.erase(0, 1);
    return s;
}

double to_double(const Rational& q) { return q.get_d(); }

Rational binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(r);
}

Rational falling(long n, long k) {
    if (k < 0) return 0;
    if (k > n) return 0;
    mpz_class r = 1;
    for (long i = 0; i < k; ++i) r *= (n - i);
    return Rational(r);
}

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw DomainError("Rng::below(0)");
    // rejection on the top of the range keeps it unbiased
    std::uint64_t lim = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        std::uint64_t x = eng_();
        if (x < lim) return x % bound;
    }
}

std::uint64_t Rng::split(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over (seed, stream)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<std::uint32_t> sample_distinct(Rng& rng, std::uint32_t n, std::uint32_t k) {
    if (k > n) throw DomainError("sample_distinct: k > n");
    std::vector<std::uint32_t> out;
    out.reserve(k);
    if (static_cast<std::uint64_t>(k) * 4 >= n) {
        // partial Fisher-Yates
        std::vector<std::uint32_t> all(n);
        for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
        for (std::uint32_t i = 0; i < k; ++i) {
            std::uint32_t j = i + static_cast<std::uint32_t>(rng.below(n - i));
            std::swap(all[i], all[j]);
            out.push_back(all[i]);
        }
        return out;
    }
    std::unordered_set<std::uint32_t> seen;
    seen.reserve(k * 2);
    while (out.size() < k) {
        auto x = static_cast<std::uint32_t>(rng.below(n));
        if (seen.insert(x).second) out.push_back(x);
    }
    return out;
}

}  // namespace hsf
