#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hsf {

using Rational = mpq_class;

// bad parameters / preconditions
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// malformed input text; line is 1-based, 0 when not tied to a line
struct FormatError : std::runtime_error {
    int line;
    FormatError(int line_no, const std::string& msg)
        : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg : msg),
          line(line_no) {}
};

// p/q in canonical form (the two-argument mpq constructor does not reduce)
inline Rational frac(long p, long q) {
    Rational x(p, q);
    x.canonicalize();
    return x;
}

// "3/4", "-2", "0.30435", "1e-3" all accepted, exactly
Rational parse_rational(std::string_view s);
std::string to_string(const Rational& q);
// round half away from zero to `digits` decimals
std::string to_fixed(const Rational& q, int digits = 6);
std::string to_fixed(double x, int digits = 6);
double to_double(const Rational& q);

Rational binomial(long n, long k);
// falling factorial n (n-1) ... (n-k+1)
Rational falling(long n, long k);

std::vector<std::string> split_ws(std::string_view line);
std::string_view trim(std::string_view s);

// Thin wrapper so draws are reproducible across standard libraries:
// distributions from <random> are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    std::uint64_t next() { return eng_(); }
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    // uniform on [0, bound)
    std::uint64_t below(std::uint64_t bound);
    bool bernoulli(double p) { return uniform01() < p; }
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }
    // independent stream for trial i of a run
    static std::uint64_t split(std::uint64_t seed, std::uint64_t stream);

private:
    std::mt19937_64 eng_;
};

// k distinct values from [0, n), in random order
std::vector<std::uint32_t> sample_distinct(Rng& rng, std::uint32_t n, std::uint32_t k);

}  // namespace hsf
