#include "hsf/exponent.hpp"

#include <algorithm>
#include <cctype>

namespace hsf {

LinearExponent LinearExponent::var(const std::string& name, const Rational& coef) {
    LinearExponent e;
    if (coef != 0) e.coeffs_[name] = coef;
    return e;
}

Rational LinearExponent::coeff(const std::string& name) const {
    auto it = coeffs_.find(name);
    return it == coeffs_.end() ? Rational(0) : it->second;
}

std::set<std::string> LinearExponent::names() const {
    std::set<std::string> s;
    for (const auto& [k, v] : coeffs_) s.insert(k);
    return s;
}

LinearExponent& LinearExponent::operator+=(const LinearExponent& o) {
    constant_ += o.constant_;
    for (const auto& [k, v] : o.coeffs_) {
        Rational& c = coeffs_[k];
        c += v;
        if (c == 0) coeffs_.erase(k);
    }
    return *this;
}

LinearExponent& LinearExponent::operator-=(const LinearExponent& o) { return *this += -o; }

LinearExponent& LinearExponent::operator*=(const Rational& s) {
    if (s == 0) {
        coeffs_.clear();
        constant_ = 0;
        return *this;
    }
    constant_ *= s;
    for (auto& [k, v] : coeffs_) v *= s;
    return *this;
}

bool LinearExponent::operator<(const LinearExponent& o) const {
    if (coeffs_ != o.coeffs_) return coeffs_ < o.coeffs_;
    return constant_ < o.constant_;
}

Rational LinearExponent::evaluate(const Assignment& at) const {
    Rational v = constant_;
    std::string missing;
    for (const auto& [k, c] : coeffs_) {
        auto it = at.find(k);
        if (it == at.end()) {
            missing += (missing.empty() ? "" : ", ") + k;
            continue;
        }
        v += c * it->second;
    }
    if (!missing.empty()) throw DomainError("unbound parameters: " + missing);
    return v;
}

std::string LinearExponent::str() const {
    std::string out;
    auto emit = [&](const Rational& c, const std::string& name) {
        Rational a = abs(c);
        if (out.empty())
            out += c < 0 ? "-" : "";
        else
            out += c < 0 ? " - " : " + ";
        if (name.empty())
            out += a.get_str();
        else if (a == 1)
            out += name;
        else
            out += a.get_str() + "*" + name;
    };
    for (const auto& [k, c] : coeffs_) emit(c, k);
    if (constant_ != 0 || out.empty()) emit(constant_, "");
    return out;
}

namespace {

struct Cursor {
    std::string_view s;
    std::size_t i = 0;
    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool done() {
        skip();
        return i >= s.size();
    }
    char peek() {
        skip();
        return i < s.size() ? s[i] : '\0';
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw DomainError("cannot parse exponent '" + std::string(s) + "' at " + std::to_string(i) + ": " + what);
    }
};

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_num_char(char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '/'; }

LinearExponent parse_linear(Cursor& cur, bool stop_at_comma) {
    LinearExponent out;
    bool first = true;
    for (;;) {
        if (cur.done()) break;
        char c = cur.peek();
        if (stop_at_comma && (c == ',' || c == ')')) break;
        Rational sign = 1;
        if (c == '+' || c == '-') {
            sign = c == '-' ? -1 : 1;
            ++cur.i;
            cur.skip();
        } else if (!first) {
            cur.fail("expected + or -");
        }
        first = false;
        Rational coef = 1;
        bool have_num = false;
        std::size_t start = cur.i;
        while (cur.i < cur.s.size() && is_num_char(cur.s[cur.i])) ++cur.i;
        // exponent suffix on decimals like 1e-3
        if (cur.i > start && cur.i < cur.s.size() && (cur.s[cur.i] == 'e' || cur.s[cur.i] == 'E') &&
            cur.i + 1 < cur.s.size() &&
            (std::isdigit(static_cast<unsigned char>(cur.s[cur.i + 1])) || cur.s[cur.i + 1] == '-')) {
            ++cur.i;
            if (cur.s[cur.i] == '-') ++cur.i;
            while (cur.i < cur.s.size() && std::isdigit(static_cast<unsigned char>(cur.s[cur.i]))) ++cur.i;
        }
        if (cur.i > start) {
            coef = parse_rational(cur.s.substr(start, cur.i - start));
            have_num = true;
            cur.skip();
            if (cur.i < cur.s.size() && cur.s[cur.i] == '*') {
                ++cur.i;
                cur.skip();
            } else {
                out += LinearExponent(sign * coef);
                continue;
            }
        }
        if (cur.i >= cur.s.size() || !is_name_start(cur.s[cur.i])) cur.fail(have_num ? "expected name after *" : "expected term");
        std::size_t ns = cur.i;
        while (cur.i < cur.s.size() && is_name_char(cur.s[cur.i])) ++cur.i;
        out += LinearExponent::var(std::string(cur.s.substr(ns, cur.i - ns)), sign * coef);
    }
    if (first) cur.fail("empty expression");
    return out;
}

}  // namespace

LinearExponent LinearExponent::parse(std::string_view text) {
    Cursor cur{text};
    return parse_linear(cur, false);
}

LinearExponent combine(const std::vector<LinearExponent>& factors) {
    LinearExponent e;
    for (const auto& f : factors) e += f;
    return e;
}

MaxExpr::MaxExpr(LinearExponent t) { terms_.push_back(std::move(t)); }

void MaxExpr::normalize() {
    std::sort(terms_.begin(), terms_.end());
    terms_.erase(std::unique(terms_.begin(), terms_.end()), terms_.end());
    // same linear part: only the largest constant can be the max
    std::vector<LinearExponent> kept;
    for (auto& t : terms_) {
        if (!kept.empty() && kept.back().coeffs() == t.coeffs())
            kept.back() = t;  // sorted by constant within equal coeffs
        else
            kept.push_back(t);
    }
    terms_ = std::move(kept);
}

MaxExpr MaxExpr::max_of(const std::vector<LinearExponent>& terms) {
    if (terms.empty()) throw DomainError("max_of: empty term list");
    MaxExpr m;
    m.terms_ = terms;
    m.normalize();
    return m;
}

MaxExpr MaxExpr::max_of(const std::vector<MaxExpr>& exprs) {
    if (exprs.empty()) throw DomainError("max_of: empty term list");
    MaxExpr m;
    for (const auto& e : exprs) m.terms_.insert(m.terms_.end(), e.terms_.begin(), e.terms_.end());
    m.normalize();
    return m;
}

MaxExpr MaxExpr::combine(const MaxExpr& o) const {
    MaxExpr m;
    for (const auto& a : terms_)
        for (const auto& b : o.terms_) m.terms_.push_back(a + b);
    m.normalize();
    return m;
}

MaxExpr MaxExpr::scaled(const Rational& s) const {
    if (s < 0) throw DomainError("MaxExpr::scaled: negative factor flips the max");
    MaxExpr m;
    for (const auto& t : terms_) m.terms_.push_back(t * s);
    m.normalize();
    return m;
}

Rational MaxExpr::evaluate(const Assignment& at) const {
    std::set<std::string> missing;
    for (const auto& t : terms_)
        for (const auto& n : t.names())
            if (!at.count(n)) missing.insert(n);
    if (!missing.empty()) {
        std::string msg;
        for (const auto& n : missing) msg += (msg.empty() ? "" : ", ") + n;
        throw DomainError("unbound parameters: " + msg);
    }
    Rational best = terms_.front().evaluate(at);
    for (std::size_t i = 1; i < terms_.size(); ++i) best = std::max(best, terms_[i].evaluate(at));
    return best;
}

std::set<std::string> MaxExpr::names() const {
    std::set<std::string> s;
    for (const auto& t : terms_) {
        auto n = t.names();
        s.insert(n.begin(), n.end());
    }
    return s;
}

std::string MaxExpr::str() const {
    if (terms_.size() == 1) return terms_.front().str();
    std::string out = "max(";
    for (std::size_t i = 0; i < terms_.size(); ++i) out += (i ? ", " : "") + terms_[i].str();
    return out + ")";
}

MaxExpr MaxExpr::parse(std::string_view text) {
    Cursor cur{text};
    cur.skip();
    if (cur.s.substr(cur.i).substr(0, 4) == "max(") {
        cur.i += 4;
        std::vector<LinearExponent> terms;
        for (;;) {
            terms.push_back(parse_linear(cur, true));
            char c = cur.peek();
            if (c == ',') {
                ++cur.i;
                continue;
            }
            if (c == ')') {
                ++cur.i;
                break;
            }
            cur.fail("expected , or )");
        }
        if (!cur.done()) cur.fail("trailing text");
        return max_of(terms);
    }
    return MaxExpr(parse_linear(cur, false));
}

}  // namespace hsf
