#include "lvelab/series.hpp"

#include <cmath>
#include <sstream>

#include "lvelab/errors.hpp"

namespace lvelab {

std::string to_fraction_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational parse_fraction(const std::string& text) {
    Rational r;
    if (r.set_str(text, 10) != 0) throw ContractViolation("not a rational number: '" + text + "'");
    if (r.get_den() == 0) throw ContractViolation("zero denominator in '" + text + "'");
    r.canonicalize();
    return r;
}

void PolynomialInN::add(int power, const Rational& value) {
    Rational coefficient = value;
    coefficient.canonicalize();
    if (coefficient == 0) return;
    auto [it, inserted] = terms_.try_emplace(power, coefficient);
    if (inserted) return;
    it->second += coefficient;
    if (it->second == 0) terms_.erase(it);
}

Rational PolynomialInN::coefficient(int power) const {
    auto it = terms_.find(power);
    return it == terms_.end() ? Rational(0) : it->second;
}

PolynomialInN& PolynomialInN::operator+=(const PolynomialInN& other) {
    for (const auto& [p, c] : other.terms_) add(p, c);
    return *this;
}

PolynomialInN& PolynomialInN::operator*=(const Rational& scalar) {
    if (scalar == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [p, c] : terms_) c *= scalar;
    return *this;
}

PolynomialInN operator*(const PolynomialInN& a, const PolynomialInN& b) {
    PolynomialInN out;
    for (const auto& [pa, ca] : a.terms_)
        for (const auto& [pb, cb] : b.terms_) out.add(pa + pb, ca * cb);
    return out;
}

Rational PolynomialInN::at(long n) const {
    if (n == 0) throw DomainError("polynomial in N evaluated at N = 0");
    Rational total = 0;
    for (const auto& [p, c] : terms_) {
        mpz_class pw;
        mpz_pow_ui(pw.get_mpz_t(), mpz_class(std::abs(n)).get_mpz_t(), static_cast<unsigned long>(std::abs(p)));
        if (n < 0 && (std::abs(p) % 2 == 1)) pw = -pw;
        if (p >= 0)
            total += c * Rational(pw);
        else
            total += c / Rational(pw);
    }
    return total;
}

double PolynomialInN::evaluate(double n) const {
    double total = 0.0;
    for (const auto& [p, c] : terms_) total += c.get_d() * std::pow(n, p);
    return total;
}

namespace {

std::string superscript(int value) {
    static const char* digits[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
    std::string out = value < 0 ? "⁻" : "";
    for (char ch : std::to_string(std::abs(value))) out += digits[ch - '0'];
    return out;
}

}  // namespace

std::string PolynomialInN::pretty() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [p, c] = *it;
        const bool negative = c < 0;
        if (first)
            out << (negative ? "−" : "");
        else
            out << (negative ? " − " : " + ");
        const Rational magnitude = negative ? Rational(-c) : c;
        const bool unit = magnitude == 1;
        if (p == 0) {
            out << magnitude.get_str();
        } else {
            if (!unit) out << magnitude.get_str() << "·";
            out << "N" << (p == 1 ? std::string() : superscript(p));
        }
        first = false;
    }
    return out.str();
}

void SeriesInN::add(int order, const PolynomialInN& p) {
    if (order < 0) throw ContractViolation("series orders are non-negative");
    auto& slot = orders_[order];
    slot += p;
    if (slot.is_zero()) orders_.erase(order);
}

const PolynomialInN& SeriesInN::coefficient(int order) const {
    static const PolynomialInN zero;
    auto it = orders_.find(order);
    return it == orders_.end() ? zero : it->second;
}

SeriesInN SeriesInN::multiply(const SeriesInN& a, const SeriesInN& b, int max_order) {
    SeriesInN out;
    for (const auto& [ka, pa] : a.orders_)
        for (const auto& [kb, pb] : b.orders_)
            if (ka + kb <= max_order) out.add(ka + kb, pa * pb);
    return out;
}

SeriesInN SeriesInN::exp(const SeriesInN& s, int max_order) {
    if (!s.coefficient(0).is_zero()) throw ContractViolation("exp of a series needs a vanishing constant term");
    SeriesInN result;
    result.add(0, PolynomialInN(0, 1));
    SeriesInN power = result;
    for (int j = 1; j <= max_order; ++j) {
        power = multiply(power, s, max_order);
        SeriesInN scaled;
        Rational inv_factorial = 1;
        for (int i = 2; i <= j; ++i) inv_factorial /= i;
        for (const auto& [k, p] : power.orders_) scaled.add(k, p * inv_factorial);
        for (const auto& [k, p] : scaled.orders_) result.add(k, p);
    }
    return result;
}

std::map<int, Rational> SeriesInN::at(long n) const {
    std::map<int, Rational> out;
    for (const auto& [k, p] : orders_) out[k] = p.at(n);
    return out;
}

}  // namespace lvelab
