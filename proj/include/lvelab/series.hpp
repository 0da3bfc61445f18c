#pragma once

#include <map>
#include <string>

#include <gmpxx.h>

namespace lvelab {

using Rational = mpq_class;

/// "p/q" with q >= 1 always written, e.g. "-2/1".
std::string to_fraction_string(const Rational& r);
Rational parse_fraction(const std::string& text);

/// Finite Laurent polynomial in N with exact rational coefficients. Zero
/// coefficients are never stored.
class PolynomialInN {
public:
    PolynomialInN() = default;
    PolynomialInN(int power, Rational coefficient) { add(power, std::move(coefficient)); }

    void add(int power, const Rational& coefficient);
    Rational coefficient(int power) const;
    const std::map<int, Rational>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    PolynomialInN& operator+=(const PolynomialInN& other);
    PolynomialInN& operator*=(const Rational& scalar);
    friend PolynomialInN operator+(PolynomialInN a, const PolynomialInN& b) { return a += b; }
    friend PolynomialInN operator*(const PolynomialInN& a, const PolynomialInN& b);
    friend PolynomialInN operator*(PolynomialInN a, const Rational& s) { return a *= s; }
    friend bool operator==(const PolynomialInN& a, const PolynomialInN& b) { return a.terms_ == b.terms_; }

    /// Exact value at an integer N.
    Rational at(long n) const;
    double evaluate(double n) const;

    /// Human-readable form with unicode minus, middle dot and superscripts,
    /// highest power first: "9·N² + 1".
    std::string pretty() const;

private:
    std::map<int, Rational> terms_;
};

/// Power series in the coupling: order k -> coefficient of lambda^k.
class SeriesInN {
public:
    void add(int order, const PolynomialInN& p);
    const PolynomialInN& coefficient(int order) const;
    const std::map<int, PolynomialInN>& orders() const noexcept { return orders_; }
    int max_order() const noexcept { return orders_.empty() ? 0 : orders_.rbegin()->first; }

    /// Truncated product through max_order.
    static SeriesInN multiply(const SeriesInN& a, const SeriesInN& b, int max_order);
    /// exp(s) through max_order; s must have no constant term.
    static SeriesInN exp(const SeriesInN& s, int max_order);

    /// Coefficients of lambda^k evaluated at integer N, k = 1..max_order.
    std::map<int, Rational> at(long n) const;

    friend bool operator==(const SeriesInN& a, const SeriesInN& b) { return a.orders_ == b.orders_; }

private:
    std::map<int, PolynomialInN> orders_;
};

}  // namespace lvelab
