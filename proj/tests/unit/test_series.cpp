#include <doctest.h>

#include "lvelab/errors.hpp"
#include "lvelab/series.hpp"

using namespace lvelab;

TEST_CASE("fraction strings round trip") {
    CHECK(to_fraction_string(Rational(-2)) == "-2/1");
    CHECK(to_fraction_string(Rational(-80, 3)) == "-80/3");
    CHECK(parse_fraction("6/4") == Rational(3, 2));
    CHECK(parse_fraction("-7") == Rational(-7));
    CHECK_THROWS_AS(parse_fraction("x/2"), ContractViolation);
    CHECK_THROWS_AS(parse_fraction("1/0"), ContractViolation);
}

TEST_CASE("PolynomialInN arithmetic keeps no zero terms") {
    PolynomialInN p(2, 9);
    p.add(0, 1);
    PolynomialInN q(0, -1);
    CHECK((p + q) == PolynomialInN(2, 9));
    PolynomialInN zero = PolynomialInN(2, 1) + PolynomialInN(2, -1);
    CHECK(zero.is_zero());
    CHECK((p * PolynomialInN(-2, 1)).coefficient(0) == 9);
    CHECK((p * Rational(0)).is_zero());
    CHECK(p.at(2) == 37);
    CHECK(PolynomialInN(-2, 42).at(2) == Rational(21, 2));
    CHECK(PolynomialInN(1, 1).at(-3) == -3);
    CHECK(p.evaluate(2.0) == doctest::Approx(37.0));
    CHECK_THROWS_AS(p.at(0), DomainError);
}

TEST_CASE("pretty printing") {
    CHECK(PolynomialInN(2, -2).pretty() == "−2·N²");
    PolynomialInN p(2, 9);
    p.add(0, 1);
    CHECK(p.pretty() == "9·N² + 1");
    PolynomialInN r(2, -72);
    r.add(0, Rational(-80, 3));
    CHECK(r.pretty() == "−72·N² − 80/3");
    CHECK(PolynomialInN(-2, 42).pretty() == "42·N⁻²");
    CHECK(PolynomialInN(1, 1).pretty() == "N");
    CHECK(PolynomialInN().pretty() == "0");
}

TEST_CASE("SeriesInN exp and multiply") {
    // exp(x) with x = lambda: coefficients 1/k!
    SeriesInN s;
    s.add(1, PolynomialInN(0, 1));
    const auto e = SeriesInN::exp(s, 4);
    CHECK(e.coefficient(0) == PolynomialInN(0, 1));
    CHECK(e.coefficient(3) == PolynomialInN(0, Rational(1, 6)));
    CHECK(e.coefficient(4) == PolynomialInN(0, Rational(1, 24)));
    CHECK(e.max_order() == 4);
    CHECK(PolynomialInN(0, Rational(8, 6)) == PolynomialInN(0, Rational(4, 3)));
    const auto sq = SeriesInN::multiply(e, e, 3);
    CHECK(sq.coefficient(3) == PolynomialInN(0, Rational(4, 3)));
    SeriesInN with_constant;
    with_constant.add(0, PolynomialInN(0, 1));
    CHECK_THROWS_AS(SeriesInN::exp(with_constant, 2), ContractViolation);
    CHECK_THROWS_AS(with_constant.add(-1, PolynomialInN(0, 1)), ContractViolation);
    const auto values = s.at(5);
    CHECK(values.at(1) == 1);
}
