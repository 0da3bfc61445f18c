#include <doctest.h>

#include "lvelab/errors.hpp"
#include "lvelab/ribbon.hpp"
#include "lvelab/wick.hpp"

using namespace lvelab;
using namespace lvelab::wick;

namespace {

PolynomialInN poly(std::initializer_list<std::pair<int, Rational>> terms) {
    PolynomialInN p;
    for (const auto& [k, c] : terms) p.add(k, c);
    return p;
}

PolynomialInN moment(const char* word, FieldKind kind = FieldKind::ComplexMatrix) {
    return wick_moment(TraceWord::parse(word), {kind, 0});
}

// Moments m_k = <(Tr Phi+ Phi Phi+ Phi)^k>, turned into cumulants by the
// moment-cumulant recursion over set partitions.
SeriesInN log_z_by_cumulants(int max_order) {
    std::vector<PolynomialInN> m(max_order + 1), kappa(max_order + 1);
    for (int k = 1; k <= max_order; ++k) {
        std::string word;
        for (int v = 0; v < k; ++v) word += v ? " PDPD" : "PDPD";
        m[k] = wick_moment(TraceWord::parse(word), {});
    }
    for (int n = 1; n <= max_order; ++n) {
        kappa[n] = m[n];
        for (int j = 1; j < n; ++j) {
            mpz_class binom;
            mpz_bin_uiui(binom.get_mpz_t(), n - 1, j - 1);
            kappa[n] += kappa[j] * m[n - j] * Rational(-binom);
        }
    }
    SeriesInN out;
    Rational factorial = 1;
    for (int k = 1; k <= max_order; ++k) {
        factorial *= k;
        const Rational sign = k % 2 ? -1 : 1;
        out.add(k, kappa[k] * PolynomialInN(-k, sign / factorial));
    }
    return out;
}

}  // namespace

TEST_CASE("TraceWord parsing") {
    const auto w = TraceWord::parse("DPDP SS");
    CHECK(w.traces.size() == 2);
    CHECK(w.count(Letter::Phi) == 2);
    CHECK(w.count(Letter::Sigma) == 2);
    CHECK(w.to_string() == "DPDP SS");
    CHECK(TraceWord::parse("").traces.empty());
    CHECK_THROWS_AS(TraceWord::parse("DXP"), ContractViolation);
}

TEST_CASE("Gaussian moments") {
    CHECK(moment("DP") == poly({{2, 1}}));
    CHECK(moment("DPDP") == poly({{3, 2}}));
    CHECK(moment("DP DP") == poly({{4, 1}, {2, 1}}));
    CHECK(moment("SS", FieldKind::Hermitian) == poly({{2, 1}}));
    CHECK(moment("S S", FieldKind::Hermitian) == poly({{1, 1}}));
    CHECK(moment("SSSS", FieldKind::Hermitian) == poly({{3, 2}, {1, 1}}));
    CHECK(moment("", FieldKind::Hermitian) == poly({{0, 1}}));
    CHECK_THROWS_AS(moment("SSS", FieldKind::Hermitian), ContractViolation);
    CHECK_THROWS_AS(moment("PP"), ContractViolation);
    CHECK_THROWS_AS(moment("PDS"), ContractViolation);
}

TEST_CASE("log Z coefficients through order 4") {
    const auto c = log_z_series(4);
    CHECK(c.coefficient(1) == poly({{2, -2}}));
    CHECK(c.coefficient(2) == poly({{2, 9}, {0, 1}}));
    CHECK(c.coefficient(3) == poly({{2, -72}, {0, Rational(-80, 3)}}));
    CHECK(c.coefficient(4) == poly({{2, 756}, {0, 614}, {-2, 42}}));
}

TEST_CASE("connected enumeration agrees with the cumulant oracle") {
    CHECK(log_z_series(4) == log_z_by_cumulants(4));
}

TEST_CASE("exp(log Z) reproduces the Z series") {
    const auto z = z_series(4);
    CHECK(SeriesInN::exp(log_z_series(4), 4) == z);
    CHECK(z.coefficient(1) == poly({{2, -2}}));
}

TEST_CASE("pairing census at order 2") {
    const auto census = pairing_census(2);
    CHECK(census.total == 24);
    CHECK(census.connected == 20);
    // c_2 = (1/2) sum_connected N^(F-2) = 9 N^2 + 1
    CHECK(census.connected_by_faces.at(4) == 18);
    CHECK(census.connected_by_faces.at(2) == 2);
}

TEST_CASE("census is independent of the worker count") {
    const auto a = pairing_census(3, WorkerPool(1));
    const auto b = pairing_census(3, WorkerPool(4));
    CHECK(a.connected_by_faces == b.connected_by_faces);
    CHECK(a.all_by_faces == b.all_by_faces);
}

TEST_CASE("genus split: only N^(2-2g), order 1 purely planar") {
    const auto split = genus_split(log_z_series(4));
    for (const auto& [g, orders] : split) CHECK((g >= 0 && g <= 2));
    CHECK(split.at(0).at(1) == -2);
    CHECK(split.at(0).count(1) == 1);
    CHECK(split.count(1) == 1);
    CHECK(split.at(1).count(1) == 0);
    SeriesInN odd;
    odd.add(1, poly({{1, 1}}));
    CHECK_THROWS_AS(genus_split(odd), StructureViolation);
}

TEST_CASE("series limits and kinds") {
    CHECK_THROWS_AS(log_z_series(6), ResourceLimit);
    CHECK_THROWS_AS(log_z_series(2, {FieldKind::Hermitian, 0}), ContractViolation);
}

TEST_CASE("csv export") {
    const auto csv = to_csv(log_z_series(2));
    CHECK(csv == "order,N_power,coefficient\n1,2,-2/1\n2,2,9/1\n2,0,1/1\n");
}
