#include <doctest.h>

#include <cmath>
#include <random>

#include "lvelab/errors.hpp"
#include "lvelab/lve.hpp"
#include "lvelab/oracle.hpp"
#include "lvelab/wick.hpp"

using namespace lvelab;
using namespace lvelab::lve;

namespace {

QuadratureConfig tight() {
    QuadratureConfig q;
    q.abs_tol = 1e-12;
    q.rel_tol = 1e-12;
    return q;
}

Eigen::MatrixXcd random_hermitian(int N, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) m(i, j) = {g(rng), g(rng)};
    return (m + m.adjoint()) / 2.0;
}

forest::Forest star(int n) {
    std::vector<forest::Edge> edges;
    for (int v = 2; v <= n; ++v) edges.push_back({1, static_cast<std::uint8_t>(v)});
    return forest::Forest(n, edges);
}

}  // namespace

TEST_CASE("coupling convention a = sqrt(2 lambda / N)") {
    CHECK(LoopVertexModel{2, 0.5}.a() == doctest::Approx(std::sqrt(0.5)));
    CHECK_THROWS_AS(LoopVertexModel({0, 0.1}).validate(), ContractViolation);
    CHECK_THROWS_AS(LoopVertexModel({1, -0.1}).validate(), DomainError);
}

TEST_CASE("sigma representation equals the radial integral at N = 1") {
    for (double lambda : {0.01, 0.1, 0.5, 1.0}) {
        const double direct = oracle::z_reference(lambda, 1, tight()).value;
        CHECK(std::abs(sigma_z({1, lambda}, tight()).value - direct) < 1e-8);
    }
    CHECK(std::abs(sigma_z({1, 1.0}, tight()).value - 0.5456413607650471) < 1e-8);
}

TEST_CASE("sigma representation at N = 2: eigenvalue quadrature against Phi Monte Carlo") {
    const auto q = sigma_z({2, 0.1}, tight());
    const auto mc = oracle::z_reference(0.1, McConfig{11, 100000, 2});
    CHECK(std::abs(q.value - mc.value) < 3.0 * mc.error);
    const auto smc = sigma_z({2, 0.1}, McConfig{11, 100000, 2});
    CHECK(std::abs(q.value - smc.value) < 3.0 * smc.error);
    CHECK_THROWS_AS(sigma_z({2, 0.1}, McConfig{11, 1000, 3}), ContractViolation);
}

TEST_CASE("loop vertex: eigenvalue and dense-log routes agree") {
    std::mt19937_64 rng(5);
    for (int N : {1, 2, 3}) {
        const LoopVertexModel model{N, 0.3};
        for (int s = 0; s < 20; ++s) {
            const auto sigma = random_hermitian(N, rng);
            const auto a = loop_vertex_value(sigma, model, LogRoute::Eigenvalues);
            const auto b = loop_vertex_value(sigma, model, LogRoute::DenseLog);
            CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)));
        }
    }
    // Diagonal sigma: V = -N sum log(1 + i a s)
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
    d(0, 0) = 0.4;
    d(1, 1) = -1.3;
    const LoopVertexModel m2{2, 0.2};
    const std::complex<double> expected =
        -2.0 * (std::log(std::complex<double>(1.0, m2.a() * 0.4)) + std::log(std::complex<double>(1.0, -m2.a() * 1.3)));
    CHECK(std::abs(loop_vertex_value(d, m2) - expected) < 1e-14);
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(loop_vertex_value(bad, m2), ContractViolation);
    CHECK_THROWS_AS(loop_vertex_value(Eigen::MatrixXcd::Zero(3, 3), m2), ContractViolation);
}

TEST_CASE("tree shapes cover n^(n-2) labeled trees and (n-1)! orderings") {
    for (int n = 1; n <= 6; ++n) {
        std::uint64_t labeled = 0;
        for (const auto& shape : tree_shapes(n)) {
            labeled += shape.labeled_count;
            double orderings = 0.0;
            for (const auto& o : shape.ordering_orbits) orderings += o.multiplicity;
            CHECK(orderings == doctest::Approx(std::tgamma(n)));
        }
        CHECK(labeled == static_cast<std::uint64_t>(std::llround(std::pow(n, std::max(n - 2, 0)))));
    }
    CHECK(tree_shapes(4).size() == 2);
    CHECK(tree_shapes(6).size() == 6);
    CHECK_THROWS_AS(tree_shapes(7), ResourceLimit);
}

TEST_CASE("plane embeddings: prod over vertices of (degree - 1)!") {
    CHECK(embedding_contours(star(4)).size() == 2);
    CHECK(embedding_contours(star(5)).size() == 6);
    const forest::Forest path(4, {{1, 2}, {2, 3}, {3, 4}});
    const auto contours = embedding_contours(path);
    CHECK(contours.size() == 1);
    CHECK(contours.front().size() == 6);
}

TEST_CASE("weakening integrals against numeric cube integration") {
    CHECK(weakening_integral(1, {{0}}) == Rational(1, 2));
    CHECK(weakening_integral(2, {{0, 1}}) == Rational(1, 3));
    CHECK(weakening_integral(2, {{0}, {1}}) == Rational(1, 4));
    CHECK(weakening_integral(2, {{0}, {0}}) == Rational(1, 3));
    CHECK(weakening_integral(0, {}) == 1);
    const std::vector<std::vector<int>> sets{{0, 1}, {1, 2}, {2}, {0, 2}};
    const auto numeric = quad::integrate_cube_by_orderings(
        [&](std::span<const double> w) {
            double p = 1.0;
            for (const auto& s : sets) {
                double m = 1.0;
                for (int e : s) m = std::min(m, w[e]);
                p *= m;
            }
            return p;
        },
        3, tight());
    CHECK(std::abs(weakening_integral(3, sets).get_d() - numeric.value) < 1e-12);
    CHECK_THROWS_AS(weakening_integral(2, {{2}}), ContractViolation);
    CHECK_THROWS_AS(weakening_integral(2, {{}}), ContractViolation);
}

TEST_CASE("symbolic tree expansion equals the Wick series") {
    const auto lve = lve_series(4);
    CHECK(lve == wick::log_z_series(4));
    CHECK(lve.coefficient(1) == PolynomialInN(2, -2));
    CHECK(lve_series(4, WorkerPool(3)) == lve);
    CHECK_THROWS_AS(lve_series(6), ResourceLimit);
}

TEST_CASE("tree amplitudes: Laplace quadrature, resolvent quadrature and Monte Carlo") {
    const LoopVertexModel model{1, 0.05};
    QuadratureConfig q;
    q.abs_tol = 1e-7;
    q.rel_tol = 1e-4;
    // one vertex: <V> = -1/2 E[log(1 + a^2 s^2)]
    const forest::Forest single(1, {});
    const auto v = tree_amplitude(single, model, q);
    const auto direct = quad::normal_expectation(
        [&](double s) { return -0.5 * std::log1p(model.a() * model.a() * s * s); }, tight());
    CHECK(std::abs(v.value - direct.value) < q.abs_tol);

    for (const auto& tree : {forest::Forest(2, {{1, 2}}), star(3), star(4)}) {
        const auto laplace = tree_amplitude(tree, model, q);
        const auto hermite = hermite_tree_amplitude(tree, model, {12, 8});
        const auto mc = tree_amplitude(tree, model, McConfig{42, 200000, 1});
        INFO(forest::to_string(tree));
        CHECK(std::abs(laplace.value - hermite.value) < 2e-3 * std::abs(laplace.value));
        CHECK(std::abs(laplace.value - mc.value) < 4.0 * mc.error + 1e-3 * std::abs(laplace.value));
        CHECK(hermite.audit.violations == 0);
        CHECK(hermite.audit.max_norm <= 1.0 + kResolventSlack);
        CHECK(mc.audit.violations == 0);
        CHECK(mc.audit.samples > 0);
    }
    CHECK_THROWS_AS(tree_amplitude(forest::Forest(3, {{1, 2}}), model, q), ContractViolation);
    CHECK_THROWS_AS(tree_amplitude(star(3), {2, 0.05}, q), ContractViolation);
    CHECK_THROWS_AS(tree_amplitude(star(7), model, q, 6), ResourceLimit);
}

TEST_CASE("one- and two-vertex terms each carry half of c_1 = -2 at N = 1") {
    const double lambda = 1e-4;
    QuadratureConfig q;
    q.abs_tol = 1e-14;
    q.rel_tol = 1e-6;
    const auto t1 = tree_amplitude(forest::Forest(1, {}), {1, lambda}, q);
    const auto t2 = tree_amplitude(forest::Forest(2, {{1, 2}}), {1, lambda}, q);
    CHECK(t1.value / lambda == doctest::Approx(-1.0).epsilon(1e-2));
    CHECK(0.5 * t2.value / lambda == doctest::Approx(-1.0).epsilon(1e-2));
}

TEST_CASE("lve_sum at N = 1 converges to log Z") {
    QuadratureConfig q;
    q.abs_tol = 1e-6;
    q.rel_tol = 1e-4;
    const auto e = lve_sum({1, 0.05}, 4, q);
    REQUIRE(e.orders.size() == 4);
    REQUIRE(e.oracle);
    CHECK(e.orders[1].trees == 1);
    CHECK(e.orders[3].trees == 16);
    CHECK(std::abs(e.partial_sums.back() - e.oracle->value) < 1e-4);
    CHECK_FALSE(e.seed);
    QuadratureConfig strict;
    strict.abs_tol = 1e-15;
    strict.rel_tol = 1e-15;
    CHECK_THROWS_AS(lve_sum({1, 0.05}, 3, strict), AccuracyError);
    CHECK_THROWS_AS(lve_sum({1, 0.05}, 7, q), ResourceLimit);
    CHECK_THROWS_AS(lve_sum({2, 0.05}, 2, q), ContractViolation);
}

TEST_CASE("lve_sum Monte Carlo is reproducible across worker counts") {
    const McConfig mc{9, 5000, 2};
    const auto a = lve_sum({2, 0.05}, 3, mc, WorkerPool(1));
    const auto b = lve_sum({2, 0.05}, 3, mc, WorkerPool(3));
    REQUIRE(a.orders.size() == b.orders.size());
    for (std::size_t k = 0; k < a.orders.size(); ++k) CHECK(a.orders[k].t_n == b.orders[k].t_n);
    CHECK(a.seed == std::optional<std::uint64_t>(9));
    CHECK(a.audit.violations == 0);
    REQUIRE(a.oracle);
}

TEST_CASE("Borel growth fit") {
    // Exact factorial growth 0.5 * 3^n * n! fits with zero residual.
    std::vector<Rational> exact;
    mpz_class factorial = 1, power = 1;
    for (int n = 1; n <= 6; ++n) {
        factorial *= n;
        power *= 3;
        exact.emplace_back(Rational(factorial * power, 2) * (n % 2 ? -1 : 1));
    }
    const auto fit = borel_growth_check(exact);
    CHECK(fit.C == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fit.K == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(fit.max_residual < 1e-10);
    CHECK(fit.pass);

    std::vector<Rational> factorials, powers;
    mpz_class f = 1;
    for (int n = 1; n <= 6; ++n) {
        f *= n;
        factorials.emplace_back(f);
        powers.emplace_back(mpz_class(1) << n);
    }
    const auto pure = borel_growth_check(factorials);
    CHECK(pure.K == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pure.pass);
    const auto sub = borel_growth_check(powers);
    CHECK(sub.K <= 2.0);
    CHECK(sub.pass);

    std::vector<Rational> wild{1, Rational(1, 1000000), 1000000, 1};
    CHECK_FALSE(borel_growth_check(wild).pass);
    CHECK_THROWS_AS(borel_growth_check({0, 0, 0, 0}), DegenerateFit);
    CHECK_THROWS_AS(borel_growth_check({1, 2, 3}), ContractViolation);

    // log Z at N = 1 through order 5.
    const auto c = wick::log_z_series(5);
    std::vector<Rational> at1;
    for (int k = 1; k <= 5; ++k) at1.push_back(c.coefficient(k).at(1));
    CHECK(borel_growth_check(at1).pass);
}
