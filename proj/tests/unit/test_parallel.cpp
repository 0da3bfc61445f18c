#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lvelab/errors.hpp"
#include "lvelab/parallel.hpp"
#include "lvelab/quadrature.hpp"
#include "lvelab/rng.hpp"

using namespace lvelab;

TEST_CASE("WorkerPool::map is independent of the worker count") {
    auto f = [](std::size_t i) { return std::sin(static_cast<double>(i)) * static_cast<double>(i); };
    const auto one = WorkerPool(1).map<double>(1000, f);
    for (int jobs : {2, 3, 8}) CHECK(WorkerPool(jobs).map<double>(1000, f) == one);
    CHECK(WorkerPool(0).jobs() == 1);
}

TEST_CASE("WorkerPool rethrows the first task error") {
    for (int jobs : {1, 4})
        CHECK_THROWS_AS(WorkerPool(jobs).for_each_index(100,
                                                        [](std::size_t i) {
                                                            if (i == 37) throw std::runtime_error("boom");
                                                        }),
                        std::runtime_error);
}

TEST_CASE("stream seeds are deterministic and distinct") {
    static_assert(stream_seed(42, 0) == stream_seed(42, 0));
    CHECK(stream_seed(42, 0) != stream_seed(42, 1));
    CHECK(stream_seed(42, 0) != stream_seed(43, 0));
    auto a = make_stream(1, 5), b = make_stream(1, 5);
    CHECK(a() == b());
}

TEST_CASE("Gauss rules integrate polynomials exactly") {
    const auto& gl = quad::gauss_legendre_unit(5);
    double s = 0.0;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) s += gl.weights[k] * std::pow(gl.nodes[k], 9);
    CHECK(s == doctest::Approx(0.1).epsilon(1e-14));
    const auto& gh = quad::gauss_hermite_normal(6);
    double m4 = 0.0;
    for (std::size_t k = 0; k < gh.nodes.size(); ++k) m4 += gh.weights[k] * std::pow(gh.nodes[k], 4);
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-13));
    // Gamma(alpha + 1) density: E[t^2] = (alpha + 1)(alpha + 2)
    for (int alpha : {0, 1, 3}) {
        const auto& lg = quad::gauss_laguerre(6, alpha);
        double m2 = 0.0, w = 0.0;
        for (std::size_t k = 0; k < lg.nodes.size(); ++k) {
            m2 += lg.weights[k] * lg.nodes[k] * lg.nodes[k];
            w += lg.weights[k];
        }
        CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(m2 == doctest::Approx((alpha + 1.0) * (alpha + 2.0)).epsilon(1e-12));
    }
}

TEST_CASE("adaptive quadrature meets its tolerance") {
    QuadratureConfig cfg;
    cfg.abs_tol = 1e-12;
    const auto r = quad::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, cfg);
    CHECK(std::abs(r.value - 2.0 / 3.0) < 1e-10);
    const auto h = quad::integrate_half_line([](double t) { return std::exp(-t); }, cfg);
    CHECK(std::abs(h.value - 1.0) < 1e-10);
    const auto n = quad::normal_expectation([](double z) { return z * z; }, cfg);
    CHECK(std::abs(n.value - 1.0) < 1e-10);
    QuadratureConfig starved = cfg;
    starved.max_subdivisions = 1;
    starved.abs_tol = 1e-15;
    starved.rel_tol = 1e-15;
    CHECK_THROWS_AS(quad::integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, starved), AccuracyError);
    QuadratureConfig bad;
    bad.abs_tol = -1;
    CHECK_THROWS_AS(bad.validate(), ContractViolation);
}

TEST_CASE("ordering simplices tile the cube") {
    const auto orders = quad::all_orderings(3);
    CHECK(orders.size() == 6);
    QuadratureConfig cfg;
    // int over [0,1]^3 of min(w) = 1/4, kinked on the diagonal hyperplanes
    const auto r = quad::integrate_cube_by_orderings(
        [](std::span<const double> w) { return std::min({w[0], w[1], w[2]}); }, 3, cfg);
    CHECK(r.value == doctest::Approx(0.25).epsilon(1e-12));
}
