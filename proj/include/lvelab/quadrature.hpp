#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace lvelab {

/// Settings shared by every deterministic integrator in the library.
struct QuadratureConfig {
    double abs_tol = 1e-8;
    double rel_tol = 1e-12;
    int max_subdivisions = 4000;
    /// Upper limit used for semi-infinite domains. Zero selects the
    /// smallest T with e^{-T} < abs_tol / 10.
    double cutoff = 0.0;

    void validate() const;
    double effective_cutoff() const;
};

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

namespace quad {

/// Nodes and weights of a one-dimensional Gaussian rule.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [0, 1] (weights sum to 1).
const Rule& gauss_legendre_unit(int points);

/// Gauss-Hermite rule for the standard normal density: nodes x_k and
/// weights w_k with sum_k w_k f(x_k) ~ E[f(Z)], Z ~ N(0, 1).
const Rule& gauss_hermite_normal(int points);

/// Generalized Gauss-Laguerre rule for the Gamma(alpha + 1) density
/// t^alpha e^(-t) / alpha! on [0, infinity); weights sum to 1.
const Rule& gauss_laguerre(int points, int alpha);

/// Globally adaptive Gauss-Legendre on [a, b]. Each panel is estimated by a
/// 10-point rule and by the same rule on its two halves; the panel with the
/// largest discrepancy is bisected until the summed discrepancy meets the
/// tolerance. Throws AccuracyError when max_subdivisions is exhausted.
Estimate integrate(const std::function<double(double)>& f, double a, double b,
                   const QuadratureConfig& cfg);

/// Integral over [0, infinity) truncated at cfg.effective_cutoff().
Estimate integrate_half_line(const std::function<double(double)>& f, const QuadratureConfig& cfg);

/// E[f(Z)] for a standard normal Z, by adaptive quadrature on [-S, S]
/// with S chosen from the tolerance.
Estimate normal_expectation(const std::function<double(double)>& f, const QuadratureConfig& cfg);

/// Integrand over [0,1]^m. The span holds one coordinate per dimension.
using CubeIntegrand = std::function<double(std::span<const double>)>;

/// One ordering simplex of the unit cube, {w : w[order[0]] < ... < w[order[m-1]]}.
struct OrderingSimplex {
    std::vector<int> order;
    double multiplicity = 1.0;
};

/// Tensor Gauss-Legendre integration of f over one ordering simplex,
/// mapped from the cube by u_{m-1} = y_{m-1}, u_k = u_{k+1} y_k.
/// The result is multiplied by the simplex multiplicity.
double integrate_simplex(const CubeIntegrand& f, const OrderingSimplex& simplex, int points);

/// All m! ordering simplices of [0,1]^m, in lexicographic order of `order`.
std::vector<OrderingSimplex> all_orderings(int m);

/// Integrates an integrand that is smooth on every ordering simplex but may
/// have kinks on the hyperplanes w_i = w_j. The rule order is raised over
/// `levels` until two successive levels differ by less than the tolerance;
/// the difference is reported as the error.
Estimate integrate_cube_by_orderings(const CubeIntegrand& f, int m, const QuadratureConfig& cfg,
                                     std::span<const int> levels = {});

}  // namespace quad
}  // namespace lvelab
