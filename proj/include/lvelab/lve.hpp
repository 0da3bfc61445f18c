#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lvelab/forest.hpp"
#include "lvelab/oracle.hpp"
#include "lvelab/parallel.hpp"
#include "lvelab/quadrature.hpp"
#include "lvelab/series.hpp"

namespace lvelab::lve {

/// Quartic complex matrix model in its intermediate-field form. The
/// coefficient a = sqrt(2 lambda / N) makes the sigma-Gaussian identity
/// reproduce the interaction (lambda/N) Tr (Phi^+ Phi)^2 exactly.
struct LoopVertexModel {
    int N = 1;
    double lambda = 0.0;

    void validate() const;
    double a() const { return std::sqrt(2.0 * lambda / N); }
};

/// Deterministic integration (Gauss-Hermite in sigma, Gauss-Legendre in the
/// weakening parameters, adaptive quadrature for one-dimensional pieces) or
/// seeded Monte Carlo.
using Integrator = std::variant<QuadratureConfig, McConfig>;

inline constexpr int kDefaultTreeCap = 6;

/// Z through the sigma representation, <det(1 + i a sigma)^(-N)> over the
/// GUE. Quadrature: N = 1 adaptively, 2 <= N <= 4 over eigenvalues with the
/// squared Vandermonde weight on a Gauss-Hermite grid.
Estimate sigma_z(const LoopVertexModel& model, const Integrator& integrator, const WorkerPool& pool = WorkerPool());

enum class LogRoute { Eigenvalues, DenseLog };

/// V = -N tr log(1 + i a sigma). Throws ContractViolation for a
/// non-hermitian or wrongly sized sigma.
std::complex<double> loop_vertex_value(const Eigen::MatrixXcd& sigma, const LoopVertexModel& model,
                                       LogRoute route = LogRoute::Eigenvalues);

/// Counts of the resolvent norm audit; every resolvent evaluated by the
/// integrators is checked against ||(1 + i a sigma)^(-1)|| <= 1.
struct ResolventAudit {
    std::uint64_t samples = 0;
    std::uint64_t violations = 0;
    double max_norm = 0.0;

    void merge(const ResolventAudit& other);
};

inline constexpr double kResolventSlack = 1e-12;

/// Unlabeled tree with its labeled multiplicity and the orbits of edge
/// orderings under its automorphism group.
struct TreeShape {
    forest::Forest representative;
    std::uint64_t labeled_count = 0;
    std::vector<quad::OrderingSimplex> ordering_orbits;
};

std::vector<TreeShape> tree_shapes(int n, int cap = kDefaultTreeCap);

/// Orbit representatives (with orbit sizes) of the (n-1)! orderings of the
/// tree's edges under its automorphisms.
std::vector<quad::OrderingSimplex> ordering_orbits(const forest::Forest& tree);

/// Cyclic orders of the edges at every vertex, one per plane embedding,
/// expressed as the contour: the sequence of vertices at the 2(n-1)
/// corners met walking around the tree.
std::vector<std::vector<int>> embedding_contours(const forest::Forest& tree);

struct AmplitudeResult {
    double value = 0.0;
    double error = 0.0;
    ResolventAudit audit;
};

/// Points per dimension of the sigma-side rule (Gauss-Laguerre in the Laplace
/// form, Gauss-Hermite in the resolvent form) and of the Gauss-Legendre rule
/// on each ordering simplex of the weakening parameters. For tree orders the
/// fine rule gives the value, the coarse one the error estimate.
struct GridRule {
    int sigma_points = 0;
    int weakening_points = 0;
};
struct TreeGrid {
    GridRule fine;
    GridRule coarse;
};
TreeGrid default_tree_grid(int n);

/// A_T = N (-2 lambda)^(n-1) int dw < sum over plane embeddings of
/// Tr prod_corners (1 + i a sigma^v)^(-1) >, sigma^v drawn with the replica
/// covariance x^T(w). The one-vertex tree gives <V>. Quadrature needs
/// N = 1; Monte Carlo works for any small N.
AmplitudeResult tree_amplitude(const forest::Forest& tree, const LoopVertexModel& model,
                               const Integrator& integrator, int cap = kDefaultTreeCap);

/// The same N = 1 amplitude with the resolvents kept as they are: tensor
/// Gauss-Hermite over the replica fields (rule.sigma_points points per
/// dimension) through the resolvent-product kernel. Slower to converge than
/// the Laplace form; every resolvent evaluated enters the audit.
AmplitudeResult hermite_tree_amplitude(const forest::Forest& tree, const LoopVertexModel& model, GridRule rule,
                                       int cap = kDefaultTreeCap);

struct OrderTerm {
    int n = 0;
    double t_n = 0.0;
    double error = 0.0;
    std::uint64_t trees = 0;
};

struct LveEstimate {
    double lambda = 0.0;
    int N = 1;
    std::vector<OrderTerm> orders;
    std::vector<double> partial_sums;
    std::optional<Estimate> oracle;
    std::optional<std::uint64_t> seed;
    ResolventAudit audit;
};

/// t_n = (1/n!) sum over labeled trees of A_T for n <= n_max, with partial
/// sums and log Z from the oracle module as reference.
LveEstimate lve_sum(const LoopVertexModel& model, int n_max, const Integrator& integrator,
                    const WorkerPool& pool = WorkerPool(), int cap = kDefaultTreeCap);

inline constexpr int kDefaultSymbolicCap = 5;

/// lambda-series of the tree expansion with N symbolic: resolvents expanded
/// in powers of a, sigma moments by Wick pairing, weakening integrals exact.
SeriesInN lve_series(int max_order, const WorkerPool& pool = WorkerPool(), int cap = kDefaultSymbolicCap);

/// Exact integral over [0,1]^m of prod_s min_{e in s} w_e; each set lists
/// edge indices.
Rational weakening_integral(int m, const std::vector<std::vector<int>>& min_sets);

struct BorelConfig {
    double residual_tol = 1.0;
};

struct BorelFit {
    double C = 0.0;
    double K = 0.0;
    std::vector<double> residuals;
    double max_residual = 0.0;
    bool pass = false;
};

/// Least-squares fit of log(|c_n| / n!) = log C + n log K, coefficients
/// given from n = 1. Zero coefficients are skipped. Passes when every
/// residual stays within residual_tol.
BorelFit borel_growth_check(const std::vector<Rational>& coefficients, BorelConfig cfg = {});

}  // namespace lvelab::lve
