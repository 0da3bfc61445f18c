#pragma once

#include <functional>
#include <random>
#include <span>

#include <Eigen/Dense>

#include "lvelab/lve.hpp"

namespace lvelab::lve::detail {

inline constexpr int kMaxQuadratureSize = 4;

Eigen::MatrixXcd sample_gue(int N, std::mt19937_64& rng, std::normal_distribution<double>& normal);

/// GUE average of f(eigenvalues) on a Gauss-Hermite grid with the squared
/// Vandermonde weight, raising the rule order until two levels agree.
Estimate eigenvalue_average(int N, const std::function<double(std::span<const double>)>& f,
                            const QuadratureConfig& cfg);

/// Mean and standard error of draw() over cfg.samples seeded draws.
Estimate mc_average(const McConfig& cfg, const WorkerPool& pool,
                    const std::function<double(std::mt19937_64&, std::normal_distribution<double>&)>& draw);

}  // namespace lvelab::lve::detail
