#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lvelab/parallel.hpp"
#include "lvelab/quadrature.hpp"
#include "lvelab/series.hpp"

namespace lvelab {

/// Seeded Monte Carlo settings. Identical seeds give identical estimates
/// whatever the worker count.
struct McConfig {
    std::uint64_t seed = 42;
    std::uint64_t samples = 100000;
    int N = 1;

    void validate() const;
};

namespace oracle {

/// Draws are split into this many shards with derived seeds, independent of
/// the number of workers.
inline constexpr int kShards = 64;

/// Z(lambda, 1) = int_0^inf exp(-t - lambda t^2) dt by adaptive quadrature.
/// Only N = 1 reduces to one dimension; other N raise ContractViolation.
Estimate z_reference(double lambda, int N, const QuadratureConfig& cfg);

/// Importance sampling from the free measure: Z = <exp(-(lambda/N) Tr (Phi^+ Phi)^2)>
/// over 2N^2 real Gaussian coordinates, N <= 3. Error is one standard error.
Estimate z_reference(double lambda, const McConfig& cfg, const WorkerPool& pool = WorkerPool());

struct Divergence {
    int order = 0;
    int power = 0;
    Rational a;
    Rational b;
};

struct SeriesComparison {
    int max_order = 0;
    bool equal = true;
    std::optional<Divergence> first_divergence;
    /// Every (order, N-power) compared, in order.
    struct Row {
        int order;
        int power;
        Rational a;
        Rational b;
    };
    std::vector<Row> rows;
};

/// Exact comparison per (order, power of N) through max_order.
SeriesComparison compare_series(const SeriesInN& a, const SeriesInN& b, int max_order);

/// Human-readable table of a comparison.
std::string to_table(const SeriesComparison& report, const std::string& label_a = "a",
                     const std::string& label_b = "b");

}  // namespace oracle
}  // namespace lvelab
