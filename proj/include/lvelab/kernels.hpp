#pragma once

// Data-parallel inner loops of the loop-vertex integrators. Every kernel has
// a scalar reference implementation; AVX2 (x86-64) and NEON (aarch64)
// variants are selected at runtime and tested for equivalence against it.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace lvelab::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);

/// Best available ISA, unless the LVELAB_ISA environment variable names an
/// available one ("scalar", "avx2", "neon").
Isa active_isa();

struct ResolventSum {
    double weighted_real = 0.0;   ///< sum_p w_p Re prod_v (1 + i a s_vp)^(-d_v)
    double max_modulus = 0.0;     ///< max over p, v with d_v > 0 of |1 / (1 + i a s_vp)|
};

/// sigma[v * count + p] = sum_{u <= v} lower[v * dims + u] * z[u * count + p].
/// Arrays are structure-of-arrays with `count` points per coordinate.
void lower_transform(Isa isa, std::span<const double> lower, int dims, std::span<const double> z,
                     std::span<double> sigma, std::size_t count);

/// Weighted resolvent product over `count` points of a dims-dimensional
/// real sample set (structure-of-arrays layout, see lower_transform).
ResolventSum resolvent_product(Isa isa, std::span<const double> sigma, int dims, std::size_t count,
                               std::span<const int> degrees, double coupling,
                               std::span<const double> weights);

/// Tensor-product Gauss-Hermite grid for a standard normal vector, stored
/// as structure-of-arrays. With `half` set, only points whose first
/// coordinate is non-negative are kept (the zero node with half weight);
/// valid for integrands even under z -> -z.
struct GaussianGrid {
    int dims = 0;
    std::size_t count = 0;
    std::vector<double> z;
    std::vector<double> weights;

    static GaussianGrid hermite(int dims, int points_per_dim, bool half);
};

/// Gaussian average E[Re prod_v (1 + i a (L Z)_v)^(-d_v)] over the grid,
/// evaluated in cache-sized blocks with the two kernels above.
ResolventSum gaussian_resolvent_average(Isa isa, std::span<const double> lower, const GaussianGrid& grid,
                                        std::span<const int> degrees, double coupling);

/// Tensor generalized Gauss-Laguerre grid: coordinate v follows the rule
/// for t^alphas[v] e^(-t) / alphas[v]!. Structure-of-arrays with `base`
/// holding sum_v t_v^2 per point.
struct LaguerreGrid {
    int dims = 0;
    std::size_t count = 0;
    std::vector<double> t;
    std::vector<double> base;
    std::vector<double> weights;

    static LaguerreGrid build(std::span<const int> alphas, int points_per_dim);
};

/// sum_p w_p exp(-c t_p^T x t_p) for a symmetric unit-diagonal x (row-major,
/// dims x dims) over the grid points t_p.
double laplace_quadratic_sum(Isa isa, std::span<const double> x, const LaguerreGrid& grid, double c);

/// out[k] = exp(in[k]) for in[k] <= 0; the SIMD variants use a
/// range-reduced polynomial and agree with std::exp to a few ulp.
void exp_nonpositive(Isa isa, std::span<const double> in, std::span<double> out);

namespace detail {
double quadratic_exp_scalar(const double* x, int dims, const double* t, std::size_t stride, const double* base,
                            const double* weights, std::size_t count, double c);
void exp_scalar(const double* in, double* out, std::size_t count);
void lower_transform_scalar(const double* lower, int dims, const double* z, std::size_t z_stride,
                            double* sigma, std::size_t sigma_stride, std::size_t count);
ResolventSum resolvent_product_scalar(const double* sigma, int dims, std::size_t count, std::size_t stride,
                                      const int* degrees, double coupling, const double* weights);
#if defined(LVELAB_HAVE_AVX2)
void lower_transform_avx2(const double* lower, int dims, const double* z, std::size_t z_stride,
                          double* sigma, std::size_t sigma_stride, std::size_t count);
ResolventSum resolvent_product_avx2(const double* sigma, int dims, std::size_t count, std::size_t stride,
                                    const int* degrees, double coupling, const double* weights);
double quadratic_exp_avx2(const double* x, int dims, const double* t, std::size_t stride, const double* base,
                          const double* weights, std::size_t count, double c);
void exp_avx2(const double* in, double* out, std::size_t count);
#endif
#if defined(LVELAB_HAVE_NEON)
void lower_transform_neon(const double* lower, int dims, const double* z, std::size_t z_stride,
                          double* sigma, std::size_t sigma_stride, std::size_t count);
ResolventSum resolvent_product_neon(const double* sigma, int dims, std::size_t count, std::size_t stride,
                                    const int* degrees, double coupling, const double* weights);
double quadratic_exp_neon(const double* x, int dims, const double* t, std::size_t stride, const double* base,
                          const double* weights, std::size_t count, double c);
void exp_neon(const double* in, double* out, std::size_t count);
#endif
}  // namespace detail

}  // namespace lvelab::kernels
