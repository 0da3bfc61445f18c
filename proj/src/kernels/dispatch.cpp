#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "lvelab/errors.hpp"
#include "lvelab/kernels.hpp"
#include "lvelab/quadrature.hpp"

namespace lvelab::kernels {

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(LVELAB_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(LVELAB_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() {
    static const Isa selected = [] {
        if (const char* env = std::getenv("LVELAB_ISA")) {
            for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
                if (isa_name(isa) == env && isa_available(isa)) return isa;
        }
        for (Isa isa : {Isa::Avx2, Isa::Neon})
            if (isa_available(isa)) return isa;
        return Isa::Scalar;
    }();
    return selected;
}

namespace {

void check_isa(Isa isa) {
    if (!isa_available(isa))
        throw NotImplemented("kernel ISA " + std::string(isa_name(isa)) + " is not available on this host");
}

void transform(Isa isa, const double* lower, int dims, const double* z, double* sigma, std::size_t count,
               std::size_t z_stride, std::size_t sigma_stride) {
    switch (isa) {
#if defined(LVELAB_HAVE_AVX2)
        case Isa::Avx2: detail::lower_transform_avx2(lower, dims, z, z_stride, sigma, sigma_stride, count); return;
#endif
#if defined(LVELAB_HAVE_NEON)
        case Isa::Neon: detail::lower_transform_neon(lower, dims, z, z_stride, sigma, sigma_stride, count); return;
#endif
        default: detail::lower_transform_scalar(lower, dims, z, z_stride, sigma, sigma_stride, count); return;
    }
}

ResolventSum product(Isa isa, const double* sigma, int dims, std::size_t count, std::size_t stride,
                     const int* degrees, double coupling, const double* weights) {
    switch (isa) {
#if defined(LVELAB_HAVE_AVX2)
        case Isa::Avx2:
            return detail::resolvent_product_avx2(sigma, dims, count, stride, degrees, coupling, weights);
#endif
#if defined(LVELAB_HAVE_NEON)
        case Isa::Neon:
            return detail::resolvent_product_neon(sigma, dims, count, stride, degrees, coupling, weights);
#endif
        default:
            return detail::resolvent_product_scalar(sigma, dims, count, stride, degrees, coupling, weights);
    }
}

}  // namespace

void lower_transform(Isa isa, std::span<const double> lower, int dims, std::span<const double> z,
                     std::span<double> sigma, std::size_t count) {
    check_isa(isa);
    const auto need = static_cast<std::size_t>(dims) * count;
    if (lower.size() != static_cast<std::size_t>(dims * dims) || z.size() < need || sigma.size() < need)
        throw ContractViolation("lower_transform: buffer sizes do not match dims and count");
    transform(isa, lower.data(), dims, z.data(), sigma.data(), count, count, count);
}

ResolventSum resolvent_product(Isa isa, std::span<const double> sigma, int dims, std::size_t count,
                               std::span<const int> degrees, double coupling,
                               std::span<const double> weights) {
    check_isa(isa);
    if (sigma.size() < static_cast<std::size_t>(dims) * count || weights.size() < count ||
        degrees.size() != static_cast<std::size_t>(dims))
        throw ContractViolation("resolvent_product: buffer sizes do not match dims and count");
    return product(isa, sigma.data(), dims, count, count, degrees.data(), coupling, weights.data());
}

GaussianGrid GaussianGrid::hermite(int dims, int points_per_dim, bool half) {
    if (dims < 1 || points_per_dim < 1) throw ContractViolation("Gauss-Hermite grid needs dims, points >= 1");
    const auto& rule = quad::gauss_hermite_normal(points_per_dim);
    GaussianGrid grid;
    grid.dims = dims;
    std::size_t total = 1;
    for (int d = 0; d < dims; ++d) total *= static_cast<std::size_t>(points_per_dim);

    std::vector<std::vector<double>> columns(dims);
    std::vector<int> index(dims, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        double weight = 1.0;
        const double first = rule.nodes[index[0]];
        if (!half || first >= 0.0) {
            for (int d = 0; d < dims; ++d) weight *= rule.weights[index[d]];
            if (half) weight *= (first == 0.0) ? 1.0 : 2.0;
            for (int d = 0; d < dims; ++d) columns[d].push_back(rule.nodes[index[d]]);
            grid.weights.push_back(weight);
        }
        int d = 0;
        while (d < dims && ++index[d] == points_per_dim) index[d++] = 0;
    }
    grid.count = grid.weights.size();
    grid.z.reserve(grid.count * dims);
    for (const auto& c : columns) grid.z.insert(grid.z.end(), c.begin(), c.end());
    return grid;
}

ResolventSum gaussian_resolvent_average(Isa isa, std::span<const double> lower, const GaussianGrid& grid,
                                        std::span<const int> degrees, double coupling) {
    check_isa(isa);
    const int dims = grid.dims;
    if (lower.size() != static_cast<std::size_t>(dims * dims) || degrees.size() != static_cast<std::size_t>(dims))
        throw ContractViolation("gaussian_resolvent_average: shape mismatch");
    constexpr std::size_t kBlock = 512;
    std::vector<double> sigma(kBlock * dims);
    ResolventSum total;
    for (std::size_t start = 0; start < grid.count; start += kBlock) {
        const std::size_t count = std::min(kBlock, grid.count - start);
        transform(isa, lower.data(), dims, grid.z.data() + start, sigma.data(), count, grid.count, kBlock);
        const ResolventSum part =
            product(isa, sigma.data(), dims, count, kBlock, degrees.data(), coupling, grid.weights.data() + start);
        total.weighted_real += part.weighted_real;
        total.max_modulus = std::max(total.max_modulus, part.max_modulus);
    }
    return total;
}

LaguerreGrid LaguerreGrid::build(std::span<const int> alphas, int points_per_dim) {
    const int dims = static_cast<int>(alphas.size());
    if (dims < 1 || points_per_dim < 1) throw ContractViolation("Gauss-Laguerre grid needs dims, points >= 1");
    std::vector<const quad::Rule*> rules;
    for (int alpha : alphas) rules.push_back(&quad::gauss_laguerre(points_per_dim, alpha));
    LaguerreGrid grid;
    grid.dims = dims;
    std::size_t total = 1;
    for (int d = 0; d < dims; ++d) total *= static_cast<std::size_t>(points_per_dim);
    grid.count = total;
    grid.t.resize(total * dims);
    grid.base.resize(total);
    grid.weights.resize(total);
    std::vector<int> index(dims, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        double weight = 1.0, base = 0.0;
        for (int d = 0; d < dims; ++d) {
            const double t = rules[d]->nodes[index[d]];
            grid.t[d * total + flat] = t;
            base += t * t;
            weight *= rules[d]->weights[index[d]];
        }
        grid.base[flat] = base;
        grid.weights[flat] = weight;
        int d = 0;
        while (d < dims && ++index[d] == points_per_dim) index[d++] = 0;
    }
    return grid;
}

double laplace_quadratic_sum(Isa isa, std::span<const double> x, const LaguerreGrid& grid, double c) {
    check_isa(isa);
    const int dims = grid.dims;
    if (x.size() != static_cast<std::size_t>(dims * dims)) throw ContractViolation("laplace_quadratic_sum: shape mismatch");
    switch (isa) {
#if defined(LVELAB_HAVE_AVX2)
        case Isa::Avx2:
            return detail::quadratic_exp_avx2(x.data(), dims, grid.t.data(), grid.count, grid.base.data(),
                                              grid.weights.data(), grid.count, c);
#endif
#if defined(LVELAB_HAVE_NEON)
        case Isa::Neon:
            return detail::quadratic_exp_neon(x.data(), dims, grid.t.data(), grid.count, grid.base.data(),
                                              grid.weights.data(), grid.count, c);
#endif
        default:
            return detail::quadratic_exp_scalar(x.data(), dims, grid.t.data(), grid.count, grid.base.data(),
                                                grid.weights.data(), grid.count, c);
    }
}

void exp_nonpositive(Isa isa, std::span<const double> in, std::span<double> out) {
    check_isa(isa);
    if (out.size() < in.size()) throw ContractViolation("exp_nonpositive: output shorter than input");
    for (double v : in)
        if (!(v <= 0.0)) throw ContractViolation("exp_nonpositive takes arguments <= 0");
    switch (isa) {
#if defined(LVELAB_HAVE_AVX2)
        case Isa::Avx2: detail::exp_avx2(in.data(), out.data(), in.size()); return;
#endif
#if defined(LVELAB_HAVE_NEON)
        case Isa::Neon: detail::exp_neon(in.data(), out.data(), in.size()); return;
#endif
        default: detail::exp_scalar(in.data(), out.data(), in.size()); return;
    }
}

}  // namespace lvelab::kernels
