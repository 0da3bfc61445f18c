#include "lvelab/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace lvelab::kernels::detail {

void lower_transform_scalar(const double* lower, int dims, const double* z, std::size_t z_stride,
                        double* sigma, std::size_t sigma_stride, std::size_t count) {
    for (int v = 0; v < dims; ++v) {
        double* out = sigma + v * sigma_stride;
        std::fill(out, out + count, 0.0);
        for (int u = 0; u <= v; ++u) {
            const double l = lower[v * dims + u];
            if (l == 0.0) continue;
            const double* in = z + u * z_stride;
            for (std::size_t p = 0; p < count; ++p) out[p] += l * in[p];
        }
    }
}

ResolventSum resolvent_product_scalar(const double* sigma, int dims, std::size_t count, std::size_t stride,
                                      const int* degrees, double coupling, const double* weights) {
    ResolventSum out;
    double max_r2 = 0.0;
    for (std::size_t p = 0; p < count; ++p) {
        double acc_re = 1.0, acc_im = 0.0;
        for (int v = 0; v < dims; ++v) {
            if (degrees[v] == 0) continue;
            const double as = coupling * sigma[v * stride + p];
            // 1 / (1 + i as) = (1 - i as) / (1 + as^2)
            const double r2 = 1.0 / (1.0 + as * as);
            max_r2 = std::max(max_r2, r2);
            const double base_re = r2, base_im = -as * r2;
            double pw_re = base_re, pw_im = base_im;
            for (int k = 1; k < degrees[v]; ++k) {
                const double re = pw_re * base_re - pw_im * base_im;
                pw_im = pw_re * base_im + pw_im * base_re;
                pw_re = re;
            }
            const double re = acc_re * pw_re - acc_im * pw_im;
            acc_im = acc_re * pw_im + acc_im * pw_re;
            acc_re = re;
        }
        out.weighted_real += weights[p] * acc_re;
    }
    // |1/(1 + i as)|^2 = 1/(1 + as^2)
    out.max_modulus = std::sqrt(max_r2);
    return out;
}

double quadratic_exp_scalar(const double* x, int dims, const double* t, std::size_t stride, const double* base,
                            const double* weights, std::size_t count, double c) {
    double sum = 0.0;
    for (std::size_t p = 0; p < count; ++p) {
        double q = base[p];
        for (int i = 0; i < dims; ++i) {
            const double ti = t[i * stride + p];
            for (int j = i + 1; j < dims; ++j) q += 2.0 * x[i * dims + j] * ti * t[j * stride + p];
        }
        sum += weights[p] * std::exp(-c * q);
    }
    return sum;
}

void exp_scalar(const double* in, double* out, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) out[k] = std::exp(in[k]);
}

}  // namespace lvelab::kernels::detail
