#include "lvelab/kernels.hpp"

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

namespace lvelab::kernels::detail {

namespace {

// exp on [-708, 0]: x = n ln2 + r, |r| <= ln2 / 2, degree-13 Taylor in r.
inline float64x2_t exp_f64(float64x2_t x) {
    x = vmaxq_f64(x, vdupq_n_f64(-708.0));
    const float64x2_t n = vrndnq_f64(vmulq_n_f64(x, 1.4426950408889634));
    float64x2_t r = vfmsq_n_f64(x, n, 6.93147180369123816490e-01);
    r = vfmsq_n_f64(r, n, 1.90821492927058770002e-10);
    static constexpr double inv_factorial[] = {1.0,
                                               1.0,
                                               1.0 / 2,
                                               1.0 / 6,
                                               1.0 / 24,
                                               1.0 / 120,
                                               1.0 / 720,
                                               1.0 / 5040,
                                               1.0 / 40320,
                                               1.0 / 362880,
                                               1.0 / 3628800,
                                               1.0 / 39916800,
                                               1.0 / 479001600,
                                               1.0 / 6227020800};
    float64x2_t poly = vdupq_n_f64(inv_factorial[13]);
    for (int k = 12; k >= 0; --k) poly = vfmaq_f64(vdupq_n_f64(inv_factorial[k]), poly, r);
    const int64x2_t e = vshlq_n_s64(vaddq_s64(vcvtq_s64_f64(n), vdupq_n_s64(1023)), 52);
    return vmulq_f64(poly, vreinterpretq_f64_s64(e));
}

}  // namespace

void lower_transform_neon(const double* lower, int dims, const double* z, std::size_t z_stride,
                        double* sigma, std::size_t sigma_stride, std::size_t count) {
    const std::size_t body = count & ~std::size_t{1};
    for (int v = 0; v < dims; ++v) {
        double* out = sigma + v * sigma_stride;
        std::size_t p = 0;
        for (; p < body; p += 2) {
            float64x2_t acc = vdupq_n_f64(0.0);
            for (int u = 0; u <= v; ++u)
                acc = vfmaq_n_f64(acc, vld1q_f64(z + u * z_stride + p), lower[v * dims + u]);
            vst1q_f64(out + p, acc);
        }
        for (; p < count; ++p) {
            double acc = 0.0;
            for (int u = 0; u <= v; ++u) acc = std::fma(lower[v * dims + u], z[u * z_stride + p], acc);
            out[p] = acc;
        }
    }
}

ResolventSum resolvent_product_neon(const double* sigma, int dims, std::size_t count, std::size_t stride,
                                    const int* degrees, double coupling, const double* weights) {
    const std::size_t body = count & ~std::size_t{1};
    const float64x2_t one = vdupq_n_f64(1.0);
    float64x2_t sum = vdupq_n_f64(0.0);
    float64x2_t max_r2 = vdupq_n_f64(0.0);
    for (std::size_t p = 0; p < body; p += 2) {
        float64x2_t acc_re = one, acc_im = vdupq_n_f64(0.0);
        for (int v = 0; v < dims; ++v) {
            if (degrees[v] == 0) continue;
            const float64x2_t as = vmulq_n_f64(vld1q_f64(sigma + v * stride + p), coupling);
            const float64x2_t r2 = vdivq_f64(one, vfmaq_f64(one, as, as));
            max_r2 = vmaxq_f64(max_r2, r2);
            const float64x2_t base_re = r2;
            const float64x2_t base_im = vnegq_f64(vmulq_f64(as, r2));
            float64x2_t pw_re = base_re, pw_im = base_im;
            for (int k = 1; k < degrees[v]; ++k) {
                const float64x2_t re = vfmsq_f64(vmulq_f64(pw_re, base_re), pw_im, base_im);
                pw_im = vfmaq_f64(vmulq_f64(pw_im, base_re), pw_re, base_im);
                pw_re = re;
            }
            const float64x2_t re = vfmsq_f64(vmulq_f64(acc_re, pw_re), acc_im, pw_im);
            acc_im = vfmaq_f64(vmulq_f64(acc_im, pw_re), acc_re, pw_im);
            acc_re = re;
        }
        sum = vfmaq_f64(sum, vld1q_f64(weights + p), acc_re);
    }
    ResolventSum out;
    out.weighted_real = vgetq_lane_f64(sum, 0) + vgetq_lane_f64(sum, 1);
    const double vector_max = std::max(vgetq_lane_f64(max_r2, 0), vgetq_lane_f64(max_r2, 1));
    ResolventSum tail = resolvent_product_scalar(sigma + body, dims, count - body, stride, degrees,
                                                 coupling, weights + body);
    out.weighted_real += tail.weighted_real;
    out.max_modulus = std::max(std::sqrt(vector_max), tail.max_modulus);
    return out;
}

double quadratic_exp_neon(const double* x, int dims, const double* t, std::size_t stride, const double* base,
                          const double* weights, std::size_t count, double c) {
    const std::size_t body = count & ~std::size_t{1};
    float64x2_t sum = vdupq_n_f64(0.0);
    for (std::size_t p = 0; p < body; p += 2) {
        float64x2_t q = vld1q_f64(base + p);
        for (int i = 0; i < dims; ++i) {
            const float64x2_t ti = vld1q_f64(t + i * stride + p);
            for (int j = i + 1; j < dims; ++j)
                q = vfmaq_f64(q, vmulq_n_f64(ti, 2.0 * x[i * dims + j]), vld1q_f64(t + j * stride + p));
        }
        sum = vfmaq_f64(sum, vld1q_f64(weights + p), exp_f64(vmulq_n_f64(q, -c)));
    }
    const double head = vgetq_lane_f64(sum, 0) + vgetq_lane_f64(sum, 1);
    return head + quadratic_exp_scalar(x, dims, t + body, stride, base + body, weights + body, count - body, c);
}

void exp_neon(const double* in, double* out, std::size_t count) {
    const std::size_t body = count & ~std::size_t{1};
    for (std::size_t k = 0; k < body; k += 2) vst1q_f64(out + k, exp_f64(vld1q_f64(in + k)));
    exp_scalar(in + body, out + body, count - body);
}

}  // namespace lvelab::kernels::detail
