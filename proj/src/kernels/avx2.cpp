#include "lvelab/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace lvelab::kernels::detail {

namespace {

// exp on [-708, 0]: x = n ln2 + r, |r| <= ln2 / 2, degree-13 Taylor in r.
inline __m256d exp_pd(__m256d x) {
    x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);
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
    __m256d poly = _mm256_set1_pd(inv_factorial[13]);
    for (int k = 12; k >= 0; --k) poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(inv_factorial[k]));
    __m256i e = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
    e = _mm256_slli_epi64(_mm256_add_epi64(e, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(poly, _mm256_castsi256_pd(e));
}

}  // namespace

void lower_transform_avx2(const double* lower, int dims, const double* z, std::size_t z_stride,
                        double* sigma, std::size_t sigma_stride, std::size_t count) {
    const std::size_t body = count & ~std::size_t{3};
    for (int v = 0; v < dims; ++v) {
        double* out = sigma + v * sigma_stride;
        std::size_t p = 0;
        for (; p < body; p += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (int u = 0; u <= v; ++u) {
                const __m256d l = _mm256_set1_pd(lower[v * dims + u]);
                acc = _mm256_fmadd_pd(l, _mm256_loadu_pd(z + u * z_stride + p), acc);
            }
            _mm256_storeu_pd(out + p, acc);
        }
        for (; p < count; ++p) {
            double acc = 0.0;
            for (int u = 0; u <= v; ++u) acc = std::fma(lower[v * dims + u], z[u * z_stride + p], acc);
            out[p] = acc;
        }
    }
}

ResolventSum resolvent_product_avx2(const double* sigma, int dims, std::size_t count, std::size_t stride,
                                    const int* degrees, double coupling, const double* weights) {
    const std::size_t body = count & ~std::size_t{3};
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d a = _mm256_set1_pd(coupling);
    __m256d sum = _mm256_setzero_pd();
    __m256d max_r2 = _mm256_setzero_pd();
    for (std::size_t p = 0; p < body; p += 4) {
        __m256d acc_re = one, acc_im = _mm256_setzero_pd();
        for (int v = 0; v < dims; ++v) {
            if (degrees[v] == 0) continue;
            const __m256d as = _mm256_mul_pd(a, _mm256_loadu_pd(sigma + v * stride + p));
            const __m256d r2 = _mm256_div_pd(one, _mm256_fmadd_pd(as, as, one));
            max_r2 = _mm256_max_pd(max_r2, r2);
            const __m256d base_re = r2;
            const __m256d base_im = _mm256_xor_pd(_mm256_mul_pd(as, r2), _mm256_set1_pd(-0.0));
            __m256d pw_re = base_re, pw_im = base_im;
            for (int k = 1; k < degrees[v]; ++k) {
                const __m256d re = _mm256_fmsub_pd(pw_re, base_re, _mm256_mul_pd(pw_im, base_im));
                pw_im = _mm256_fmadd_pd(pw_re, base_im, _mm256_mul_pd(pw_im, base_re));
                pw_re = re;
            }
            const __m256d re = _mm256_fmsub_pd(acc_re, pw_re, _mm256_mul_pd(acc_im, pw_im));
            acc_im = _mm256_fmadd_pd(acc_re, pw_im, _mm256_mul_pd(acc_im, pw_re));
            acc_re = re;
        }
        sum = _mm256_fmadd_pd(_mm256_loadu_pd(weights + p), acc_re, sum);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, sum);
    ResolventSum out;
    out.weighted_real = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    _mm256_store_pd(lanes, max_r2);
    const double vector_max = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));

    ResolventSum tail = resolvent_product_scalar(sigma + body, dims, count - body, stride, degrees,
                                                 coupling, weights + body);
    out.weighted_real += tail.weighted_real;
    out.max_modulus = std::max(std::sqrt(vector_max), tail.max_modulus);
    return out;
}

double quadratic_exp_avx2(const double* x, int dims, const double* t, std::size_t stride, const double* base,
                          const double* weights, std::size_t count, double c) {
    const std::size_t body = count & ~std::size_t{3};
    const __m256d neg_c = _mm256_set1_pd(-c);
    __m256d sum = _mm256_setzero_pd();
    for (std::size_t p = 0; p < body; p += 4) {
        __m256d q = _mm256_loadu_pd(base + p);
        for (int i = 0; i < dims; ++i) {
            const __m256d ti = _mm256_loadu_pd(t + i * stride + p);
            for (int j = i + 1; j < dims; ++j) {
                const __m256d coef = _mm256_set1_pd(2.0 * x[i * dims + j]);
                q = _mm256_fmadd_pd(_mm256_mul_pd(coef, ti), _mm256_loadu_pd(t + j * stride + p), q);
            }
        }
        sum = _mm256_fmadd_pd(_mm256_loadu_pd(weights + p), exp_pd(_mm256_mul_pd(neg_c, q)), sum);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, sum);
    const double head = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    return head + quadratic_exp_scalar(x, dims, t + body, stride, base + body, weights + body, count - body, c);
}

void exp_avx2(const double* in, double* out, std::size_t count) {
    const std::size_t body = count & ~std::size_t{3};
    for (std::size_t k = 0; k < body; k += 4) _mm256_storeu_pd(out + k, exp_pd(_mm256_loadu_pd(in + k)));
    exp_scalar(in + body, out + body, count - body);
}

}  // namespace lvelab::kernels::detail
