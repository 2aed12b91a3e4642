#include <immintrin.h>

#include <cmath>
#include <utility>
#include <vector>

#include "edibench/kernels.hpp"

namespace edibench::kernels::avx2 {

void chebyshev(const double* const* cols, std::size_t dim, std::size_t begin, std::size_t n, const double* q,
               double* out) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    std::size_t t = 0;
    for (; t + 4 <= n; t += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t d = 0; d < dim; ++d) {
            __m256d v = _mm256_sub_pd(_mm256_loadu_pd(cols[d] + begin + t), _mm256_set1_pd(q[d]));
            acc = _mm256_max_pd(acc, _mm256_andnot_pd(sign, v));
        }
        _mm256_storeu_pd(out + t, acc);
    }
    for (; t < n; ++t) {
        double m = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            double v = std::fabs(cols[d][begin + t] - q[d]);
            if (v > m) m = v;
        }
        out[t] = m;
    }
}

float dot(const float* a, const float* b, std::size_t n) {
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
        acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8) acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    acc0 = _mm256_add_ps(acc0, acc1);
    __m128 lo = _mm256_castps256_ps128(acc0);
    __m128 hi = _mm256_extractf128_ps(acc0, 1);
    lo = _mm_add_ps(lo, hi);
    lo = _mm_hadd_ps(lo, lo);
    lo = _mm_hadd_ps(lo, lo);
    float s = _mm_cvtss_f32(lo);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(float a, const float* x, float* y, std::size_t n) {
    const __m256 va = _mm256_set1_ps(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void combine_rows(const float* a, std::size_t stride, std::size_t len, const float* b, std::size_t ldb, float* c,
                  std::size_t n) {
    // Compact the nonzero weights first; ReLU inputs are about half zeros and branching per term is costly.
    thread_local std::vector<std::pair<float, const float*>> terms;
    terms.clear();
    for (std::size_t t = 0; t < len; ++t) {
        float w = a[t * stride];
        if (w != 0.0f) terms.emplace_back(w, b + t * ldb);
    }
    const std::size_t m = terms.size();
    std::size_t j = 0;
    for (; j + 64 <= n; j += 64) {
        __m256 acc[8];
        for (int r = 0; r < 8; ++r) acc[r] = _mm256_loadu_ps(c + j + 8 * r);
        for (std::size_t t = 0; t < m; ++t) {
            __m256 vw = _mm256_set1_ps(terms[t].first);
            const float* row = terms[t].second + j;
            for (int r = 0; r < 8; ++r) acc[r] = _mm256_fmadd_ps(vw, _mm256_loadu_ps(row + 8 * r), acc[r]);
        }
        for (int r = 0; r < 8; ++r) _mm256_storeu_ps(c + j + 8 * r, acc[r]);
    }
    for (; j + 32 <= n; j += 32) {
        __m256 acc[4];
        for (int r = 0; r < 4; ++r) acc[r] = _mm256_loadu_ps(c + j + 8 * r);
        for (std::size_t t = 0; t < m; ++t) {
            __m256 vw = _mm256_set1_ps(terms[t].first);
            const float* row = terms[t].second + j;
            for (int r = 0; r < 4; ++r) acc[r] = _mm256_fmadd_ps(vw, _mm256_loadu_ps(row + 8 * r), acc[r]);
        }
        for (int r = 0; r < 4; ++r) _mm256_storeu_ps(c + j + 8 * r, acc[r]);
    }
    for (; j + 8 <= n; j += 8) {
        __m256 acc = _mm256_loadu_ps(c + j);
        for (std::size_t t = 0; t < m; ++t)
            acc = _mm256_fmadd_ps(_mm256_set1_ps(terms[t].first), _mm256_loadu_ps(terms[t].second + j), acc);
        _mm256_storeu_ps(c + j, acc);
    }
    for (; j + 4 <= n; j += 4) {
        __m128 acc = _mm_loadu_ps(c + j);
        for (std::size_t t = 0; t < m; ++t)
            acc = _mm_fmadd_ps(_mm_set1_ps(terms[t].first), _mm_loadu_ps(terms[t].second + j), acc);
        _mm_storeu_ps(c + j, acc);
    }
    if (j < n) {
        for (std::size_t t = 0; t < m; ++t)
            for (std::size_t q = j; q < n; ++q) c[q] += terms[t].first * terms[t].second[q];
    }
}

}  // namespace edibench::kernels::avx2
