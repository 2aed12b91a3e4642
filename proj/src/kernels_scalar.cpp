#include <cmath>

#include "edibench/kernels.hpp"

namespace edibench::kernels::scalar {

void chebyshev(const double* const* cols, std::size_t dim, std::size_t begin, std::size_t n, const double* q,
               double* out) {
    for (std::size_t t = 0; t < n; ++t) out[t] = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        const double* c = cols[d] + begin;
        const double qd = q[d];
        for (std::size_t t = 0; t < n; ++t) {
            double v = std::fabs(c[t] - qd);
            if (v > out[t]) out[t] = v;
        }
    }
}

float dot(const float* a, const float* b, std::size_t n) {
    float s = 0.0f;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(float a, const float* x, float* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void combine_rows(const float* a, std::size_t stride, std::size_t len, const float* b, std::size_t ldb, float* c,
                  std::size_t n) {
    for (std::size_t t = 0; t < len; ++t) {
        float w = a[t * stride];
        if (w == 0.0f) continue;
        const float* row = b + t * ldb;
        for (std::size_t j = 0; j < n; ++j) c[j] += w * row[j];
    }
}

}  // namespace edibench::kernels::scalar
