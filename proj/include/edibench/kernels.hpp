#pragma once

#include <cstddef>

namespace edibench::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);
bool avx2_supported();

// Variant picked at first use; EDIBENCH_ISA=scalar in the environment pins the scalar path.
Isa active_isa();
// Overrides the runtime choice. Requesting Avx2 on a machine without it falls back to Scalar.
void set_isa(Isa isa);

// Structure-of-arrays point set: cols[d][i] is coordinate d of point i.
// out[t] = max_d |cols[d][begin + t] - q[d]| for t in [0, n).
void chebyshev(const double* const* cols, std::size_t dim, std::size_t begin, std::size_t n, const double* q,
               double* out);

float dot(const float* a, const float* b, std::size_t n);

// y += a * x
void axpy(float a, const float* x, float* y, std::size_t n);

// c[0:n] += sum_t a[t * stride] * b[t * ldb + 0:n]; terms with a zero weight are skipped.
void combine_rows(const float* a, std::size_t stride, std::size_t len, const float* b, std::size_t ldb, float* c,
                  std::size_t n);

// C[m x n] += A[m x k] * B[k x n], all row-major.
void gemm_nn(const float* a, const float* b, float* c, std::size_t m, std::size_t k, std::size_t n);
// C[k x n] += A[m x k]^T * B[m x n]
void gemm_tn(const float* a, const float* b, float* c, std::size_t m, std::size_t k, std::size_t n);

namespace scalar {
void combine_rows(const float* a, std::size_t stride, std::size_t len, const float* b, std::size_t ldb, float* c,
                  std::size_t n);
void chebyshev(const double* const* cols, std::size_t dim, std::size_t begin, std::size_t n, const double* q,
               double* out);
float dot(const float* a, const float* b, std::size_t n);
void axpy(float a, const float* x, float* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
void combine_rows(const float* a, std::size_t stride, std::size_t len, const float* b, std::size_t ldb, float* c,
                  std::size_t n);
void chebyshev(const double* const* cols, std::size_t dim, std::size_t begin, std::size_t n, const double* q,
               double* out);
float dot(const float* a, const float* b, std::size_t n);
void axpy(float a, const float* x, float* y, std::size_t n);
}  // namespace avx2

}  // namespace edibench::kernels
