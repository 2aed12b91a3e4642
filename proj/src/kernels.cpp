#include <atomic>
#include <cstdlib>
#include <cstring>

#include "edibench/kernels.hpp"

namespace edibench::kernels {

namespace {

Isa detect() {
    const char* env = std::getenv("EDIBENCH_ISA");
    if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
    return avx2_supported() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
    if (isa == Isa::Avx2 && !avx2_supported()) isa = Isa::Scalar;
    current().store(isa, std::memory_order_relaxed);
}

void chebyshev(const double* const* cols, std::size_t dim, std::size_t begin, std::size_t n, const double* q,
               double* out) {
    if (active_isa() == Isa::Avx2)
        avx2::chebyshev(cols, dim, begin, n, q, out);
    else
        scalar::chebyshev(cols, dim, begin, n, q, out);
}

float dot(const float* a, const float* b, std::size_t n) {
    return active_isa() == Isa::Avx2 ? avx2::dot(a, b, n) : scalar::dot(a, b, n);
}

void axpy(float a, const float* x, float* y, std::size_t n) {
    if (active_isa() == Isa::Avx2)
        avx2::axpy(a, x, y, n);
    else
        scalar::axpy(a, x, y, n);
}

void combine_rows(const float* a, std::size_t stride, std::size_t len, const float* b, std::size_t ldb, float* c,
                  std::size_t n) {
    if (active_isa() == Isa::Avx2)
        avx2::combine_rows(a, stride, len, b, ldb, c, n);
    else
        scalar::combine_rows(a, stride, len, b, ldb, c, n);
}

void gemm_nn(const float* a, const float* b, float* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) combine_rows(a + i * k, 1, k, b, n, c + i * n, n);
}

void gemm_tn(const float* a, const float* b, float* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t p = 0; p < k; ++p) combine_rows(a + p, k, m, b, n, c + p * n, n);
}

}  // namespace edibench::kernels
