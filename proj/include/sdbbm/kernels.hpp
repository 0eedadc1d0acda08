#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops of the solver and estimators.
//
// Every kernel exists twice: a scalar reference implementation (ground truth
// for tests) and an AVX2/FMA variant. The unqualified entry points dispatch
// once, at first call, based on runtime CPU detection; on non-x86 builds they
// resolve to the scalar versions. SIMD variants may reorder the accumulation,
// so results can differ from the reference by rounding only (equivalence is
// tested to that level).

namespace sdbbm::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n);
// sum_{k<n} a[k] * b[n-1-k]  (second operand read back-to-front)
double dot_rev(const double* a, const double* b, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);

}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define SDBBM_HAVE_AVX2_KERNELS 1
namespace avx2 {

double dot(const double* a, const double* b, std::size_t n);
double dot_rev(const double* a, const double* b, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);

}  // namespace avx2
#endif

double dot(const double* a, const double* b, std::size_t n);
double dot_rev(const double* a, const double* b, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);

// "avx2" or "scalar"; decided once per process.
std::string_view active_backend();

}  // namespace sdbbm::kernels
