#include "sdbbm/kernels.hpp"

namespace sdbbm::kernels {

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using UnaryFn = double (*)(const double*, std::size_t);

struct Backend {
  DotFn dot;
  DotFn dot_rev;
  UnaryFn sum_squares;
  DotFn max_abs_diff;
  std::string_view name;
};

Backend select_backend() {
#ifdef SDBBM_HAVE_AVX2_KERNELS
#if defined(__GNUC__) || defined(__clang__)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return {avx2::dot, avx2::dot_rev, avx2::sum_squares, avx2::max_abs_diff,
            "avx2"};
  }
#endif
#endif
  return {scalar::dot, scalar::dot_rev, scalar::sum_squares,
          scalar::max_abs_diff, "scalar"};
}

const Backend& backend() {
  static const Backend b = select_backend();
  return b;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  return backend().dot(a, b, n);
}

double dot_rev(const double* a, const double* b, std::size_t n) {
  return backend().dot_rev(a, b, n);
}

double sum_squares(const double* x, std::size_t n) {
  return backend().sum_squares(x, n);
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  return backend().max_abs_diff(a, b, n);
}

std::string_view active_backend() { return backend().name; }

}  // namespace sdbbm::kernels
