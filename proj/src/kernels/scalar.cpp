// Scalar reference kernels. Every SIMD variant is tested against these.

#include "robustrank/kernels.hpp"

namespace robustrank::simd {
namespace {

inline double abs_value(double v) { return v < 0.0 ? -v : v; }

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double norm2_sq_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = abs_value(x[i]);
    if (a > m) m = a;
  }
  return m;
}

double l1_distance_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += abs_value(x[i] - y[i]);
  return s;
}

double l2_distance_sq_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void scale_shift_scalar(double a, const double* x, double b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void gather_matvec_scalar(std::size_t rows, const std::size_t* offsets, const index_t* indices,
                          const double* values, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) s += values[k] * x[indices[k]];
    y[r] = s;
  }
}

}  // namespace

const KernelTable scalar_kernels = {
    Backend::scalar,     sum_scalar,         dot_scalar,  norm2_sq_scalar,
    max_abs_scalar,      l1_distance_scalar, l2_distance_sq_scalar,
    scale_shift_scalar,  axpy_scalar,        gather_matvec_scalar,
};

}  // namespace robustrank::simd
