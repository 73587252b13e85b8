// NEON (AArch64) kernels, two doubles per register.

#include <arm_neon.h>

#include "robustrank/kernels.hpp"

namespace robustrank::simd {
namespace {

inline double abs_value(double v) { return v < 0.0 ? -v : v; }

double sum_neon(const double* x, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  float64x2_t a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = vaddq_f64(a0, vld1q_f64(x + i));
    a1 = vaddq_f64(a1, vld1q_f64(x + i + 2));
  }
  for (; i + 2 <= n; i += 2) a0 = vaddq_f64(a0, vld1q_f64(x + i));
  double s = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  float64x2_t a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = vfmaq_f64(a0, vld1q_f64(x + i), vld1q_f64(y + i));
    a1 = vfmaq_f64(a1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  for (; i + 2 <= n; i += 2) a0 = vfmaq_f64(a0, vld1q_f64(x + i), vld1q_f64(y + i));
  double s = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double norm2_sq_neon(const double* x, std::size_t n) { return dot_neon(x, x, n); }

double max_abs_neon(const double* x, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(x + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) {
    const double a = abs_value(x[i]);
    if (a > r) r = a;
  }
  return r;
}

double l1_distance_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) a0 = vaddq_f64(a0, vabdq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  double s = vaddvq_f64(a0);
  for (; i < n; ++i) s += abs_value(x[i] - y[i]);
  return s;
}

double l2_distance_sq_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    a0 = vfmaq_f64(a0, d, d);
  }
  double s = vaddvq_f64(a0);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void scale_shift_neon(double a, const double* x, double b, double* y, std::size_t n) {
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_n_f64(vb, vld1q_f64(x + i), a));
  for (; i < n; ++i) y[i] = a * x[i] + b;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_n_f64(vld1q_f64(y + i), vld1q_f64(x + i), a));
  for (; i < n; ++i) y[i] += a * x[i];
}

void gather_matvec_neon(std::size_t rows, const std::size_t* offsets, const index_t* indices,
                        const double* values, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t end = offsets[r + 1];
    std::size_t k = offsets[r];
    float64x2_t acc = vdupq_n_f64(0.0);
    for (; k + 2 <= end; k += 2) {
      float64x2_t xv = vdupq_n_f64(x[indices[k]]);
      xv = vsetq_lane_f64(x[indices[k + 1]], xv, 1);
      acc = vfmaq_f64(acc, vld1q_f64(values + k), xv);
    }
    double s = vaddvq_f64(acc);
    for (; k < end; ++k) s += values[k] * x[indices[k]];
    y[r] = s;
  }
}

}  // namespace

const KernelTable neon_kernels = {
    Backend::neon,    sum_neon,         dot_neon,  norm2_sq_neon,
    max_abs_neon,     l1_distance_neon, l2_distance_sq_neon,
    scale_shift_neon, axpy_neon,        gather_matvec_neon,
};

}  // namespace robustrank::simd
