#pragma once

// Dense and sparse arithmetic kernels with one scalar reference variant and
// SIMD variants selected at runtime.
//
// This header only depends on freestanding headers so that every variant can
// be compiled (or syntax-checked) for its target without a hosted library.

#include <cstddef>
#include <cstdint>

namespace robustrank::simd {

enum class Backend { scalar, avx2, neon };

using index_t = std::uint32_t;

// Every reduction in a table accumulates in a fixed order, so a given backend
// produces bit-identical results run to run. Different backends agree only up
// to rounding.
struct KernelTable {
  Backend backend;

  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*norm2_sq)(const double* x, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
  // sum_i |x_i - y_i|
  double (*l1_distance)(const double* x, const double* y, std::size_t n);
  // sum_i (x_i - y_i)^2
  double (*l2_distance_sq)(const double* x, const double* y, std::size_t n);

  // y = a * x + b (b broadcast)
  void (*scale_shift)(double a, const double* x, double b, double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);

  // Compressed-row gather product: y_r = sum_{k in [offsets[r], offsets[r+1])}
  // values[k] * x[indices[k]] for r in [0, rows). Used for both P x (row-compressed
  // storage) and P^T y (column-compressed storage).
  void (*gather_matvec)(std::size_t rows, const std::size_t* offsets, const index_t* indices,
                        const double* values, const double* x, double* y);
};

extern const KernelTable scalar_kernels;
#if defined(ROBUSTRANK_HAVE_AVX2)
extern const KernelTable avx2_kernels;
#endif
#if defined(ROBUSTRANK_HAVE_NEON)
extern const KernelTable neon_kernels;
#endif

const char* backend_name(Backend backend) noexcept;

// True when the variant was compiled in and the running CPU supports it.
bool available(Backend backend) noexcept;

// Table for a specific backend; falls back to nullptr when unavailable.
const KernelTable* table(Backend backend) noexcept;

// Currently selected table. The initial choice is the widest available
// variant, overridable with ROBUSTRANK_SIMD=scalar|avx2|neon.
const KernelTable& active() noexcept;
Backend active_backend() noexcept;

// Returns false (and changes nothing) when the backend is unavailable.
bool select(Backend backend) noexcept;

// Selects a backend for the lifetime of the guard, then restores the previous one.
class ScopedBackend {
 public:
  explicit ScopedBackend(Backend backend) noexcept : previous_(active_backend()) {
    ok_ = select(backend);
  }
  ~ScopedBackend() { select(previous_); }
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

  bool ok() const noexcept { return ok_; }

 private:
  Backend previous_;
  bool ok_ = false;
};

}  // namespace robustrank::simd
