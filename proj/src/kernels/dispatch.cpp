#include <atomic>
#include <cstdlib>
#include <string_view>

#include "robustrank/kernels.hpp"

namespace robustrank::simd {
namespace {

bool cpu_supports(Backend backend) noexcept {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(ROBUSTRANK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(ROBUSTRANK_HAVE_NEON)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("ROBUSTRANK_SIMD")) {
    const std::string_view v(env);
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
      if (v == backend_name(b)) {
        if (const KernelTable* t = table(b)) return t;
      }
    }
  }
  for (Backend b : {Backend::avx2, Backend::neon}) {
    if (const KernelTable* t = table(b)) return t;
  }
  return &scalar_kernels;
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> ptr{initial_table()};
  return ptr;
}

}  // namespace

const char* backend_name(Backend backend) noexcept {
  switch (backend) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

bool available(Backend backend) noexcept { return table(backend) != nullptr; }

const KernelTable* table(Backend backend) noexcept {
  if (!cpu_supports(backend)) return nullptr;
  switch (backend) {
    case Backend::scalar:
      return &scalar_kernels;
    case Backend::avx2:
#if defined(ROBUSTRANK_HAVE_AVX2)
      return &avx2_kernels;
#else
      return nullptr;
#endif
    case Backend::neon:
#if defined(ROBUSTRANK_HAVE_NEON)
      return &neon_kernels;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

Backend active_backend() noexcept { return active().backend; }

bool select(Backend backend) noexcept {
  const KernelTable* t = table(backend);
  if (t == nullptr) return false;
  current().store(t, std::memory_order_release);
  return true;
}

}  // namespace robustrank::simd
