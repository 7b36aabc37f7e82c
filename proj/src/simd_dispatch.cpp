#include <stdexcept>

#include "bcgwr/simd.hpp"

namespace bcgwr::simd {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels* pick_auto() {
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2()) return &avx2_kernels();
#endif
  return &scalar_kernels();
}

const Kernels*& selected() {
  static const Kernels* current = pick_auto();
  return current;
}

}  // namespace

const Kernels& active_kernels() { return *selected(); }

void select_kernels(const std::string& name) {
  if (name == "auto") {
    selected() = pick_auto();
    return;
  }
  if (name == "scalar") {
    selected() = &scalar_kernels();
    return;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (name == "avx2") {
    if (!cpu_has_avx2()) throw std::runtime_error("avx2 kernels requested but CPU lacks AVX2/FMA");
    selected() = &avx2_kernels();
    return;
  }
#endif
  throw std::invalid_argument("unknown kernel variant: " + name);
}

}  // namespace bcgwr::simd
