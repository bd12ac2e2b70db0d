#include "osdm/simd.hpp"

namespace osdm::simd {

#if defined(__x86_64__) || defined(_M_X64)
extern const Kernels avx2_kernels;
#endif
#if defined(__aarch64__)
extern const Kernels neon_kernels;
#endif

namespace {

struct Selection {
  const Kernels* kernels;
  std::string_view name;
};

Selection select() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return {&avx2_kernels, "avx2"};
#endif
#if defined(__aarch64__)
  return {&neon_kernels, "neon"};
#endif
  return {&scalar_kernels, "scalar"};
}

const Selection& selection() {
  static const Selection s = select();
  return s;
}

}  // namespace

const Kernels& active() { return *selection().kernels; }

std::string_view active_name() { return selection().name; }

}  // namespace osdm::simd
