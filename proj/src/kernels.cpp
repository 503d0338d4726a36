#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "dipolesim/kernels.hpp"

namespace dipolesim::kernels {

namespace {

const Backend& select_backend() {
  const char* want = std::getenv("DIPOLESIM_KERNELS");
  if (want == nullptr || std::strcmp(want, "auto") == 0) {
    const Backend* v = avx2_backend();
    return v != nullptr ? *v : scalar_backend();
  }
  if (std::strcmp(want, "scalar") == 0) return scalar_backend();
  if (std::strcmp(want, "avx2") == 0) {
    const Backend* v = avx2_backend();
    if (v == nullptr) {
      std::fprintf(stderr,
                   "dipolesim: DIPOLESIM_KERNELS=avx2 but this CPU lacks "
                   "AVX2+FMA support\n");
      std::abort();
    }
    return *v;
  }
  std::fprintf(stderr,
               "dipolesim: unknown DIPOLESIM_KERNELS value '%s' "
               "(expected auto, scalar, or avx2)\n",
               want);
  std::abort();
}

}  // namespace

const Backend& backend() {
  static const Backend& chosen = select_backend();
  return chosen;
}

}  // namespace dipolesim::kernels
