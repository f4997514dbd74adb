#include <cstdlib>
#include <stdexcept>
#include <string>

#include "bentcert/simd/kernels.hpp"

namespace bentcert::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(BENTCERT_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(BENTCERT_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa))
    throw std::runtime_error("kernel variant not available: " + std::string(to_string(isa)));
  switch (isa) {
#if defined(BENTCERT_HAVE_AVX2)
    case Isa::avx2: return detail::avx2_table();
#endif
#if defined(BENTCERT_HAVE_NEON)
    case Isa::neon: return detail::neon_table();
#endif
    default: return detail::scalar_table();
  }
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("BENTCERT_SIMD")) {
    const std::string_view want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (want == to_string(isa) && available(isa)) return table(isa);
  }
  if (available(Isa::avx2)) return table(Isa::avx2);
  if (available(Isa::neon)) return table(Isa::neon);
  return detail::scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& t = select();
  return t;
}

}  // namespace bentcert::simd
