#pragma once

// Dense real-vector kernels used by the inner loops of the simplex pivots,
// the double-description ray updates, the real Jacobi sweeps and the
// chi-squared test statistic. Each kernel has a scalar reference
// implementation; vectorised variants are selected once at runtime.

#include <cstddef>
#include <span>
#include <string_view>

namespace bentcert::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out = a * x + b * y   (out may alias x or y)
  void (*axpby)(double a, const double* x, double b, const double* y, double* out,
                std::size_t n);
  // plane rotation: (x, y) <- (c x - s y, s x + c y)
  void (*rot)(double* x, double* y, std::size_t n, double c, double s);
  // max_i |x[i]|
  double (*max_abs)(const double* x, std::size_t n);
};

/// Table for a specific instruction set. Throws std::runtime_error when the
/// variant was not compiled in or the CPU does not support it.
const KernelTable& table(Isa isa);

bool available(Isa isa);

/// The table chosen for this process: the widest supported variant, unless
/// BENTCERT_SIMD=scalar|avx2|neon overrides it.
const KernelTable& active();

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

inline void axpby(double a, std::span<const double> x, double b, std::span<const double> y,
                  std::span<double> out) {
  active().axpby(a, x.data(), b, y.data(), out.data(), x.size());
}

inline void rot(std::span<double> x, std::span<double> y, double c, double s) {
  active().rot(x.data(), y.data(), x.size(), c, s);
}

inline double max_abs(std::span<const double> x) { return active().max_abs(x.data(), x.size()); }

namespace detail {
// Defined per variant translation unit.
const KernelTable& scalar_table();
#if defined(BENTCERT_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(BENTCERT_HAVE_NEON)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace bentcert::simd
