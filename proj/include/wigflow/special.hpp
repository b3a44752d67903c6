/**
 *  @file   special.hpp
 *  @brief  Hermite recurrence, finite-difference weights and a stable
 *          scaled error-function window.
 */
#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace wigflow {

struct PhasePoint {
  double x = 0.0;
  double k = 0.0;
};

/// Physicists' Hermite polynomials H_0..H_{n_max} at z by the three-term
/// recurrence H_{n+1} = 2z H_n - 2n H_{n-1}.
inline void hermite_table(int n_max, double z, std::span<double> out) {
  if (n_max < 0) return;
  out[0] = 1.0;
  if (n_max == 0) return;
  out[1] = 2.0 * z;
  for (int n = 1; n < n_max; ++n) {
    out[n + 1] = 2.0 * z * out[n] - 2.0 * n * out[n - 1];
  }
}

inline std::vector<double> hermite_table(int n_max, double z) {
  std::vector<double> h(static_cast<std::size_t>(n_max + 1));
  hermite_table(n_max, z, h);
  return h;
}

inline double hermite(int n, double z) { return hermite_table(n, z).back(); }

/// Weights of the m-th derivative at `at` over arbitrary nodes (Fornberg 1988).
inline std::vector<double> fd_weights(int m, std::span<const double> nodes, double at = 0.0) {
  const std::size_t n = nodes.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - at;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min(static_cast<int>(i), m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - at;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][static_cast<std::size_t>(m)];
  return w;
}

/// Integer-offset stencil for the m-th derivative with the given (even)
/// accuracy order. Offsets are unit-spaced; scale weights by h^-m.
struct Stencil {
  int first_offset = 0;
  std::vector<double> weights;
};

inline int stencil_size(int m, int accuracy) {
  if (m == 0) return 1;
  return 2 * ((m + 1) / 2) - 1 + accuracy;
}

/// Stencil for derivative m whose window starts at `first_offset`.
inline Stencil offset_stencil(int m, int accuracy, int first_offset) {
  const int size = stencil_size(m, accuracy);
  std::vector<double> nodes(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) nodes[static_cast<std::size_t>(i)] = first_offset + i;
  return {first_offset, fd_weights(m, nodes)};
}

inline Stencil central_stencil(int m, int accuracy) {
  return offset_stencil(m, accuracy, -(stencil_size(m, accuracy) - 1) / 2);
}

/// Scaled complementary error function e^{y^2} erfc(y) for y >= 0.
inline double erfcx(double y) {
  if (y < 25.0) return std::exp(y * y) * std::erfc(y);
  // asymptotic tail; relative error below 1e-11 for y >= 25
  const double inv2 = 1.0 / (2.0 * y * y);
  const double series = 1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2 * (1.0 - 7.0 * inv2)));
  return series / (y * std::sqrt(std::numbers::pi));
}

/// e^{z^2} [erf(z + s) - erf(z - s)] for s >= 0, without overflow or the
/// cancellation of two nearly equal error functions in the tails.
inline double erf_window(double z, double s) {
  const double a = std::abs(z);
  if (a <= s) return std::exp(z * z) * (std::erf(a + s) - std::erf(a - s));
  const double lo = a - s;
  const double hi = a + s;
  return std::exp(2.0 * a * s - s * s) * erfcx(lo) - std::exp(-2.0 * a * s - s * s) * erfcx(hi);
}

}  // namespace wigflow
