// Shared oracles for the test suite. Everything here is written directly
// from the defining formulas and deliberately avoids library helpers.
#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Physicists' Hermite polynomials by long-double recurrence.
inline std::vector<long double> hermite(int n, long double z) {
  std::vector<long double> h(static_cast<std::size_t>(n) + 1);
  h[0] = 1.0L;
  if (n >= 1) h[1] = 2.0L * z;
  for (int m = 1; m < n; ++m) h[m + 1] = 2.0L * z * h[m] - 2.0L * m * h[m - 1];
  return h;
}

inline long double gauss(long double g, long double x, long double k) {
  return g * g / std::numbers::pi_v<long double> * std::exp(-g * g * (x * x + k * k));
}

/// d^n/du^n [a cos u] in long double.
inline long double dcos(long double a, int n, long double u) {
  return a * std::cos(u + n * std::numbers::pi_v<long double> / 2.0L);
}

struct Current {
  double jx, jk;
};

/// Harper current for an origin Gaussian by the raw series, summed to a
/// fixed number of terms in long double.
inline Current harper_series(double nu2, double gamma, double x, double k, int terms = 40) {
  const long double g = gamma;
  const auto hx = hermite(2 * terms, g * x);
  const auto hk = hermite(2 * terms, g * k);
  const long double w = gauss(g, x, k);
  long double jx = 0.0L, jk = 0.0L, fact = 1.0L, four = 1.0L, gp = 1.0L;
  for (int eta = 0; eta < terms; ++eta) {
    if (eta > 0) {
      fact *= (2.0L * eta) * (2.0L * eta + 1.0L);
      four *= 4.0L;
      gp *= g * g;
    }
    const long double c = (eta % 2 ? -1.0L : 1.0L) / (four * fact);
    jx += c * dcos(1.0L, 2 * eta + 1, k) * gp * hx[2 * eta] * w;
    jk -= c * dcos(nu2, 2 * eta + 1, x) * gp * hk[2 * eta] * w;
  }
  return {static_cast<double>(jx), static_cast<double>(jk)};
}

/// (sqrt(pi)/gamma) erf(gamma/2), the origin velocity slope.
inline double origin_slope(double gamma) { return std::sqrt(pi) / gamma * std::erf(gamma / 2.0); }

/// n-th central difference of f at u with step h.
template <class F>
double central_fd(F&& f, int n, double u, double h) {
  std::vector<double> row{1.0};
  for (int m = 0; m < n; ++m) {
    std::vector<double> next(row.size() + 1, 0.0);
    for (std::size_t i = 0; i < row.size(); ++i) {
      next[i] += row[i];
      next[i + 1] -= row[i];
    }
    row = next;
  }
  double s = 0.0;
  for (int i = 0; i <= n; ++i) s += row[static_cast<std::size_t>(i)] * f(u + (0.5 * n - i) * h);
  return s / std::pow(h, n);
}

/// Richardson-extrapolated central difference, O(h^4).
template <class F>
double fd(F&& f, int n, double u, double h) {
  return (4.0 * central_fd(f, n, u, h) - central_fd(f, n, u, 2.0 * h)) / 3.0;
}

/// Step that balances truncation against round-off for fd() of order n.
inline double fd_step(int n) {
  constexpr double steps[] = {1e-4, 1e-4, 2e-3, 5e-3, 1e-2};
  return steps[n];
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20260613);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

}  // namespace oracle
