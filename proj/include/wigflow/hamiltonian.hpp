/**
 *  @file   hamiltonian.hpp
 *  @brief  Separable dimensionless Hamiltonians H(x,k) = K(k) + V(x)
 *
 *  Each one-dimensional term carries a closed-form derivative oracle of any
 *  order (trigonometric and polynomial kinds) so that the quantum current
 *  series can be summed to high order without finite-difference noise.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wigflow/error.hpp"
#include "wigflow/special.hpp"

namespace wigflow {

/// One-dimensional term of a separable Hamiltonian.
class Term {
 public:
  enum class Kind { trigonometric, polynomial, spline };

  /// amplitude * cos(frequency * u + phase)
  struct Trig {
    double amplitude = 1.0;
    double frequency = 1.0;
    double phase = 0.0;
  };

  /// sum_j coefficients[j] * u^j
  struct Poly {
    std::vector<double> coefficients;
  };

  /// Natural cubic spline through (knots[i], values[i]).
  struct Spline {
    std::vector<double> knots;
    std::vector<double> values;
    std::vector<double> curvature;  // second derivative at knots
  };

  static Term cosine(double amplitude, double frequency = 1.0, double phase = 0.0) {
    return Term(Trig{amplitude, frequency, phase});
  }

  static Term polynomial(std::vector<double> coefficients) {
    while (coefficients.size() > 1 && coefficients.back() == 0.0) coefficients.pop_back();
    if (coefficients.empty()) coefficients.push_back(0.0);
    return Term(Poly{std::move(coefficients)});
  }

  static Term spline(std::vector<double> knots, std::vector<double> values) {
    const std::size_t n = knots.size();
    if (n < 3 || values.size() != n) {
      throw Error(ErrorKind::invalid_param, "spline needs >= 3 knots with matching values");
    }
    for (std::size_t i = 1; i < n; ++i) {
      if (!(knots[i] > knots[i - 1])) throw Error(ErrorKind::invalid_param, "spline knots must increase");
    }
    // natural end conditions, tridiagonal solve for interior curvatures
    std::vector<double> m(n, 0.0), diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = knots[i] - knots[i - 1];
      const double h1 = knots[i + 1] - knots[i];
      diag[i] = 2.0 * (h0 + h1);
      upper[i] = h1;
      rhs[i] = 6.0 * ((values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0);
      if (i > 1) {
        const double lower = h0;
        const double f = lower / diag[i - 1];
        diag[i] -= f * upper[i - 1];
        rhs[i] -= f * rhs[i - 1];
      }
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
      if (i == 1) break;
    }
    return Term(Spline{std::move(knots), std::move(values), std::move(m)});
  }

  Kind kind() const {
    if (std::holds_alternative<Trig>(impl_)) return Kind::trigonometric;
    if (std::holds_alternative<Poly>(impl_)) return Kind::polynomial;
    return Kind::spline;
  }

  const Trig* trig() const { return std::get_if<Trig>(&impl_); }
  const Poly* poly() const { return std::get_if<Poly>(&impl_); }

  /// Highest derivative order that can be non-zero; nullopt when unbounded.
  std::optional<int> max_nonzero_order() const {
    if (auto* t = trig()) {
      if (t->amplitude == 0.0) return 0;
      if (t->frequency == 0.0) return 0;
      return std::nullopt;
    }
    if (auto* p = poly()) return static_cast<int>(p->coefficients.size()) - 1;
    return 3;
  }

  double operator()(double u) const { return derivative(0, u); }

  double derivative(int n, double u) const {
    if (n < 0) throw Error(ErrorKind::invalid_param, "negative derivative order");
    if (auto* t = trig()) {
      // d^n cos(theta) = cos(theta + n*pi/2), reduced mod 4 for exactness
      const double theta = t->frequency * u + t->phase;
      const double scale = t->amplitude * std::pow(t->frequency, n);
      switch (n % 4) {
        case 0: return scale * std::cos(theta);
        case 1: return -scale * std::sin(theta);
        case 2: return -scale * std::cos(theta);
        default: return scale * std::sin(theta);
      }
    }
    if (auto* p = poly()) {
      const auto& c = p->coefficients;
      const int degree = static_cast<int>(c.size()) - 1;
      if (n > degree) return 0.0;
      double acc = 0.0;
      for (int j = degree; j >= n; --j) {
        double falling = 1.0;
        for (int i = 0; i < n; ++i) falling *= (j - i);
        acc = acc * u + c[static_cast<std::size_t>(j)] * falling;
      }
      return acc;
    }
    return spline_derivative(std::get<Spline>(impl_), n, u);
  }

 private:
  explicit Term(std::variant<Trig, Poly, Spline> impl) : impl_(std::move(impl)) {}

  static double spline_derivative(const Spline& s, int n, double u) {
    if (n > 3) throw Error(ErrorKind::unsupported_order, "spline terms support derivative order <= 3");
    const auto& x = s.knots;
    auto it = std::upper_bound(x.begin(), x.end(), u);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    i = std::min(i, x.size() - 2);
    const double h = x[i + 1] - x[i];
    const double t = u - x[i];
    const double a = s.values[i];
    const double c = 0.5 * s.curvature[i];
    const double d = (s.curvature[i + 1] - s.curvature[i]) / (6.0 * h);
    const double b = (s.values[i + 1] - s.values[i]) / h - h * (2.0 * s.curvature[i] + s.curvature[i + 1]) / 6.0;
    switch (n) {
      case 0: return a + t * (b + t * (c + t * d));
      case 1: return b + t * (2.0 * c + 3.0 * d * t);
      case 2: return 2.0 * c + 6.0 * d * t;
      default: return 6.0 * d;
    }
  }

  std::variant<Trig, Poly, Spline> impl_;
};

/// H(x,k) = kinetic(k) + potential(x); the mixed second derivative vanishes.
struct HamiltonianModel {
  Term kinetic;
  Term potential;
  std::string name;

  /// cos(k) + nu2 cos(x)
  static HamiltonianModel harper(double nu2) {
    if (!(nu2 > 0.0)) throw Error(ErrorKind::invalid_param, "nu2 must be positive");
    return {Term::cosine(1.0), Term::cosine(nu2), "harper"};
  }

  /// k^2/2 + x^2/2
  static HamiltonianModel harmonic() {
    return {Term::polynomial({0.0, 0.0, 0.5}), Term::polynomial({0.0, 0.0, 0.5}), "ho"};
  }

  double operator()(double x, double k) const { return kinetic(k) + potential(x); }
};

inline double eval_hamiltonian(const HamiltonianModel& model, double x, double k) { return model(x, k); }

inline double term_derivative(const Term& term, int n, double u) { return term.derivative(n, u); }

/// Classical phase-space velocity (dH/dk, -dH/dx).
inline PhasePoint classical_velocity(const HamiltonianModel& model, double x, double k) {
  return {model.kinetic.derivative(1, k), -model.potential.derivative(1, x)};
}

/// Laplacian of H; the classical vorticity is its negative.
inline double laplacian_h(const HamiltonianModel& model, double x, double k) {
  return model.potential.derivative(2, x) + model.kinetic.derivative(2, k);
}

struct HarperParams {
  double nu2 = 1.0;
  double epsilon = 0.0;
};

enum class OrbitClass { closed, open, separatrix, undefined };

inline const char* to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::closed: return "closed";
    case OrbitClass::open: return "open";
    case OrbitClass::separatrix: return "separatrix";
    case OrbitClass::undefined: return "undefined";
  }
  return "undefined";
}

inline constexpr double separatrix_tolerance = 1e-12;

/// Energy-shell taxonomy of the classical Harper orbits.
/// Precedence: undefined (eps = 0 or |eps| >= nu2+1), then separatrix, open, closed.
inline OrbitClass classify_harper_orbit(const HarperParams& params) {
  if (!(params.nu2 > 0.0)) throw Error(ErrorKind::invalid_param, "nu2 must be positive");
  const double e = std::abs(params.epsilon);
  if (params.epsilon == 0.0 || e >= params.nu2 + 1.0) return OrbitClass::undefined;
  if (std::abs(e - (params.nu2 - 1.0)) <= separatrix_tolerance) return OrbitClass::separatrix;
  if (e < params.nu2 - 1.0) return OrbitClass::open;
  return OrbitClass::closed;
}

}  // namespace wigflow
