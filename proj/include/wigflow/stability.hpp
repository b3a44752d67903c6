/**
 *  @file   stability.hpp
 *  @brief  Equilibria of phase-space velocity fields and their hyperbolic type
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wigflow/currents.hpp"
#include "wigflow/error.hpp"
#include "wigflow/special.hpp"

namespace wigflow {

/// Velocity Jacobian, rows (w_x, w_k), columns (d/dx, d/dk).
struct Jacobian2 {
  double j11 = 0.0;  // d_x w_x
  double j12 = 0.0;  // d_k w_x
  double j21 = 0.0;  // d_x w_k
  double j22 = 0.0;  // d_k w_k

  double trace() const { return j11 + j22; }
  double det() const { return j11 * j22 - j12 * j21; }
  double delta() const { return trace() * trace() - 4.0 * det(); }
  double curl() const { return j21 - j12; }
  /// Tr^2 + curl^2 - 4 Det, unchanged by rotations of the velocity.
  double invariant() const { return trace() * trace() + curl() * curl() - 4.0 * det(); }
};

enum class Classification {
  saddle,
  stable_node,
  unstable_node,
  stable_focus,
  unstable_focus,
  non_hyperbolic_center,
  degenerate,
};

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::saddle: return "saddle";
    case Classification::stable_node: return "stable_node";
    case Classification::unstable_node: return "unstable_node";
    case Classification::stable_focus: return "stable_focus";
    case Classification::unstable_focus: return "unstable_focus";
    case Classification::non_hyperbolic_center: return "non_hyperbolic_center";
    case Classification::degenerate: return "degenerate";
  }
  return "degenerate";
}

inline constexpr double hyperbolicity_tolerance = 1e-9;

inline Classification classify_equilibrium(const Jacobian2& j, double tol_h = hyperbolicity_tolerance) {
  const double det = j.det();
  const double tr = j.trace();
  if (det < -tol_h) return Classification::saddle;
  if (std::abs(det) <= tol_h) return Classification::degenerate;
  if (std::abs(tr) <= tol_h) return Classification::non_hyperbolic_center;
  const bool node = j.delta() >= 0.0;
  if (tr > 0.0) return node ? Classification::unstable_node : Classification::unstable_focus;
  return node ? Classification::stable_node : Classification::stable_focus;
}

struct EquilibriumReport {
  PhasePoint point{};
  Jacobian2 jacobian{};
  double trace = 0.0;
  double det = 0.0;
  double delta = 0.0;
  double curl = 0.0;
  double inv = 0.0;
  Classification classification = Classification::degenerate;
};

inline EquilibriumReport make_report(PhasePoint point, const Jacobian2& j) {
  return {point, j, j.trace(), j.det(), j.delta(), j.curl(), j.invariant(), classify_equilibrium(j)};
}

inline constexpr double jacobian_step = 1e-5;

/// Central differences of the velocity field with step h.
inline Jacobian2 jacobian_at(const VelocityField& field, PhasePoint p, double h = jacobian_step) {
  const VelocitySample xp = field(p.x + h, p.k);
  const VelocitySample xm = field(p.x - h, p.k);
  const VelocitySample kp = field(p.x, p.k + h);
  const VelocitySample km = field(p.x, p.k - h);
  if (!xp.defined || !xm.defined || !kp.defined || !km.defined) {
    throw Error(ErrorKind::undefined_region, "velocity undefined near the Jacobian point");
  }
  const double s = 0.5 / h;
  return {(xp.wx - xm.wx) * s, (kp.wx - km.wx) * s, (xp.wk - xm.wk) * s, (kp.wk - km.wk) * s};
}

struct SearchRegion {
  double x_min = -std::numbers::pi;
  double x_max = std::numbers::pi;
  double k_min = -std::numbers::pi;
  double k_max = std::numbers::pi;
  std::size_t resolution = 64;
  double newton_tol = 1e-12;
  int max_iterations = 50;
  double dedupe_radius = 1e-8;

  void validate() const {
    if (!(x_min < x_max) || !(k_min < k_max)) throw Error(ErrorKind::invalid_param, "region bounds must be ordered");
    if (resolution < 8) throw Error(ErrorKind::invalid_param, "region resolution must be >= 8");
  }

  bool contains(PhasePoint p, double slack = 0.0) const {
    return p.x >= x_min - slack && p.x <= x_max + slack && p.k >= k_min - slack && p.k <= k_max + slack;
  }
};

struct EquilibriumSearch {
  std::vector<PhasePoint> points;  // sorted by (x, k)
  std::size_t seeds = 0;
  std::size_t failed = 0;  // seeds dropped without convergence
};

inline constexpr double equilibrium_residual = 1e-10;

namespace detail {

inline double norm(const VelocitySample& v) { return std::hypot(v.wx, v.wk); }

/// Damped Newton from `p`; step halved up to 10 times when |w| grows.
inline bool newton_refine(const VelocityField& field, PhasePoint& p, const SearchRegion& region) {
  VelocitySample w = field(p.x, p.k);
  if (!w.defined) return false;
  double r = norm(w);
  const double span = std::max(region.x_max - region.x_min, region.k_max - region.k_min);
  for (int it = 0; it < region.max_iterations && r > region.newton_tol; ++it) {
    Jacobian2 j;
    try {
      j = jacobian_at(field, p);
    } catch (const Error&) {
      return false;
    }
    const double det = j.det();
    if (det == 0.0 || !std::isfinite(det)) return false;
    double dx = -(j.j22 * w.wx - j.j12 * w.wk) / det;
    double dk = -(-j.j21 * w.wx + j.j11 * w.wk) / det;
    bool improved = false;
    for (int halving = 0; halving <= 10; ++halving) {
      const PhasePoint trial{p.x + dx, p.k + dk};
      const VelocitySample wt = field(trial.x, trial.k);
      if (wt.defined && norm(wt) < r) {
        p = trial;
        w = wt;
        r = norm(wt);
        improved = true;
        break;
      }
      dx *= 0.5;
      dk *= 0.5;
    }
    if (!improved) break;
    if (!region.contains(p, 0.5 * span)) return false;
  }
  return r <= equilibrium_residual && region.contains(p, 1e-9);
}

}  // namespace detail

/// Coarse sign-change scan followed by damped Newton refinement.
inline EquilibriumSearch find_equilibria(const VelocityField& field, const SearchRegion& region) {
  region.validate();
  const std::size_t n = region.resolution;
  const double hx = (region.x_max - region.x_min) / static_cast<double>(n);
  const double hk = (region.k_max - region.k_min) / static_cast<double>(n);
  std::vector<VelocitySample> nodes((n + 1) * (n + 1));
  for (std::size_t j = 0; j <= n; ++j) {
    for (std::size_t i = 0; i <= n; ++i) {
      nodes[j * (n + 1) + i] = field(region.x_min + hx * static_cast<double>(i), region.k_min + hk * static_cast<double>(j));
    }
  }
  EquilibriumSearch out;
  std::vector<PhasePoint> roots;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const VelocitySample* c[4] = {&nodes[j * (n + 1) + i], &nodes[j * (n + 1) + i + 1],
                                    &nodes[(j + 1) * (n + 1) + i], &nodes[(j + 1) * (n + 1) + i + 1]};
      bool defined = true;
      double xmin = 1.0, xmax = -1.0, kmin = 1.0, kmax = -1.0;
      for (int q = 0; q < 4; ++q) {
        if (!c[q]->defined) defined = false;
        const double sx = c[q]->wx, sk = c[q]->wk;
        if (q == 0) {
          xmin = xmax = sx;
          kmin = kmax = sk;
        } else {
          xmin = std::min(xmin, sx), xmax = std::max(xmax, sx);
          kmin = std::min(kmin, sk), kmax = std::max(kmax, sk);
        }
      }
      if (!defined) continue;
      if (!(xmin <= 0.0 && xmax >= 0.0 && kmin <= 0.0 && kmax >= 0.0)) continue;
      ++out.seeds;
      PhasePoint p{region.x_min + hx * (static_cast<double>(i) + 0.5), region.k_min + hk * (static_cast<double>(j) + 0.5)};
      if (!detail::newton_refine(field, p, region)) {
        ++out.failed;
        continue;
      }
      roots.push_back(p);
    }
  }
  std::sort(roots.begin(), roots.end(), [](const PhasePoint& a, const PhasePoint& b) {
    return a.x < b.x || (a.x == b.x && a.k < b.k);
  });
  for (const PhasePoint& p : roots) {
    const bool dup = std::any_of(out.points.begin(), out.points.end(), [&](const PhasePoint& q) {
      return std::max(std::abs(p.x - q.x), std::abs(p.k - q.k)) <= region.dedupe_radius;
    });
    if (!dup) out.points.push_back(p);
  }
  return out;
}

/// Analytic report at the origin for the Gaussian-Harper system:
/// Tr = 0, Det = (pi nu2 / gamma^2) Erf(gamma/2)^2,
/// curl = (1 + nu2) (sqrt(pi)/gamma) Erf(gamma/2).
inline EquilibriumReport harper_equilibrium_closed_form(double nu2, double gamma) {
  if (!(nu2 > 0.0) || !(gamma > 0.0)) throw Error(ErrorKind::invalid_param, "nu2 and gamma must be positive");
  const double f = std::sqrt(std::numbers::pi) / gamma * std::erf(0.5 * gamma);
  const Jacobian2 j{0.0, -f, nu2 * f, 0.0};
  EquilibriumReport r = make_report({0.0, 0.0}, j);
  r.det = std::numbers::pi * nu2 / (gamma * gamma) * std::erf(0.5 * gamma) * std::erf(0.5 * gamma);
  r.delta = -4.0 * r.det;
  r.curl = (1.0 + nu2) * f;
  r.inv = (1.0 - nu2) * (1.0 - nu2) * std::numbers::pi / (gamma * gamma) * std::erf(0.5 * gamma) *
          std::erf(0.5 * gamma);
  r.classification = Classification::non_hyperbolic_center;
  return r;
}

}  // namespace wigflow
