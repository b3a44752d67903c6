/**
 *  @file   quantifiers.hpp
 *  @brief  Stationarity, Liouvillianity, vorticity, anharmonicity and
 *          circulation of the Wigner flow
 */
#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "wigflow/currents.hpp"
#include "wigflow/grid.hpp"
#include "wigflow/parallel.hpp"
#include "wigflow/stability.hpp"

namespace wigflow {

/// d_tau W = sum_eta c_eta {[d_x^{2eta+1} V] d_k^{2eta+1} W - [d_k^{2eta+1} K] d_x^{2eta+1} W},
/// which equals -div J.
inline double stationarity(const HamiltonianModel& model, const WignerState& state, double x, double k,
                           const SeriesConfig& cfg = {}) {
  const auto plan = detail::plan_series(model, state, cfg);
  const WignerJet jet = wigner_jet(state, x, k, detail::jet_order(plan), cfg.fd_accuracy);
  const double w = jet.value;
  auto [sum, used] = detail::sum_series<1>(plan, 0, [&](int eta, double c) {
    const auto n = static_cast<std::size_t>(2 * eta + 1);
    return std::array<double, 1>{c * (model.potential.derivative(2 * eta + 1, x) * jet.rk0[n] -
                                      model.kinetic.derivative(2 * eta + 1, k) * jet.rx0[n]) * w};
  });
  (void)used;
  return sum[0];
}

/// div J, the negative of the stationarity quantifier.
inline double current_divergence(const HamiltonianModel& model, const WignerState& state, double x, double k,
                                 const SeriesConfig& cfg = {}) {
  return -stationarity(model, state, x, k, cfg);
}

namespace detail {

inline void require_defined(const WignerState& state, double x, double k, double floor) {
  const double w = state_value(state, x, k);
  if (!(std::abs(w) >= floor * state_peak(state)) || w == 0.0) {
    throw Error(ErrorKind::undefined_region, "W below the velocity floor");
  }
}

}  // namespace detail

/// div w in quotient form (W div J - J . grad W) / W^2, evaluated as
/// div J / W - (J / W) . (grad W / W).
inline double liouvillianity(const HamiltonianModel& model, const WignerState& state, double x, double k,
                             const SeriesConfig& cfg = {}, double floor = default_velocity_floor) {
  detail::require_defined(state, x, k, floor);
  const auto plan = detail::plan_series(model, state, cfg);
  const WignerJet jet = wigner_jet(state, x, k, detail::jet_order(plan), cfg.fd_accuracy);
  auto [sum, used] = detail::sum_series<3>(plan, 0, [&](int eta, double c) {
    const auto even = static_cast<std::size_t>(2 * eta);
    const double dk = model.kinetic.derivative(2 * eta + 1, k);
    const double dv = model.potential.derivative(2 * eta + 1, x);
    return std::array<double, 3>{
        c * (dk * jet.rx0[even + 1] - dv * jet.rk0[even + 1]),  // div J / W
        c * dk * jet.rx0[even],                                 // Jx / W
        -c * dv * jet.rk0[even],                                // Jk / W
    };
  });
  (void)used;
  return sum[0] - (sum[1] * jet.rx0[1] + sum[2] * jet.rk0[1]);
}

/// Velocity Jacobian from the eta-series with the derivative ratios of W:
///   d_x w_x = sum c [K^(2eta+1)] (r(2eta+1,0) - r(1,0) r(2eta,0))
///   d_k w_x = sum c ([K^(2eta+2)] r(2eta,0) + [K^(2eta+1)] (r(2eta,1) - r(0,1) r(2eta,0)))
/// and the mirrored expressions for w_k.
inline Jacobian2 velocity_jacobian(const HamiltonianModel& model, const WignerState& state, double x, double k,
                                   const SeriesConfig& cfg = {}, double floor = default_velocity_floor) {
  detail::require_defined(state, x, k, floor);
  const auto plan = detail::plan_series(model, state, cfg);
  const WignerJet jet = wigner_jet(state, x, k, detail::jet_order(plan), cfg.fd_accuracy);
  const double rx = jet.rx0[1];
  const double rk = jet.rk0[1];
  auto [sum, used] = detail::sum_series<4>(plan, 0, [&](int eta, double c) {
    const auto e = static_cast<std::size_t>(2 * eta);
    const double k1 = model.kinetic.derivative(2 * eta + 1, k);
    const double k2 = model.kinetic.derivative(2 * eta + 2, k);
    const double v1 = model.potential.derivative(2 * eta + 1, x);
    const double v2 = model.potential.derivative(2 * eta + 2, x);
    const double ax = jet.rx0[e + 1] - rx * jet.rx0[e];  // d_x (d_x^{2eta} W / W)
    const double ak = jet.rx1[e] - rk * jet.rx0[e];      // d_k (d_x^{2eta} W / W)
    const double bk = jet.rk0[e + 1] - rk * jet.rk0[e];  // d_k (d_k^{2eta} W / W)
    const double bx = jet.rk1[e] - rx * jet.rk0[e];      // d_x (d_k^{2eta} W / W)
    return std::array<double, 4>{
        c * k1 * ax,
        c * (k2 * jet.rx0[e] + k1 * ak),
        -c * (v2 * jet.rk0[e] + v1 * bx),
        -c * v1 * bk,
    };
  });
  (void)used;
  return {sum[0], sum[1], sum[2], sum[3]};
}

/// Direct eta-series for div w (starts at eta = 1; the classical term is zero).
inline double liouvillianity_series(const HamiltonianModel& model, const WignerState& state, double x, double k,
                                    const SeriesConfig& cfg = {}, double floor = default_velocity_floor) {
  return velocity_jacobian(model, state, x, k, cfg, floor).trace();
}

/// (curl w) . z = d_x w_k - d_k w_x from the analytic series Jacobian.
inline double vorticity(const HamiltonianModel& model, const WignerState& state, double x, double k,
                        const SeriesConfig& cfg = {}, double floor = default_velocity_floor) {
  return velocity_jacobian(model, state, x, k, cfg, floor).curl();
}

/// ln |curl w / lap H|; nullopt where |lap H| <= 1e-12 or |curl| <= 1e-300.
inline std::optional<double> sigma_from(double curl, double lap) {
  if (!(std::abs(lap) > 1e-12) || !(std::abs(curl) > 1e-300)) return std::nullopt;
  return std::log(std::abs(curl / lap));
}

inline std::optional<double> sigma_anharmonicity(const HamiltonianModel& model, const WignerState& state, double x,
                                                 double k, const SeriesConfig& cfg = {},
                                                 double floor = default_velocity_floor) {
  const double w = state_value(state, x, k);
  if (!(std::abs(w) >= floor * state_peak(state)) || w == 0.0) return std::nullopt;
  return sigma_from(vorticity(model, state, x, k, cfg, floor), laplacian_h(model, x, k));
}

struct RotationAngle {
  double theta = 0.0;
};

/// w'_x = w_x cos + w_k sin, w'_k = w_k cos - w_x sin
inline VelocitySample rotate_velocity(const VelocitySample& w, RotationAngle angle) {
  if (!w.defined) return w;
  const double c = std::cos(angle.theta), s = std::sin(angle.theta);
  return {w.wx * c + w.wk * s, w.wk * c - w.wx * s, true};
}

inline VelocityField rotate_field(VelocityField field, RotationAngle angle) {
  return [field = std::move(field), angle](double x, double k) { return rotate_velocity(field(x, k), angle); };
}

/// The same rotation acting on a velocity Jacobian (rows rotate with w).
inline Jacobian2 rotate_jacobian(const Jacobian2& j, RotationAngle angle) {
  const double c = std::cos(angle.theta), s = std::sin(angle.theta);
  return {c * j.j11 + s * j.j21, c * j.j12 + s * j.j22, c * j.j21 - s * j.j11, c * j.j22 - s * j.j12};
}

/// Tr[j]^2 + curl^2 - 4 Det[j]
inline double rotation_invariant(const HamiltonianModel& model, const WignerState& state, double x, double k,
                                 const SeriesConfig& cfg = {}, double floor = default_velocity_floor) {
  return velocity_jacobian(model, state, x, k, cfg, floor).invariant();
}

struct CirculationResult {
  int winding = 0;
  double raw = 0.0;            // accumulated velocity angle / 2 pi
  double line_integral = 0.0;  // closed line integral of w . dl
};

/// Closed polyline approximating a circle, counterclockwise, first == last.
inline std::vector<PhasePoint> circle_path(PhasePoint center, double radius, std::size_t segments = 720) {
  std::vector<PhasePoint> path(segments + 1);
  for (std::size_t i = 0; i < segments; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(segments);
    path[i] = {center.x + radius * std::cos(t), center.k + radius * std::sin(t)};
  }
  path[segments] = path[0];
  return path;
}

inline constexpr double quantization_tolerance = 0.02;

/// Winding of w along a closed path by accumulating wrapped angle increments.
inline CirculationResult circulation(std::span<const PhasePoint> path, const VelocityField& field) {
  if (path.size() < 4) throw Error(ErrorKind::invalid_param, "path needs at least 3 segments");
  const PhasePoint& a = path.front();
  const PhasePoint& b = path.back();
  if (std::abs(a.x - b.x) > 1e-12 || std::abs(a.k - b.k) > 1e-12) {
    throw Error(ErrorKind::invalid_param, "path is not closed");
  }
  std::vector<VelocitySample> w(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    w[i] = field(path[i].x, path[i].k);
    if (!w[i].defined || (w[i].wx == 0.0 && w[i].wk == 0.0)) {
      throw Error(ErrorKind::undefined_on_path, "velocity undefined or zero on the path");
    }
  }
  CirculationResult r;
  double angle = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    double d = std::atan2(w[i + 1].wk, w[i + 1].wx) - std::atan2(w[i].wk, w[i].wx);
    d = std::remainder(d, 2.0 * std::numbers::pi);
    angle += d;
    const double sx = path[i + 1].x - path[i].x;
    const double sk = path[i + 1].k - path[i].k;
    r.line_integral += 0.5 * ((w[i].wx + w[i + 1].wx) * sx + (w[i].wk + w[i + 1].wk) * sk);
  }
  r.raw = angle / (2.0 * std::numbers::pi);
  r.winding = static_cast<int>(std::lround(r.raw));
  if (std::abs(r.raw - r.winding) > quantization_tolerance) {
    throw Error(ErrorKind::non_quantized, "winding residue " + std::to_string(r.raw - r.winding));
  }
  return r;
}

enum class Quantity { div_j, div_w, curl, sigma, inv };

inline const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::div_j: return "divj";
    case Quantity::div_w: return "divw";
    case Quantity::curl: return "curl";
    case Quantity::sigma: return "sigma";
    case Quantity::inv: return "inv";
  }
  return "divj";
}

/// Sampled quantifier over a grid; masked cells hold NaN.
struct QuantifierField {
  PhaseGrid grid;
  Quantity quantity;
  std::vector<double> values;
  std::vector<bool> mask;  // true = undefined

  double at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
  bool masked(std::size_t i, std::size_t j) const { return mask[grid.index(i, j)]; }
};

struct FieldOptions {
  SeriesConfig series{};
  RotationAngle theta{};
  double floor = default_velocity_floor;
  bool classical = false;  // use the classical velocity v instead of w
};

/// Point value of a quantifier; nullopt marks an undefined cell.
inline std::optional<double> quantity_at(Quantity q, const HamiltonianModel& model, const WignerState& state,
                                         double x, double k, const FieldOptions& opt = {}) {
  if (q == Quantity::div_j) {
    if (opt.classical) return 0.0;
    return current_divergence(model, state, x, k, opt.series);
  }
  Jacobian2 j;
  if (opt.classical) {
    j = {0.0, model.kinetic.derivative(2, k), -model.potential.derivative(2, x), 0.0};
  } else {
    const double w = state_value(state, x, k);
    if (!(std::abs(w) >= opt.floor * state_peak(state)) || w == 0.0) return std::nullopt;
    j = velocity_jacobian(model, state, x, k, opt.series, opt.floor);
  }
  j = rotate_jacobian(j, opt.theta);
  switch (q) {
    case Quantity::div_w: return j.trace();
    case Quantity::curl: return j.curl();
    case Quantity::sigma: return sigma_from(j.curl(), laplacian_h(model, x, k));
    case Quantity::inv: return j.invariant();
    case Quantity::div_j: break;
  }
  return std::nullopt;
}

/// Row-parallel sweep; every cell is computed independently.
inline QuantifierField evaluate_field(Quantity q, const PhaseGrid& grid, const HamiltonianModel& model,
                                      const WignerState& state, const FieldOptions& opt = {}) {
  QuantifierField f{grid, q, std::vector<double>(grid.size(), 0.0), std::vector<bool>(grid.size(), false)};
  std::vector<char> mask(grid.size(), 0);
  parallel_rows(grid.nk(), [&](std::size_t j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      const auto v = quantity_at(q, model, state, grid.x(i), grid.k(j), opt);
      const std::size_t idx = grid.index(i, j);
      if (v && std::isfinite(*v)) {
        f.values[idx] = *v;
      } else {
        f.values[idx] = std::numeric_limits<double>::quiet_NaN();
        mask[idx] = 1;
      }
    }
  });
  for (std::size_t i = 0; i < mask.size(); ++i) f.mask[i] = mask[i] != 0;
  return f;
}

}  // namespace wigflow
