/**
 *  @file   flux.hpp
 *  @brief  Classical orbits and the information fluxes through them
 *
 *  Boundary terms are line integrals over a closed classical orbit C,
 *      oint dl f[W] (J - J^C) . n,
 *  taken in the time parameterization dl = |v| dt so the periodic
 *  trapezoid rule applies. Volume terms are the companion area integrals
 *  -(beta - 1) int W^beta div w.
 */
#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "wigflow/currents.hpp"
#include "wigflow/error.hpp"
#include "wigflow/hamiltonian.hpp"
#include "wigflow/parallel.hpp"
#include "wigflow/quantifiers.hpp"

namespace wigflow {

struct OrbitPath {
  std::vector<PhasePoint> vertices;  // first == last
  std::vector<double> times;         // vertex times, last == period
  std::vector<PhasePoint> normals;   // outward unit normals
  double period = 0.0;
  double energy_drift = 0.0;
  bool counterclockwise = true;
  bool reversed = false;
};

struct OrbitOptions {
  double dt = 1e-3;
  std::size_t max_steps = 200000;
  double closure_radius = 1e-6;
  double min_cosine = 0.999;
  bool reverse = false;  // integrate the time-reversed field
};

namespace detail {

inline PhasePoint flow(const HamiltonianModel& model, PhasePoint p, double sign) {
  const PhasePoint v = classical_velocity(model, p.x, p.k);
  return {sign * v.x, sign * v.k};
}

inline PhasePoint rk4_step(const HamiltonianModel& model, PhasePoint p, double dt, double sign) {
  const PhasePoint a = flow(model, p, sign);
  const PhasePoint b = flow(model, {p.x + 0.5 * dt * a.x, p.k + 0.5 * dt * a.k}, sign);
  const PhasePoint c = flow(model, {p.x + 0.5 * dt * b.x, p.k + 0.5 * dt * b.k}, sign);
  const PhasePoint d = flow(model, {p.x + dt * c.x, p.k + dt * c.k}, sign);
  return {p.x + dt / 6.0 * (a.x + 2.0 * b.x + 2.0 * c.x + d.x), p.k + dt / 6.0 * (a.k + 2.0 * b.k + 2.0 * c.k + d.k)};
}

/// Cubic Hermite interpolant on one step, theta in [0, 1].
inline PhasePoint hermite_interp(PhasePoint p0, PhasePoint f0, PhasePoint p1, PhasePoint f1, double dt,
                                 double theta) {
  const double t2 = theta * theta, t3 = t2 * theta;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return {h00 * p0.x + h10 * dt * f0.x + h01 * p1.x + h11 * dt * f1.x,
          h00 * p0.k + h10 * dt * f0.k + h01 * p1.k + h11 * dt * f1.k};
}

}  // namespace detail

/// Fixed-step RK4 along (dH/dk, -dH/dx). Closure is detected at the upward
/// crossing of the section through the start point normal to the initial
/// velocity, located by Hermite interpolation; it counts only when the
/// crossing lies within closure_radius of the start with aligned velocity.
inline OrbitPath integrate_orbit(const HamiltonianModel& model, PhasePoint start, const OrbitOptions& opt = {}) {
  if (!(opt.dt > 0.0)) throw Error(ErrorKind::invalid_param, "dt must be positive");
  const double sign = opt.reverse ? -1.0 : 1.0;
  const PhasePoint v0 = detail::flow(model, start, sign);
  const double speed0 = std::hypot(v0.x, v0.k);
  if (speed0 <= 1e-10) throw Error(ErrorKind::equilibrium_start, "start point is an equilibrium");
  const PhasePoint u0{v0.x / speed0, v0.k / speed0};
  auto section = [&](PhasePoint p) { return (p.x - start.x) * u0.x + (p.k - start.k) * u0.k; };

  OrbitPath path;
  path.reversed = opt.reverse;
  path.vertices.push_back(start);
  path.times.push_back(0.0);
  bool armed = false;
  PhasePoint p = start;
  for (std::size_t step = 1; step <= opt.max_steps; ++step) {
    const PhasePoint q = detail::rk4_step(model, p, opt.dt, sign);
    const double sp = section(p), sq = section(q);
    if (sp < 0.0) armed = true;
    if (armed && sp < 0.0 && sq >= 0.0) {
      const PhasePoint fp = detail::flow(model, p, sign);
      const PhasePoint fq = detail::flow(model, q, sign);
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (section(detail::hermite_interp(p, fp, q, fq, opt.dt, mid)) < 0.0) lo = mid; else hi = mid;
      }
      const double theta = 0.5 * (lo + hi);
      const PhasePoint c = detail::hermite_interp(p, fp, q, fq, opt.dt, theta);
      const PhasePoint vc = detail::flow(model, c, sign);
      const double cosine = (vc.x * u0.x + vc.k * u0.k) / std::hypot(vc.x, vc.k);
      if (std::hypot(c.x - start.x, c.k - start.k) <= opt.closure_radius && cosine > opt.min_cosine) {
        path.period = (static_cast<double>(step - 1) + theta) * opt.dt;
        path.vertices.push_back(start);
        path.times.push_back(path.period);
        break;
      }
    }
    p = q;
    path.vertices.push_back(p);
    path.times.push_back(static_cast<double>(step) * opt.dt);
  }
  if (path.period == 0.0) {
    throw Error(ErrorKind::no_closure, "open trajectory: no closure after " + std::to_string(opt.max_steps) + " steps");
  }

  const double h0 = model(start.x, start.k);
  double area2 = 0.0;
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    const PhasePoint& a = path.vertices[i];
    const PhasePoint& b = path.vertices[i + 1];
    area2 += a.x * b.k - b.x * a.k;
    path.energy_drift = std::max(path.energy_drift, std::abs(model(a.x, a.k) - h0));
  }
  path.counterclockwise = area2 > 0.0;
  path.normals.reserve(path.vertices.size());
  for (const PhasePoint& v : path.vertices) {
    const PhasePoint f = detail::flow(model, v, sign);
    const double s = std::hypot(f.x, f.k);
    const PhasePoint t{f.x / s, f.k / s};
    path.normals.push_back(path.counterclockwise ? PhasePoint{t.k, -t.x} : PhasePoint{-t.k, t.x});
  }
  return path;
}

/// Start point on the Harper energy shell cos k + nu2 cos x = epsilon,
/// searched along k = 0, k = pi, x = 0, x = pi in that order.
inline PhasePoint harper_orbit_start(const HarperParams& params) {
  const double nu2 = params.nu2, e = params.epsilon;
  if (!(nu2 > 0.0)) throw Error(ErrorKind::invalid_param, "nu2 must be positive");
  auto in = [](double c) { return c >= -1.0 && c <= 1.0; };
  if (double c = (e - 1.0) / nu2; in(c)) return {std::acos(c), 0.0};
  if (double c = (e + 1.0) / nu2; in(c)) return {std::acos(c), std::numbers::pi};
  if (double c = e - nu2; in(c)) return {0.0, std::acos(c)};
  if (double c = e + nu2; in(c)) return {std::numbers::pi, std::acos(c)};
  throw Error(ErrorKind::invalid_param, "energy outside the Harper band");
}

struct FluxKind {
  enum class Kind { probability, purity, von_neumann, renyi };
  Kind kind = Kind::probability;
  double beta = 2.0;  // renyi only

  static FluxKind probability() { return {Kind::probability, 1.0}; }
  static FluxKind purity() { return {Kind::purity, 2.0}; }
  static FluxKind von_neumann() { return {Kind::von_neumann, 1.0}; }
  static FluxKind renyi(double beta) {
    if (!(beta > 1.0)) throw Error(ErrorKind::invalid_beta, "renyi flux needs beta > 1");
    return {Kind::renyi, beta};
  }
};

inline const char* to_string(FluxKind::Kind k) {
  switch (k) {
    case FluxKind::Kind::probability: return "probability";
    case FluxKind::Kind::purity: return "purity";
    case FluxKind::Kind::von_neumann: return "von_neumann";
    case FluxKind::Kind::renyi: return "renyi";
  }
  return "probability";
}

namespace detail {

inline double flux_weight(const FluxKind& kind, double w) {
  switch (kind.kind) {
    case FluxKind::Kind::probability: return 1.0;
    case FluxKind::Kind::purity: return w;
    case FluxKind::Kind::von_neumann:
      return std::abs(w) < log_floor ? 0.0 : -std::log(std::abs(2.0 * std::numbers::pi * w));
    case FluxKind::Kind::renyi:
      if (kind.beta == std::floor(kind.beta)) return std::pow(w, static_cast<int>(kind.beta) - 1);
      if (w < 0.0) throw Error(ErrorKind::negative_density, "non-integer beta with negative W");
      return std::pow(w, kind.beta - 1.0);
  }
  return 0.0;
}

}  // namespace detail

/// oint dl f[W] (J - J^C) . n over a closed orbit.
inline double boundary_flux(const OrbitPath& orbit, const WignerState& state, const HamiltonianModel& model,
                            const FluxKind& kind, const SeriesConfig& cfg = {},
                            CurrentBackend backend = CurrentBackend::series) {
  const std::size_t n = orbit.vertices.size();
  if (n < 3 || orbit.times.size() != n || orbit.normals.size() != n) {
    throw Error(ErrorKind::invalid_param, "orbit is not a closed path");
  }
  std::vector<double> g(n);
  parallel_rows(n, [&](std::size_t i) {
    const PhasePoint& p = orbit.vertices[i];
    const CurrentSample j = current_at(backend, model, state, p.x, p.k, cfg);
    const CurrentSample jc = current_classical(model, state, p.x, p.k);
    const double w = state_value(state, p.x, p.k);
    const PhasePoint v = classical_velocity(model, p.x, p.k);
    const double flux = (j.jx - jc.jx) * orbit.normals[i].x + (j.jk - jc.jk) * orbit.normals[i].k;
    g[i] = detail::flux_weight(kind, w) * flux * std::hypot(v.x, v.k);
  });
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) total += 0.5 * (g[i] + g[i + 1]) * (orbit.times[i + 1] - orbit.times[i]);
  return total;
}

/// -(beta - 1) int W^beta div w over the region; masked cells contribute 0.
inline double volume_flux_term(const PhaseGrid& region, const WignerState& state, const HamiltonianModel& model,
                               double beta, const SeriesConfig& cfg = {}, double floor = default_velocity_floor) {
  if (!(beta > 0.0)) throw Error(ErrorKind::invalid_beta, "beta must be positive");
  if (beta == 1.0) return 0.0;
  const bool integer = beta == std::floor(beta);
  const double peak = state_peak(state);
  const double sum = parallel_row_sum(region.nk(), [&](std::size_t j) {
    double row = 0.0;
    for (std::size_t i = 0; i < region.nx(); ++i) {
      const double x = region.x(i), k = region.k(j);
      const double w = state_value(state, x, k);
      if (!(std::abs(w) >= floor * peak) || w == 0.0) continue;
      if (!integer && w < 0.0) throw Error(ErrorKind::negative_density, "non-integer beta with negative W");
      const double wb = integer ? std::pow(w, static_cast<int>(beta)) : std::pow(w, beta);
      row += wb * liouvillianity(model, state, x, k, cfg, floor);
    }
    return row;
  });
  return -(beta - 1.0) * sum * region.cell_area();
}

}  // namespace wigflow
