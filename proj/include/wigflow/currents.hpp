/**
 *  @file   currents.hpp
 *  @brief  Wigner currents J = (Jx, Jk) and the velocity field w = J / W
 *
 *  Series route:
 *      Jx = + sum_eta c_eta [d_k^{2eta+1} K] d_x^{2eta} W
 *      Jk = - sum_eta c_eta [d_x^{2eta+1} V] d_k^{2eta} W
 *  with c_eta = (-1)^eta / (4^eta (2eta+1)!).
 *
 *  Closed route for a Gaussian centered at the origin and a cosine term
 *  A cos(c u + phi): the even Hermite sum resums to an error-function window,
 *      Jx = -A c sin(c k + phi) * (sqrt(pi)/(2 c gamma)) e^{gamma^2 x^2}
 *           [erf(gamma(x + c/2)) - erf(gamma(x - c/2))] * G
 *  (the sine carries the conjugate variable of the Erf window), and the
 *  partner expression for Jk with x <-> k and an overall sign flip.
 */
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>

#include "wigflow/error.hpp"
#include "wigflow/hamiltonian.hpp"
#include "wigflow/wigner.hpp"

namespace wigflow {

struct SeriesConfig {
  int eta_max = 20;
  double term_tol = 1e-14;
  int fd_accuracy = 8;               // stencil order for grid states
  bool require_convergence = true;   // false: return the truncated partial sum

  void validate() const {
    if (eta_max < 0) throw Error(ErrorKind::invalid_param, "eta_max must be >= 0");
    if (!(term_tol > 0.0)) throw Error(ErrorKind::invalid_param, "term_tol must be positive");
    if (fd_accuracy < 2 || fd_accuracy % 2 != 0) throw Error(ErrorKind::invalid_param, "fd_accuracy must be even");
  }
};

/// Highest series index usable on grid-sampled states.
inline constexpr int grid_eta_limit = 2;

struct Provenance {
  enum class Kind { series, classical, closed_form };
  Kind kind = Kind::series;
  int eta_used = 0;
};

struct CurrentSample {
  double jx = 0.0;
  double jk = 0.0;
  Provenance provenance{};
};

struct VelocitySample {
  double wx = 0.0;
  double wk = 0.0;
  bool defined = false;
};

inline constexpr double default_velocity_floor = 1e-12;

namespace detail {

/// Truncation plan shared by every series evaluator.
struct SeriesPlan {
  int cap = 0;         // last eta evaluated
  bool exact = false;  // every term beyond cap vanishes identically
  double tol = 1e-14;
  bool require = true;
};

inline std::optional<int> eta_bound(const Term& t) {
  auto order = t.max_nonzero_order();
  if (!order) return std::nullopt;
  // d^{2eta+1} and d^{2eta+2} vanish once 2eta+1 > order
  return *order >= 1 ? (*order - 1) / 2 : -1;
}

inline SeriesPlan plan_series(const HamiltonianModel& model, const WignerState& state, const SeriesConfig& cfg) {
  cfg.validate();
  SeriesPlan plan{cfg.eta_max, false, cfg.term_tol, cfg.require_convergence};
  const auto bk = eta_bound(model.kinetic);
  const auto bv = eta_bound(model.potential);
  if (bk && bv) {
    const int exact_cap = std::max({*bk, *bv, 0});
    if (exact_cap <= plan.cap) {
      plan.cap = exact_cap;
      plan.exact = true;
    }
  }
  if (std::holds_alternative<GridWigner>(state) && plan.cap > grid_eta_limit) {
    plan.cap = grid_eta_limit;
    plan.exact = false;
  }
  return plan;
}

/// Sums N parallel series. Stops after two consecutive negligible terms;
/// raises NonConvergence when the last two terms at the cap both exceed
/// term_tol * (1 + |partial|).
template <std::size_t N, class TermFn>
std::pair<std::array<double, N>, int> sum_series(const SeriesPlan& plan, int first_eta, TermFn&& term) {
  std::array<double, N> sum{};
  int small_run = 0;
  int big_run = 0;
  int eta = first_eta;
  int used = first_eta;
  double c = 1.0;
  for (int e = 0; e < first_eta; ++e) c *= -0.25 / ((2.0 * e + 2.0) * (2.0 * e + 3.0));
  for (; eta <= plan.cap; ++eta) {
    const std::array<double, N> t = term(eta, c);
    bool small = true;
    for (std::size_t i = 0; i < N; ++i) {
      sum[i] += t[i];
      if (!(std::abs(t[i]) < plan.tol * (1.0 + std::abs(sum[i])))) small = false;
    }
    used = eta;
    if (small) {
      big_run = 0;
      if (++small_run == 2) break;
    } else {
      small_run = 0;
      ++big_run;
    }
    c *= -0.25 / ((2.0 * eta + 2.0) * (2.0 * eta + 3.0));
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (!std::isfinite(sum[i])) throw Error(ErrorKind::non_convergence, "non-finite partial sum");
  }
  if (eta > plan.cap && !plan.exact && plan.require && big_run >= 2) {
    throw Error(ErrorKind::non_convergence, "series not converged at eta_max=" + std::to_string(plan.cap));
  }
  return {sum, used};
}

inline int jet_order(const SeriesPlan& plan) { return 2 * plan.cap + 1; }

}  // namespace detail

/// Truncated eta-series for the Wigner current.
inline CurrentSample current_series(const HamiltonianModel& model, const WignerState& state, double x, double k,
                                    const SeriesConfig& cfg = {}) {
  const auto plan = detail::plan_series(model, state, cfg);
  const WignerJet jet = wigner_jet(state, x, k, detail::jet_order(plan), cfg.fd_accuracy);
  const double w = jet.value;
  auto [sum, used] = detail::sum_series<2>(plan, 0, [&](int eta, double c) {
    const auto n = static_cast<std::size_t>(2 * eta);
    return std::array<double, 2>{
        c * model.kinetic.derivative(2 * eta + 1, k) * jet.rx0[n] * w,
        -c * model.potential.derivative(2 * eta + 1, x) * jet.rk0[n] * w,
    };
  });
  return {sum[0], sum[1], {Provenance::Kind::series, used}};
}

/// Velocity from the series using derivative ratios directly, so no 0/0
/// arises for analytic states. Undefined where |W| < floor * peak.
inline VelocitySample velocity_series(const HamiltonianModel& model, const WignerState& state, double x, double k,
                                      const SeriesConfig& cfg = {}, double floor = default_velocity_floor) {
  const auto plan = detail::plan_series(model, state, cfg);
  const double w = state_value(state, x, k);
  if (!(std::abs(w) >= floor * state_peak(state))) return {};
  const WignerJet jet = wigner_jet(state, x, k, detail::jet_order(plan), cfg.fd_accuracy);
  auto [sum, used] = detail::sum_series<2>(plan, 0, [&](int eta, double c) {
    const auto n = static_cast<std::size_t>(2 * eta);
    return std::array<double, 2>{
        c * model.kinetic.derivative(2 * eta + 1, k) * jet.rx0[n],
        -c * model.potential.derivative(2 * eta + 1, x) * jet.rk0[n],
    };
  });
  (void)used;
  return {sum[0], sum[1], true};
}

/// (v_x W, v_k W) with v the classical Hamiltonian velocity.
inline CurrentSample current_classical(const HamiltonianModel& model, const WignerState& state, double x,
                                       double k) {
  const double w = state_value(state, x, k);
  const PhasePoint v = classical_velocity(model, x, k);
  return {v.x * w, v.k * w, {Provenance::Kind::classical, 0}};
}

namespace detail {

/// w-component contributed by one term against a Gaussian of width gamma,
/// evaluated at conjugate coordinate `own` (derivative variable of the term)
/// and Hermite coordinate `other`; sign convention of Jx.
inline double closed_component(const Term& term, double own, double other, double gamma) {
  if (const auto* t = term.trig()) {
    const double c = std::abs(t->frequency);
    if (t->amplitude == 0.0 || c == 0.0) return 0.0;
    const double window = std::sqrt(std::numbers::pi) / (2.0 * c * gamma) *
                          erf_window(gamma * other, 0.5 * c * gamma);
    return -t->amplitude * t->frequency * std::sin(t->frequency * own + t->phase) * window;
  }
  // polynomial of degree <= 2: only the classical term survives
  return term.derivative(1, own);
}

inline void check_closed_supported(const HamiltonianModel& model) {
  for (const Term* t : {&model.kinetic, &model.potential}) {
    const bool quadratic = t->poly() && t->poly()->coefficients.size() <= 3;
    if (!t->trig() && !quadratic) {
      throw Error(ErrorKind::unsupported_model, "closed form needs cosine or at most quadratic terms");
    }
  }
}

inline void check_origin(const GaussianEnsemble& g) {
  if (g.center.x != 0.0 || g.center.k != 0.0) {
    throw Error(ErrorKind::unsupported_center, "closed form needs an origin-centered Gaussian");
  }
}

}  // namespace detail

/// Resummed velocity for origin-centered Gaussians; defined everywhere.
inline VelocitySample velocity_gaussian_closed(const HamiltonianModel& model, const GaussianEnsemble& g, double x,
                                               double k) {
  detail::check_closed_supported(model);
  detail::check_origin(g);
  const double wx = detail::closed_component(model.kinetic, k, x, g.gamma);
  const double wk = -detail::closed_component(model.potential, x, k, g.gamma);
  return {wx, wk, true};
}

inline CurrentSample current_gaussian_closed(const HamiltonianModel& model, const GaussianEnsemble& g, double x,
                                             double k) {
  const VelocitySample v = velocity_gaussian_closed(model, g, x, k);
  const double w = gaussian_eval(g, x, k);
  return {v.wx * w, v.wk * w, {Provenance::Kind::closed_form, 0}};
}

/// w = J / W where |W| >= floor * peak, otherwise undefined.
inline VelocitySample velocity_at(const CurrentSample& current, double density, double peak,
                                  double floor = default_velocity_floor) {
  if (!(floor > 0.0)) throw Error(ErrorKind::invalid_param, "velocity floor must be positive");
  if (!(std::abs(density) >= floor * peak) || density == 0.0) return {};
  return {current.jx / density, current.jk / density, true};
}

using VelocityField = std::function<VelocitySample(double x, double k)>;

enum class CurrentBackend { series, closed_form, classical };

inline const char* to_string(CurrentBackend b) {
  switch (b) {
    case CurrentBackend::series: return "series";
    case CurrentBackend::closed_form: return "closed";
    case CurrentBackend::classical: return "classical";
  }
  return "series";
}

inline VelocityField classical_velocity_field(HamiltonianModel model) {
  return [model = std::move(model)](double x, double k) {
    const PhasePoint v = classical_velocity(model, x, k);
    return VelocitySample{v.x, v.k, true};
  };
}

inline VelocityField series_velocity_field(HamiltonianModel model, WignerState state, SeriesConfig cfg = {},
                                           double floor = default_velocity_floor) {
  return [model = std::move(model), state = std::move(state), cfg, floor](double x, double k) {
    return velocity_series(model, state, x, k, cfg, floor);
  };
}

inline VelocityField closed_velocity_field(HamiltonianModel model, GaussianEnsemble g) {
  detail::check_closed_supported(model);
  detail::check_origin(g);
  return [model = std::move(model), g](double x, double k) { return velocity_gaussian_closed(model, g, x, k); };
}

inline VelocityField make_velocity_field(CurrentBackend backend, const HamiltonianModel& model,
                                         const WignerState& state, const SeriesConfig& cfg = {}) {
  switch (backend) {
    case CurrentBackend::classical: return classical_velocity_field(model);
    case CurrentBackend::closed_form: {
      const auto* g = std::get_if<GaussianEnsemble>(&state);
      if (!g) throw Error(ErrorKind::unsupported_model, "closed form needs a Gaussian state");
      return closed_velocity_field(model, *g);
    }
    case CurrentBackend::series: break;
  }
  return series_velocity_field(model, state, cfg);
}

/// Current at a point through the chosen backend.
inline CurrentSample current_at(CurrentBackend backend, const HamiltonianModel& model, const WignerState& state,
                                double x, double k, const SeriesConfig& cfg = {}) {
  switch (backend) {
    case CurrentBackend::classical: return current_classical(model, state, x, k);
    case CurrentBackend::closed_form: {
      const auto* g = std::get_if<GaussianEnsemble>(&state);
      if (!g) throw Error(ErrorKind::unsupported_model, "closed form needs a Gaussian state");
      return current_gaussian_closed(model, *g, x, k);
    }
    case CurrentBackend::series: break;
  }
  return current_series(model, state, x, k, cfg);
}

}  // namespace wigflow
