/**
 *  @file   wigner.hpp
 *  @brief  Wigner states, marginals and statistical functionals
 *
 *  Two state representations are supported: isotropic Gaussian ensembles,
 *  whose derivatives of every order are Hermite polynomials times the
 *  density, and grid-sampled fields (for instance from wigner_transform)
 *  whose derivatives come from high-order finite-difference stencils.
 *  All functionals use the dimensionless convention where 2*pi*hbar -> 2*pi.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "wigflow/error.hpp"
#include "wigflow/grid.hpp"
#include "wigflow/parallel.hpp"
#include "wigflow/special.hpp"

namespace wigflow {

enum class Axis { x, k };

struct GaussianEnsemble {
  double gamma = 1.0;  // inverse width
  PhasePoint center{};

  GaussianEnsemble() = default;
  GaussianEnsemble(double g, PhasePoint c = {}) : gamma(g), center(c) {
    if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorKind::invalid_param, "gamma must be positive");
  }

  double peak() const { return gamma * gamma / std::numbers::pi; }
};

/// (gamma^2/pi) exp(-gamma^2 ((x-x0)^2 + (k-k0)^2))
inline double gaussian_eval(const GaussianEnsemble& g, double x, double k) {
  const double dx = x - g.center.x;
  const double dk = k - g.center.k;
  return g.peak() * std::exp(-g.gamma * g.gamma * (dx * dx + dk * dk));
}

/// d^a_x d^b_k G = (-gamma)^{a+b} H_a(gamma(x-x0)) H_b(gamma(k-k0)) G
inline double gaussian_mixed_partial(const GaussianEnsemble& g, int a, int b, double x, double k) {
  const double hx = hermite(a, g.gamma * (x - g.center.x));
  const double hk = hermite(b, g.gamma * (k - g.center.k));
  return std::pow(-g.gamma, a + b) * hx * hk * gaussian_eval(g, x, k);
}

inline double gaussian_partial(const GaussianEnsemble& g, Axis axis, int n, double x, double k) {
  if (n < 0) throw Error(ErrorKind::invalid_param, "negative derivative order");
  return axis == Axis::x ? gaussian_mixed_partial(g, n, 0, x, k) : gaussian_mixed_partial(g, 0, n, x, k);
}

/// Grid-sampled Wigner field, samples stored k-major (see PhaseGrid::index).
struct GridWigner {
  PhaseGrid grid;
  std::vector<double> samples;

  GridWigner(PhaseGrid g, std::vector<double> s) : grid(g), samples(std::move(s)) {
    if (samples.size() != grid.size()) throw Error(ErrorKind::invalid_param, "sample count does not match grid");
  }

  double at(std::size_t i, std::size_t j) const { return samples[grid.index(i, j)]; }

  double peak() const {
    double p = 0.0;
    for (double v : samples) p = std::max(p, std::abs(v));
    return p;
  }

  double integral() const {
    double s = 0.0;
    for (double v : samples) s += v;
    return s * grid.cell_area();
  }

  /// Bilinear interpolation between nodes (clamped to the node hull).
  double value(double x, double k) const { return partial(0, 0, x, k); }

  /// d^a_x d^b_k W from finite-difference stencils of the given accuracy at
  /// the four surrounding nodes, bilinearly interpolated.
  double partial(int a, int b, double x, double k, int accuracy = 8) const {
    const Locator lx = locate(x, grid.x_min(), grid.dx(), grid.nx());
    const Locator lk = locate(k, grid.k_min(), grid.dk(), grid.nk());
    const Stencil sx0 = node_stencil(a, accuracy, lx.node, grid.nx());
    const Stencil sx1 = node_stencil(a, accuracy, lx.node + 1, grid.nx());
    const Stencil sk0 = node_stencil(b, accuracy, lk.node, grid.nk());
    const Stencil sk1 = node_stencil(b, accuracy, lk.node + 1, grid.nk());
    const double scale = std::pow(grid.dx(), -a) * std::pow(grid.dk(), -b);
    const double d00 = apply(sx0, sk0, lx.node, lk.node);
    const double d10 = apply(sx1, sk0, lx.node + 1, lk.node);
    const double d01 = apply(sx0, sk1, lx.node, lk.node + 1);
    const double d11 = apply(sx1, sk1, lx.node + 1, lk.node + 1);
    const double tx = lx.frac, tk = lk.frac;
    return scale * ((1 - tx) * (1 - tk) * d00 + tx * (1 - tk) * d10 + (1 - tx) * tk * d01 + tx * tk * d11);
  }

 private:
  struct Locator {
    std::size_t node;
    double frac;
  };

  static Locator locate(double u, double lo, double h, std::size_t n) {
    double f = (u - lo) / h - 0.5;
    f = std::clamp(f, 0.0, static_cast<double>(n - 1));
    auto node = static_cast<std::size_t>(std::floor(f));
    node = std::min(node, n - 2);
    return {node, f - static_cast<double>(node)};
  }

  static Stencil node_stencil(int m, int accuracy, std::size_t node, std::size_t n) {
    const int size = stencil_size(m, accuracy);
    int first = -(size - 1) / 2;
    const int lo = -static_cast<int>(node);
    const int hi = static_cast<int>(n) - 1 - static_cast<int>(node) - (size - 1);
    first = std::clamp(first, lo, std::max(lo, hi));
    return offset_stencil(m, accuracy, first);
  }

  double apply(const Stencil& sx, const Stencil& sk, std::size_t i, std::size_t j) const {
    double acc = 0.0;
    for (std::size_t t = 0; t < sk.weights.size(); ++t) {
      const auto jj = static_cast<std::size_t>(static_cast<long>(j) + sk.first_offset + static_cast<long>(t));
      double row = 0.0;
      for (std::size_t s = 0; s < sx.weights.size(); ++s) {
        const auto ii = static_cast<std::size_t>(static_cast<long>(i) + sx.first_offset + static_cast<long>(s));
        row += sx.weights[s] * at(ii, jj);
      }
      acc += sk.weights[t] * row;
    }
    return acc;
  }
};

using WignerState = std::variant<GaussianEnsemble, GridWigner>;

/// Uniformly sampled wavefunction psi(x_i), x_i = x0 + i dx.
class Wavefunction {
 public:
  Wavefunction(double x0, double dx, std::vector<std::complex<double>> amplitudes)
      : x0_(x0), dx_(dx), amps_(std::move(amplitudes)) {
    if (amps_.size() < 64) throw Error(ErrorKind::invalid_param, "wavefunction needs at least 64 samples");
    if (!(dx > 0.0)) throw Error(ErrorKind::invalid_param, "wavefunction spacing must be positive");
    if (std::abs(norm() - 1.0) > 1e-8) throw Error(ErrorKind::invalid_param, "wavefunction is not normalized");
  }

  /// Builds a wavefunction rescaled to unit norm.
  static Wavefunction normalized(double x0, double dx, std::vector<std::complex<double>> amplitudes) {
    const double n = squared_norm(dx, amplitudes);
    if (!(n > 0.0)) throw Error(ErrorKind::invalid_param, "wavefunction has zero norm");
    const double s = 1.0 / std::sqrt(n);
    for (auto& a : amplitudes) a *= s;
    return Wavefunction(x0, dx, std::move(amplitudes));
  }

  /// Samples f on n points spanning [lo, hi] and normalizes.
  static Wavefunction sample(const std::function<std::complex<double>(double)>& f, double lo, double hi,
                             std::size_t n) {
    std::vector<std::complex<double>> a(n);
    const double dx = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) a[i] = f(lo + dx * static_cast<double>(i));
    return normalized(lo, dx, std::move(a));
  }

  double x0() const { return x0_; }
  double dx() const { return dx_; }
  double x_last() const { return x0_ + dx_ * static_cast<double>(amps_.size() - 1); }
  std::size_t size() const { return amps_.size(); }
  const std::vector<std::complex<double>>& amplitudes() const { return amps_; }

  double norm() const { return squared_norm(dx_, amps_); }

  /// Linear interpolation; zero outside the sampled support.
  std::complex<double> operator()(double u) const {
    const double f = (u - x0_) / dx_;
    if (f < 0.0 || f > static_cast<double>(amps_.size() - 1)) return {0.0, 0.0};
    auto i = static_cast<std::size_t>(f);
    if (i >= amps_.size() - 1) return amps_.back();
    const double t = f - static_cast<double>(i);
    return (1.0 - t) * amps_[i] + t * amps_[i + 1];
  }

 private:
  static double squared_norm(double dx, const std::vector<std::complex<double>>& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double w = (i == 0 || i + 1 == a.size()) ? 0.5 : 1.0;
      s += w * std::norm(a[i]);
    }
    return s * dx;
  }

  double x0_;
  double dx_;
  std::vector<std::complex<double>> amps_;
};

/// Reads `x re im` lines (whitespace separated, `#` comments). The x column
/// must be uniformly spaced; the result is normalized.
inline Wavefunction read_wavefunction(std::istream& in) {
  std::vector<double> xs;
  std::vector<std::complex<double>> amps;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x, re, im;
    if (!(ls >> x)) continue;
    if (!(ls >> re >> im)) {
      throw Error(ErrorKind::io, "line " + std::to_string(lineno) + ": expected `x re im`");
    }
    xs.push_back(x);
    amps.emplace_back(re, im);
  }
  if (xs.size() < 64) throw Error(ErrorKind::invalid_param, "wavefunction needs at least 64 samples");
  const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - (xs.front() + dx * static_cast<double>(i))) > 1e-9 * (1.0 + std::abs(xs[i]))) {
      throw Error(ErrorKind::invalid_param, "wavefunction x column is not uniformly spaced");
    }
  }
  return Wavefunction::normalized(xs.front(), dx, std::move(amps));
}

inline Wavefunction load_wavefunction(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  return read_wavefunction(in);
}

/// pi^-1 int dy e^{2iky} psi(x-y) psi*(x+y), trapezoid in y with step dx_psi
/// over the overlap support, psi linearly interpolated between samples.
inline GridWigner wigner_transform(const Wavefunction& psi, const PhaseGrid& grid) {
  if (grid.x_min() < psi.x0() - 1e-12 || grid.x_max() > psi.x_last() + 1e-12) {
    throw Error(ErrorKind::invalid_param, "grid x-range exceeds the wavefunction support");
  }
  std::vector<double> out(grid.size(), 0.0);
  std::vector<double> residue(grid.nx(), 0.0);
  const double dy = psi.dx();
  parallel_rows(grid.nx(), [&](std::size_t i) {
    const double x = grid.x(i);
    const double ymax = std::min(x - psi.x0(), psi.x_last() - x);
    const auto m_max = static_cast<long>(std::floor(ymax / dy));
    std::vector<std::complex<double>> prod(static_cast<std::size_t>(2 * m_max + 1));
    double pmax = 0.0;
    for (long m = -m_max; m <= m_max; ++m) {
      const double y = dy * static_cast<double>(m);
      auto p = psi(x - y) * std::conj(psi(x + y));
      if (m == -m_max || m == m_max) p *= 0.5;
      prod[static_cast<std::size_t>(m + m_max)] = p;
      pmax = std::max(pmax, std::abs(p));
    }
    // trim the negligible tails symmetrically
    long lo = -m_max;
    while (lo < 0 && std::abs(prod[static_cast<std::size_t>(lo + m_max)]) <= 1e-20 * pmax &&
           std::abs(prod[static_cast<std::size_t>(-lo + m_max)]) <= 1e-20 * pmax) {
      ++lo;
    }
    for (std::size_t j = 0; j < grid.nk(); ++j) {
      const double k = grid.k(j);
      const std::complex<double> step = std::polar(1.0, 2.0 * k * dy);
      std::complex<double> phase = std::polar(1.0, 2.0 * k * dy * static_cast<double>(lo));
      std::complex<double> acc{0.0, 0.0};
      for (long m = lo; m <= -lo; ++m) {
        acc += phase * prod[static_cast<std::size_t>(m + m_max)];
        phase *= step;
      }
      acc *= dy / std::numbers::pi;
      out[grid.index(i, j)] = acc.real();
      residue[i] = std::max(residue[i], std::abs(acc.imag()));
    }
  });
  const double worst = *std::max_element(residue.begin(), residue.end());
  if (worst > 1e-8) {
    throw Error(ErrorKind::quadrature_divergence, "imaginary residue " + std::to_string(worst));
  }
  return GridWigner(grid, std::move(out));
}

/// Default integration grid for a Gaussian: +-6/gamma around the center, 512^2.
inline PhaseGrid default_grid(const GaussianEnsemble& g, std::size_t n = 512) {
  return PhaseGrid::centered(g.center.x, g.center.k, 6.0 / g.gamma, n);
}

inline GridWigner sample_state(const WignerState& state, const PhaseGrid& grid) {
  if (const auto* g = std::get_if<GaussianEnsemble>(&state)) {
    std::vector<double> s(grid.size());
    for (std::size_t j = 0; j < grid.nk(); ++j) {
      for (std::size_t i = 0; i < grid.nx(); ++i) s[grid.index(i, j)] = gaussian_eval(*g, grid.x(i), grid.k(j));
    }
    return GridWigner(grid, std::move(s));
  }
  return std::get<GridWigner>(state);
}

/// Grid representation used by the integral functionals.
inline GridWigner as_grid(const WignerState& state) {
  if (const auto* g = std::get_if<GaussianEnsemble>(&state)) return sample_state(state, default_grid(*g));
  return std::get<GridWigner>(state);
}

inline double state_value(const WignerState& state, double x, double k) {
  if (const auto* g = std::get_if<GaussianEnsemble>(&state)) return gaussian_eval(*g, x, k);
  return std::get<GridWigner>(state).value(x, k);
}

inline double state_peak(const WignerState& state) {
  if (const auto* g = std::get_if<GaussianEnsemble>(&state)) return g->peak();
  return std::get<GridWigner>(state).peak();
}

struct Marginal {
  std::vector<double> coords;
  std::vector<double> density;
};

/// Integrates the conjugate variable out.
inline Marginal marginal(const WignerState& state, Axis axis) {
  const GridWigner w = as_grid(state);
  const PhaseGrid& g = w.grid;
  Marginal m;
  if (axis == Axis::x) {
    for (std::size_t i = 0; i < g.nx(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < g.nk(); ++j) s += w.at(i, j);
      m.coords.push_back(g.x(i));
      m.density.push_back(s * g.dk());
    }
  } else {
    for (std::size_t j = 0; j < g.nk(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.nx(); ++i) s += w.at(i, j);
      m.coords.push_back(g.k(j));
      m.density.push_back(s * g.dx());
    }
  }
  return m;
}

using Observable = std::function<double(double x, double k)>;

inline double expectation(const WignerState& state, const Observable& observable) {
  const GridWigner w = as_grid(state);
  const PhaseGrid& g = w.grid;
  double s = 0.0;
  for (std::size_t j = 0; j < g.nk(); ++j) {
    for (std::size_t i = 0; i < g.nx(); ++i) s += w.at(i, j) * observable(g.x(i), g.k(j));
  }
  return s * g.cell_area();
}

/// 2*pi * int W^2
inline double purity(const WignerState& state) {
  const GridWigner w = as_grid(state);
  double s = 0.0;
  for (double v : w.samples) s += v * v;
  return 2.0 * std::numbers::pi * s * w.grid.cell_area();
}

inline constexpr double log_floor = 1e-300;

/// -int W ln|2 pi W|; samples with |W| < 1e-300 contribute zero.
inline double entropy_vn(const WignerState& state) {
  const GridWigner w = as_grid(state);
  double s = 0.0;
  for (double v : w.samples) {
    if (std::abs(v) < log_floor) continue;
    s += v * std::log(std::abs(2.0 * std::numbers::pi * v));
  }
  return -s * w.grid.cell_area();
}

/// (1-beta)^-1 ln[(2 pi)^{beta-1} int W^beta]
inline double entropy_renyi(const WignerState& state, double beta) {
  if (!(beta > 0.0) || beta == 1.0) throw Error(ErrorKind::invalid_beta, "beta must be positive and != 1");
  const GridWigner w = as_grid(state);
  const bool integer = beta == std::floor(beta);
  double s = 0.0;
  for (double v : w.samples) {
    if (!integer && v < 0.0) throw Error(ErrorKind::negative_density, "non-integer beta with negative W");
    s += integer ? std::pow(v, static_cast<int>(beta)) : std::pow(v, beta);
  }
  s *= w.grid.cell_area();
  return (std::log(s) + (beta - 1.0) * std::log(2.0 * std::numbers::pi)) / (1.0 - beta);
}

/// Derivative ratios d^a_x d^b_k W / W at one point, for the derivative
/// patterns the current series and velocity Jacobians need.
struct WignerJet {
  double value = 0.0;
  std::vector<double> rx0;  // r(a, 0)
  std::vector<double> rx1;  // r(a, 1)
  std::vector<double> rk0;  // r(0, b)
  std::vector<double> rk1;  // r(1, b)
  bool analytic = false;    // Hermite ratios, no division by W
};

inline WignerJet wigner_jet(const WignerState& state, double x, double k, int max_order, int fd_accuracy = 8) {
  const auto n = static_cast<std::size_t>(max_order + 1);
  WignerJet jet;
  jet.rx0.resize(n);
  jet.rx1.resize(n);
  jet.rk0.resize(n);
  jet.rk1.resize(n);
  if (const auto* g = std::get_if<GaussianEnsemble>(&state)) {
    jet.analytic = true;
    jet.value = gaussian_eval(*g, x, k);
    std::vector<double> hx(n), hk(n);
    hermite_table(max_order, g->gamma * (x - g->center.x), hx);
    hermite_table(max_order, g->gamma * (k - g->center.k), hk);
    const double h1x = max_order >= 1 ? hx[1] : 2.0 * g->gamma * (x - g->center.x);
    const double h1k = max_order >= 1 ? hk[1] : 2.0 * g->gamma * (k - g->center.k);
    double scale = 1.0;  // (-gamma)^a
    for (std::size_t a = 0; a < n; ++a) {
      jet.rx0[a] = scale * hx[a];
      jet.rx1[a] = -g->gamma * scale * hx[a] * h1k;
      jet.rk0[a] = scale * hk[a];
      jet.rk1[a] = -g->gamma * scale * hk[a] * h1x;
      scale *= -g->gamma;
    }
    return jet;
  }
  const auto& w = std::get<GridWigner>(state);
  jet.value = w.value(x, k);
  const double inv = 1.0 / jet.value;
  for (std::size_t a = 0; a < n; ++a) {
    const int o = static_cast<int>(a);
    jet.rx0[a] = w.partial(o, 0, x, k, fd_accuracy) * inv;
    jet.rx1[a] = w.partial(o, 1, x, k, fd_accuracy) * inv;
    jet.rk0[a] = w.partial(0, o, x, k, fd_accuracy) * inv;
    jet.rk1[a] = w.partial(1, o, x, k, fd_accuracy) * inv;
  }
  return jet;
}

}  // namespace wigflow
