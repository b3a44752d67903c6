/**
 *  @file   grid.hpp
 *  @brief  Uniform cell-centered phase-space grid
 */
#pragma once

#include <cstddef>
#include <string>

#include "wigflow/error.hpp"

namespace wigflow {

/// Cell-centered nodes x_i = x_min + (i + 1/2) dx; integrals are plain
/// sums times the cell area (the trapezoid rule on this layout).
class PhaseGrid {
 public:
  PhaseGrid(double x_min, double x_max, double k_min, double k_max, std::size_t nx, std::size_t nk)
      : x_min_(x_min), x_max_(x_max), k_min_(k_min), k_max_(k_max), nx_(nx), nk_(nk) {
    if (!(x_min < x_max) || !(k_min < k_max)) {
      throw Error(ErrorKind::invalid_param, "grid bounds must be ordered");
    }
    if (nx < 8 || nk < 8) throw Error(ErrorKind::invalid_param, "grid needs at least 8 samples per axis");
  }

  /// Square grid of half-width `half` around (x0, k0).
  static PhaseGrid centered(double x0, double k0, double half, std::size_t n) {
    return PhaseGrid(x0 - half, x0 + half, k0 - half, k0 + half, n, n);
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double k_min() const { return k_min_; }
  double k_max() const { return k_max_; }
  std::size_t nx() const { return nx_; }
  std::size_t nk() const { return nk_; }
  std::size_t size() const { return nx_ * nk_; }

  double dx() const { return (x_max_ - x_min_) / static_cast<double>(nx_); }
  double dk() const { return (k_max_ - k_min_) / static_cast<double>(nk_); }
  double cell_area() const { return dx() * dk(); }

  double x(std::size_t i) const { return x_min_ + (static_cast<double>(i) + 0.5) * dx(); }
  double k(std::size_t j) const { return k_min_ + (static_cast<double>(j) + 0.5) * dk(); }

  /// Row-major, k-major storage index: k is the slow axis.
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx_ + i; }

 private:
  double x_min_, x_max_, k_min_, k_max_;
  std::size_t nx_, nk_;
};

}  // namespace wigflow
