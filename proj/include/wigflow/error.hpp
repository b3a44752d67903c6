/**
 *  @file   error.hpp
 *  @brief  Error kinds raised by the wigflow evaluators
 */
#pragma once

#include <stdexcept>
#include <string>

namespace wigflow {

enum class ErrorKind {
  invalid_param,
  unsupported_order,
  quadrature_divergence,
  negative_density,
  invalid_beta,
  non_convergence,
  unsupported_model,
  unsupported_center,
  undefined_region,
  undefined_on_path,
  non_quantized,
  no_closure,
  equilibrium_start,
  io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_param: return "InvalidParam";
    case ErrorKind::unsupported_order: return "UnsupportedOrder";
    case ErrorKind::quadrature_divergence: return "QuadratureDivergence";
    case ErrorKind::negative_density: return "NegativeDensity";
    case ErrorKind::invalid_beta: return "InvalidBeta";
    case ErrorKind::non_convergence: return "NonConvergence";
    case ErrorKind::unsupported_model: return "UnsupportedModel";
    case ErrorKind::unsupported_center: return "UnsupportedCenter";
    case ErrorKind::undefined_region: return "UndefinedRegion";
    case ErrorKind::undefined_on_path: return "UndefinedOnPath";
    case ErrorKind::non_quantized: return "NonQuantized";
    case ErrorKind::no_closure: return "NoClosure";
    case ErrorKind::equilibrium_start: return "EquilibriumStart";
    case ErrorKind::io: return "IOError";
  }
  return "Unknown";
}

/// Single exception type; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// True for failures of the numerics themselves (as opposed to bad input).
inline bool is_numeric_failure(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::quadrature_divergence:
    case ErrorKind::non_convergence:
    case ErrorKind::undefined_region:
    case ErrorKind::undefined_on_path:
    case ErrorKind::non_quantized:
    case ErrorKind::no_closure:
    case ErrorKind::equilibrium_start:
    case ErrorKind::negative_density:
      return true;
    default:
      return false;
  }
}

}  // namespace wigflow
