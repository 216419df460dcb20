#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spikesim {

enum class ErrorKind {
  range,          // argument outside the evaluable domain (e.g. exponential overflow guard)
  divergence,     // non-finite state produced by a step
  analysis,       // root finding / phase-plane analysis failure
  invertibility,  // phase-plane step with vanishing v'
  step,           // non-finite curvature in the adaptive step rule
  stagnation,     // too many consecutive floored steps
  oracle,         // reference solver cannot reach its tolerance
  numerical,      // quadrature non-convergence
  argument,       // invalid argument to a closed-form routine
  data,           // empty or malformed data (spike trains, CSV)
  measurement,    // no spike to measure
  config,         // configuration parse / validation failure
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception of the library. The kind is machine readable and ends up in
/// the report JSON when a run fails.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Errors caused by user input rather than by the numerics.
inline bool is_validation_error(ErrorKind kind) noexcept {
  return kind == ErrorKind::config || kind == ErrorKind::data || kind == ErrorKind::argument;
}

}  // namespace spikesim
