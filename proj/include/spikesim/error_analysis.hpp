#pragma once

#include <vector>

#include "spikesim/current.hpp"
#include "spikesim/integrators.hpp"
#include "spikesim/model.hpp"

namespace spikesim {

/// Pure growth classes used by the first-order error analysis: F(v) = v^m or F(v) = e^v.
struct ModelClass {
  enum class Kind { power, exponential };
  Kind kind = Kind::power;
  double m = 2.0;

  static ModelClass power(double m) { return {Kind::power, m}; }
  static ModelClass exponential() { return {Kind::exponential, 0.0}; }

  /// Class of a full model (its dominant term).
  static ModelClass of(const ModelSpec& model);
};

/// First-order v-error coefficient A(v) along the v-parameterised orbit started at v0.
double error_A(const ModelClass& cls, double v, double v0);

/// First-order w-error coefficient B(v), by adaptive Simpson quadrature
/// (absolute tolerance 1e-10, depth 60).
double error_B(const ModelClass& cls, double v, double v0, double a, double b);

/// Spike-time delay of first-exceedance Euler on y' = F(y), in time units.
double spike_time_delay(const ModelClass& cls, double theta, double y0, double tau);

/// Blow-up time t* of y' = F(y), y(0) = y0.
double onedim_blowup_time(const ModelClass& cls, double y0);

/// Exact solution of y' = F(y), y(0) = y0, for t < t*.
double onedim_blowup_solution(const ModelClass& cls, double y0, double t);

struct ErrorCurvePoint {
  double v = 0.0;
  double A = 0.0;
  double B = 0.0;
};

std::vector<ErrorCurvePoint> error_vs_cutoff_curve(const ModelClass& cls, double v0, double a, double b,
                                                   const std::vector<double>& thetas);

struct ErrorReport {
  double spike_time_error = 0.0;  // scheme minus oracle
  double w_at_spike_error = 0.0;  // scheme minus oracle
  double theta = 0.0;
  double tau_or_eps = 0.0;
};

/// First-spike differences between `scheme_config` and the reference solver run
/// from the same initial state. Throws Error{measurement} when either run has no spike.
ErrorReport measure_empirical_error(const ModelSpec& model, const InputCurrent& current,
                                    const SimState& init, const SolverConfig& scheme_config,
                                    double oracle_tol);

}  // namespace spikesim
