#include "spikesim/integrators.hpp"

namespace spikesim {

std::string_view to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::euler: return "euler";
    case Scheme::hybrid_fixed: return "hybrid-fixed";
    case Scheme::hybrid_adaptive: return "hybrid-adaptive";
    case Scheme::oracle: return "oracle";
  }
  return "unknown";
}

std::string_view to_string(SpikeInterp interp) noexcept {
  return interp == SpikeInterp::linear ? "linear" : "first-exceedance";
}

std::string_view to_string(Branch branch) noexcept {
  switch (branch) {
    case Branch::time: return "time";
    case Branch::phase: return "phase";
    case Branch::reset: return "reset";
  }
  return "unknown";
}

std::string_view to_string(Termination termination) noexcept {
  return termination == Termination::horizon ? "horizon" : "event-limit";
}

std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
  if (name == "euler") return Scheme::euler;
  if (name == "hybrid-fixed") return Scheme::hybrid_fixed;
  if (name == "hybrid-adaptive") return Scheme::hybrid_adaptive;
  if (name == "oracle") return Scheme::oracle;
  return std::nullopt;
}

std::optional<SpikeInterp> parse_spike_interp(std::string_view name) noexcept {
  if (name == "first-exceedance") return SpikeInterp::first_exceedance;
  if (name == "linear") return SpikeInterp::linear;
  return std::nullopt;
}

void validate(const SolverConfig& c, double model_a) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::config, msg); };
  auto positive = [&](double x, const char* name) {
    if (!(std::isfinite(x) && x > 0.0)) fail(std::string("solver.") + name + " must be a finite value > 0");
  };
  if (!std::isfinite(c.theta)) fail("solver.theta must be finite");
  if (!(std::isfinite(c.t_end) && c.t_end >= 0.0)) fail("solver.t_end must be finite and >= 0");
  auto switch_value = [&](double x) {
    if (!(x > 0.0)) fail("solver.M must be > 0 (inf disables the phase branch)");
  };
  positive(c.min_step, "min_step");
  if (c.max_floored_steps < 0) fail("solver.max_floored_steps must be >= 0");
  if (c.max_events == 0) fail("solver.max_events must be >= 1");
  switch (c.scheme) {
    case Scheme::euler:
      positive(c.dt, "dt");
      if (model_a > 0.0 && c.dt * model_a >= 1.0) {
        fail("euler requires dt * a < 1 (monotone iterates in the spiking zone); got dt * a = " +
             std::to_string(c.dt * model_a));
      }
      break;
    case Scheme::hybrid_fixed:
      switch_value(c.M);
      positive(c.dt, "dt");
      positive(c.dv, "dv");
      break;
    case Scheme::hybrid_adaptive:
      switch_value(c.M);
      positive(c.epsilon, "epsilon");
      positive(c.max_dt, "DT");
      positive(c.max_dv, "DV");
      break;
    case Scheme::oracle:
      switch_value(c.M);
      positive(c.oracle_tol, "oracle_tol");
      break;
  }
}

}  // namespace spikesim
