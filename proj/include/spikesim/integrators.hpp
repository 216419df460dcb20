#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spikesim/current.hpp"
#include "spikesim/errors.hpp"
#include "spikesim/model.hpp"

namespace spikesim {

enum class Scheme { euler, hybrid_fixed, hybrid_adaptive, oracle };
enum class SpikeInterp { first_exceedance, linear };
enum class Branch { time, phase, reset };
enum class Termination { horizon, event_limit };

std::string_view to_string(Scheme scheme) noexcept;
std::string_view to_string(SpikeInterp interp) noexcept;
std::string_view to_string(Branch branch) noexcept;
std::string_view to_string(Termination termination) noexcept;
std::optional<Scheme> parse_scheme(std::string_view name) noexcept;
std::optional<SpikeInterp> parse_spike_interp(std::string_view name) noexcept;

struct SolverConfig {
  Scheme scheme = Scheme::hybrid_adaptive;
  double theta = 30.0;
  double M = 1.0;
  double dt = 0.01;
  double dv = 0.1;
  double epsilon = 0.01;
  double max_dt = 1.0;  // DT
  double max_dv = 1.0;  // DV
  double oracle_tol = 1e-10;
  double t_end = 1000.0;
  SpikeInterp spike_interp = SpikeInterp::first_exceedance;

  double min_step = 1e-12;
  std::int64_t max_floored_steps = 10'000'000;
  std::size_t max_events = 1'000'000;
  /// Keep every k-th step in the trajectory; 0 keeps none. Resets are always kept when k > 0.
  std::size_t record_every = 0;
};

/// Throws Error{config} on an invalid combination. `model_a` enables the
/// dt * a < 1 check of the Euler scheme.
void validate(const SolverConfig& config, double model_a = 0.0);

struct SpikeEvent {
  double spike_time = 0.0;
  double w_at_spike = 0.0;

  friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

struct SpikeTrain {
  std::vector<SpikeEvent> events;
  std::int64_t step_count = 0;
  Termination terminated_by = Termination::horizon;

  friend bool operator==(const SpikeTrain&, const SpikeTrain&) = default;
};

struct TrajectoryRow {
  double t = 0.0;
  double v = 0.0;
  double w = 0.0;
  Branch branch = Branch::time;
};

struct SimulationResult {
  std::vector<TrajectoryRow> trajectory;
  SpikeTrain train;
  SimState final_state;
};

// ---------------------------------------------------------------------------
// Single steps

template <SpikingModel Model>
SimState euler_step(const Model& model, const InputCurrent& current, const SimState& s, double tau) {
  if (tau == 0.0) return s;
  const double G = model.F(s.v) - s.w + current.value(s.t);
  const double h = model.a * (model.b * s.v - s.w);
  SimState out{s.t + tau, s.v + tau * G, s.w + tau * h};
  if (!is_finite(out)) throw Error(ErrorKind::divergence, "euler step produced a non-finite state");
  return out;
}

template <SpikingModel Model>
SimState phase_step(const Model& model, const InputCurrent& current, const SimState& s,
                    double dv_signed) {
  if (dv_signed == 0.0) return s;
  const double G = model.F(s.v) - s.w + current.value(s.t);
  if (G == 0.0) throw Error(ErrorKind::invertibility, "phase step with v' = 0");
  const double h = model.a * (model.b * s.v - s.w);
  SimState out{s.t + dv_signed / G, s.v + dv_signed, s.w + dv_signed * h / G};
  if (!is_finite(out)) throw Error(ErrorKind::divergence, "phase step produced a non-finite state");
  return out;
}

template <SpikingModel Model>
SimState apply_reset(const Model& model, const SimState& s) noexcept {
  return {s.t, static_cast<double>(model.c), s.w + model.d};
}

struct AdaptiveStep {
  Branch branch = Branch::time;
  double step = 0.0;
  bool floored = false;
};

template <SpikingModel Model>
AdaptiveStep adaptive_step(const Model& model, const InputCurrent& current, const SimState& s,
                           const SolverConfig& config) {
  const double a = model.a;
  const double b = model.b;
  const double G = model.F(s.v) - s.w + current.value(s.t);
  const double Fp = model.dF(s.v);
  const double Ip = current.derivative(s.t);
  const double h = a * (b * s.v - s.w);

  AdaptiveStep out;
  double curvature = 0.0;
  double cap = 0.0;
  if (std::abs(G) < config.M) {
    out.branch = Branch::time;
    const double vpp = Fp * G - h + Ip;
    const double wpp = a * b * G - h;
    curvature = std::max(std::abs(vpp), std::abs(wpp));
    cap = config.max_dt;
  } else {
    out.branch = Branch::phase;
    const double G2 = G * G;
    const double G3 = G2 * G;
    const double Wpp = a * b / G - h / G2 - Fp * h / G2 - h * (h + Ip) / G3;
    const double Tpp = -(Fp * G - h + Ip) / G3;
    curvature = std::max(std::abs(Wpp), std::abs(Tpp));
    cap = config.max_dv;
  }
  if (!std::isfinite(curvature)) throw Error(ErrorKind::step, "non-finite curvature in step rule");
  out.step = curvature > 0.0 ? std::min(config.epsilon / curvature, cap) : cap;
  if (out.step < config.min_step) {
    out.step = config.min_step;
    out.floored = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Drivers

namespace detail {

struct StepOutcome {
  SimState next;
  Branch branch = Branch::time;
  bool floored = false;
};

inline bool at_horizon(double t, double t_end) {
  return t_end - t <= 1e-9 * std::max(1.0, std::abs(t_end));
}

// Time step of at most tau that never crosses `limit`; lands exactly on it when clamped.
template <SpikingModel Model>
SimState clamped_euler(const Model& model, const InputCurrent& current, const SimState& s,
                       double tau, double limit) {
  if (s.t + tau >= limit) {
    SimState out = euler_step(model, current, s, limit - s.t);
    out.t = limit;
    return out;
  }
  return euler_step(model, current, s, tau);
}

// Phase step toward the cutoff (partial when it would pass theta). Falls back
// to a time step when the phase step would run past `limit`.
template <SpikingModel Model>
StepOutcome hybrid_phase(const Model& model, const InputCurrent& current, const SimState& s,
                         double dv, double G, double theta, double limit) {
  double dv_signed = G > 0.0 ? dv : -dv;
  bool lands = false;
  if (G > 0.0 && s.v + dv_signed >= theta) {
    dv_signed = theta - s.v;
    lands = true;
  }
  if (s.t + dv_signed / G > limit) {
    return {clamped_euler(model, current, s, limit - s.t, limit), Branch::time, false};
  }
  SimState next = phase_step(model, current, s, dv_signed);
  if (lands) next.v = theta;
  return {next, Branch::phase, false};
}

template <SpikingModel Model>
class EulerStepper {
 public:
  EulerStepper(const Model& m, const InputCurrent& c, const SolverConfig& cfg)
      : model_(m), current_(c), cfg_(cfg) {}
  StepOutcome step(const SimState& s, double limit) {
    return {clamped_euler(model_, current_, s, cfg_.dt, limit), Branch::time, false};
  }
  void on_reset() {}

 private:
  const Model& model_;
  const InputCurrent& current_;
  const SolverConfig& cfg_;
};

template <SpikingModel Model>
class HybridFixedStepper {
 public:
  HybridFixedStepper(const Model& m, const InputCurrent& c, const SolverConfig& cfg)
      : model_(m), current_(c), cfg_(cfg) {}
  StepOutcome step(const SimState& s, double limit) {
    const double G = model_.F(s.v) - s.w + current_.value(s.t);
    if (std::abs(G) < cfg_.M) {
      return {clamped_euler(model_, current_, s, cfg_.dt, limit), Branch::time, false};
    }
    return hybrid_phase(model_, current_, s, cfg_.dv, G, cfg_.theta, limit);
  }
  void on_reset() {}

 private:
  const Model& model_;
  const InputCurrent& current_;
  const SolverConfig& cfg_;
};

template <SpikingModel Model>
class HybridAdaptiveStepper {
 public:
  HybridAdaptiveStepper(const Model& m, const InputCurrent& c, const SolverConfig& cfg)
      : model_(m), current_(c), cfg_(cfg) {}
  StepOutcome step(const SimState& s, double limit) {
    const AdaptiveStep st = adaptive_step(model_, current_, s, cfg_);
    if (st.branch == Branch::time) {
      return {clamped_euler(model_, current_, s, st.step, limit), Branch::time, st.floored};
    }
    const double G = model_.F(s.v) - s.w + current_.value(s.t);
    StepOutcome out = hybrid_phase(model_, current_, s, st.step, G, cfg_.theta, limit);
    out.floored = st.floored;
    return out;
  }
  void on_reset() {}

 private:
  const Model& model_;
  const InputCurrent& current_;
  const SolverConfig& cfg_;
};

// Classical RK4 with step doubling in both branches. The time branch
// integrates (v, w) in t; the phase branch integrates (T, W) in v.
template <SpikingModel Model>
class OracleStepper {
 public:
  OracleStepper(const Model& m, const InputCurrent& c, const SolverConfig& cfg)
      : model_(m), current_(c), cfg_(cfg) {}

  StepOutcome step(const SimState& s, double limit) {
    const double G = model_.F(s.v) - s.w + current_.value(s.t);
    if (force_phase_) {
      if (G > 0.0) {
        if (auto out = phase(s, G, limit)) return *out;
      }
      force_phase_ = false;
    } else if (std::abs(G) >= cfg_.M) {
      if (auto out = phase(s, G, limit)) return *out;
    }
    return time(s, limit);
  }
  void on_reset() { force_phase_ = false; }

 private:
  using Vec = std::array<double, 2>;

  static double err_norm(const Vec& fine, const Vec& coarse) {
    double e = 0.0;
    for (int i = 0; i < 2; ++i) {
      e = std::max(e, std::abs(fine[i] - coarse[i]) / 15.0 / std::max(1.0, std::abs(fine[i])));
    }
    return e;
  }

  double next_size(double h, double err) const {
    const double factor =
        err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(cfg_.oracle_tol / err, 0.2), 0.1, 4.0);
    return h * factor;
  }

  void check_size(double h) const {
    if (std::abs(h) < cfg_.min_step) {
      throw Error(ErrorKind::oracle, "reference solver cannot reach oracle_tol above the step floor");
    }
  }

  // d(v, w)/dt
  Vec time_rhs(double t, const Vec& y) const {
    return {model_.F(y[0]) - y[1] + current_.value(t), model_.a * (model_.b * y[0] - y[1])};
  }

  Vec time_rk4(double t, const Vec& y, double h) const {
    auto add = [](const Vec& x, const Vec& k, double c) { return Vec{x[0] + c * k[0], x[1] + c * k[1]}; };
    const Vec k1 = time_rhs(t, y);
    const Vec k2 = time_rhs(t + 0.5 * h, add(y, k1, 0.5 * h));
    const Vec k3 = time_rhs(t + 0.5 * h, add(y, k2, 0.5 * h));
    const Vec k4 = time_rhs(t + h, add(y, k3, h));
    return {y[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
  }

  // d(T, W)/dv; the current is frozen over a step because steps never cross a jump.
  Vec phase_rhs(double v, const Vec& y, double I) const {
    const double G = model_.F(v) - y[1] + I;
    if (G == 0.0) throw Error(ErrorKind::invertibility, "oracle phase step with v' = 0");
    return {1.0 / G, model_.a * (model_.b * v - y[1]) / G};
  }

  Vec phase_rk4(double v, const Vec& y, double h, double I) const {
    auto add = [](const Vec& x, const Vec& k, double c) { return Vec{x[0] + c * k[0], x[1] + c * k[1]}; };
    const Vec k1 = phase_rhs(v, y, I);
    const Vec k2 = phase_rhs(v + 0.5 * h, add(y, k1, 0.5 * h), I);
    const Vec k3 = phase_rhs(v + 0.5 * h, add(y, k2, 0.5 * h), I);
    const Vec k4 = phase_rhs(v + h, add(y, k3, h), I);
    return {y[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
  }

  StepOutcome time(const SimState& s, double limit) {
    const Vec y{s.v, s.w};
    for (;;) {
      double h = h_time_;
      const bool clamped = s.t + h >= limit;
      if (clamped) h = limit - s.t;
      check_size(h);
      const Vec coarse = time_rk4(s.t, y, h);
      const Vec mid = time_rk4(s.t, y, 0.5 * h);
      const Vec fine = time_rk4(s.t + 0.5 * h, mid, 0.5 * h);
      const double err = err_norm(fine, coarse);
      if (!std::isfinite(err) || err > cfg_.oracle_tol) {
        h_time_ = std::isfinite(err) ? next_size(h, err) : 0.1 * h;
        continue;
      }
      const Vec y_new{fine[0] + (fine[0] - coarse[0]) / 15.0, fine[1] + (fine[1] - coarse[1]) / 15.0};
      if (y_new[0] >= cfg_.theta) {
        const double G = model_.F(s.v) - s.w + current_.value(s.t);
        if (G > 0.0) {
          force_phase_ = true;
          if (auto out = phase(s, G, limit)) return *out;
          force_phase_ = false;
        }
      }
      if (!clamped) h_time_ = next_size(h, err);
      const SimState next{clamped ? limit : s.t + h, y_new[0], y_new[1]};
      if (!is_finite(next)) throw Error(ErrorKind::divergence, "oracle produced a non-finite state");
      return {next, Branch::time, false};
    }
  }

  std::optional<StepOutcome> phase(const SimState& s, double G, double limit) {
    const double dir = G > 0.0 ? 1.0 : -1.0;
    const double I = current_.value(s.t);
    const Vec y{s.t, s.w};
    for (;;) {
      double h = dir * std::abs(h_phase_);
      bool lands = false;
      if (dir > 0.0 && s.v + h >= cfg_.theta) {
        h = cfg_.theta - s.v;
        lands = true;
      }
      check_size(h);
      std::optional<Vec> coarse, fine;
      try {
        coarse = phase_rk4(s.v, y, h, I);
        const Vec mid = phase_rk4(s.v, y, 0.5 * h, I);
        fine = phase_rk4(s.v + 0.5 * h, mid, 0.5 * h, I);
      } catch (const Error&) {
        h_phase_ = 0.1 * h;
        continue;
      }
      const double err = err_norm(*fine, *coarse);
      if (!std::isfinite(err) || err > cfg_.oracle_tol) {
        h_phase_ = std::isfinite(err) ? next_size(h, err) : 0.1 * h;
        continue;
      }
      const Vec y_new{(*fine)[0] + ((*fine)[0] - (*coarse)[0]) / 15.0,
                      (*fine)[1] + ((*fine)[1] - (*coarse)[1]) / 15.0};
      if (!(y_new[0] > s.t) || y_new[0] > limit) return std::nullopt;
      if (!lands) h_phase_ = next_size(h, err);
      SimState next{y_new[0], lands ? cfg_.theta : s.v + h, y_new[1]};
      if (!is_finite(next)) throw Error(ErrorKind::divergence, "oracle produced a non-finite state");
      return StepOutcome{next, Branch::phase, false};
    }
  }

  const Model& model_;
  const InputCurrent& current_;
  const SolverConfig& cfg_;
  double h_time_ = 1e-3;
  double h_phase_ = 1e-3;
  bool force_phase_ = false;
};

template <SpikingModel Model, class Stepper>
SimulationResult run(const Model& model, const InputCurrent& current, SimState s,
                     const SolverConfig& cfg, Stepper stepper) {
  if (!is_finite(s)) throw Error(ErrorKind::config, "initial state must be finite");
  SimulationResult res;
  auto& train = res.train;
  const bool record = cfg.record_every > 0;
  if (record) res.trajectory.push_back({s.t, s.v, s.w, Branch::time});

  auto spike = [&](const SimState& before, const SimState& after) -> bool {
    SpikeEvent ev{after.t, after.w};
    if (cfg.spike_interp == SpikeInterp::linear && after.v > before.v && before.v < cfg.theta) {
      const double f = (cfg.theta - before.v) / (after.v - before.v);
      ev = {before.t + f * (after.t - before.t), before.w + f * (after.w - before.w)};
    }
    train.events.push_back(ev);
    s = apply_reset(model, after);
    stepper.on_reset();
    if (record) res.trajectory.push_back({s.t, s.v, s.w, Branch::reset});
    return train.events.size() >= cfg.max_events;
  };

  if (s.v >= cfg.theta && spike(s, s)) {
    train.terminated_by = Termination::event_limit;
    res.final_state = s;
    return res;
  }

  std::int64_t floored_run = 0;
  while (!at_horizon(s.t, cfg.t_end)) {
    const double limit = std::min(cfg.t_end, current.next_jump_after(s.t));
    const StepOutcome out = stepper.step(s, limit);
    ++train.step_count;
    floored_run = out.floored ? floored_run + 1 : 0;
    if (floored_run > cfg.max_floored_steps) {
      throw Error(ErrorKind::stagnation, "step size stuck at the configured floor");
    }
    const SimState before = s;
    s = out.next;
    if (record && train.step_count % static_cast<std::int64_t>(cfg.record_every) == 0) {
      res.trajectory.push_back({s.t, s.v, s.w, out.branch});
    }
    if (s.v >= cfg.theta && spike(before, s)) {
      train.terminated_by = Termination::event_limit;
      break;
    }
  }
  res.final_state = s;
  return res;
}

}  // namespace detail

template <SpikingModel Model>
SimulationResult simulate_euler(const Model& model, const InputCurrent& current, const SimState& init,
                                const SolverConfig& config) {
  validate(config, model.a);
  return detail::run(model, current, init, config,
                     detail::EulerStepper<Model>(model, current, config));
}

template <SpikingModel Model>
SimulationResult simulate_hybrid_fixed(const Model& model, const InputCurrent& current,
                                       const SimState& init, const SolverConfig& config) {
  validate(config, model.a);
  return detail::run(model, current, init, config,
                     detail::HybridFixedStepper<Model>(model, current, config));
}

template <SpikingModel Model>
SimulationResult simulate_hybrid_adaptive(const Model& model, const InputCurrent& current,
                                          const SimState& init, const SolverConfig& config) {
  validate(config, model.a);
  return detail::run(model, current, init, config,
                     detail::HybridAdaptiveStepper<Model>(model, current, config));
}

template <SpikingModel Model>
SimulationResult reference_solve(const Model& model, const InputCurrent& current, const SimState& init,
                                 const SolverConfig& config) {
  validate(config, model.a);
  return detail::run(model, current, init, config,
                     detail::OracleStepper<Model>(model, current, config));
}

/// Dispatches on config.scheme.
template <SpikingModel Model>
SimulationResult simulate(const Model& model, const InputCurrent& current, const SimState& init,
                          const SolverConfig& config) {
  switch (config.scheme) {
    case Scheme::euler: return simulate_euler(model, current, init, config);
    case Scheme::hybrid_fixed: return simulate_hybrid_fixed(model, current, init, config);
    case Scheme::hybrid_adaptive: return simulate_hybrid_adaptive(model, current, init, config);
    case Scheme::oracle: return reference_solve(model, current, init, config);
  }
  throw Error(ErrorKind::config, "unknown scheme");
}

}  // namespace spikesim
