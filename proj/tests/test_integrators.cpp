#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "spikesim/errors.hpp"
#include "spikesim/integrators.hpp"
#include "spikesim/phase_plane.hpp"

using namespace spikesim;

namespace {

ModelSpec quad(double a, double b) { return ModelSpec::canonical_quadratic(a, b, 0.0, 1.0); }

ModelSpec izh() { return ModelSpec::izhikevich(0.04, 5.0, 140.0, 0.02, 0.19, -59.9, 1.15); }

SolverConfig burst_config(Scheme scheme) {
  SolverConfig c;
  c.scheme = scheme;
  c.theta = 30.0;
  c.M = 1.0;
  c.dt = 0.01;
  c.epsilon = 0.01;
  c.max_dt = 1.0;
  c.max_dv = 1.0;
  c.t_end = 1000.0;
  return c;
}

const SimState kBurstInit{0.0, -70.0, -13.3};

// Minimal model satisfying the concept, used to check the templates are not tied to ModelSpec.
struct Cubicish {
  double a = 0.0, b = 0.0, c = -1.0, d = 1.0;
  double F(double v) const { return v * v + 0.1 * v; }
  double dF(double v) const { return 2 * v + 0.1; }
};

}  // namespace

TEST(EulerStep, HandArithmetic) {
  const auto s = euler_step(quad(1, 1), InputCurrent::constant(0), {0, 1, 0}, 0.1);
  EXPECT_DOUBLE_EQ(s.t, 0.1);
  EXPECT_DOUBLE_EQ(s.v, 1.1);
  EXPECT_DOUBLE_EQ(s.w, 0.1);
}

TEST(EulerStep, ZeroStepIsIdentity) {
  const SimState s{3.0, -2.0, 0.7};
  EXPECT_EQ(euler_step(izh(), InputCurrent::constant(7.6), s, 0.0), s);
}

TEST(EulerStep, IzhikevichFromOrigin) {
  const auto s = euler_step(izh(), InputCurrent::constant(7.6), {0, 0, 0}, 0.1);
  EXPECT_DOUBLE_EQ(s.t, 0.1);
  EXPECT_NEAR(s.v, 14.76, 1e-12);
  EXPECT_DOUBLE_EQ(s.w, 0.0);
}

TEST(EulerStep, DivergenceError) {
  try {
    euler_step(quad(0, 0), InputCurrent::constant(0), {0, 1e200, 0}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::divergence);
  }
}

TEST(PhaseStep, HandArithmetic) {
  const auto s = phase_step(quad(1, 1), InputCurrent::constant(0), {0, 2, 0}, 0.1);
  EXPECT_DOUBLE_EQ(s.t, 0.025);
  EXPECT_DOUBLE_EQ(s.v, 2.1);
  EXPECT_DOUBLE_EQ(s.w, 0.05);
}

TEST(PhaseStep, ZeroStepIsIdentity) {
  const SimState s{1.0, 2.0, 0.5};
  EXPECT_EQ(phase_step(quad(1, 1), InputCurrent::constant(0), s, 0.0), s);
}

TEST(PhaseStep, TimeIncrementShrinksAsVGrows) {
  const auto m = quad(0, 0);
  const auto I = InputCurrent::constant(0);
  SimState s{0, 2, 0};
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 50; ++i) {
    const auto next = phase_step(m, I, s, 0.5);
    const double dt = next.t - s.t;
    EXPECT_GT(dt, 0.0);
    EXPECT_LT(dt, prev);
    prev = dt;
    s = next;
  }
}

TEST(PhaseStep, NegativeFlowStillAdvancesTime) {
  const auto s = phase_step(quad(0, 0), InputCurrent::constant(-10), {0, 1, 0}, -0.1);  // G = -9
  EXPECT_GT(s.t, 0.0);
  EXPECT_DOUBLE_EQ(s.v, 0.9);
}

TEST(PhaseStep, ZeroDenominator) {
  try {
    phase_step(quad(1, 1), InputCurrent::constant(0), {0, 1, 1}, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invertibility);
  }
}

TEST(ApplyReset, Izhikevich) {
  const auto s = apply_reset(izh(), {5, 30.2, 2.0});
  EXPECT_DOUBLE_EQ(s.t, 5.0);
  EXPECT_DOUBLE_EQ(s.v, -59.9);
  EXPECT_DOUBLE_EQ(s.w, 3.15);
}

TEST(ApplyReset, ZeroIncrementOnlyMovesV) {
  auto m = izh();
  m.d = 0.0;
  const auto s = apply_reset(m, {5, 30.2, 2.0});
  EXPECT_DOUBLE_EQ(s.w, 2.0);
  EXPECT_DOUBLE_EQ(s.v, -59.9);
}

TEST(AdaptiveStep, HandEvaluatedTimeBranch) {
  SolverConfig c;
  c.M = 100.0;
  c.epsilon = 0.07;
  c.max_dt = 1.0;
  const auto st = adaptive_step(quad(1, 1), InputCurrent::constant(0), {0, 2, 0}, c);
  EXPECT_EQ(st.branch, Branch::time);
  EXPECT_DOUBLE_EQ(st.step, 0.07 / 14.0);
  c.max_dt = 1e-3;
  EXPECT_DOUBLE_EQ(adaptive_step(quad(1, 1), InputCurrent::constant(0), {0, 2, 0}, c).step, 1e-3);
}

TEST(AdaptiveStep, NoAdaptationLeavesOnlyVCurvature) {
  SolverConfig c;
  c.M = 1e9;
  c.epsilon = 0.01;
  c.max_dt = 10.0;
  const auto m = quad(0, 0);
  const auto st = adaptive_step(m, InputCurrent::constant(1.0), {0, 3, 0.5}, c);
  const double G = 9 - 0.5 + 1.0;
  EXPECT_DOUBLE_EQ(st.step, 0.01 / (m.dF(3) * G));
}

TEST(AdaptiveStep, PhaseBranchAgainstFormula) {
  SolverConfig c;
  c.M = 1.0;
  c.epsilon = 0.01;
  c.max_dv = 100.0;
  const double a = 0.3, b = 0.8, v = 3.0, w = 0.5, I = 0.2;
  const auto st = adaptive_step(quad(a, b), InputCurrent::constant(I), {0, v, w}, c);
  ASSERT_EQ(st.branch, Branch::phase);
  const double G = v * v - w + I, h = a * (b * v - w), Fp = 2 * v;
  const double Wpp = a * b / G - h / (G * G) - Fp * h / (G * G) - h * h / (G * G * G);
  const double Tpp = -(Fp * G - h) / (G * G * G);
  EXPECT_DOUBLE_EQ(st.step, 0.01 / std::max(std::abs(Wpp), std::abs(Tpp)));
}

TEST(AdaptiveStep, StepScalesWithEpsilon) {
  SolverConfig c;
  c.M = 1.0;
  c.max_dt = c.max_dv = 1e6;
  c.epsilon = 0.01;
  const auto m = izh();
  const auto I = InputCurrent::constant(7.6);
  for (SimState s : {SimState{0, -70, -13.3}, SimState{0, -60, -12}, SimState{0, 10, -5}}) {
    const double big = adaptive_step(m, I, s, c).step;
    c.epsilon = 0.001;
    EXPECT_NEAR(adaptive_step(m, I, s, c).step, big / 10.0, 1e-15 * big);
    c.epsilon = 0.01;
  }
}

TEST(AdaptiveStep, ZeroCurvatureGivesCap) {
  SolverConfig c;
  c.M = 1e9;
  c.max_dt = 0.25;
  // v'' = F'G - h = 0 at v = 0 with a = 0, and w'' = 0.
  const auto st = adaptive_step(quad(0, 0), InputCurrent::constant(1.0), {0, 0, 0}, c);
  EXPECT_DOUBLE_EQ(st.step, 0.25);
}

TEST(AdaptiveStep, FloorIsReported) {
  SolverConfig c;
  c.M = 1e9;
  c.epsilon = 1e-30;
  const auto st = adaptive_step(izh(), InputCurrent::constant(7.6), {0, -70, -13.3}, c);
  EXPECT_TRUE(st.floored);
  EXPECT_DOUBLE_EQ(st.step, c.min_step);
}

TEST(SimulateEuler, BurstConfigIsPeriodTwoAtSmallStep) {
  const auto res = simulate_euler(izh(), InputCurrent::constant(7.6), kBurstInit, burst_config(Scheme::euler));
  EXPECT_EQ(res.train.step_count, 100000);
  EXPECT_EQ(res.train.events.size(), 45u);
}

TEST(SimulateEuler, MonotoneIteratesInZone) {
  const auto m = quad(1, 1);
  const auto fp = analyze_fixed_points(m, 0.0);
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uv(1.0, 4.0), gap(0.0, 2.0);
  SolverConfig c;
  c.scheme = Scheme::euler;
  c.dt = 1e-3;
  c.theta = 100.0;
  c.t_end = 10.0;
  c.max_events = 1;
  c.record_every = 1;
  for (int k = 0; k < 20; ++k) {
    const double v0 = uv(rng);
    const SimState init{0, v0, v0 - gap(rng)};
    ASSERT_TRUE(in_spiking_zone(fp, m.b, init));
    const auto res = simulate_euler(m, InputCurrent::constant(0), init, c);
    ASSERT_EQ(res.train.events.size(), 1u);
    for (std::size_t i = 1; i < res.trajectory.size(); ++i) {
      const auto& p = res.trajectory[i - 1];
      const auto& q = res.trajectory[i];
      if (q.v >= c.theta || q.branch == Branch::reset) break;
      EXPECT_GT(q.v, p.v);
      EXPECT_GT(q.w, p.w);
    }
  }
}

TEST(SimulateEuler, RejectsLargeStep) {
  auto c = burst_config(Scheme::euler);
  c.dt = 60.0;  // dt * a = 1.2
  EXPECT_THROW(simulate_euler(izh(), InputCurrent::constant(7.6), kBurstInit, c), Error);
}

TEST(SimulateEuler, ZeroHorizon) {
  auto c = burst_config(Scheme::euler);
  c.t_end = 0.0;
  const auto res = simulate_euler(izh(), InputCurrent::constant(7.6), kBurstInit, c);
  EXPECT_EQ(res.train.step_count, 0);
  EXPECT_TRUE(res.train.events.empty());
}

TEST(SimulateEuler, InitialStateAboveCutoffSpikesImmediately) {
  auto c = burst_config(Scheme::euler);
  c.t_end = 1.0;
  const auto res = simulate_euler(izh(), InputCurrent::constant(7.6), {0, 35.0, 1.0}, c);
  ASSERT_FALSE(res.train.events.empty());
  EXPECT_DOUBLE_EQ(res.train.events[0].spike_time, 0.0);
  EXPECT_DOUBLE_EQ(res.train.events[0].w_at_spike, 1.0);
}

TEST(SimulateHybridFixed, InfiniteSwitchMatchesEulerBitForBit) {
  auto e = burst_config(Scheme::euler);
  auto h = burst_config(Scheme::hybrid_fixed);
  h.M = std::numeric_limits<double>::infinity();
  e.record_every = h.record_every = 1;
  const auto I = InputCurrent::constant(7.6);
  const auto re = simulate_euler(izh(), I, kBurstInit, e);
  const auto rh = simulate_hybrid_fixed(izh(), I, kBurstInit, h);
  EXPECT_EQ(re.train, rh.train);
  ASSERT_EQ(re.trajectory.size(), rh.trajectory.size());
  for (std::size_t i = 0; i < re.trajectory.size(); i += 997) {
    EXPECT_EQ(re.trajectory[i].v, rh.trajectory[i].v);
    EXPECT_EQ(re.trajectory[i].w, rh.trajectory[i].w);
  }
}

TEST(SimulateHybridFixed, OneDimensionalCrossingConverges) {
  // a = 0, w = 0: v' = v^2, v(0) = 1 reaches 100 at t = 0.99.
  SolverConfig c;
  c.scheme = Scheme::hybrid_fixed;
  c.M = 1.0;
  c.dt = 1e-3;
  c.theta = 100.0;
  c.t_end = 2.0;
  c.max_events = 1;
  double prev_err = std::numeric_limits<double>::infinity();
  for (double dv : {1e-1, 1e-2, 1e-3, 1e-4}) {
    c.dv = dv;
    const auto res = simulate_hybrid_fixed(quad(0, 0), InputCurrent::constant(0), {0, 1, 0}, c);
    ASSERT_EQ(res.train.events.size(), 1u);
    const double err = std::abs(res.train.events[0].spike_time - 0.99);
    EXPECT_LT(err, prev_err);
    prev_err = err;
  }
  EXPECT_LT(prev_err, 1e-4);
}

TEST(SimulateHybridFixed, PhaseBranchLandsExactlyOnCutoff) {
  SolverConfig c;
  c.scheme = Scheme::hybrid_fixed;
  c.M = 1.0;
  c.dt = 1e-3;
  c.dv = 0.7;
  c.theta = 100.0;
  c.t_end = 2.0;
  c.record_every = 1;
  c.max_events = 1;
  const auto res = simulate_hybrid_fixed(quad(0, 0), InputCurrent::constant(0), {0, 1, 0}, c);
  ASSERT_GE(res.trajectory.size(), 2u);
  EXPECT_EQ(res.trajectory[res.trajectory.size() - 2].v, 100.0);
}

TEST(SimulateHybridAdaptive, BurstStepCountAndSpikes) {
  const auto res =
      simulate_hybrid_adaptive(izh(), InputCurrent::constant(7.6), kBurstInit, burst_config(Scheme::hybrid_adaptive));
  EXPECT_EQ(res.train.events.size(), 45u);
  EXPECT_GT(res.train.step_count, 500);
}

TEST(SimulateHybridAdaptive, HugeEpsilonHitsCaps) {
  auto c = burst_config(Scheme::hybrid_adaptive);
  c.epsilon = 1e12;
  c.max_dt = 0.05;
  c.max_dv = 0.5;
  const auto m = izh();
  const auto I = InputCurrent::constant(7.6);
  SimState s = kBurstInit;
  for (int i = 0; i < 200; ++i) {
    const auto st = adaptive_step(m, I, s, c);
    EXPECT_DOUBLE_EQ(st.step, st.branch == Branch::time ? 0.05 : 0.5);
    s = st.branch == Branch::time ? euler_step(m, I, s, st.step) : phase_step(m, I, s, st.step);
    if (s.v >= 25.0) break;
  }
}

TEST(SimulateHybridAdaptive, StagnationError) {
  auto c = burst_config(Scheme::hybrid_adaptive);
  c.epsilon = 1e-30;
  c.max_floored_steps = 100;
  try {
    simulate_hybrid_adaptive(izh(), InputCurrent::constant(7.6), kBurstInit, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::stagnation);
  }
}

TEST(ReferenceSolve, PowerBlowUpCrossingTime) {
  SolverConfig c;
  c.scheme = Scheme::oracle;
  c.theta = 1e6;
  c.t_end = 10.0;
  c.oracle_tol = 1e-12;
  c.max_events = 1;
  const auto res = reference_solve(quad(0, 0), InputCurrent::constant(0), {0, 1, 0}, c);
  ASSERT_EQ(res.train.events.size(), 1u);
  EXPECT_NEAR(res.train.events[0].spike_time, 1.0 - 1e-6, 1e-9);
}

TEST(ReferenceSolve, ExponentialBlowUpCrossingTime) {
  // y' = e^y needs F(y) = e^y exactly, which none of the built-in kinds provide.
  struct PureExp {
    double a = 0, b = 0, c = -5, d = 1;
    double F(double v) const { return std::exp(v); }
    double dF(double v) const { return std::exp(v); }
  };
  SolverConfig c;
  c.scheme = Scheme::oracle;
  c.theta = 20.0;
  c.t_end = 10.0;
  c.oracle_tol = 1e-12;
  c.max_events = 1;
  const auto res = reference_solve(PureExp{}, InputCurrent::constant(0), {0, 0, 0}, c);
  ASSERT_EQ(res.train.events.size(), 1u);
  EXPECT_NEAR(res.train.events[0].spike_time, 1.0 - std::exp(-20.0), 1e-9);
}

TEST(ReferenceSolve, AgreesWithAdaptiveWithinToleranceMultiple) {
  const auto I = InputCurrent::constant(7.6);
  auto ref_cfg = burst_config(Scheme::oracle);
  ref_cfg.max_events = 1;
  auto ad_cfg = burst_config(Scheme::hybrid_adaptive);
  ad_cfg.max_events = 1;
  const auto ref = reference_solve(izh(), I, kBurstInit, ref_cfg);
  const auto ad = simulate_hybrid_adaptive(izh(), I, kBurstInit, ad_cfg);
  const double scale = std::max(ad_cfg.epsilon, ref_cfg.oracle_tol);
  EXPECT_LE(std::abs(ad.train.events[0].spike_time - ref.train.events[0].spike_time), 10.0 * scale);
}

TEST(ReferenceSolve, ConceptModel) {
  SolverConfig c;
  c.scheme = Scheme::oracle;
  c.theta = 50.0;
  c.t_end = 5.0;
  const auto res = reference_solve(Cubicish{}, InputCurrent::constant(1.0), {0, 0, 0}, c);
  EXPECT_GT(res.train.events.size(), 0u);
}

TEST(Drivers, TimeIsMonotone) {
  const auto I = InputCurrent::piecewise_constant(7.6, {{100.0, 3.0}, {250.0, 9.0}});
  for (auto scheme : {Scheme::euler, Scheme::hybrid_fixed, Scheme::hybrid_adaptive, Scheme::oracle}) {
    auto c = burst_config(scheme);
    c.t_end = 400.0;
    c.record_every = 1;
    const auto res = simulate(izh(), I, kBurstInit, c);
    for (std::size_t i = 1; i < res.trajectory.size(); ++i) {
      const auto& p = res.trajectory[i - 1];
      const auto& q = res.trajectory[i];
      if (q.branch == Branch::reset) {
        EXPECT_EQ(q.t, p.t) << to_string(scheme);
      } else {
        ASSERT_GT(q.t, p.t) << to_string(scheme) << " at row " << i;
      }
    }
    EXPECT_NEAR(res.final_state.t, 400.0, 1e-6) << to_string(scheme);
    for (std::size_t i = 1; i < res.train.events.size(); ++i) {
      EXPECT_GT(res.train.events[i].spike_time, res.train.events[i - 1].spike_time);
    }
    EXPECT_GE(res.train.step_count, static_cast<std::int64_t>(res.train.events.size()));
  }
}

TEST(Drivers, StepsNeverStraddleCurrentJumps) {
  const std::vector<double> jumps{100.0, 250.0};
  const auto I = InputCurrent::piecewise_constant(7.6, {{jumps[0], 3.0}, {jumps[1], 9.0}});
  for (auto scheme : {Scheme::euler, Scheme::hybrid_fixed, Scheme::hybrid_adaptive, Scheme::oracle}) {
    auto c = burst_config(scheme);
    c.t_end = 400.0;
    c.record_every = 1;
    const auto res = simulate(izh(), I, kBurstInit, c);
    for (double j : jumps) {
      bool landed = false;
      for (std::size_t i = 1; i < res.trajectory.size(); ++i) {
        const double t0 = res.trajectory[i - 1].t, t1 = res.trajectory[i].t;
        EXPECT_FALSE(t0 < j && t1 > j) << to_string(scheme) << " straddles " << j;
        landed = landed || t1 == j;
      }
      EXPECT_TRUE(landed) << to_string(scheme) << " never lands on " << j;
    }
  }
}

TEST(Drivers, Deterministic) {
  const auto I = InputCurrent::constant(7.6);
  for (auto scheme : {Scheme::euler, Scheme::hybrid_fixed, Scheme::hybrid_adaptive, Scheme::oracle}) {
    const auto c = burst_config(scheme);
    EXPECT_EQ(simulate(izh(), I, kBurstInit, c).train, simulate(izh(), I, kBurstInit, c).train) << to_string(scheme);
  }
}

TEST(Drivers, EventLimit) {
  auto c = burst_config(Scheme::hybrid_adaptive);
  c.max_events = 3;
  const auto res = simulate(izh(), InputCurrent::constant(7.6), kBurstInit, c);
  EXPECT_EQ(res.train.events.size(), 3u);
  EXPECT_EQ(res.train.terminated_by, Termination::event_limit);
}

TEST(Drivers, LinearInterpolationBracketsFirstExceedance) {
  auto c = burst_config(Scheme::euler);
  c.dt = 0.05;
  c.max_events = 1;
  const auto I = InputCurrent::constant(7.6);
  const auto fe = simulate_euler(izh(), I, kBurstInit, c);
  c.spike_interp = SpikeInterp::linear;
  const auto li = simulate_euler(izh(), I, kBurstInit, c);
  EXPECT_LE(li.train.events[0].spike_time, fe.train.events[0].spike_time);
  EXPECT_GE(li.train.events[0].spike_time, fe.train.events[0].spike_time - c.dt);
}

TEST(SolverConfigValidate, Rejections) {
  SolverConfig c;
  c.scheme = Scheme::hybrid_adaptive;
  EXPECT_NO_THROW(validate(c, 0.02));
  c.epsilon = 0.0;
  EXPECT_THROW(validate(c, 0.02), Error);
  c = SolverConfig{};
  c.theta = std::numeric_limits<double>::infinity();
  EXPECT_THROW(validate(c, 0.0), Error);
  c = SolverConfig{};
  c.scheme = Scheme::hybrid_fixed;
  c.dv = -1.0;
  EXPECT_THROW(validate(c, 0.0), Error);
  c = SolverConfig{};
  c.scheme = Scheme::euler;
  c.dt = 1.0;
  EXPECT_THROW(validate(c, 1.0), Error);
  EXPECT_NO_THROW(validate(c, 0.5));
}

TEST(SchemeNames, RoundTrip) {
  for (auto s : {Scheme::euler, Scheme::hybrid_fixed, Scheme::hybrid_adaptive, Scheme::oracle}) {
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  }
  EXPECT_EQ(parse_spike_interp("linear"), SpikeInterp::linear);
  EXPECT_FALSE(parse_scheme("rk45").has_value());
}
