#include "spikesim/phase_plane.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikesim/errors.hpp"

namespace spikesim {

std::string_view to_string(FixedPointRegime regime) noexcept {
  switch (regime) {
    case FixedPointRegime::none: return "no-fixed-point";
    case FixedPointRegime::unique_nonhyperbolic: return "unique-nonhyperbolic";
    case FixedPointRegime::two: return "two-fixed-points";
  }
  return "unknown";
}

std::string_view to_string(Stability stability) noexcept {
  return stability == Stability::attractive ? "attractive" : "repulsive";
}

namespace {

constexpr int kMaxExpansions = 60;
constexpr double kRelTol = 1e-12;

// Largest argument we probe while bracketing. Keeps the exponential family
// below its overflow guard.
double probe_ceiling(const ModelSpec& model) {
  return model.kind == ModelKind::exponential ? kExpOverflowGuard : 1e150;
}

// Safeguarded Newton on a bracket with f(lo) and f(hi) of opposite signs.
template <class Fn, class Df>
double bracketed_root(Fn f, Df df, double lo, double hi) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (f(hi) == 0.0) return hi;
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double slope = df(x);
    double next = slope != 0.0 ? x - fx / slope : lo;
    if (!(next > std::min(lo, hi) && next < std::max(lo, hi))) next = 0.5 * (lo + hi);
    const double scale = std::max(1.0, std::abs(next));
    if (std::abs(next - x) <= 0.25 * kRelTol * scale || std::abs(hi - lo) <= kRelTol * scale * 1e-3) {
      return next;
    }
    x = next;
  }
  return x;
}

}  // namespace

double solve_slope(const ModelSpec& model, double slope) {
  auto g = [&](double v) { return model.dF(v) - slope; };
  auto dg = [&](double v) { return model.d2F(v); };
  const double ceiling = probe_ceiling(model);
  double lo = -1.0;
  double hi = 1.0;
  int k = 0;
  while (g(hi) <= 0.0) {
    if (++k > kMaxExpansions || hi >= ceiling) {
      throw Error(ErrorKind::analysis, "F' never reaches slope " + std::to_string(slope));
    }
    hi = std::min(2.0 * hi, ceiling);
  }
  k = 0;
  while (g(lo) >= 0.0) {
    if (++k > kMaxExpansions) {
      throw Error(ErrorKind::analysis,
                  "F(v) - " + std::to_string(slope) + " v has no minimiser (unbounded argmin)");
    }
    lo *= 2.0;
  }
  return bracketed_root(g, dg, lo, hi);
}

FixedPointAnalysis analyze_fixed_points(const ModelSpec& model, double I) {
  if (!std::isfinite(I)) throw Error(ErrorKind::argument, "analyze_fixed_points: I must be finite");
  const double b = model.b;
  const double a = model.a;

  FixedPointAnalysis out;
  out.v_star_b = solve_slope(model, b);
  out.m_b = model.F(out.v_star_b) - b * out.v_star_b;

  auto g = [&](double v) { return model.F(v) - b * v + I; };
  auto dg = [&](double v) { return model.dF(v) - b; };

  const double depth = out.m_b + I;  // minimum of g
  const double tol = kRelTol * std::max({1.0, std::abs(out.m_b), std::abs(I)});

  if (depth > tol) {
    out.regime = FixedPointRegime::none;
  } else if (std::abs(depth) <= tol) {
    out.regime = FixedPointRegime::unique_nonhyperbolic;
    out.v_minus = out.v_star_b;
    out.v_plus = out.v_star_b;
    if (b > a) out.v_minus_stability = Stability::repulsive;
  } else {
    out.regime = FixedPointRegime::two;
    const double ceiling = probe_ceiling(model);

    double step = 1.0;
    double hi = out.v_star_b + step;
    for (int k = 0; g(hi) <= 0.0; ++k) {
      if (k > kMaxExpansions || hi >= ceiling) {
        throw Error(ErrorKind::analysis, "cannot bracket the upper fixed point");
      }
      step *= 2.0;
      hi = std::min(out.v_star_b + step, ceiling);
    }
    out.v_plus = bracketed_root(g, dg, out.v_star_b, hi);

    step = 1.0;
    double lo = out.v_star_b - step;
    bool bracketed = true;
    for (int k = 0; g(lo) <= 0.0; ++k) {
      if (k > kMaxExpansions) {
        bracketed = false;
        break;
      }
      step *= 2.0;
      lo = out.v_star_b - step;
    }
    if (bracketed) {
      out.v_minus = bracketed_root(g, dg, lo, out.v_star_b);
      if (b < a) {
        out.v_minus_stability = Stability::attractive;
      } else if (b > a) {
        const double v_star_a = solve_slope(model, a);
        out.I_s = b * v_star_a - model.F(v_star_a);
        out.v_minus_stability = I < *out.I_s ? Stability::attractive : Stability::repulsive;
      } else {
        // b == a: decide from the trace F'(v-) - a of the Jacobian.
        out.v_minus_stability =
            model.dF(*out.v_minus) < a ? Stability::attractive : Stability::repulsive;
      }
    }
  }
  if (b > a && !out.I_s) {
    const double v_star_a = solve_slope(model, a);
    out.I_s = b * v_star_a - model.F(v_star_a);
  }
  return out;
}

bool in_spiking_zone(const FixedPointAnalysis& fp, double b, const SimState& state) noexcept {
  if (state.w > b * state.v) return false;
  return fp.regime == FixedPointRegime::none || state.v >= fp.v_plus;
}

bool in_spiking_zone(const ModelSpec& model, double I_star, const SimState& state) {
  return in_spiking_zone(analyze_fixed_points(model, I_star), model.b, state);
}

TrajectoryBounds estimate_trajectory_bounds(const ModelSpec& model, const InputCurrent& current,
                                            const InitBox& box, double theta) {
  if (!(box.v_min <= box.v_max) || !(box.w_min <= box.w_max)) {
    throw Error(ErrorKind::argument, "trajectory bounds: empty initial box");
  }
  if (!(theta > box.v_max)) {
    throw Error(ErrorKind::argument, "trajectory bounds: theta must exceed the box's v_max");
  }
  const double inf = std::numeric_limits<double>::infinity();
  const double I_star = current.lower_bound(-inf, inf);

  TrajectoryBounds out;
  out.v_high = theta;
  out.w_high = std::max(box.w_max, model.b * theta) + model.d;

  // Leftmost v with F(v) = w_high - I*: v decreases only while F(v) + I < w <= w_high.
  double v_low = std::min(model.c, box.v_min);
  const double target = out.w_high - I_star;
  const double v_min_F = solve_slope(model, 0.0);
  if (model.F(v_min_F) < target) {
    auto g = [&](double v) { return model.F(v) - target; };
    auto dg = [&](double v) { return model.dF(v); };
    double step = 1.0;
    double lo = v_min_F - step;
    for (int k = 0; g(lo) <= 0.0; ++k) {
      if (k > kMaxExpansions) throw Error(ErrorKind::analysis, "cannot bracket the lower v bound");
      step *= 2.0;
      lo = v_min_F - step;
    }
    v_low = std::min(v_low, bracketed_root(g, dg, lo, v_min_F));
  }
  out.v_low = v_low;
  out.w_low = std::min(model.b * v_low, box.w_min);

  const auto m = model.growth_exponent();
  out.theta_independent = !m.has_value() || *m > 2.0;
  return out;
}

}  // namespace spikesim
