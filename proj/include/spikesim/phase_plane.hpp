#pragma once

#include <limits>
#include <optional>
#include <string_view>

#include "spikesim/current.hpp"
#include "spikesim/model.hpp"

namespace spikesim {

enum class FixedPointRegime { none, unique_nonhyperbolic, two };
enum class Stability { attractive, repulsive };

std::string_view to_string(FixedPointRegime regime) noexcept;
std::string_view to_string(Stability stability) noexcept;

/// Fixed points of the model at constant input I. They lie on w = b v where
/// F(v) - b v + I = 0, so everything follows from the convex function
/// F(v) - b v, its minimum m(b) and argmin v*(b).
struct FixedPointAnalysis {
  double m_b = 0.0;
  double v_star_b = 0.0;
  FixedPointRegime regime = FixedPointRegime::none;
  std::optional<double> v_minus;
  /// -inf when no fixed point exists, so that {v >= v_plus} is the whole line.
  double v_plus = -std::numeric_limits<double>::infinity();
  std::optional<Stability> v_minus_stability;
  /// Stability boundary b v*(a) - F(v*(a)); only defined when b > a.
  std::optional<double> I_s;
};

/// Solves F'(v) = slope. Throws Error{analysis} when no solution exists.
double solve_slope(const ModelSpec& model, double slope);

FixedPointAnalysis analyze_fixed_points(const ModelSpec& model, double I);

/// Membership in the spiking zone Z* = {w <= b v, v >= v_plus(I*, b)}.
bool in_spiking_zone(const ModelSpec& model, double I_star, const SimState& state);
bool in_spiking_zone(const FixedPointAnalysis& fp, double b, const SimState& state) noexcept;

struct InitBox {
  double v_min = 0.0;
  double v_max = 0.0;
  double w_min = 0.0;
  double w_max = 0.0;
};

/// Compact set [v_low, v_high] x [w_low, w_high] containing every thresholded
/// trajectory started in an InitBox.
struct TrajectoryBounds {
  double v_low = 0.0;
  double v_high = 0.0;
  double w_low = 0.0;
  double w_high = 0.0;
  /// True when the drive grows faster than v^2, in which case the adaptation
  /// at spike time stays bounded as the cutoff grows.
  bool theta_independent = false;

  bool contains(const SimState& s, double slack = 0.0) const noexcept {
    return s.v >= v_low - slack && s.v <= v_high + slack && s.w >= w_low - slack &&
           s.w <= w_high + slack;
  }
};

/// Uses the coarse reset bound w_high = max(w_max, b theta) + d and I* taken
/// over the whole support of the current.
TrajectoryBounds estimate_trajectory_bounds(const ModelSpec& model, const InputCurrent& current,
                                            const InitBox& box, double theta);

}  // namespace spikesim
