#pragma once

#include <string_view>
#include <vector>

namespace spikesim {

enum class CurrentKind { constant, piecewise_constant, sum_of_steps };

std::string_view to_string(CurrentKind kind) noexcept;

/// Time-dependent drive I(t). All supported kinds are piecewise constant, so
/// I'(t) = 0 away from jumps. At a jump instant the derivative is undefined;
/// the drivers never let a step straddle a jump (see next_jump_after).
/// Values are right-continuous: value(t_jump) is the post-jump value.
class InputCurrent {
 public:
  struct Breakpoint {
    double time;
    double value;  // new level (piecewise) or step amplitude (sum-of-steps)
  };

  InputCurrent() = default;

  static InputCurrent constant(double value);
  /// `initial` holds before the first breakpoint; breakpoints must be strictly increasing in time.
  static InputCurrent piecewise_constant(double initial, std::vector<Breakpoint> breakpoints);
  /// I(t) = base + sum_k amplitude_k H(t - onset_k).
  static InputCurrent sum_of_steps(double base, std::vector<Breakpoint> steps);

  CurrentKind kind() const noexcept { return kind_; }
  double base() const noexcept { return base_; }
  const std::vector<Breakpoint>& breakpoints() const noexcept { return raw_; }

  double value(double t) const;
  double derivative(double t) const;

  /// I* = inf of I over [t0, t1].
  double lower_bound(double t0, double t1) const;
  /// Smallest jump time strictly greater than t, or +inf.
  double next_jump_after(double t) const;

 private:
  CurrentKind kind_ = CurrentKind::constant;
  double base_ = 0.0;
  std::vector<Breakpoint> raw_;
  std::vector<double> jump_times_;  // strictly increasing
  std::vector<double> levels_;      // levels_[i] holds on [jump_times_[i-1], jump_times_[i])
};

}  // namespace spikesim
