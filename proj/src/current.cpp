#include "spikesim/current.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spikesim/errors.hpp"

namespace spikesim {

std::string_view to_string(CurrentKind kind) noexcept {
  switch (kind) {
    case CurrentKind::constant: return "constant";
    case CurrentKind::piecewise_constant: return "piecewise-constant";
    case CurrentKind::sum_of_steps: return "sum-of-steps";
  }
  return "unknown";
}

namespace {

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw Error(ErrorKind::config, std::string("current: non-finite ") + what);
}

}  // namespace

InputCurrent InputCurrent::constant(double value) {
  check_finite(value, "value");
  InputCurrent c;
  c.kind_ = CurrentKind::constant;
  c.base_ = value;
  c.levels_ = {value};
  return c;
}

InputCurrent InputCurrent::piecewise_constant(double initial, std::vector<Breakpoint> breakpoints) {
  check_finite(initial, "value");
  InputCurrent c;
  c.kind_ = CurrentKind::piecewise_constant;
  c.base_ = initial;
  c.levels_ = {initial};
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    check_finite(breakpoints[i].time, "breakpoint time");
    check_finite(breakpoints[i].value, "breakpoint value");
    if (i > 0 && breakpoints[i].time <= breakpoints[i - 1].time) {
      throw Error(ErrorKind::config, "current: breakpoint times must be strictly increasing");
    }
    c.jump_times_.push_back(breakpoints[i].time);
    c.levels_.push_back(breakpoints[i].value);
  }
  c.raw_ = std::move(breakpoints);
  return c;
}

InputCurrent InputCurrent::sum_of_steps(double base, std::vector<Breakpoint> steps) {
  check_finite(base, "base");
  for (const auto& s : steps) {
    check_finite(s.time, "step onset");
    check_finite(s.value, "step amplitude");
  }
  InputCurrent c;
  c.kind_ = CurrentKind::sum_of_steps;
  c.base_ = base;
  c.raw_ = steps;
  std::stable_sort(steps.begin(), steps.end(),
                   [](const Breakpoint& x, const Breakpoint& y) { return x.time < y.time; });
  double level = base;
  c.levels_ = {level};
  for (const auto& s : steps) {
    level += s.value;
    if (!c.jump_times_.empty() && c.jump_times_.back() == s.time) {
      c.levels_.back() = level;
    } else {
      c.jump_times_.push_back(s.time);
      c.levels_.push_back(level);
    }
  }
  return c;
}

double InputCurrent::value(double t) const {
  const auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
  return levels_[static_cast<std::size_t>(it - jump_times_.begin())];
}

double InputCurrent::derivative(double /*t*/) const { return 0.0; }

double InputCurrent::lower_bound(double t0, double t1) const {
  if (t1 < t0) std::swap(t0, t1);
  const auto first = std::upper_bound(jump_times_.begin(), jump_times_.end(), t0);
  const auto last = std::upper_bound(jump_times_.begin(), jump_times_.end(), t1);
  const auto i0 = static_cast<std::size_t>(first - jump_times_.begin());
  const auto i1 = static_cast<std::size_t>(last - jump_times_.begin());
  return *std::min_element(levels_.begin() + static_cast<std::ptrdiff_t>(i0),
                           levels_.begin() + static_cast<std::ptrdiff_t>(i1) + 1);
}

double InputCurrent::next_jump_after(double t) const {
  const auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
  return it == jump_times_.end() ? std::numeric_limits<double>::infinity() : *it;
}

}  // namespace spikesim
