#include "spikesim/spiketrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spikesim/errors.hpp"

namespace spikesim {

std::string PatternClass::name() const {
  switch (label) {
    case PatternLabel::tonic: return "tonic";
    case PatternLabel::burst: return "burst(" + std::to_string(period.value_or(0)) + ")";
    case PatternLabel::irregular: return "irregular";
  }
  return "irregular";
}

std::size_t default_transient_skip(std::size_t event_count) noexcept {
  const std::size_t skip = std::max<std::size_t>(10, event_count / 5);
  if (skip < event_count) return skip;
  return event_count > 0 ? event_count - 1 : 0;
}

ResetSequence reset_sequence(const SpikeTrain& train, std::size_t transient_skip) {
  if (train.events.size() <= transient_skip) {
    throw Error(ErrorKind::data, "reset sequence is empty after skipping " +
                                     std::to_string(transient_skip) + " of " +
                                     std::to_string(train.events.size()) + " events");
  }
  ResetSequence seq;
  seq.transient_skip = transient_skip;
  for (std::size_t i = transient_skip; i < train.events.size(); ++i) {
    const double w = train.events[i].w_at_spike;
    if (!std::isfinite(w)) throw Error(ErrorKind::data, "non-finite w_at_spike");
    seq.values.push_back(w);
  }
  return seq;
}

ResetSequence reset_sequence(const SpikeTrain& train) {
  return reset_sequence(train, default_transient_skip(train.events.size()));
}

double default_tolerance(const ResetSequence& seq) noexcept {
  if (seq.values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(seq.values.begin(), seq.values.end());
  return kDefaultRelativeTolerance * (*hi - *lo);
}

PatternClass classify_pattern(const ResetSequence& seq, double tol, int max_period) {
  const auto& x = seq.values;
  const int limit = std::min<int>(max_period, static_cast<int>(x.size() / 3));
  PatternClass out;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= limit; ++k) {
    double worst = 0.0;
    for (std::size_t i = 0; i + static_cast<std::size_t>(k) < x.size(); ++i) {
      worst = std::max(worst, std::abs(x[i] - x[i + static_cast<std::size_t>(k)]));
    }
    if (worst <= tol) {
      out.period = k;
      out.residual = worst;
      out.label = k == 1 ? PatternLabel::tonic : PatternLabel::burst;
      return out;
    }
    best = std::min(best, worst);
  }
  out.residual = std::isfinite(best) ? best : 0.0;
  return out;
}

PatternClass classify_pattern(const ResetSequence& seq) {
  return classify_pattern(seq, default_tolerance(seq), kDefaultMaxPeriod);
}

std::vector<HistogramBin> reset_histogram(const ResetSequence& seq, int bins) {
  if (bins < 1) throw Error(ErrorKind::argument, "histogram needs at least one bin");
  if (seq.values.empty()) return {};
  auto [lo_it, hi_it] = std::minmax_element(seq.values.begin(), seq.values.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / bins;
  std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; ++i) out[static_cast<std::size_t>(i)].center = lo + (i + 0.5) * width;
  for (double x : seq.values) {
    auto idx = static_cast<int>((x - lo) / width);
    idx = std::clamp(idx, 0, bins - 1);
    ++out[static_cast<std::size_t>(idx)].count;
  }
  return out;
}

}  // namespace spikesim
