#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "spikesim/integrators.hpp"

namespace spikesim {

struct ResetSequence {
  std::vector<double> values;
  std::size_t transient_skip = 0;
};

enum class PatternLabel { tonic, burst, irregular };

struct PatternClass {
  PatternLabel label = PatternLabel::irregular;
  std::optional<int> period;
  double residual = 0.0;

  /// "tonic", "burst(k)" or "irregular".
  std::string name() const;
};

struct HistogramBin {
  double center = 0.0;
  std::size_t count = 0;
};

inline constexpr int kDefaultMaxPeriod = 8;
inline constexpr double kDefaultRelativeTolerance = 0.10;

/// max(10, 20% of the events), but never the whole train.
std::size_t default_transient_skip(std::size_t event_count) noexcept;

ResetSequence reset_sequence(const SpikeTrain& train, std::size_t transient_skip);
ResetSequence reset_sequence(const SpikeTrain& train);

/// Default tolerance: a fixed fraction of the value range of the sequence.
double default_tolerance(const ResetSequence& seq) noexcept;

/// Smallest k <= max_period with |x[i] - x[i+k]| <= tol for every compared pair.
/// Sequences shorter than 3 * max_period are searched up to length / 3.
PatternClass classify_pattern(const ResetSequence& seq, double tol, int max_period = kDefaultMaxPeriod);
PatternClass classify_pattern(const ResetSequence& seq);

/// Equal-width bins over [min, max]; the last bin is closed on the right.
std::vector<HistogramBin> reset_histogram(const ResetSequence& seq, int bins);

}  // namespace spikesim
