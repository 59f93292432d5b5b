#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "harmonize/engine.hpp"
#include "harmonize/rules.hpp"

namespace harmonize::testing {

/// Portable draws from raw mt19937_64 output.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}

  std::int64_t below(std::int64_t n) {
    return static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(n));
  }
  std::int64_t between(std::int64_t lo, std::int64_t hi) { return lo + below(hi - lo + 1); }
  bool chance(int percent) { return below(100) < percent; }
  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <class T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(below(static_cast<std::int64_t>(items.size())))];
  }

 private:
  std::mt19937_64 engine_;
};

/// A valid rule with a chain of 1..4 operations, between randomly named
/// dictionaries. Every primitive kind appears with some probability.
HarmonizationRule random_rule(Draw& draw);

/// A job whose inputs exist both as values and as CSV bytes, so that replay
/// can start from the bytes exactly as a user would.
struct RandomJob {
  HarmonizationJob job;
  std::vector<std::string> input_csv;  // canonical CSV of each input, in input order
};

/// 1..3 inputs against a target of 1..6 elements, rule chains of length
/// <= 4, files of 0..max_rows rows. Cell data is valid for the chains
/// unless the job runs under the collect policy, in which case some cells
/// are deliberately bad.
RandomJob random_job(Draw& draw, std::size_t max_rows = 1000);

}  // namespace harmonize::testing
