#pragma once

// Sampling estimates of P{L2 in event}: the plain frequency estimator and the
// importance-sampled estimator under the odds-tilted law.
//
// Reproducibility contract: sample i belongs to logical worker
// w = the block [w S / W, (w+1) S / W) it falls in, and worker w draws from
// substream_seed(seed, w). Results depend on (seed, workers) only, never on
// the number of OpenMP threads.

#include <cstdint>
#include <optional>
#include <vector>

#include "trg/graph.hpp"
#include "trg/measures.hpp"
#include "trg/oracle.hpp"

namespace trg {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  /// (sum y)^2 / sum y^2 over per-sample contributions y; equals the hit count for the plain estimator.
  double effective_sample_size = 0.0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::uint64_t hits = 0;
  /// One-sided 95% upper bound 3/samples, set when there are no hits.
  std::optional<double> zero_hit_upper_bound;
  /// Second moment of the per-sample contribution, for variance comparisons.
  double second_moment = 0.0;
};

struct SamplerOptions {
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  int workers = 4;
  /// Fix the colour multiset (counts_from_law(mu, n) unless counts is set).
  bool conditional = true;
  std::optional<TypeCounts> counts;
  /// false runs the same worker partition sequentially (reference path).
  bool parallel = true;
};

Estimate mc_event_probability(std::size_t n, const Event& event, const TypeLaw& mu, const Kernel& lambda,
                              const ConnectionSchedule& schedule, const SamplerOptions& options);

/// Mean over tilted samples of weight * 1{event}. Throws ValidationError on a
/// tilt that touches a probability-one class.
Estimate is_event_probability(std::size_t n, const Event& event, const TypeLaw& mu, const Kernel& lambda,
                              const ConnectionSchedule& schedule, const TestFunction& tilt,
                              const SamplerOptions& options);

enum class EstimatorKind { Naive, Tilted };

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::Naive;
  SamplerOptions sampler;
  /// Tilt for the tilted estimator.
  std::optional<TestFunction> tilt;
  /// Normal quantile for the rate confidence interval.
  double z = 1.96;
};

struct RateEstimateRow {
  std::size_t n = 0;
  Estimate estimate;
  bool has_rate = false;  ///< false when the estimate is zero
  double log_prob = 0.0;
  double rate = 0.0;
  double rate_std_error = 0.0;  ///< delta method: SE / (n p)
  double ci_low = 0.0;
  double ci_high = 0.0;
};

std::vector<RateEstimateRow> rate_estimate(const std::vector<std::size_t>& n_list, const EventFamily& events,
                                           const TypeLaw& mu, const Kernel& lambda,
                                           const ConnectionSchedule& schedule, const EstimatorConfig& config);

}  // namespace trg
