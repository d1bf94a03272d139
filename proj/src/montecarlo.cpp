#include "trg/montecarlo.hpp"

#include <cmath>

#include "trg/error.hpp"
#include "trg/numeric.hpp"
#include "trg/parallel.hpp"
#include "trg/rng.hpp"

namespace trg {

namespace {

struct Moments {
  CompensatedSum sum;
  CompensatedSum sum_sq;
  std::uint64_t count = 0;
  std::uint64_t hits = 0;

  void merge(const Moments& other) {
    sum.add(other.sum.value());
    sum_sq.add(other.sum_sq.value());
    count += other.count;
    hits += other.hits;
  }
};

// Fixed-shape pairwise reduction: the tree depends only on the worker count.
Moments reduce(std::vector<Moments> parts) {
  while (parts.size() > 1) {
    std::vector<Moments> next;
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      Moments m = parts[i];
      m.merge(parts[i + 1]);
      next.push_back(m);
    }
    if (parts.size() % 2 == 1) next.push_back(parts.back());
    parts = std::move(next);
  }
  return parts.empty() ? Moments{} : parts.front();
}

Estimate run_estimator(std::size_t n, const Event& event, const TypeLaw& mu, const Kernel& lambda,
                       const ConnectionSchedule& schedule, const TestFunction* tilt, const SamplerOptions& options) {
  require_same_dim(mu.dim(), lambda.dim(), "estimator");
  if (options.samples == 0) throw ValidationError("estimator needs samples >= 1");
  if (options.workers < 1) throw ValidationError("estimator needs workers >= 1");
  if (n == 0) throw ValidationError("estimator needs n >= 1");
  const std::size_t k = mu.dim();
  const auto probs = schedule.probabilities(lambda, n);
  const SquareTable sampling_probs = tilt ? tilted_connection_probs(*tilt, probs) : probs;
  const double norm = schedule.edge_normalizer(n);
  TypeCounts counts;
  if (options.conditional) {
    counts = options.counts ? *options.counts : counts_from_law(mu, n);
    require_same_dim(counts.size(), k, "estimator type counts");
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    if (total != static_cast<std::int64_t>(n)) throw ValidationError("type counts do not sum to n");
  }

  const auto W = static_cast<std::size_t>(options.workers);
  std::vector<Moments> parts(W);
  const auto worker = [&](std::size_t w) {
    Rng rng = make_substream(options.seed, w);
    const std::uint64_t begin = options.samples * w / W;
    const std::uint64_t end = options.samples * (w + 1) / W;
    Moments& acc = parts[w];
    for (std::uint64_t s = begin; s < end; ++s) {
      const auto colours = options.conditional ? arrange_colours(counts, rng) : sample_colours(n, mu, rng);
      const auto edges = sample_class_edge_counts(k, colours, sampling_probs, rng);
      const PairMeasure l2 = pair_measure_from_class_counts(k, edges, norm);
      double y = 0.0;
      if (event_membership(event, l2)) {
        ++acc.hits;
        y = 1.0;
        if (tilt) {
          const auto budgets = class_budgets(options.conditional ? counts : type_counts(colours, k));
          y = std::exp(log_importance_weight(budgets, edges, *tilt, probs));
        }
      }
      acc.sum.add(y);
      acc.sum_sq.add(y * y);
      ++acc.count;
    }
  };
  if (options.parallel)
    parallel_for(W, worker);
  else
    for (std::size_t w = 0; w < W; ++w) worker(w);

  const Moments total = reduce(std::move(parts));
  Estimate est;
  est.samples = total.count;
  est.seed = options.seed;
  est.workers = options.workers;
  est.hits = total.hits;
  const double S = static_cast<double>(total.count);
  const double sum = total.sum.value();
  const double sum_sq = total.sum_sq.value();
  est.value = sum / S;
  est.second_moment = sum_sq / S;
  est.effective_sample_size = sum_sq > 0.0 ? sum * sum / sum_sq : 0.0;
  if (!tilt) {
    est.std_error = std::sqrt(est.value * (1.0 - est.value) / S);
  } else {
    const double var = total.count > 1 ? std::max(0.0, (sum_sq - S * est.value * est.value) / (S - 1.0)) : 0.0;
    est.std_error = std::sqrt(var / S);
  }
  if (total.hits == 0) est.zero_hit_upper_bound = 3.0 / S;
  return est;
}

}  // namespace

Estimate mc_event_probability(std::size_t n, const Event& event, const TypeLaw& mu, const Kernel& lambda,
                              const ConnectionSchedule& schedule, const SamplerOptions& options) {
  return run_estimator(n, event, mu, lambda, schedule, nullptr, options);
}

Estimate is_event_probability(std::size_t n, const Event& event, const TypeLaw& mu, const Kernel& lambda,
                              const ConnectionSchedule& schedule, const TestFunction& tilt,
                              const SamplerOptions& options) {
  require_same_dim(tilt.dim(), mu.dim(), "tilt");
  return run_estimator(n, event, mu, lambda, schedule, &tilt, options);
}

std::vector<RateEstimateRow> rate_estimate(const std::vector<std::size_t>& n_list, const EventFamily& events,
                                           const TypeLaw& mu, const Kernel& lambda,
                                           const ConnectionSchedule& schedule, const EstimatorConfig& config) {
  if (config.kind == EstimatorKind::Tilted && !config.tilt)
    throw ValidationError("tilted estimator needs a tilt function");
  std::vector<RateEstimateRow> rows;
  for (auto n : n_list) {
    SamplerOptions opts = config.sampler;
    if (opts.counts) {
      std::int64_t total = 0;
      for (auto c : *opts.counts) total += c;
      if (total != static_cast<std::int64_t>(n)) opts.counts.reset();
    }
    RateEstimateRow row;
    row.n = n;
    row.estimate = config.kind == EstimatorKind::Naive
                       ? mc_event_probability(n, events(n), mu, lambda, schedule, opts)
                       : is_event_probability(n, events(n), mu, lambda, schedule, *config.tilt, opts);
    if (row.estimate.value > 0.0) {
      const double dn = static_cast<double>(n);
      row.has_rate = true;
      row.log_prob = std::log(row.estimate.value);
      row.rate = -row.log_prob / dn;
      row.rate_std_error = row.estimate.std_error / (dn * row.estimate.value);
      row.ci_low = row.rate - config.z * row.rate_std_error;
      row.ci_high = row.rate + config.z * row.rate_std_error;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace trg
