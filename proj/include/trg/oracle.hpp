#pragma once

// Exact counting and exact probabilities over coloured graphs through the
// sufficient statistic (type counts, edge count of every type class).
//
// Enumeration runs over (counts, config) pairs, never over graphs, so a
// k = 2 event costs O(prod of per-class edge ranges) instead of 2^C(n,2).

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "trg/graph.hpp"
#include "trg/measures.hpp"

namespace trg {

using BigInt = boost::multiprecision::cpp_int;

/// Edge counts e(a,b), a <= b, indexed by class_index.
struct EdgeCountConfig {
  std::vector<std::int64_t> edges;
  friend auto operator<=>(const EdgeCountConfig&, const EdgeCountConfig&) = default;
};

struct OracleOptions {
  /// Condition on the type counts (fixed colour multiset) instead of drawing colours from mu.
  bool conditional = true;
  /// Counts used in conditional mode; defaults to counts_from_law(mu, n).
  std::optional<TypeCounts> counts;
  /// Upper bound on the number of configurations visited by brute-force paths.
  double budget = 1e8;
  bool parallel = true;
};

/// Throws ValidationError unless counts are nonnegative and config respects the class budgets.
void validate_config(const TypeCounts& counts, const EdgeCountConfig& config);

PairMeasure config_to_pair_measure(const TypeCounts& counts, const EdgeCountConfig& config,
                                   const ConnectionSchedule& schedule);

/// Nearest feasible integer config to a target link measure (cross: e = a_n n^2 pi(a,b),
/// diagonal: e = a_n n^2 pi(a,a)/2), rounded and clamped to the class budgets.
EdgeCountConfig nearest_config(const TypeCounts& counts, const PairMeasure& target, const ConnectionSchedule& schedule);

/// multinomial(n; counts) * prod_{a<b} C(n_a n_b, e_ab) * prod_a C(C(n_a,2), e_aa).
BigInt count_graphs(const TypeCounts& counts, const EdgeCountConfig& config);
double log_count_graphs(const TypeCounts& counts, const EdgeCountConfig& config);
double log_big(const BigInt& x);
BigInt multinomial(const TypeCounts& counts);
BigInt binomial(std::int64_t n, std::int64_t r);

/// log P(config | counts) (conditional) or log P(counts, config) (unconditional, colours iid mu).
double config_log_probability(const TypeCounts& counts, const EdgeCountConfig& config, const Kernel& lambda,
                              const TypeLaw& mu, const ConnectionSchedule& schedule, bool conditional);

/// log P{L2 in event}. Exact up to floating-point summation; half-space
/// events discard only configurations whose total mass is below
/// e^-50 times a realised member's probability.
double event_log_probability(std::size_t n, const Event& event, const Kernel& lambda, const TypeLaw& mu,
                             const ConnectionSchedule& schedule, const OracleOptions& options = {});

/// log Card{y : L2_y in event}, counting coloured graphs (all colourings
/// unless options.conditional, which fixes the colour multiset).
double event_log_count(std::size_t n, const Event& event, const Kernel& lambda, const TypeLaw& mu,
                       const ConnectionSchedule& schedule, const OracleOptions& options = {});

// ---- rate sequences ------------------------------------------------------

struct RateRow {
  std::size_t n = 0;
  double log_prob = 0.0;
  double rate = 0.0;  ///< -log_prob / n
};

struct RateSequence {
  std::vector<RateRow> rows;
  /// Elimination of the c/n term from the last two rows.
  double richardson = 0.0;
  /// Least-squares intercept of rate against [1, 1/n].
  double linear_fit = 0.0;
  /// Least-squares intercept against [1, log(n)/n, 1/n] (needs >= 3 rows).
  double stirling_fit = 0.0;
};

using EventFamily = std::function<Event(std::size_t n)>;

RateSequence rate_sequence(const EventFamily& events, const std::vector<std::size_t>& n_list, const Kernel& lambda,
                           const TypeLaw& mu, const ConnectionSchedule& schedule, const OracleOptions& options = {});

struct Extrapolation {
  double richardson = 0.0;
  double linear_fit = 0.0;
  double stirling_fit = 0.0;
};
Extrapolation extrapolate_rates(const std::vector<std::size_t>& n_list, const std::vector<double>& rates);

/// inf of the Kullback action over the closure of the event (closed form for
/// balls, half-spaces and the whole space; grid search for predicates).
double event_rate_infimum(const Event& event, const PairMeasure& m);
/// Grid search of the same infimum over the symmetric measures of the class
/// parameter box (ball intervals for balls, [0, upper] per class otherwise).
double grid_infimum(const Event& event, const PairMeasure& m, int steps_per_class, double upper = 0.0);

// ---- brute force ---------------------------------------------------------

struct NaiveEntry {
  std::uint64_t graphs = 0;         ///< number of coloured graphs with this (counts, config)
  double probability = 0.0;         ///< joint probability of those graphs (colours iid mu)
  double edge_probability = 0.0;    ///< sum over those graphs of the edge-only probability
  PairMeasure link_measure;         ///< L2 of a representative graph (delta-sum definition)
};

struct NaiveTable {
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t graphs = 0;
  std::map<std::pair<TypeCounts, EdgeCountConfig>, NaiveEntry> entries;
  /// Number of colourings realising each type count vector.
  std::map<TypeCounts, std::uint64_t> colourings;
};

/// Every colouring and every edge set. Requires k^n 2^C(n,2) <= budget.
NaiveTable naive_enumerate(std::size_t n, const Kernel& lambda, const TypeLaw& mu, const ConnectionSchedule& schedule,
                           double budget = 1e8, bool parallel = true);
double naive_event_log_probability(const NaiveTable& table, const Event& event, bool conditional,
                                   const TypeCounts& counts);
double naive_event_log_count(const NaiveTable& table, const Event& event);

// ---- McMillan counting ---------------------------------------------------

struct McMillanRow {
  std::size_t n = 0;
  double log_card = 0.0;
  double n_times_entropy = 0.0;
  double gap = 0.0;  ///< log_card - n_times_entropy
};

/// Exact log Card{y : L2_y in ball} against n times the McMillan entropy of the ball centre.
McMillanRow mcmillan_count_report(std::size_t n, const Ball& ball, const Kernel& lambda, const TypeLaw& mu,
                                  const ConnectionSchedule& schedule, const OracleOptions& options = {});

/// -(1/n) log P(nearest config to pi | counts from mu), with the realised link measure.
struct SingleConfigRate {
  std::size_t n = 0;
  double rate = 0.0;
  PairMeasure realized;
};
SingleConfigRate single_config_rate(std::size_t n, const PairMeasure& pi, const Kernel& lambda, const TypeLaw& mu,
                                    const ConnectionSchedule& schedule);

}  // namespace trg
