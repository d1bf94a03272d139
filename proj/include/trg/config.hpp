#pragma once

// Experiment configuration: a flat key = value text format with [section]
// headers. Tables are given row-per-line after an empty "key =" line, or
// inline with ';' between rows.
//
//   [model]
//   labels = A B
//   mu = 0.5 0.5
//   schedule = near_critical        # or: scaled 1.5
//   lambda =
//     1 1
//     1 1
//   [target]
//   pi_scale = 1.5                  # or a `pi =` table
//   [event]
//   kind = ball                     # ball | half_space | whole
//   radius = 0.02                   # centre defaults to the target
//   [run]
//   n = 100 200 400
//   estimator = exact               # exact | mc | is
//   samples = 100000
//   seed = 7

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trg/graph.hpp"
#include "trg/measures.hpp"

namespace trg {

enum class EventKind { Whole, HalfSpace, Ball };
enum class EstimatorChoice { Exact, Mc, Is };

struct ExperimentConfig {
  TypeAlphabet alphabet = TypeAlphabet::numbered(1);
  TypeLaw mu = TypeLaw::uniform(1);
  Kernel lambda = Kernel::constant(1, 1.0);
  ConnectionSchedule schedule = ConnectionSchedule::near_critical();

  std::optional<PairMeasure> target;

  EventKind event_kind = EventKind::Whole;
  std::optional<PairMeasure> center;  ///< ball centre (defaults to target, then m)
  double radius = 0.0;
  std::optional<TestFunction> g;      ///< half-space direction (defaults to optimal_tilt(target, m))
  double epsilon = 0.0;
  std::optional<TestFunction> tilt;   ///< tilt for the `is` estimator (defaults to optimal_tilt(target, m))

  std::vector<std::size_t> n_list = {10};
  bool conditional = true;
  EstimatorChoice estimator = EstimatorChoice::Exact;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  int workers = 4;
  std::size_t graphs = 1;
  std::vector<double> truncation_levels = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
  double budget = 1e8;

  std::size_t k() const { return mu.dim(); }
  PairMeasure typical() const { return product_measure(lambda, mu); }
  /// The event described by the [event] section.
  Event event() const;
  /// Tilt used by the `is` estimator.
  TestFunction tilt_function() const;
};

/// Parses and validates. Throws ValidationError with a line number on bad input.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace trg
