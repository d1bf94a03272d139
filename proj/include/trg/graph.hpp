#pragma once

// The coloured random graph process: connection schedules, sampling (plain,
// conditional on type counts, and exponentially tilted), empirical measures,
// importance weights, events on the empirical link measure, and the text
// serialisation of graphs.

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "trg/measures.hpp"
#include "trg/rng.hpp"

namespace trg {

using TypeCounts = std::vector<std::int64_t>;

/// Number of unordered type classes {a, b}, a <= b.
constexpr std::size_t class_count(std::size_t k) { return k * (k + 1) / 2; }
/// Canonical index of the class {a, b} with a <= b (row-major over the upper triangle).
constexpr std::size_t class_index(std::size_t k, std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return a * (2 * k - a + 1) / 2 + (b - a);
}

/// Scale sequence a(n) with connection probabilities p_n(a,b) = min(a(n) lambda(a,b), 1).
class ConnectionSchedule {
 public:
  enum class Kind { NearCritical, Scaled, Explicit };

  /// a(n) = 1/n.
  static ConnectionSchedule near_critical();
  /// a(n) = min(c/n, 1).
  static ConnectionSchedule scaled(double c);
  /// a(n) looked up in a table.
  static ConnectionSchedule explicit_table(std::map<std::size_t, double> table);

  Kind kind() const { return kind_; }
  double scale() const { return c_; }

  double a(std::size_t n) const;
  /// a(n) n^2, the normaliser of the empirical link measure.
  double edge_normalizer(std::size_t n) const;
  /// p_n(a,b) for every type pair.
  SquareTable probabilities(const Kernel& lambda, std::size_t n) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::NearCritical;
  double c_ = 1.0;
  std::map<std::size_t, double> table_;
};

struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// n nodes with colours in [0, k) and a simple undirected edge set. Edges are
/// stored with u < v, sorted lexicographically.
class ColouredGraph {
 public:
  ColouredGraph(std::size_t k, std::vector<std::uint32_t> colours, std::vector<Edge> edges);

  std::size_t n() const { return colours_.size(); }
  std::size_t k() const { return k_; }
  const std::vector<std::uint32_t>& colours() const { return colours_; }
  const std::vector<Edge>& edges() const { return edges_; }

  friend bool operator==(const ColouredGraph&, const ColouredGraph&) = default;

 private:
  std::size_t k_;
  std::vector<std::uint32_t> colours_;
  std::vector<Edge> edges_;
};

/// Largest-remainder rounding of n * mu to integer counts summing to n.
TypeCounts counts_from_law(const TypeLaw& mu, std::size_t n);
/// Per-type node counts of a colour vector.
TypeCounts type_counts(const std::vector<std::uint32_t>& colours, std::size_t k);
/// Pair budget of each class: n_a n_b (a < b) or C(n_a, 2) (a = b).
std::vector<std::int64_t> class_budgets(const TypeCounts& counts);
/// Edge count of each class.
std::vector<std::int64_t> class_edge_counts(const ColouredGraph& graph);

// ---- sampling ------------------------------------------------------------

std::vector<std::uint32_t> sample_colours(std::size_t n, const TypeLaw& mu, Rng& rng);
/// Uniformly random arrangement with exactly the given counts.
std::vector<std::uint32_t> arrange_colours(const TypeCounts& counts, Rng& rng);

/// Edges given colours: every pair {u,v} independently with probs(c_u, c_v).
/// Geometric skipping within each class, O(n + |E|).
ColouredGraph sample_edges(std::size_t k, std::vector<std::uint32_t> colours, const SquareTable& probs, Rng& rng);
/// Direct O(n^2) Bernoulli sweep over all pairs; correctness reference.
ColouredGraph sample_edges_direct(std::size_t k, std::vector<std::uint32_t> colours, const SquareTable& probs,
                                  Rng& rng);
/// Per-class edge counts drawn with exactly the same random stream as sample_edges.
std::vector<std::int64_t> sample_class_edge_counts(std::size_t k, const std::vector<std::uint32_t>& colours,
                                                   const SquareTable& probs, Rng& rng);

ColouredGraph sample_graph(std::size_t n, const TypeLaw& mu, const Kernel& lambda, const ConnectionSchedule& schedule,
                           Rng& rng);
ColouredGraph sample_graph_conditional(const TypeCounts& counts, const Kernel& lambda,
                                       const ConnectionSchedule& schedule, Rng& rng);

// ---- empirical measures --------------------------------------------------

TypeLaw empirical_type_measure(const ColouredGraph& graph);
/// L2(a,b) = (1/(a_n n^2)) sum over edges of [delta_(c_u,c_v) + delta_(c_v,c_u)](a,b).
PairMeasure empirical_pair_measure(const ColouredGraph& graph, const ConnectionSchedule& schedule);
/// The same measure built from per-class edge counts.
PairMeasure pair_measure_from_class_counts(std::size_t k, const std::vector<std::int64_t>& edges_per_class,
                                           double normalizer);

// ---- change of measure ---------------------------------------------------

/// Odds tilt p~/(1-p~) = e^g p/(1-p). Throws ValidationError where p = 1 and g != 0.
SquareTable tilted_connection_probs(const TestFunction& g, const SquareTable& probs);
SquareTable tilted_connection_probs(const TestFunction& g, const Kernel& lambda, const ConnectionSchedule& schedule,
                                    std::size_t n);

/// log dP/dP~ of the edge set given colours (exact, not asymptotic).
double log_importance_weight(const std::vector<std::int64_t>& budgets, const std::vector<std::int64_t>& edges,
                             const TestFunction& g, const SquareTable& probs);
double importance_weight(const ColouredGraph& graph, const TestFunction& g, const Kernel& lambda,
                         const ConnectionSchedule& schedule);

// ---- events --------------------------------------------------------------

/// {w : <g, w> > level}
struct HalfSpace {
  TestFunction g;
  double level = 0.0;
};
/// {w : max_{a,b} |w(a,b) - center(a,b)| <= radius}
struct Ball {
  PairMeasure center;
  double radius = 0.0;
};
/// Arbitrary set, given by its indicator.
struct Predicate {
  std::function<bool(const PairMeasure&)> contains;
  std::string name = "predicate";
};
struct WholeSpace {};

using Event = std::variant<WholeSpace, HalfSpace, Ball, Predicate>;

/// Half-space neighbourhood {w : <g, w> > <g, pi> - eps/2}.
HalfSpace half_space_neighbourhood(const TestFunction& g, const PairMeasure& pi, double eps);

bool event_membership(const Event& event, const PairMeasure& w);
std::string describe(const Event& event);

// ---- serialisation -------------------------------------------------------

/// "n k" / colour line / one "u v" line per edge.
void write_graph(std::ostream& out, const ColouredGraph& graph);
std::string graph_to_string(const ColouredGraph& graph);
ColouredGraph read_graph(std::istream& in);
ColouredGraph graph_from_string(const std::string& text);

}  // namespace trg
