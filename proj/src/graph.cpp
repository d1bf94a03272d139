#include "trg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "trg/error.hpp"
#include "trg/numeric.hpp"

namespace trg {

// ---- schedule ------------------------------------------------------------

ConnectionSchedule ConnectionSchedule::near_critical() { return ConnectionSchedule(); }

ConnectionSchedule ConnectionSchedule::scaled(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("scaled schedule needs a finite c > 0");
  ConnectionSchedule s;
  s.kind_ = Kind::Scaled;
  s.c_ = c;
  return s;
}

ConnectionSchedule ConnectionSchedule::explicit_table(std::map<std::size_t, double> table) {
  for (auto [n, a] : table)
    if (!(a > 0.0 && a <= 1.0)) throw ValidationError("explicit schedule values must lie in (0, 1]");
  ConnectionSchedule s;
  s.kind_ = Kind::Explicit;
  s.table_ = std::move(table);
  return s;
}

double ConnectionSchedule::a(std::size_t n) const {
  if (n == 0) throw ValidationError("schedule evaluated at n = 0");
  const double dn = static_cast<double>(n);
  switch (kind_) {
    case Kind::NearCritical:
      return 1.0 / dn;
    case Kind::Scaled:
      return std::min(c_ / dn, 1.0);
    case Kind::Explicit: {
      auto it = table_.find(n);
      if (it == table_.end()) throw ValidationError("explicit schedule has no entry for n = " + std::to_string(n));
      return it->second;
    }
  }
  return 1.0;
}

double ConnectionSchedule::edge_normalizer(std::size_t n) const {
  const double dn = static_cast<double>(n);
  switch (kind_) {
    case Kind::NearCritical:
      return dn;
    case Kind::Scaled:
      return c_ / dn <= 1.0 ? c_ * dn : dn * dn;
    case Kind::Explicit:
      return a(n) * dn * dn;
  }
  return dn;
}

SquareTable ConnectionSchedule::probabilities(const Kernel& lambda, std::size_t n) const {
  const double an = a(n);
  SquareTable p(lambda.dim());
  for (std::size_t x = 0; x < lambda.dim(); ++x)
    for (std::size_t y = 0; y < lambda.dim(); ++y) p(x, y) = std::min(an * lambda(x, y), 1.0);
  return p;
}

std::string ConnectionSchedule::describe() const {
  switch (kind_) {
    case Kind::NearCritical:
      return "near_critical";
    case Kind::Scaled:
      return "scaled " + std::to_string(c_);
    case Kind::Explicit:
      return "explicit";
  }
  return "?";
}

// ---- graph ---------------------------------------------------------------

ColouredGraph::ColouredGraph(std::size_t k, std::vector<std::uint32_t> colours, std::vector<Edge> edges)
    : k_(k), colours_(std::move(colours)), edges_(std::move(edges)) {
  if (k_ == 0) throw ValidationError("graph needs k >= 1");
  for (auto c : colours_)
    if (c >= k_) throw ValidationError("colour index out of range");
  const auto n = colours_.size();
  for (auto& e : edges_) {
    if (e.u == e.v) throw ValidationError("self-loop in edge set");
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.v >= n) throw ValidationError("edge endpoint out of range");
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw ValidationError("duplicate edge in edge set");
}

TypeCounts counts_from_law(const TypeLaw& mu, std::size_t n) {
  const std::size_t k = mu.dim();
  TypeCounts counts(k);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::int64_t assigned = 0;
  for (std::size_t a = 0; a < k; ++a) {
    const double exact = mu[a] * static_cast<double>(n);
    const double fl = std::floor(exact + 1e-9);
    counts[a] = static_cast<std::int64_t>(fl);
    assigned += counts[a];
    remainders.emplace_back(exact - fl, a);
  }
  // largest remainder first, ties by lower index
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t i = 0; assigned < static_cast<std::int64_t>(n); ++i, ++assigned)
    ++counts[remainders[i % k].second];
  while (assigned > static_cast<std::int64_t>(n)) {
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  return counts;
}

TypeCounts type_counts(const std::vector<std::uint32_t>& colours, std::size_t k) {
  TypeCounts counts(k, 0);
  for (auto c : colours) ++counts.at(c);
  return counts;
}

std::vector<std::int64_t> class_budgets(const TypeCounts& counts) {
  const std::size_t k = counts.size();
  std::vector<std::int64_t> budgets(class_count(k));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b)
      budgets[class_index(k, a, b)] = a == b ? counts[a] * (counts[a] - 1) / 2 : counts[a] * counts[b];
  return budgets;
}

std::vector<std::int64_t> class_edge_counts(const ColouredGraph& graph) {
  std::vector<std::int64_t> e(class_count(graph.k()), 0);
  for (const auto& edge : graph.edges())
    ++e[class_index(graph.k(), graph.colours()[edge.u], graph.colours()[edge.v])];
  return e;
}

// ---- sampling ------------------------------------------------------------

namespace {

// Walks every class {a,b} and emits the linked pairs. A class with linking
// probability p is scanned by geometric jumps over its pair index space.
template <typename Sink>
void sample_edges_core(std::size_t k, const std::vector<std::uint32_t>& colours, const SquareTable& probs, Rng& rng,
                       Sink&& sink) {
  std::vector<std::vector<std::uint32_t>> members(k);
  for (std::uint32_t v = 0; v < colours.size(); ++v) members[colours[v]].push_back(v);

  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      const double p = probs(a, b);
      if (!(p > 0.0)) continue;
      const auto& ma = members[a];
      const auto& mb = members[b];
      const std::int64_t na = static_cast<std::int64_t>(ma.size());
      const std::int64_t nb = static_cast<std::int64_t>(mb.size());
      const std::int64_t total = a == b ? na * (na - 1) / 2 : na * nb;
      if (total == 0) continue;
      const std::size_t cls = class_index(k, a, b);
      const double log_q = p < 1.0 ? std::log1p(-p) : 0.0;

      // diagonal classes: row i of the strict upper triangle holds (na - 1 - i) pairs
      std::int64_t row = 0;
      std::int64_t row_start = 0;
      std::int64_t idx = -1;
      for (;;) {
        if (p >= 1.0) {
          ++idx;
        } else {
          const double jump = std::floor(std::log(uniform_open_closed(rng)) / log_q);
          if (jump >= static_cast<double>(total - idx - 1)) break;
          idx += static_cast<std::int64_t>(jump) + 1;
        }
        if (idx >= total) break;
        if (a == b) {
          while (idx >= row_start + (na - 1 - row)) {
            row_start += na - 1 - row;
            ++row;
          }
          sink(ma[row], ma[row + 1 + (idx - row_start)], cls);
        } else {
          sink(ma[idx / nb], mb[idx % nb], cls);
        }
      }
    }
}

void require_probs(std::size_t k, const SquareTable& probs) {
  require_same_dim(probs.dim(), k, "edge probabilities");
  for (double p : probs.values())
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("connection probabilities must lie in [0, 1]");
}

}  // namespace

std::vector<std::uint32_t> sample_colours(std::size_t n, const TypeLaw& mu, Rng& rng) {
  std::vector<double> cdf(mu.dim());
  std::partial_sum(mu.weights().begin(), mu.weights().end(), cdf.begin());
  std::vector<std::uint32_t> colours(n);
  for (auto& c : colours) {
    const double u = uniform01(rng) * cdf.back();
    std::size_t a = 0;
    while (a + 1 < cdf.size() && (u >= cdf[a] || mu[a] == 0.0)) ++a;
    c = static_cast<std::uint32_t>(a);
  }
  return colours;
}

std::vector<std::uint32_t> arrange_colours(const TypeCounts& counts, Rng& rng) {
  std::vector<std::uint32_t> colours;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    if (counts[a] < 0) throw ValidationError("type counts must be >= 0");
    colours.insert(colours.end(), static_cast<std::size_t>(counts[a]), static_cast<std::uint32_t>(a));
  }
  for (std::size_t i = colours.size(); i > 1; --i) std::swap(colours[i - 1], colours[uniform_below(rng, i)]);
  return colours;
}

ColouredGraph sample_edges(std::size_t k, std::vector<std::uint32_t> colours, const SquareTable& probs, Rng& rng) {
  require_probs(k, probs);
  std::vector<Edge> edges;
  sample_edges_core(k, colours, probs, rng,
                    [&](std::uint32_t u, std::uint32_t v, std::size_t) { edges.push_back({u, v}); });
  return ColouredGraph(k, std::move(colours), std::move(edges));
}

ColouredGraph sample_edges_direct(std::size_t k, std::vector<std::uint32_t> colours, const SquareTable& probs,
                                  Rng& rng) {
  require_probs(k, probs);
  std::vector<Edge> edges;
  const auto n = static_cast<std::uint32_t>(colours.size());
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v)
      if (uniform01(rng) < probs(colours[u], colours[v])) edges.push_back({u, v});
  return ColouredGraph(k, std::move(colours), std::move(edges));
}

std::vector<std::int64_t> sample_class_edge_counts(std::size_t k, const std::vector<std::uint32_t>& colours,
                                                   const SquareTable& probs, Rng& rng) {
  require_probs(k, probs);
  std::vector<std::int64_t> counts(class_count(k), 0);
  sample_edges_core(k, colours, probs, rng, [&](std::uint32_t, std::uint32_t, std::size_t cls) { ++counts[cls]; });
  return counts;
}

ColouredGraph sample_graph(std::size_t n, const TypeLaw& mu, const Kernel& lambda, const ConnectionSchedule& schedule,
                           Rng& rng) {
  if (n == 0) throw ValidationError("graph needs n >= 1");
  require_same_dim(mu.dim(), lambda.dim(), "sample_graph");
  auto colours = sample_colours(n, mu, rng);
  return sample_edges(lambda.dim(), std::move(colours), schedule.probabilities(lambda, n), rng);
}

ColouredGraph sample_graph_conditional(const TypeCounts& counts, const Kernel& lambda,
                                       const ConnectionSchedule& schedule, Rng& rng) {
  require_same_dim(counts.size(), lambda.dim(), "sample_graph_conditional");
  const std::int64_t n = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  if (n <= 0) throw ValidationError("type counts must sum to n >= 1");
  auto colours = arrange_colours(counts, rng);
  return sample_edges(lambda.dim(), std::move(colours), schedule.probabilities(lambda, static_cast<std::size_t>(n)),
                      rng);
}

// ---- empirical measures --------------------------------------------------

TypeLaw empirical_type_measure(const ColouredGraph& graph) {
  const auto counts = type_counts(graph.colours(), graph.k());
  std::vector<double> w(graph.k());
  for (std::size_t a = 0; a < w.size(); ++a)
    w[a] = static_cast<double>(counts[a]) / static_cast<double>(graph.n());
  return TypeLaw(std::move(w));
}

PairMeasure empirical_pair_measure(const ColouredGraph& graph, const ConnectionSchedule& schedule) {
  const std::size_t k = graph.k();
  std::vector<std::int64_t> tally(k * k, 0);
  for (const auto& e : graph.edges()) {
    const auto cu = graph.colours()[e.u];
    const auto cv = graph.colours()[e.v];
    ++tally[cu * k + cv];
    ++tally[cv * k + cu];
  }
  const double norm = schedule.edge_normalizer(graph.n());
  SquareTable t(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) t(a, b) = static_cast<double>(tally[a * k + b]) / norm;
  return PairMeasure(std::move(t));
}

PairMeasure pair_measure_from_class_counts(std::size_t k, const std::vector<std::int64_t>& edges_per_class,
                                           double normalizer) {
  if (edges_per_class.size() != class_count(k)) throw ValidationError("class edge count vector has wrong length");
  SquareTable t(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      const std::int64_t e = edges_per_class[class_index(k, a, b)];
      // cross edges appear once in each orientation, monochromatic ones twice on the diagonal
      const double v = static_cast<double>(a == b ? 2 * e : e) / normalizer;
      t(a, b) = v;
      t(b, a) = v;
    }
  return PairMeasure(std::move(t));
}

// ---- change of measure ---------------------------------------------------

SquareTable tilted_connection_probs(const TestFunction& g, const SquareTable& probs) {
  require_same_dim(g.dim(), probs.dim(), "tilted_connection_probs");
  SquareTable out(probs.dim());
  for (std::size_t a = 0; a < probs.dim(); ++a)
    for (std::size_t b = 0; b < probs.dim(); ++b) {
      const double p = probs(a, b);
      const double t = g(a, b);
      if (p == 0.0 || t == 0.0) {
        out(a, b) = p;
      } else if (p >= 1.0) {
        throw ValidationError("cannot tilt a connection probability equal to 1");
      } else {
        // 1 / (1 + (1-p)/(p e^g)), stable for large |g|
        out(a, b) = 1.0 / (1.0 + std::exp(std::log1p(-p) - std::log(p) - t));
      }
    }
  return out;
}

SquareTable tilted_connection_probs(const TestFunction& g, const Kernel& lambda, const ConnectionSchedule& schedule,
                                    std::size_t n) {
  return tilted_connection_probs(g, schedule.probabilities(lambda, n));
}

double log_importance_weight(const std::vector<std::int64_t>& budgets, const std::vector<std::int64_t>& edges,
                             const TestFunction& g, const SquareTable& probs) {
  const std::size_t k = probs.dim();
  // per class: N log(1 - p + e^g p) - e g
  double out = 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      const std::size_t cls = class_index(k, a, b);
      const double p = probs(a, b);
      const double t = g(a, b);
      if (t == 0.0 || p == 0.0) continue;
      if (p >= 1.0) throw ValidationError("cannot tilt a connection probability equal to 1");
      const double log_norm = std::log1p(p * std::expm1(t));
      out += static_cast<double>(budgets[cls]) * log_norm - static_cast<double>(edges[cls]) * t;
    }
  return out;
}

double importance_weight(const ColouredGraph& graph, const TestFunction& g, const Kernel& lambda,
                         const ConnectionSchedule& schedule) {
  const auto probs = schedule.probabilities(lambda, graph.n());
  return log_importance_weight(class_budgets(type_counts(graph.colours(), graph.k())), class_edge_counts(graph), g,
                               probs);
}

// ---- events --------------------------------------------------------------

HalfSpace half_space_neighbourhood(const TestFunction& g, const PairMeasure& pi, double eps) {
  if (!(eps > 0.0)) throw ValidationError("half-space neighbourhood needs eps > 0");
  return HalfSpace{g, pairing(g, pi) - 0.5 * eps};
}

bool event_membership(const Event& event, const PairMeasure& w) {
  struct Visitor {
    const PairMeasure& w;
    bool operator()(const WholeSpace&) const { return true; }
    bool operator()(const HalfSpace& h) const { return pairing(h.g, w) > h.level; }
    bool operator()(const Ball& ball) const {
      require_same_dim(ball.center.dim(), w.dim(), "ball membership");
      double dist = 0.0;
      for (std::size_t i = 0; i < w.values().size(); ++i)
        dist = std::max(dist, std::abs(w.values()[i] - ball.center.values()[i]));
      return dist <= ball.radius;
    }
    bool operator()(const Predicate& p) const { return p.contains(w); }
  };
  return std::visit(Visitor{w}, event);
}

std::string describe(const Event& event) {
  struct Visitor {
    std::string operator()(const WholeSpace&) const { return "whole space"; }
    std::string operator()(const HalfSpace& h) const { return "half-space <g,w> > " + std::to_string(h.level); }
    std::string operator()(const Ball& b) const { return "ball radius " + std::to_string(b.radius); }
    std::string operator()(const Predicate& p) const { return p.name; }
  };
  return std::visit(Visitor{}, event);
}

// ---- serialisation -------------------------------------------------------

void write_graph(std::ostream& out, const ColouredGraph& graph) {
  out << graph.n() << ' ' << graph.k() << '\n';
  for (std::size_t v = 0; v < graph.n(); ++v) out << (v ? " " : "") << graph.colours()[v];
  out << '\n';
  for (const auto& e : graph.edges()) out << e.u << ' ' << e.v << '\n';
}

std::string graph_to_string(const ColouredGraph& graph) {
  std::ostringstream os;
  write_graph(os, graph);
  return os.str();
}

ColouredGraph read_graph(std::istream& in) {
  std::size_t n = 0, k = 0;
  if (!(in >> n >> k) || n == 0 || k == 0) throw ValidationError("graph file: bad header, expected \"n k\"");
  std::vector<std::uint32_t> colours(n);
  for (auto& c : colours)
    if (!(in >> c)) throw ValidationError("graph file: expected " + std::to_string(n) + " colours");
  std::vector<long long> ends;
  long long x;
  while (in >> x) ends.push_back(x);
  if (!in.eof() || ends.size() % 2 != 0) throw ValidationError("graph file: malformed edge line");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < ends.size(); i += 2) {
    if (ends[i] < 0 || ends[i + 1] < 0 || ends[i] >= static_cast<long long>(n) || ends[i + 1] >= static_cast<long long>(n))
      throw ValidationError("graph file: edge endpoint out of range");
    edges.push_back({static_cast<std::uint32_t>(ends[i]), static_cast<std::uint32_t>(ends[i + 1])});
  }
  ColouredGraph g(k, std::move(colours), edges);
  if (g.edges() != edges) throw ValidationError("graph file: edges must satisfy u < v and be sorted");
  return g;
}

ColouredGraph graph_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_graph(is);
}

}  // namespace trg
