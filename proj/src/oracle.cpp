#include "trg/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "trg/error.hpp"
#include "trg/numeric.hpp"
#include "trg/parallel.hpp"

namespace trg {

// ---- configs and counting ------------------------------------------------

void validate_config(const TypeCounts& counts, const EdgeCountConfig& config) {
  for (auto c : counts)
    if (c < 0) throw ValidationError("type counts must be >= 0");
  const auto budgets = class_budgets(counts);
  if (config.edges.size() != budgets.size())
    throw ValidationError("edge count config has " + std::to_string(config.edges.size()) + " classes, expected " +
                          std::to_string(budgets.size()));
  for (std::size_t c = 0; c < budgets.size(); ++c)
    if (config.edges[c] < 0 || config.edges[c] > budgets[c])
      throw ValidationError("edge count " + std::to_string(config.edges[c]) + " outside [0, " +
                            std::to_string(budgets[c]) + "] for class " + std::to_string(c));
}

namespace {

std::size_t total_nodes(const TypeCounts& counts) {
  return static_cast<std::size_t>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
}

double log_multinomial(const TypeCounts& counts) {
  double out = std::lgamma(static_cast<double>(total_nodes(counts)) + 1.0);
  for (auto c : counts) out -= std::lgamma(static_cast<double>(c) + 1.0);
  return out;
}

}  // namespace

PairMeasure config_to_pair_measure(const TypeCounts& counts, const EdgeCountConfig& config,
                                   const ConnectionSchedule& schedule) {
  validate_config(counts, config);
  return pair_measure_from_class_counts(counts.size(), config.edges, schedule.edge_normalizer(total_nodes(counts)));
}

EdgeCountConfig nearest_config(const TypeCounts& counts, const PairMeasure& target,
                               const ConnectionSchedule& schedule) {
  require_same_dim(counts.size(), target.dim(), "nearest_config");
  const std::size_t k = counts.size();
  const double norm = schedule.edge_normalizer(total_nodes(counts));
  const auto budgets = class_budgets(counts);
  EdgeCountConfig config{std::vector<std::int64_t>(class_count(k))};
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      const std::size_t c = class_index(k, a, b);
      const double exact = a == b ? 0.5 * norm * target(a, a) : norm * target(a, b);
      config.edges[c] = std::clamp<std::int64_t>(std::llround(exact), 0, budgets[c]);
    }
  return config;
}

BigInt binomial(std::int64_t n, std::int64_t r) {
  if (r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  BigInt out = 1;
  for (std::int64_t i = 1; i <= r; ++i) {
    out *= n - r + i;
    out /= i;
  }
  return out;
}

BigInt multinomial(const TypeCounts& counts) {
  BigInt out = 1;
  std::int64_t running = 0;
  for (auto c : counts) {
    running += c;
    out *= binomial(running, c);
  }
  return out;
}

BigInt count_graphs(const TypeCounts& counts, const EdgeCountConfig& config) {
  validate_config(counts, config);
  BigInt out = multinomial(counts);
  const auto budgets = class_budgets(counts);
  for (std::size_t c = 0; c < budgets.size(); ++c) out *= binomial(budgets[c], config.edges[c]);
  return out;
}

double log_count_graphs(const TypeCounts& counts, const EdgeCountConfig& config) {
  validate_config(counts, config);
  double out = log_multinomial(counts);
  const auto budgets = class_budgets(counts);
  for (std::size_t c = 0; c < budgets.size(); ++c)
    out += log_binomial(static_cast<double>(budgets[c]), static_cast<double>(config.edges[c]));
  return out;
}

double log_big(const BigInt& x) {
  if (x <= 0) return -kInf;
  const std::size_t bits = boost::multiprecision::msb(x);
  if (bits < 1000) return std::log(x.convert_to<double>());
  const std::size_t shift = bits - 60;
  const BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

double config_log_probability(const TypeCounts& counts, const EdgeCountConfig& config, const Kernel& lambda,
                              const TypeLaw& mu, const ConnectionSchedule& schedule, bool conditional) {
  validate_config(counts, config);
  require_same_dim(counts.size(), lambda.dim(), "config_log_probability");
  const std::size_t k = counts.size();
  const std::size_t n = total_nodes(counts);
  const auto probs = schedule.probabilities(lambda, n);
  const auto budgets = class_budgets(counts);
  double out = 0.0;
  if (!conditional) {
    require_same_dim(mu.dim(), k, "config_log_probability");
    out += log_multinomial(counts);
    for (std::size_t a = 0; a < k; ++a) {
      if (counts[a] == 0) continue;
      if (mu[a] == 0.0) return -kInf;
      out += static_cast<double>(counts[a]) * std::log(mu[a]);
    }
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      const std::size_t c = class_index(k, a, b);
      out += log_binomial_pmf(static_cast<double>(budgets[c]), static_cast<double>(config.edges[c]), probs(a, b));
    }
  return out;
}

// ---- enumeration engine --------------------------------------------------

namespace {

enum class Weighting { Probability, Count };

struct ClassInfo {
  std::size_t a = 0;
  std::size_t b = 0;
  std::int64_t budget = 0;
  double p = 0.0;
};

struct Model {
  std::size_t n = 0;
  std::size_t k = 0;
  double norm = 1.0;
  SquareTable probs;
  Weighting weighting = Weighting::Probability;
};

double class_weight(const Model& model, const ClassInfo& c, std::int64_t e) {
  const double N = static_cast<double>(c.budget);
  const double x = static_cast<double>(e);
  return model.weighting == Weighting::Probability ? log_binomial_pmf(N, x, c.p) : log_binomial(N, x);
}

std::vector<ClassInfo> make_classes(const Model& model, const TypeCounts& counts) {
  const auto budgets = class_budgets(counts);
  std::vector<ClassInfo> classes(class_count(model.k));
  for (std::size_t a = 0; a < model.k; ++a)
    for (std::size_t b = a; b < model.k; ++b) {
      const std::size_t c = class_index(model.k, a, b);
      classes[c] = {a, b, budgets[c], model.probs(a, b)};
    }
  return classes;
}

double cell_value(const Model& model, const ClassInfo& c, std::int64_t e) {
  return static_cast<double>(c.a == c.b ? 2 * e : e) / model.norm;
}

void set_cells(const Model& model, const ClassInfo& c, std::int64_t e, std::vector<double>& cells) {
  const double v = cell_value(model, c, e);
  cells[c.a * model.k + c.b] = v;
  cells[c.b * model.k + c.a] = v;
}

double counts_term(const Model& model, const TypeCounts& counts, const TypeLaw& mu, bool conditional) {
  if (model.weighting == Weighting::Count) return log_multinomial(counts);
  if (conditional) return 0.0;
  double out = log_multinomial(counts);
  for (std::size_t a = 0; a < counts.size(); ++a) {
    if (counts[a] == 0) continue;
    if (mu[a] == 0.0) return -kInf;
    out += static_cast<double>(counts[a]) * std::log(mu[a]);
  }
  return out;
}

void compositions_rec(std::size_t remaining, std::size_t slot, TypeCounts& current, std::vector<TypeCounts>& out) {
  if (slot + 1 == current.size()) {
    current[slot] = static_cast<std::int64_t>(remaining);
    out.push_back(current);
    return;
  }
  for (std::size_t c = 0; c <= remaining; ++c) {
    current[slot] = static_cast<std::int64_t>(c);
    compositions_rec(remaining - c, slot + 1, current, out);
  }
}

std::vector<TypeCounts> counts_in_scope(std::size_t n, const TypeLaw& mu, const OracleOptions& options) {
  const std::size_t k = mu.dim();
  if (options.conditional) {
    TypeCounts counts = options.counts ? *options.counts : counts_from_law(mu, n);
    require_same_dim(counts.size(), k, "conditional type counts");
    if (total_nodes(counts) != n) throw ValidationError("conditional type counts do not sum to n");
    for (auto c : counts)
      if (c < 0) throw ValidationError("type counts must be >= 0");
    return {counts};
  }
  // C(n + k - 1, k - 1) compositions
  double how_many = std::exp(log_binomial(static_cast<double>(n + k - 1), static_cast<double>(k - 1)));
  if (how_many > options.budget) throw BudgetExceeded(how_many, options.budget);
  std::vector<TypeCounts> out;
  TypeCounts current(k);
  compositions_rec(n, 0, current, out);
  return out;
}

template <typename Body>
void run_jobs(std::size_t count, bool parallel, Body&& body) {
  if (parallel)
    parallel_for(count, body);
  else
    for (std::size_t i = 0; i < count; ++i) body(i);
}

// First e in [lo, hi] with pred(e) true, pred monotone false->true; hi + 1 if none.
template <typename Pred>
std::int64_t first_true(std::int64_t lo, std::int64_t hi, Pred&& pred) {
  std::int64_t left = lo, right = hi + 1;
  while (left < right) {
    const std::int64_t mid = left + (right - left) / 2;
    if (pred(mid))
      right = mid;
    else
      left = mid + 1;
  }
  return left;
}

// ---- ball: classes decouple -----------------------------------------------

struct Interval {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  bool empty() const { return lo > hi; }
};

// Edge counts whose cells satisfy |fl(v - centre)| <= r, the exact test used by event_membership.
Interval ball_interval(const Model& model, const ClassInfo& c, const Ball& ball) {
  const double centre = ball.center(c.a, c.b);
  const double r = ball.radius;
  const auto above_low = [&](std::int64_t e) { return cell_value(model, c, e) - centre >= -r; };
  const auto above_high = [&](std::int64_t e) { return !(cell_value(model, c, e) - centre <= r); };
  Interval out;
  out.lo = first_true(0, c.budget, above_low);
  out.hi = first_true(0, c.budget, above_high) - 1;
  return out;
}

double ball_counts_value(const Model& model, const TypeCounts& counts, double base, const Ball& ball) {
  if (base == -kInf) return -kInf;
  double out = base;
  for (const auto& c : make_classes(model, counts)) {
    const Interval iv = ball_interval(model, c, ball);
    if (iv.empty()) return -kInf;
    LogSumExp acc;
    for (std::int64_t e = iv.lo; e <= iv.hi; ++e) acc.add(class_weight(model, c, e));
    const double part = acc.value();
    if (part == -kInf) return -kInf;
    out += part;
  }
  return out;
}

// ---- half-space: linear constraint, exact boundary search -----------------

struct HalfSpacePlan {
  bool empty = false;
  double base = 0.0;
  std::vector<ClassInfo> classes;
  std::vector<std::size_t> outer;           // active classes enumerated explicitly
  std::optional<std::size_t> last;          // active class resolved by boundary search
  std::vector<Interval> ranges;             // per class; inactive classes pinned at e = 0
  std::vector<std::vector<double>> weights; // per class, over its range
  std::vector<double> tail;                 // cumulative log-sum over the last class's range
  bool last_increasing = true;
};

double tilt_prob(double p, double t) {
  if (p == 0.0 || p >= 1.0 || t == 0.0) return p;
  return 1.0 / (1.0 + std::exp(std::log1p(-p) - std::log(p) - t));
}

// Log-probability of a near-dominant member config: classes tilted by theta*g
// until the config enters the half-space. -inf if no positive-probability member exists.
double half_space_lower_bound(const Model& model, const std::vector<ClassInfo>& classes, double base,
                              const HalfSpace& hs) {
  if (base == -kInf) return -kInf;
  const std::size_t k = model.k;
  std::vector<double> cells(k * k, 0.0);
  std::vector<std::int64_t> e(classes.size());
  const auto config_at = [&](double theta) {
    for (std::size_t i = 0; i < classes.size(); ++i) {
      const auto& c = classes[i];
      const double g = hs.g(c.a, c.b);
      double pt;
      if (std::isinf(theta) && g != 0.0 && c.p > 0.0 && c.p < 1.0)
        pt = g > 0.0 ? 1.0 : 0.0;
      else
        pt = tilt_prob(c.p, theta * g);
      e[i] = std::clamp<std::int64_t>(std::llround(static_cast<double>(c.budget) * pt), 0, c.budget);
      set_cells(model, c, e[i], cells);
    }
  };
  const auto member = [&]() { return pairing(hs.g.values(), cells) > hs.level; };
  const auto log_prob = [&]() {
    double out = base;
    for (std::size_t i = 0; i < classes.size(); ++i) out += class_weight(model, classes[i], e[i]);
    return out;
  };

  config_at(0.0);
  if (member()) return log_prob();
  config_at(kInf);
  if (!member()) return -kInf;
  const double at_infinity = log_prob();
  double lo = 0.0, hi = 1.0;
  for (;;) {
    config_at(hi);
    if (member()) break;
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return at_infinity;
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    config_at(mid);
    if (member())
      hi = mid;
    else
      lo = mid;
  }
  config_at(hi);
  return std::max(log_prob(), at_infinity);
}

// Range of e with class weight >= floor (log-concave weights: one interval around the mode).
Interval weight_range(const Model& model, const ClassInfo& c, double floor) {
  if (floor == -kInf) return {0, c.budget};
  const double mode_guess = std::floor((static_cast<double>(c.budget) + 1.0) * c.p);
  const std::int64_t mode = std::clamp<std::int64_t>(static_cast<std::int64_t>(mode_guess), 0, c.budget);
  if (class_weight(model, c, mode) < floor) return {};
  Interval out;
  out.lo = first_true(0, mode, [&](std::int64_t e) { return class_weight(model, c, e) >= floor; });
  out.hi = first_true(mode, c.budget, [&](std::int64_t e) { return class_weight(model, c, e) < floor; }) - 1;
  return out;
}

HalfSpacePlan plan_half_space(const Model& model, const TypeCounts& counts, double base, const HalfSpace& hs,
                              double threshold) {
  HalfSpacePlan plan;
  plan.classes = make_classes(model, counts);
  plan.base = base;
  if (base == -kInf || base < threshold) {
    plan.empty = true;
    return plan;
  }
  const std::size_t C = plan.classes.size();
  plan.ranges.resize(C);
  plan.weights.resize(C);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < C; ++i) {
    const auto& c = plan.classes[i];
    if (hs.g(c.a, c.b) == 0.0) {
      // independent of membership: sums to 1 (probability) or 2^N (count)
      if (model.weighting == Weighting::Count) plan.base += static_cast<double>(c.budget) * std::log(2.0);
      plan.ranges[i] = {0, 0};
      continue;
    }
    const double floor = threshold == -kInf ? -kInf : threshold - base;
    const Interval iv = weight_range(model, c, floor);
    if (iv.empty()) {
      plan.empty = true;
      return plan;
    }
    plan.ranges[i] = iv;
    auto& w = plan.weights[i];
    for (std::int64_t e = iv.lo; e <= iv.hi; ++e) w.push_back(class_weight(model, c, e));
    active.push_back(i);
  }
  if (active.empty()) return plan;
  plan.last = active.back();
  active.pop_back();
  plan.outer = std::move(active);

  const auto& lw = plan.weights[*plan.last];
  plan.last_increasing = hs.g(plan.classes[*plan.last].a, plan.classes[*plan.last].b) > 0.0;
  plan.tail.assign(lw.size(), -kInf);
  if (plan.last_increasing) {
    LogSumExp acc;
    for (std::size_t j = lw.size(); j-- > 0;) {
      acc.add(lw[j]);
      plan.tail[j] = acc.value();
    }
  } else {
    LogSumExp acc;
    for (std::size_t j = 0; j < lw.size(); ++j) {
      acc.add(lw[j]);
      plan.tail[j] = acc.value();
    }
  }
  return plan;
}

// Sum over the plan's configs whose first outer class lies in [first_lo, first_hi].
LogSumExp run_half_space_slice(const Model& model, const HalfSpacePlan& plan, const HalfSpace& hs,
                               std::int64_t first_lo, std::int64_t first_hi) {
  LogSumExp acc;
  if (plan.empty) return acc;
  const std::size_t k = model.k;
  std::vector<double> cells(k * k, 0.0);
  for (std::size_t i = 0; i < plan.classes.size(); ++i) set_cells(model, plan.classes[i], plan.ranges[i].lo, cells);
  const auto member = [&]() { return pairing(hs.g.values(), cells) > hs.level; };

  if (!plan.last) {
    if (member()) acc.add(plan.base);
    return acc;
  }
  const std::size_t last = *plan.last;
  const auto& lc = plan.classes[last];
  const Interval lr = plan.ranges[last];

  std::vector<std::int64_t> e(plan.outer.size());
  for (std::size_t j = 0; j < plan.outer.size(); ++j) e[j] = plan.ranges[plan.outer[j]].lo;
  if (!plan.outer.empty()) e[0] = first_lo;
  for (;;) {
    double partial = plan.base;
    for (std::size_t j = 0; j < plan.outer.size(); ++j) {
      const std::size_t ci = plan.outer[j];
      set_cells(model, plan.classes[ci], e[j], cells);
      partial += plan.weights[ci][static_cast<std::size_t>(e[j] - plan.ranges[ci].lo)];
    }
    const auto member_at = [&](std::int64_t x) {
      set_cells(model, lc, x, cells);
      return member();
    };
    if (plan.last_increasing) {
      const std::int64_t b = first_true(lr.lo, lr.hi, member_at);
      if (b <= lr.hi) acc.add(partial + plan.tail[static_cast<std::size_t>(b - lr.lo)]);
    } else {
      const std::int64_t b = first_true(lr.lo, lr.hi, [&](std::int64_t x) { return !member_at(x); });
      if (b > lr.lo) acc.add(partial + plan.tail[static_cast<std::size_t>(b - 1 - lr.lo)]);
    }
    // odometer
    std::size_t j = plan.outer.size();
    bool done = true;
    while (j-- > 0) {
      const std::int64_t top = j == 0 ? first_hi : plan.ranges[plan.outer[j]].hi;
      if (e[j] < top) {
        ++e[j];
        for (std::size_t r = j + 1; r < plan.outer.size(); ++r) e[r] = plan.ranges[plan.outer[r]].lo;
        done = false;
        break;
      }
    }
    if (done) break;
  }
  return acc;
}

// ---- predicate: brute force over the config lattice ------------------------

LogSumExp run_predicate(const Model& model, const TypeCounts& counts, double base, const Predicate& pred) {
  LogSumExp acc;
  if (base == -kInf) return acc;
  const auto classes = make_classes(model, counts);
  const std::size_t C = classes.size();
  std::vector<std::int64_t> e(C, 0);
  EdgeCountConfig config{std::vector<std::int64_t>(C, 0)};
  for (;;) {
    double w = base;
    for (std::size_t i = 0; i < C; ++i) w += class_weight(model, classes[i], e[i]);
    if (w != -kInf) {
      config.edges = e;
      const PairMeasure l2 = pair_measure_from_class_counts(model.k, e, model.norm);
      if (pred.contains(l2)) acc.add(w);
    }
    std::size_t i = C;
    bool done = true;
    while (i-- > 0) {
      if (e[i] < classes[i].budget) {
        ++e[i];
        std::fill(e.begin() + static_cast<std::ptrdiff_t>(i) + 1, e.end(), 0);
        done = false;
        break;
      }
    }
    if (done) break;
  }
  return acc;
}

double lattice_size(const TypeCounts& counts) {
  double size = 1.0;
  for (auto N : class_budgets(counts)) size *= static_cast<double>(N + 1);
  return size;
}

constexpr double kPruneMargin = 50.0;

double enumerate_event(std::size_t n, const Event& event, const Kernel& lambda, const TypeLaw& mu,
                       const ConnectionSchedule& schedule, const OracleOptions& options, Weighting weighting) {
  require_same_dim(lambda.dim(), mu.dim(), "exact oracle");
  if (n == 0) throw ValidationError("exact oracle needs n >= 1");
  Model model;
  model.n = n;
  model.k = mu.dim();
  model.norm = schedule.edge_normalizer(n);
  model.probs = schedule.probabilities(lambda, n);
  model.weighting = weighting;
  if (const auto* ball = std::get_if<Ball>(&event)) require_same_dim(ball->center.dim(), model.k, "ball event");
  if (const auto* hs = std::get_if<HalfSpace>(&event)) require_same_dim(hs->g.dim(), model.k, "half-space event");

  if (std::holds_alternative<WholeSpace>(event) && weighting == Weighting::Probability) return 0.0;

  const auto all_counts = counts_in_scope(n, mu, options);
  std::vector<double> bases(all_counts.size());
  for (std::size_t i = 0; i < all_counts.size(); ++i)
    bases[i] = counts_term(model, all_counts[i], mu, options.conditional);

  LogSumExp total;

  if (std::holds_alternative<WholeSpace>(event)) {
    for (std::size_t i = 0; i < all_counts.size(); ++i) {
      double v = bases[i];
      for (auto N : class_budgets(all_counts[i])) v += static_cast<double>(N) * std::log(2.0);
      total.add(v);
    }
    return total.value();
  }

  if (const auto* ball = std::get_if<Ball>(&event)) {
    std::vector<double> parts(all_counts.size());
    run_jobs(all_counts.size(), options.parallel,
             [&](std::size_t i) { parts[i] = ball_counts_value(model, all_counts[i], bases[i], *ball); });
    for (double v : parts) total.add(v);
    return total.value();
  }

  if (const auto* pred = std::get_if<Predicate>(&event)) {
    double work = 0.0;
    for (const auto& counts : all_counts) work += lattice_size(counts);
    if (work > options.budget) throw BudgetExceeded(work, options.budget);
    std::vector<LogSumExp> parts(all_counts.size());
    run_jobs(all_counts.size(), options.parallel,
             [&](std::size_t i) { parts[i] = run_predicate(model, all_counts[i], bases[i], *pred); });
    for (const auto& p : parts) total.merge(p);
    return total.value();
  }

  const auto& hs = std::get<HalfSpace>(event);
  // Probability weights are <= 1 per class, so a config is bounded by the
  // weight of any one of its classes. Everything below LB - margin is dropped,
  // margin covering the size of the lattice.
  double threshold = -kInf;
  if (weighting == Weighting::Probability) {
    std::vector<double> lbs(all_counts.size());
    run_jobs(all_counts.size(), options.parallel, [&](std::size_t i) {
      lbs[i] = half_space_lower_bound(model, make_classes(model, all_counts[i]), bases[i], hs);
    });
    const double lb = *std::max_element(lbs.begin(), lbs.end());
    if (lb == -kInf) return -kInf;
    double log_lattice = std::log(static_cast<double>(all_counts.size()));
    for (auto N : class_budgets(all_counts.front())) log_lattice += std::log(static_cast<double>(N) + 1.0);
    log_lattice += static_cast<double>(class_count(model.k)) * std::log(static_cast<double>(n) + 1.0);
    threshold = lb - kPruneMargin - log_lattice;
  }

  std::vector<HalfSpacePlan> plans(all_counts.size());
  run_jobs(all_counts.size(), options.parallel,
           [&](std::size_t i) { plans[i] = plan_half_space(model, all_counts[i], bases[i], hs, threshold); });

  struct Job {
    std::size_t plan;
    std::int64_t lo, hi;
  };
  constexpr std::int64_t kChunk = 32;
  std::vector<Job> jobs;
  double work = 0.0;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& plan = plans[i];
    if (plan.empty) continue;
    double outer_size = 1.0;
    for (auto ci : plan.outer) outer_size *= static_cast<double>(plan.ranges[ci].hi - plan.ranges[ci].lo + 1);
    work += outer_size;
    if (plan.outer.empty()) {
      jobs.push_back({i, 0, 0});
      continue;
    }
    const Interval r = plan.ranges[plan.outer.front()];
    for (std::int64_t lo = r.lo; lo <= r.hi; lo += kChunk) jobs.push_back({i, lo, std::min(r.hi, lo + kChunk - 1)});
  }
  if (work > options.budget) throw BudgetExceeded(work, options.budget);
  std::vector<LogSumExp> parts(jobs.size());
  run_jobs(jobs.size(), options.parallel, [&](std::size_t j) {
    parts[j] = run_half_space_slice(model, plans[jobs[j].plan], hs, jobs[j].lo, jobs[j].hi);
  });
  for (const auto& p : parts) total.merge(p);
  return total.value();
}

}  // namespace

double event_log_probability(std::size_t n, const Event& event, const Kernel& lambda, const TypeLaw& mu,
                             const ConnectionSchedule& schedule, const OracleOptions& options) {
  // summation rounding can push a near-certain event a hair above 0
  return std::min(0.0, enumerate_event(n, event, lambda, mu, schedule, options, Weighting::Probability));
}

double event_log_count(std::size_t n, const Event& event, const Kernel& lambda, const TypeLaw& mu,
                       const ConnectionSchedule& schedule, const OracleOptions& options) {
  return enumerate_event(n, event, lambda, mu, schedule, options, Weighting::Count);
}

// ---- rate sequences ------------------------------------------------------

namespace {

// Least squares by normal equations; tiny systems only.
std::vector<double> least_squares(const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
  const std::size_t p = rows.front().size();
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) a[i][j] += rows[r][i] * rows[r][j];
      a[i][p] += rows[r][i] * y[r];
    }
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == col || a[col][col] == 0.0) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t j = col; j <= p; ++j) a[r][j] -= f * a[col][j];
    }
  }
  std::vector<double> x(p);
  for (std::size_t i = 0; i < p; ++i) x[i] = a[i][p] / a[i][i];
  return x;
}

}  // namespace

Extrapolation extrapolate_rates(const std::vector<std::size_t>& n_list, const std::vector<double>& rates) {
  Extrapolation out;
  const std::size_t m = n_list.size();
  if (m == 0) return out;
  if (m == 1) {
    out.richardson = out.linear_fit = out.stirling_fit = rates[0];
    return out;
  }
  const double n1 = static_cast<double>(n_list[m - 2]);
  const double n2 = static_cast<double>(n_list[m - 1]);
  out.richardson = (n2 * rates[m - 1] - n1 * rates[m - 2]) / (n2 - n1);

  std::vector<std::vector<double>> rows;
  for (auto n : n_list) rows.push_back({1.0, 1.0 / static_cast<double>(n)});
  out.linear_fit = least_squares(rows, rates)[0];
  if (m >= 3) {
    rows.clear();
    for (auto n : n_list) {
      const double dn = static_cast<double>(n);
      rows.push_back({1.0, std::log(dn) / dn, 1.0 / dn});
    }
    out.stirling_fit = least_squares(rows, rates)[0];
  } else {
    out.stirling_fit = out.linear_fit;
  }
  return out;
}

RateSequence rate_sequence(const EventFamily& events, const std::vector<std::size_t>& n_list, const Kernel& lambda,
                           const TypeLaw& mu, const ConnectionSchedule& schedule, const OracleOptions& options) {
  RateSequence seq;
  std::vector<double> rates;
  for (auto n : n_list) {
    OracleOptions opts = options;
    if (opts.conditional && opts.counts && total_nodes(*opts.counts) != n) opts.counts.reset();
    const double lp = event_log_probability(n, events(n), lambda, mu, schedule, opts);
    RateRow row{n, lp, -lp / static_cast<double>(n)};
    seq.rows.push_back(row);
    rates.push_back(row.rate);
  }
  const auto ex = extrapolate_rates(n_list, rates);
  seq.richardson = ex.richardson;
  seq.linear_fit = ex.linear_fit;
  seq.stirling_fit = ex.stirling_fit;
  return seq;
}

// ---- rate-function infima ------------------------------------------------

double event_rate_infimum(const Event& event, const PairMeasure& m) {
  const std::size_t k = m.dim();
  if (std::holds_alternative<WholeSpace>(event)) return 0.0;
  if (const auto* ball = std::get_if<Ball>(&event)) {
    require_same_dim(ball->center.dim(), k, "ball infimum");
    SquareTable best(k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        const double lo = std::max(0.0, ball->center(a, b) - ball->radius);
        const double hi = ball->center(a, b) + ball->radius;
        if (hi < 0.0) return kInf;
        best(a, b) = std::clamp(m(a, b), lo, hi);
      }
    return kullback_action(PairMeasure(std::move(best)), m);
  }
  if (const auto* hs = std::get_if<HalfSpace>(&event)) {
    // minimiser on the boundary is the exponential family m e^{theta g}
    if (pairing(hs->g, m) >= hs->level) return 0.0;
    const auto family = [&](double theta) {
      SquareTable t(k);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) t(a, b) = m(a, b) * std::exp(theta * hs->g(a, b));
      return PairMeasure(std::move(t));
    };
    double lo = 0.0, hi = 1.0;
    while (pairing(hs->g, family(hi)) < hs->level) {
      lo = hi;
      hi *= 2.0;
      if (hi > 700.0) return kInf;
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (pairing(hs->g, family(mid)) < hs->level)
        lo = mid;
      else
        hi = mid;
    }
    return kullback_action(family(hi), m);
  }
  return grid_infimum(event, m, 40);
}

double grid_infimum(const Event& event, const PairMeasure& m, int steps_per_class, double upper) {
  const std::size_t k = m.dim();
  const std::size_t C = class_count(k);
  if (upper <= 0.0) {
    double mx = 0.0;
    for (double x : m.values()) mx = std::max(mx, x);
    upper = 4.0 * mx + 1.0;
  }
  std::vector<std::pair<std::size_t, std::size_t>> cells(C);
  std::vector<double> lo(C, 0.0), hi(C, upper);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      const std::size_t c = class_index(k, a, b);
      cells[c] = {a, b};
      if (const auto* ball = std::get_if<Ball>(&event)) {
        lo[c] = std::max(0.0, ball->center(a, b) - ball->radius);
        hi[c] = ball->center(a, b) + ball->radius;
        if (hi[c] < lo[c]) return kInf;
      }
    }
  const int steps = std::max(1, steps_per_class);
  std::vector<int> idx(C, 0);
  double best = kInf;
  SquareTable t(k);
  for (;;) {
    for (std::size_t c = 0; c < C; ++c) {
      const double v = lo[c] + (hi[c] - lo[c]) * static_cast<double>(idx[c]) / steps;
      t(cells[c].first, cells[c].second) = v;
      t(cells[c].second, cells[c].first) = v;
    }
    const PairMeasure pi(t);
    if (event_membership(event, pi)) best = std::min(best, kullback_action(pi, m));
    std::size_t c = C;
    bool done = true;
    while (c-- > 0) {
      if (idx[c] < steps) {
        ++idx[c];
        std::fill(idx.begin() + static_cast<std::ptrdiff_t>(c) + 1, idx.end(), 0);
        done = false;
        break;
      }
    }
    if (done) break;
  }
  return best;
}

// ---- brute force ---------------------------------------------------------

namespace {

struct ColouringResult {
  TypeCounts counts;
  double colour_prob = 0.0;
  struct Cell {
    std::uint64_t graphs = 0;
    double edge_prob = 0.0;
    std::uint64_t representative = 0;
    std::vector<std::int64_t> edges;
  };
  std::vector<Cell> cells;
  std::vector<std::uint32_t> colours;
};

}  // namespace

NaiveTable naive_enumerate(std::size_t n, const Kernel& lambda, const TypeLaw& mu, const ConnectionSchedule& schedule,
                           double budget, bool parallel) {
  require_same_dim(lambda.dim(), mu.dim(), "naive_enumerate");
  if (n == 0) throw ValidationError("naive enumeration needs n >= 1");
  const std::size_t k = mu.dim();
  const std::size_t pairs = n * (n - 1) / 2;
  const double graphs = std::pow(static_cast<double>(k), static_cast<double>(n)) * std::ldexp(1.0, static_cast<int>(pairs));
  if (graphs > budget || pairs > 40) throw BudgetExceeded(graphs, budget);

  const auto probs = schedule.probabilities(lambda, n);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pair_list;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v) pair_list.emplace_back(u, v);

  std::size_t colourings = 1;
  for (std::size_t i = 0; i < n; ++i) colourings *= k;
  const std::uint64_t masks = std::uint64_t{1} << pairs;

  std::vector<ColouringResult> results(colourings);
  run_jobs(colourings, parallel, [&](std::size_t ci) {
    auto& res = results[ci];
    res.colours.resize(n);
    std::size_t code = ci;
    for (std::size_t v = 0; v < n; ++v) {
      res.colours[v] = static_cast<std::uint32_t>(code % k);
      code /= k;
    }
    res.counts = type_counts(res.colours, k);
    res.colour_prob = 1.0;
    for (auto c : res.colours) res.colour_prob *= mu[c];

    const auto budgets = class_budgets(res.counts);
    std::vector<std::size_t> pair_class(pairs);
    std::vector<double> p_pair(pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
      const auto cu = res.colours[pair_list[i].first];
      const auto cv = res.colours[pair_list[i].second];
      pair_class[i] = class_index(k, cu, cv);
      p_pair[i] = probs(cu, cv);
    }
    // mixed radix index over the config lattice
    std::vector<std::size_t> radix(budgets.size());
    std::size_t lattice = 1;
    for (std::size_t c = 0; c < budgets.size(); ++c) {
      radix[c] = lattice;
      lattice *= static_cast<std::size_t>(budgets[c] + 1);
    }
    std::vector<std::uint64_t> graph_count(lattice, 0);
    std::vector<CompensatedSum> prob_sum(lattice);
    std::vector<std::uint64_t> rep(lattice, 0);
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
      std::size_t key = 0;
      double prob = 1.0;
      for (std::size_t i = 0; i < pairs; ++i) {
        if ((mask >> i) & 1U) {
          key += radix[pair_class[i]];
          prob *= p_pair[i];
        } else {
          prob *= 1.0 - p_pair[i];
        }
      }
      if (graph_count[key]++ == 0) rep[key] = mask;
      prob_sum[key].add(prob);
    }
    for (std::size_t key = 0; key < lattice; ++key) {
      if (graph_count[key] == 0) continue;
      ColouringResult::Cell cell;
      cell.graphs = graph_count[key];
      cell.edge_prob = prob_sum[key].value();
      cell.representative = rep[key];
      cell.edges.resize(budgets.size());
      for (std::size_t c = 0; c < budgets.size(); ++c)
        cell.edges[c] = static_cast<std::int64_t>((key / radix[c]) % static_cast<std::size_t>(budgets[c] + 1));
      res.cells.push_back(std::move(cell));
    }
  });

  NaiveTable table;
  table.n = n;
  table.k = k;
  for (const auto& res : results) {
    table.colourings[res.counts] += 1;
    for (const auto& cell : res.cells) {
      auto key = std::make_pair(res.counts, EdgeCountConfig{cell.edges});
      auto it = table.entries.find(key);
      if (it == table.entries.end()) {
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < pairs; ++i)
          if ((cell.representative >> i) & 1U) edges.push_back({pair_list[i].first, pair_list[i].second});
        NaiveEntry entry;
        entry.link_measure = empirical_pair_measure(ColouredGraph(k, res.colours, std::move(edges)), schedule);
        it = table.entries.emplace(std::move(key), std::move(entry)).first;
      }
      it->second.graphs += cell.graphs;
      it->second.edge_probability += cell.edge_prob;
      it->second.probability += res.colour_prob * cell.edge_prob;
      table.graphs += cell.graphs;
    }
  }
  return table;
}

double naive_event_log_probability(const NaiveTable& table, const Event& event, bool conditional,
                                   const TypeCounts& counts) {
  CompensatedSum s;
  for (const auto& [key, entry] : table.entries) {
    if (conditional && key.first != counts) continue;
    if (!event_membership(event, entry.link_measure)) continue;
    if (conditional)
      s.add(entry.edge_probability / static_cast<double>(table.colourings.at(counts)));
    else
      s.add(entry.probability);
  }
  const double v = s.value();
  return v > 0.0 ? std::log(v) : -kInf;
}

double naive_event_log_count(const NaiveTable& table, const Event& event) {
  BigInt total = 0;
  for (const auto& [key, entry] : table.entries)
    if (event_membership(event, entry.link_measure)) total += entry.graphs;
  return log_big(total);
}

// ---- McMillan and single-config rates -----------------------------------

McMillanRow mcmillan_count_report(std::size_t n, const Ball& ball, const Kernel& lambda, const TypeLaw& mu,
                                  const ConnectionSchedule& schedule, const OracleOptions& options) {
  OracleOptions opts = options;
  opts.conditional = false;
  McMillanRow row;
  row.n = n;
  row.log_card = event_log_count(n, Event{ball}, lambda, mu, schedule, opts);
  row.n_times_entropy = static_cast<double>(n) * mcmillan_entropy(ball.center, lambda, mu);
  row.gap = row.log_card - row.n_times_entropy;
  return row;
}

SingleConfigRate single_config_rate(std::size_t n, const PairMeasure& pi, const Kernel& lambda, const TypeLaw& mu,
                                    const ConnectionSchedule& schedule) {
  const auto counts = counts_from_law(mu, n);
  const auto config = nearest_config(counts, pi, schedule);
  SingleConfigRate out;
  out.n = n;
  out.rate = -config_log_probability(counts, config, lambda, mu, schedule, true) / static_cast<double>(n);
  out.realized = config_to_pair_measure(counts, config, schedule);
  return out;
}

}  // namespace trg
