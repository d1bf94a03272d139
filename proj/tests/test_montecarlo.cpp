#include <doctest.h>

#include <cmath>

#include "trg/error.hpp"
#include "trg/legendre.hpp"
#include "trg/montecarlo.hpp"

using namespace trg;

namespace {

SquareTable rows(std::vector<std::vector<double>> r) { return SquareTable::from_rows(r); }

const ConnectionSchedule kNc = ConnectionSchedule::near_critical();
const Kernel kOne2 = Kernel::constant(2, 1.0);
const TypeLaw kUniform2 = TypeLaw::uniform(2);

SamplerOptions opts(std::uint64_t samples, std::uint64_t seed, int workers = 4) {
  SamplerOptions o;
  o.samples = samples;
  o.seed = seed;
  o.workers = workers;
  return o;
}

}  // namespace

TEST_CASE("whole space has probability one") {
  const auto e = mc_event_probability(30, WholeSpace{}, kUniform2, kOne2, kNc, opts(1000, 1));
  CHECK(e.value == 1.0);
  CHECK(e.std_error == 0.0);
  CHECK(e.effective_sample_size == 1000.0);
}

TEST_CASE("single-pair edge count is Bernoulli(1/2)") {
  const Kernel one = Kernel::constant(1, 1.0);
  // |E| = 1 iff ||L2|| = 2 / (a_n n^2) = 1
  const Predicate one_edge{[](const PairMeasure& w) { return w.total_mass() == 1.0; }, "one edge"};
  const auto e = mc_event_probability(2, one_edge, TypeLaw::uniform(1), one, kNc, opts(100000, 2));
  CHECK(std::abs(e.value - 0.5) <= 3.0 * e.std_error);
  CHECK(e.std_error == doctest::Approx(std::sqrt(e.value * (1 - e.value) / 1e5)));
}

TEST_CASE("naive and tilted estimators agree with the exact oracle for small n") {
  const auto m = product_measure(kOne2, kUniform2);
  const auto pi = PairMeasure(rows({{0.35, 0.3}, {0.3, 0.3}}));
  const auto g = optimal_tilt(pi, m);
  for (std::size_t n : {10, 20, 30}) {
    for (const Event& ev : {Event{Ball{m.scaled(1.1), 0.1}}, Event{half_space_neighbourhood(g, pi, 0.05)}}) {
      const double exact = std::exp(event_log_probability(n, ev, kOne2, kUniform2, kNc));
      const auto naive = mc_event_probability(n, ev, kUniform2, kOne2, kNc, opts(20000, 3 + n));
      const auto tilted = is_event_probability(n, ev, kUniform2, kOne2, kNc, g, opts(20000, 5 + n));
      CHECK(std::abs(naive.value - exact) <= 3.0 * naive.std_error);
      CHECK(std::abs(tilted.value - exact) <= 3.0 * tilted.std_error);
      CHECK(naive.effective_sample_size <= 20000.0);
      CHECK(tilted.effective_sample_size <= 20000.0);
    }
  }
}

TEST_CASE("zero tilt reproduces the plain estimator statistically") {
  const auto m = product_measure(kOne2, kUniform2);
  const Event ev = Ball{m.scaled(1.2), 0.08};
  const auto a = mc_event_probability(50, ev, kUniform2, kOne2, kNc, opts(20000, 7));
  const auto b = is_event_probability(50, ev, kUniform2, kOne2, kNc, TestFunction::constant(2, 0.0), opts(20000, 8));
  CHECK(std::abs(a.value - b.value) <= 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("mean importance weight is one") {
  const auto g = TestFunction(rows({{0.3, -0.2}, {-0.2, 0.5}}));
  const auto w = is_event_probability(15, WholeSpace{}, kUniform2, kOne2, kNc, g, opts(100000, 9));
  CHECK(std::abs(w.value - 1.0) <= 3.0 * w.std_error);
}

TEST_CASE("determinism contract") {
  const auto m = product_measure(kOne2, kUniform2);
  const Event ev = Ball{m.scaled(1.2), 0.08};
  const auto a = mc_event_probability(60, ev, kUniform2, kOne2, kNc, opts(10000, 11, 4));
  const auto b = mc_event_probability(60, ev, kUniform2, kOne2, kNc, opts(10000, 11, 4));
  auto serial_opts = opts(10000, 11, 4);
  serial_opts.parallel = false;
  const auto c = mc_event_probability(60, ev, kUniform2, kOne2, kNc, serial_opts);
  CHECK(a.value == b.value);
  CHECK(a.value == c.value);
  CHECK(a.std_error == c.std_error);
  const auto d = mc_event_probability(60, ev, kUniform2, kOne2, kNc, opts(10000, 12, 4));
  CHECK(a.value != d.value);
  // same worker count, tilted path, serial vs parallel
  const auto g = optimal_tilt(m.scaled(1.2), m);
  auto s2 = opts(5000, 13, 3);
  const auto p1 = is_event_probability(60, ev, kUniform2, kOne2, kNc, g, s2);
  s2.parallel = false;
  const auto p2 = is_event_probability(60, ev, kUniform2, kOne2, kNc, g, s2);
  CHECK(p1.value == p2.value);
  CHECK(p1.second_moment == p2.second_moment);
}

TEST_CASE("zero hits report the rule-of-three bound") {
  const auto m = product_measure(kOne2, kUniform2);
  const auto e = mc_event_probability(100, Ball{m.scaled(3.0), 0.001}, kUniform2, kOne2, kNc, opts(3000, 14));
  CHECK(e.hits == 0u);
  REQUIRE(e.zero_hit_upper_bound.has_value());
  CHECK(*e.zero_hit_upper_bound == doctest::Approx(1e-3));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(mc_event_probability(10, WholeSpace{}, kUniform2, kOne2, kNc, opts(0, 1)), ValidationError);
  CHECK_THROWS_AS(mc_event_probability(10, WholeSpace{}, kUniform2, kOne2, kNc, opts(10, 1, 0)), ValidationError);
  const Kernel heavy(rows({{1, 40}, {40, 1}}));
  CHECK_THROWS_AS(is_event_probability(10, WholeSpace{}, kUniform2, heavy, kNc, TestFunction::constant(2, 1.0),
                                       opts(10, 1)),
                  ValidationError);
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::Tilted;
  CHECK_THROWS_AS(rate_estimate({10}, [](std::size_t) { return Event{WholeSpace{}}; }, kUniform2, kOne2, kNc, cfg),
                  ValidationError);
}

TEST_CASE("rate estimates") {
  EstimatorConfig cfg;
  cfg.sampler = opts(2000, 15);
  const auto whole = rate_estimate({10, 20}, [](std::size_t) { return Event{WholeSpace{}}; }, kUniform2, kOne2, kNc, cfg);
  for (const auto& r : whole) {
    CHECK(r.has_rate);
    CHECK(r.rate == 0.0);
  }

  // against the exact rate sequence on a k = 2 ball
  const auto m = product_measure(kOne2, kUniform2);
  const Ball ball{m.scaled(1.2), 0.05};
  const std::vector<std::size_t> ns = {50, 100, 200};
  const auto exact = rate_sequence([&](std::size_t) { return Event{ball}; }, ns, kOne2, kUniform2, kNc);
  cfg.sampler = opts(40000, 16);
  cfg.z = 3.0;
  const auto est = rate_estimate(ns, [&](std::size_t) { return Event{ball}; }, kUniform2, kOne2, kNc, cfg);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    REQUIRE(est[i].has_rate);
    CHECK(exact.rows[i].rate >= est[i].ci_low);
    CHECK(exact.rows[i].rate <= est[i].ci_high);
  }

  // CI width shrinks like samples^-1/2
  cfg.sampler = opts(10000, 17);
  const auto small = rate_estimate({50}, [&](std::size_t) { return Event{ball}; }, kUniform2, kOne2, kNc, cfg);
  cfg.sampler = opts(160000, 18);
  const auto large = rate_estimate({50}, [&](std::size_t) { return Event{ball}; }, kUniform2, kOne2, kNc, cfg);
  const double ratio = (small[0].ci_high - small[0].ci_low) / (large[0].ci_high - large[0].ci_low);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));

  cfg.sampler = opts(500, 19);
  const auto none = rate_estimate({100}, [&](std::size_t) { return Event{Ball{m.scaled(3.0), 0.001}}; }, kUniform2,
                                  kOne2, kNc, cfg);
  CHECK_FALSE(none[0].has_rate);
}
