#include <doctest.h>

#include <cmath>

#include "trg/error.hpp"
#include "trg/legendre.hpp"
#include "trg/numeric.hpp"
#include "trg/oracle.hpp"

using namespace trg;

namespace {

SquareTable rows(std::vector<std::vector<double>> r) { return SquareTable::from_rows(r); }

const ConnectionSchedule kNc = ConnectionSchedule::near_critical();

}  // namespace

TEST_CASE("config to pair measure") {
  const auto cross = config_to_pair_measure({1, 1}, {{0, 1, 0}}, kNc);
  CHECK(cross(0, 1) == 0.5);
  CHECK(cross(1, 0) == 0.5);
  CHECK(cross == empirical_pair_measure(ColouredGraph(2, {0, 1}, {{0, 1}}), kNc));
  CHECK(config_to_pair_measure({3, 2}, {{0, 0, 0}}, kNc).total_mass() == 0.0);
  CHECK(config_to_pair_measure({2, 0}, {{1, 0, 0}}, kNc)(0, 0) == 1.0);
  CHECK_THROWS_AS(validate_config({2, 0}, {{2, 0, 0}}), ValidationError);
  CHECK_THROWS_AS(validate_config({1, 1}, {{0, 2, 0}}), ValidationError);
}

TEST_CASE("graph counts") {
  CHECK(count_graphs({2}, {{0}}) == 1);
  CHECK(count_graphs({2}, {{1}}) == 1);
  BigInt total = 0;
  for (int e = 0; e <= 3; ++e) total += count_graphs({3}, {{e}});
  CHECK(total == 8);
  CHECK(count_graphs({1, 1}, {{0, 1, 0}}) == 2);
  CHECK(binomial(10, 3) == 120);
  CHECK(multinomial({2, 1, 1}) == 12);
  // log path against the exact integers
  const TypeCounts counts{23, 17};
  const EdgeCountConfig cfg{{40, 100, 55}};
  CHECK(log_count_graphs(counts, cfg) == doctest::Approx(log_big(count_graphs(counts, cfg))).epsilon(1e-12));
}

TEST_CASE("config log probability") {
  const Kernel one = Kernel::constant(2, 1.0);
  const TypeLaw mu = TypeLaw::uniform(2);
  CHECK(config_log_probability({1, 1}, {{0, 1, 0}}, one, mu, kNc, true) == doctest::Approx(std::log(0.5)));
  CHECK(config_log_probability({1, 1}, {{0, 1, 0}}, one, mu, kNc, false) ==
        doctest::Approx(std::log(0.5) + std::log(0.5)));
  // p = 1: all-present config is certain, anything else impossible
  const Kernel heavy(rows({{1, 4}, {4, 1}}));
  CHECK(config_log_probability({1, 1}, {{0, 1, 0}}, heavy, mu, kNc, true) == 0.0);
  CHECK(config_log_probability({1, 1}, {{0, 0, 0}}, heavy, mu, kNc, true) == -kInf);
  // p = 0 with an edge
  const Kernel split(rows({{1, 0}, {0, 1}}));
  CHECK(config_log_probability({2, 2}, {{0, 1, 0}}, split, mu, kNc, true) == -kInf);

  // conditional normalisation over the whole lattice
  const Kernel lam(rows({{1.3, 0.4}, {0.4, 2.2}}));
  const TypeCounts counts{4, 3};
  LogSumExp acc;
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 12; ++b)
      for (int c = 0; c <= 3; ++c) acc.add(config_log_probability(counts, {{a, b, c}}, lam, mu, kNc, true));
  CHECK(acc.value() == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
}

TEST_CASE("event probabilities: whole space and huge balls") {
  const Kernel lam(rows({{1.3, 0.4}, {0.4, 2.2}}));
  const TypeLaw mu(std::vector<double>{0.3, 0.7});
  const auto m = product_measure(lam, mu);
  for (bool conditional : {true, false}) {
    OracleOptions o;
    o.conditional = conditional;
    CHECK(event_log_probability(40, WholeSpace{}, lam, mu, kNc, o) == 0.0);
    CHECK(event_log_probability(40, Ball{m, 1e6}, lam, mu, kNc, o) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("naive enumeration") {
  const Kernel lam(rows({{1.3, 0.4}, {0.4, 2.2}}));
  const TypeLaw mu(std::vector<double>{0.3, 0.7});
  const auto table = naive_enumerate(3, lam, mu, kNc);
  CHECK(table.graphs == 64u);
  double total = 0.0;
  for (const auto& [key, entry] : table.entries) {
    total += entry.probability;
    CHECK(BigInt(entry.graphs) == count_graphs(key.first, key.second));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(naive_enumerate(9, lam, mu, kNc), BudgetExceeded);
}

TEST_CASE("exact oracle agrees with naive enumeration on random events") {
  Rng rng(12);
  for (int i = 0; i < 6; ++i) {
    SquareTable t(2);
    t(0, 0) = 0.5 + 2 * uniform01(rng);
    t(1, 1) = 0.5 + 2 * uniform01(rng);
    t(0, 1) = t(1, 0) = 0.2 + uniform01(rng);
    const Kernel lam(t);
    const double w = 0.2 + 0.6 * uniform01(rng);
    const TypeLaw mu(std::vector<double>{w, 1 - w});
    const auto m = product_measure(lam, mu);
    const std::size_t n = 4 + i % 3;
    const auto table = naive_enumerate(n, lam, mu, kNc);
    const auto counts = counts_from_law(mu, n);
    const std::vector<Event> events = {
        Ball{m.scaled(1.3), 0.2}, half_space_neighbourhood(TestFunction(rows({{0.4, -0.3}, {-0.3, 0.2}})), m, 0.05),
        Predicate{[](const PairMeasure& x) { return x(0, 1) > x(0, 0); }, "cross heavier"}};
    for (const auto& ev : events)
      for (bool conditional : {true, false}) {
        OracleOptions o;
        o.conditional = conditional;
        o.counts = counts;
        const double got = event_log_probability(n, ev, lam, mu, kNc, o);
        const double want = naive_event_log_probability(table, ev, conditional, counts);
        if (std::isinf(want))
          CHECK(got == want);
        else
          CHECK(got == doctest::Approx(want).epsilon(1e-10));
      }
    OracleOptions all;
    all.conditional = false;
    CHECK(event_log_count(n, Ball{m, 0.3}, lam, mu, kNc, all) ==
          doctest::Approx(naive_event_log_count(table, Ball{m, 0.3})).epsilon(1e-12));
  }
}

TEST_CASE("whole-space count is k^n 2^C(n,2)") {
  const Kernel one = Kernel::constant(3, 1.0);
  const TypeLaw mu = TypeLaw::uniform(3);
  OracleOptions o;
  o.conditional = false;
  for (std::size_t n : {1, 5, 30}) {
    const double expected = static_cast<double>(n) * std::log(3.0) + static_cast<double>(n * (n - 1) / 2) * std::log(2.0);
    CHECK(event_log_count(n, WholeSpace{}, one, mu, kNc, o) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("budget guard") {
  const Kernel one = Kernel::constant(2, 1.0);
  OracleOptions o;
  o.budget = 10;
  CHECK_THROWS_AS(event_log_probability(30, Predicate{[](const PairMeasure&) { return true; }, "all"}, one,
                                        TypeLaw::uniform(2), kNc, o),
                  BudgetExceeded);
}

TEST_CASE("rate sequences") {
  const Kernel one = Kernel::constant(2, 1.0);
  const TypeLaw mu = TypeLaw::uniform(2);
  const auto m = product_measure(one, mu);
  const auto whole = rate_sequence([](std::size_t) { return Event{WholeSpace{}}; }, {10, 20, 40}, one, mu, kNc);
  for (const auto& r : whole.rows) CHECK(r.rate == 0.0);

  // half-space containing m with a margin: probability tends to one
  const HalfSpace easy{TestFunction::constant(2, 1.0), 0.7 * m.total_mass()};
  const auto seq = rate_sequence([&](std::size_t) { return Event{easy}; }, {50, 100, 200, 400}, one, mu, kNc);
  for (std::size_t i = 1; i < seq.rows.size(); ++i) CHECK(seq.rows[i].rate <= seq.rows[i - 1].rate);
  CHECK(seq.rows.back().rate < 1e-6);
}

TEST_CASE("extrapolation recovers synthetic limits") {
  const std::vector<std::size_t> ns = {100, 200, 400, 800};
  std::vector<double> lin, stir;
  for (auto n : ns) {
    const double x = static_cast<double>(n);
    lin.push_back(0.05 + 3.0 / x);
    stir.push_back(0.05 + 1.5 * std::log(x) / x - 2.0 / x);
  }
  const auto a = extrapolate_rates(ns, lin);
  CHECK(a.richardson == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(a.linear_fit == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(extrapolate_rates(ns, stir).stirling_fit == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("rate infima") {
  const auto m = product_measure(Kernel::constant(2, 1.0), TypeLaw::uniform(2));
  const Ball ball{m.scaled(1.5), 0.02};
  const double closed = event_rate_infimum(ball, m);
  // every cell clamps to 0.375 - 0.02
  const PairMeasure corner(rows({{0.355, 0.355}, {0.355, 0.355}}));
  CHECK(closed == doctest::Approx(kullback_action(corner, m)).epsilon(1e-14));
  // the grid misses the corner by at most one step
  const double grid = grid_infimum(ball, m, 100);
  CHECK(grid >= closed);
  CHECK(grid == doctest::Approx(closed).epsilon(0.01));
  CHECK(event_rate_infimum(Ball{m.scaled(1.5), 0.0}, m) ==
        doctest::Approx((1.5 * std::log(1.5) - 0.5) / 2.0).epsilon(1e-14));

  const auto pi = PairMeasure(rows({{0.4, 0.3}, {0.3, 0.36}}));
  const auto hs = half_space_neighbourhood(optimal_tilt(pi, m), pi, 0.02);
  const double h_inf = event_rate_infimum(hs, m);
  CHECK(h_inf < kullback_action(pi, m));
  CHECK(grid_infimum(hs, m, 60, 1.0) >= h_inf - 1e-12);
  CHECK(grid_infimum(hs, m, 60, 1.0) == doctest::Approx(h_inf).epsilon(0.05));
  CHECK(event_rate_infimum(WholeSpace{}, m) == 0.0);
}

TEST_CASE("nearest config and single-config rate") {
  const Kernel one = Kernel::constant(2, 1.0);
  const TypeLaw mu = TypeLaw::uniform(2);
  const auto pi = PairMeasure(rows({{0.4, 0.3}, {0.3, 0.36}}));
  const auto cfg = nearest_config({50, 50}, pi, kNc);
  CHECK(cfg.edges == std::vector<std::int64_t>{20, 30, 18});
  const auto r = single_config_rate(100, pi, one, mu, kNc);
  CHECK(r.realized == pi);
  CHECK(r.rate > kullback_action(pi, one, mu));
}

TEST_CASE("mcmillan report at m") {
  const Kernel one = Kernel::constant(2, 1.0);
  const TypeLaw mu = TypeLaw::uniform(2);
  const auto row = mcmillan_count_report(50, Ball{product_measure(one, mu), 0.02}, one, mu, kNc);
  CHECK(row.n_times_entropy == doctest::Approx(50 * std::log(2.0)));
  CHECK(row.gap == doctest::Approx(row.log_card - row.n_times_entropy));
  CHECK(std::isfinite(row.log_card));
}
