#include <doctest.h>

#include <cmath>
#include <set>

#include "trg/error.hpp"
#include "trg/graph.hpp"

using namespace trg;

namespace {

SquareTable rows(std::vector<std::vector<double>> r) { return SquareTable::from_rows(r); }

}  // namespace

TEST_CASE("class index is a bijection onto [0, k(k+1)/2)") {
  for (std::size_t k = 1; k <= 6; ++k) {
    std::set<std::size_t> seen;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a; b < k; ++b) {
        CHECK(class_index(k, a, b) == class_index(k, b, a));
        seen.insert(class_index(k, a, b));
      }
    CHECK(seen.size() == class_count(k));
    CHECK(*seen.rbegin() == class_count(k) - 1);
  }
}

TEST_CASE("connection schedules") {
  const auto nc = ConnectionSchedule::near_critical();
  CHECK(nc.a(4) == 0.25);
  CHECK(nc.edge_normalizer(10) == 10.0);
  const auto p = nc.probabilities(Kernel(rows({{1, 3}, {3, 0.5}})), 2);
  CHECK(p(0, 0) == 0.5);
  CHECK(p(0, 1) == 1.0);  // capped
  CHECK(p(1, 1) == 0.25);
  CHECK(ConnectionSchedule::scaled(3.0).a(2) == 1.0);
  CHECK(ConnectionSchedule::scaled(3.0).a(6) == 0.5);
  CHECK_THROWS_AS(ConnectionSchedule::scaled(-1.0), ValidationError);
}

TEST_CASE("graph construction validates and normalises") {
  const ColouredGraph g(2, {0, 1, 1}, {{2, 0}, {1, 0}});
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {0, 2}});
  CHECK_THROWS_AS(ColouredGraph(2, {0, 1}, {{0, 0}}), ValidationError);
  CHECK_THROWS_AS(ColouredGraph(2, {0, 1}, {{0, 1}, {1, 0}}), ValidationError);
  CHECK_THROWS_AS(ColouredGraph(2, {0, 2}, {}), ValidationError);
  CHECK_THROWS_AS(ColouredGraph(2, {0, 1}, {{0, 5}}), ValidationError);
}

TEST_CASE("single-pair edge frequency over many seeds is Bernoulli(1/2)") {
  const Kernel one = Kernel::constant(1, 1.0);
  const TypeLaw mu = TypeLaw::uniform(1);
  const auto nc = ConnectionSchedule::near_critical();
  const int S = 100000;
  int hits = 0;
  for (int s = 0; s < S; ++s) {
    Rng rng = make_substream(99, static_cast<std::uint64_t>(s));
    hits += static_cast<int>(sample_graph(2, mu, one, nc, rng).edges().size());
  }
  const double p = static_cast<double>(hits) / S;
  CHECK(std::abs(p - 0.5) <= 3.0 * std::sqrt(0.25 / S));
}

TEST_CASE("capped classes are complete and sampling is deterministic") {
  const Kernel lam(rows({{0.0, 50.0}, {50.0, 0.0}}));
  Rng rng(3);
  const auto g = sample_graph_conditional({4, 5}, lam, ConnectionSchedule::near_critical(), rng);
  CHECK(g.edges().size() == 20u);
  for (const auto& e : g.edges()) CHECK(g.colours()[e.u] != g.colours()[e.v]);

  const Kernel mixed(rows({{2.0, 1.0}, {1.0, 3.0}}));
  const TypeLaw mu(std::vector<double>{0.3, 0.7});
  Rng r1(17), r2(17);
  CHECK(sample_graph(300, mu, mixed, ConnectionSchedule::scaled(4.0), r1) ==
        sample_graph(300, mu, mixed, ConnectionSchedule::scaled(4.0), r2));
}

TEST_CASE("conditional sampler") {
  Rng rng(5);
  const Kernel one = Kernel::constant(2, 1.0);
  const auto g = sample_graph_conditional({2, 0}, one, ConnectionSchedule::near_critical(), rng);
  CHECK(g.colours() == std::vector<std::uint32_t>{0, 0});
  const Kernel cross(rows({{1.0, 2.0}, {2.0, 1.0}}));
  for (int i = 0; i < 20; ++i) {
    const auto h = sample_graph_conditional({1, 1}, cross, ConnectionSchedule::near_critical(), rng);
    CHECK(h.edges().size() == 1u);
  }
  const auto big = sample_graph_conditional({7, 0, 13}, Kernel::constant(3, 2.0), ConnectionSchedule::near_critical(), rng);
  const auto l1 = empirical_type_measure(big);
  CHECK(l1[0] == 7.0 / 20.0);
  CHECK(l1[1] == 0.0);
  CHECK(l1[2] == 13.0 / 20.0);
  CHECK_THROWS_AS(sample_graph_conditional({-1, 3}, cross, ConnectionSchedule::near_critical(), rng), ValidationError);
}

TEST_CASE("largest remainder counts") {
  CHECK(counts_from_law(TypeLaw::uniform(2), 7) == TypeCounts{4, 3});
  CHECK(counts_from_law(TypeLaw(std::vector<double>{0.2, 0.3, 0.5}), 10) == TypeCounts{2, 3, 5});
  const auto c = counts_from_law(TypeLaw(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}), 100);
  CHECK(c[0] + c[1] + c[2] == 100);
}

TEST_CASE("empirical type measure") {
  const ColouredGraph g(2, {0, 0, 1}, {});
  const auto l1 = empirical_type_measure(g);
  CHECK(l1[0] == doctest::Approx(2.0 / 3.0));
  CHECK(l1[1] == doctest::Approx(1.0 / 3.0));
  const ColouredGraph relabelled(2, {1, 0, 0}, {{0, 2}});
  CHECK(empirical_type_measure(relabelled)[0] == l1[0]);
  const auto single = empirical_type_measure(ColouredGraph(3, {0}, {}));
  CHECK(single[0] == 1.0);
  CHECK(single[1] == 0.0);
}

TEST_CASE("empirical pair measure follows the delta-sum definition") {
  const auto nc = ConnectionSchedule::near_critical();
  const auto cross = empirical_pair_measure(ColouredGraph(2, {0, 1}, {{0, 1}}), nc);
  CHECK(cross(0, 1) == 0.5);
  CHECK(cross(1, 0) == 0.5);
  CHECK(cross(0, 0) == 0.0);
  CHECK(cross.total_mass() == 1.0);
  const auto mono = empirical_pair_measure(ColouredGraph(2, {0, 0}, {{0, 1}}), nc);
  CHECK(mono(0, 0) == 1.0);
  CHECK(mono.total_mass() == 1.0);
  CHECK(empirical_pair_measure(ColouredGraph(2, {0, 1, 1}, {}), nc).total_mass() == 0.0);
}

TEST_CASE("pair measure from class counts agrees with the graph tally bit for bit") {
  Rng rng(8);
  const Kernel lam(rows({{1.5, 0.7, 2.0}, {0.7, 3.0, 0.2}, {2.0, 0.2, 1.0}}));
  const TypeLaw mu(std::vector<double>{0.2, 0.5, 0.3});
  const auto sched = ConnectionSchedule::scaled(2.5);
  for (int i = 0; i < 20; ++i) {
    const auto g = sample_graph(150, mu, lam, sched, rng);
    CHECK(pair_measure_from_class_counts(3, class_edge_counts(g), sched.edge_normalizer(150)) ==
          empirical_pair_measure(g, sched));
  }
}

TEST_CASE("counts-only sampler consumes the same stream as the edge sampler") {
  const Kernel lam(rows({{4.0, 1.0}, {1.0, 9.0}}));
  const auto probs = ConnectionSchedule::near_critical().probabilities(lam, 80);
  Rng a(21), b(21);
  for (int i = 0; i < 10; ++i) {
    auto colours = arrange_colours({30, 50}, a);
    auto colours_b = arrange_colours({30, 50}, b);
    const auto g = sample_edges(2, colours, probs, a);
    const auto e = sample_class_edge_counts(2, colours_b, probs, b);
    CHECK(class_edge_counts(g) == e);
  }
  CHECK(a() == b());
}

TEST_CASE("tilted connection probabilities") {
  const SquareTable p = rows({{0.5, 0.0}, {0.0, 0.2}});
  const auto same = tilted_connection_probs(TestFunction::constant(2, 0.0), p);
  CHECK(same(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(same(1, 1) == doctest::Approx(0.2).epsilon(1e-15));
  const auto t = tilted_connection_probs(TestFunction::constant(2, std::log(2.0)), p);
  CHECK(t(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(t(0, 1) == 0.0);
  CHECK(t(1, 1) == doctest::Approx(2 * 0.2 / (0.8 + 2 * 0.2)).epsilon(1e-15));
  CHECK_THROWS_AS(tilted_connection_probs(TestFunction::constant(2, 1.0), rows({{1.0, 0.5}, {0.5, 0.5}})),
                  ValidationError);
  CHECK_NOTHROW(tilted_connection_probs(TestFunction(rows({{0.0, 1.0}, {1.0, 1.0}})), rows({{1.0, 0.5}, {0.5, 0.5}})));
}

TEST_CASE("importance weights") {
  const Kernel one = Kernel::constant(1, 1.0);
  const auto nc = ConnectionSchedule::near_critical();
  const auto g = TestFunction::constant(1, std::log(2.0));
  CHECK(std::exp(importance_weight(ColouredGraph(1, {0, 0}, {{0, 1}}), g, one, nc)) == doctest::Approx(0.75));
  CHECK(std::exp(importance_weight(ColouredGraph(1, {0, 0}, {}), g, one, nc)) == doctest::Approx(1.5));
  CHECK(importance_weight(ColouredGraph(1, {0, 0}, {}), TestFunction::constant(1, 0.0), one, nc) == 0.0);

  // against a per-pair product on a random graph
  Rng rng(4);
  const Kernel lam(rows({{2.0, 0.5}, {0.5, 1.0}}));
  const auto gt = TestFunction(rows({{0.3, -0.7}, {-0.7, 1.1}}));
  const auto graph = sample_graph(40, TypeLaw::uniform(2), lam, nc, rng);
  const auto p = nc.probabilities(lam, 40);
  const auto pt = tilted_connection_probs(gt, p);
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const auto& e : graph.edges()) edges.insert({e.u, e.v});
  double ref = 0.0;
  for (std::uint32_t u = 0; u < 40; ++u)
    for (std::uint32_t v = u + 1; v < 40; ++v) {
      const auto a = graph.colours()[u], b = graph.colours()[v];
      ref += edges.count({u, v}) ? std::log(p(a, b) / pt(a, b)) : std::log((1 - p(a, b)) / (1 - pt(a, b)));
    }
  CHECK(importance_weight(graph, gt, lam, nc) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("event membership") {
  const PairMeasure pi(rows({{0.3, 0.2}, {0.2, 0.3}}));
  const TestFunction g(rows({{1.0, -0.5}, {-0.5, 2.0}}));
  for (double eps : {1e-9, 0.1, 1.0}) CHECK(event_membership(half_space_neighbourhood(g, pi, eps), pi));
  CHECK(event_membership(Ball{pi, 0.0}, pi));
  CHECK_FALSE(event_membership(Ball{pi, 0.0}, PairMeasure(rows({{0.3, 0.2}, {0.2, 0.30001}}))));
  const PairMeasure unit(rows({{0.25, 0.25}, {0.25, 0.25}}));
  CHECK(event_membership(HalfSpace{TestFunction::constant(2, 1.0), 0.9}, unit));
  CHECK_FALSE(event_membership(HalfSpace{TestFunction::constant(2, 1.0), 1.0}, unit));
  CHECK(event_membership(WholeSpace{}, unit));
}

TEST_CASE("serialisation") {
  const ColouredGraph g(3, {0, 2, 1, 2}, {{2, 3}, {0, 1}, {1, 3}});
  const std::string text = graph_to_string(g);
  CHECK(text == "4 3\n0 2 1 2\n0 1\n1 3\n2 3\n");
  CHECK(graph_from_string(text) == g);
  CHECK(graph_to_string(graph_from_string(text)) == text);
  CHECK_THROWS_AS(graph_from_string("4 3\n0 2 1 2\n1 3\n0 1\n"), ValidationError);
  CHECK_THROWS_AS(graph_from_string("4 3\n0 2 1 2\n1 0\n"), ValidationError);
  CHECK_THROWS_AS(graph_from_string("4 3\n0 2 1 2\n0 1\n3\n"), ValidationError);
  CHECK_THROWS_AS(graph_from_string("4 3\n0 2 1\n"), ValidationError);
  CHECK_THROWS_AS(graph_from_string("4 3\n0 2 1 2\n0 9\n"), ValidationError);
  CHECK_THROWS_AS(graph_from_string("garbage"), ValidationError);
}
