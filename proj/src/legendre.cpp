#include "trg/legendre.hpp"

#include <algorithm>
#include <cmath>

#include "trg/error.hpp"
#include "trg/numeric.hpp"

namespace trg {

namespace {

struct CellSolution {
  double g = 0.0;
  double value = 0.0;
  int iterations = 0;
  bool converged = true;
  bool diverging = false;
};

double cell_objective(double g, double pi, double m) {
  const double linear = pi == 0.0 ? 0.0 : g * pi;
  return 0.5 * (linear - std::expm1(g) * m);
}

CellSolution solve_cell(double pi, double m, double tol) {
  CellSolution s;
  if (m == 0.0) {
    if (pi == 0.0) return s;
    // slope pi/2 > 0 at the probe: the objective is unbounded above
    s.g = kDivergenceProbe;
    s.value = kInf;
    s.diverging = true;
    s.converged = false;
    return s;
  }
  if (pi == 0.0) {
    s.g = kNegCap;
    s.value = cell_objective(kNegCap, pi, m);
    return s;
  }

  double lo = kNegCap;
  double hi = kDivergenceProbe;
  double g = std::clamp(std::log(pi / m), lo, hi);
  const double slope_tol = std::max(tol, 1e-300) * std::max(pi, 1e-300) * 1e-3;
  s.converged = false;
  for (int it = 0; it < 200; ++it) {
    s.iterations = it + 1;
    const double eg_m = std::exp(g) * m;
    const double slope = 0.5 * (pi - eg_m);
    if (std::abs(slope) <= slope_tol) {
      s.converged = true;
      break;
    }
    if (slope > 0.0)
      lo = g;
    else
      hi = g;
    double next = g + (pi - eg_m) / eg_m;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - g) <= 1e-15 * std::max(1.0, std::abs(g))) {
      g = next;
      s.converged = true;
      break;
    }
    g = next;
  }
  s.g = g;
  s.value = cell_objective(g, pi, m);
  return s;
}

}  // namespace

TestFunction optimal_tilt(const PairMeasure& pi, const PairMeasure& m) {
  require_same_dim(pi.dim(), m.dim(), "optimal_tilt");
  const std::size_t k = pi.dim();
  SquareTable g(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      if (pi(a, b) == 0.0) {
        g(a, b) = kNegCap;
      } else {
        if (m(a, b) == 0.0) throw NotAbsolutelyContinuous();
        g(a, b) = std::max(kNegCap, std::log(pi(a, b) / m(a, b)));
      }
    }
  return TestFunction(std::move(g));
}

double dual_value(const TestFunction& g, const PairMeasure& pi, const PairMeasure& m) {
  require_same_dim(g.dim(), pi.dim(), "dual_value");
  const PotentialValue pot = spectral_potential(g, m);
  if (pot.overflow) return -kInf;
  CompensatedSum s;
  const auto gv = g.values();
  const auto pv = pi.values();
  for (std::size_t i = 0; i < gv.size(); ++i)
    if (pv[i] != 0.0) s.add(0.5 * gv[i] * pv[i]);
  s.add(-pot.value);
  return s.value();
}

double dual_value(const TestFunction& g, const PairMeasure& pi, const Kernel& lambda, const TypeLaw& mu) {
  return dual_value(g, pi, product_measure(lambda, mu));
}

DualSolveReport legendre_sup(const PairMeasure& pi, const PairMeasure& m, double tol) {
  require_same_dim(pi.dim(), m.dim(), "legendre_sup");
  if (!(tol > 0.0)) throw ValidationError("legendre_sup tolerance must be > 0");
  const std::size_t k = pi.dim();
  SquareTable g(k);
  DualSolveReport report;
  report.converged = true;
  CompensatedSum total;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      const CellSolution cell = solve_cell(pi(a, b), m(a, b), tol);
      g(a, b) = cell.g;
      g(b, a) = cell.g;
      report.iterations = std::max(report.iterations, cell.iterations);
      report.converged = report.converged && cell.converged;
      report.diverging = report.diverging || cell.diverging;
      total.add(a == b ? cell.value : 2.0 * cell.value);
    }
  report.maximizer = TestFunction(std::move(g));
  report.value = report.diverging ? kInf : total.value();
  if (report.diverging) report.converged = false;
  return report;
}

DualSolveReport legendre_sup(const PairMeasure& pi, const Kernel& lambda, const TypeLaw& mu, double tol) {
  return legendre_sup(pi, product_measure(lambda, mu), tol);
}

TestFunction truncate_test_function(const TestFunction& g, double t) {
  if (!(t > 0.0)) throw ValidationError("truncation level must be > 0");
  SquareTable out = g.table();
  for (std::size_t a = 0; a < g.dim(); ++a)
    for (std::size_t b = 0; b < g.dim(); ++b) out(a, b) = std::clamp(out(a, b), -t, t);
  return TestFunction(std::move(out));
}

double truncation_gap(const PairMeasure& pi, const PairMeasure& m, double t) {
  const TestFunction g_star = optimal_tilt(pi, m);
  const TestFunction g_t = truncate_test_function(g_star, t);
  // Per cell with pi > 0: (m e^{g_t} - pi - pi (g_t - g*)) / 2 = pi (e^d - 1 - d) / 2, d = g_t - g*.
  // Per cell with pi = 0: m e^{g_t} / 2.
  CompensatedSum s;
  for (std::size_t a = 0; a < pi.dim(); ++a)
    for (std::size_t b = 0; b < pi.dim(); ++b) {
      const double p = pi(a, b);
      if (p > 0.0) {
        const double d = g_t(a, b) - std::log(p / m(a, b));
        s.add(0.5 * p * (std::expm1(d) - d));
      } else if (m(a, b) > 0.0) {
        s.add(0.5 * m(a, b) * std::exp(g_t(a, b)));
      }
    }
  return std::max(0.0, s.value());
}

double truncation_gap(const PairMeasure& pi, const Kernel& lambda, const TypeLaw& mu, double t) {
  return truncation_gap(pi, product_measure(lambda, mu), t);
}

std::vector<std::pair<std::size_t, std::size_t>> witness_set(const PairMeasure& pi, const PairMeasure& m) {
  require_same_dim(pi.dim(), m.dim(), "witness_set");
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t a = 0; a < pi.dim(); ++a)
    for (std::size_t b = a; b < pi.dim(); ++b)
      if (pi(a, b) > 0.0 && m(a, b) == 0.0) cells.emplace_back(a, b);
  return cells;
}

TestFunction divergence_witness(const PairMeasure& pi, const PairMeasure& m, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("divergence witness needs 0 < eta < 1");
  const auto cells = witness_set(pi, m);
  if (cells.empty()) throw ValidationError("no witness set: pi is absolutely continuous w.r.t. m");
  SquareTable g(pi.dim());
  for (auto [a, b] : cells) {
    g(a, b) = -std::log(eta);
    g(b, a) = -std::log(eta);
  }
  return TestFunction(std::move(g));
}

}  // namespace trg
