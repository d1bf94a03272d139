#pragma once

// Variational characterisation of the Kullback action:
//   H(pi) = sup_g { <g, pi>/2 - spectral_potential(g) }.
// The objective separates across type pairs, so the supremum is solved cell
// by cell.

#include <vector>

#include "trg/measures.hpp"

namespace trg {

/// Value used for g on pi-null cells; exp(kNegCap) is the smallest positive double.
inline constexpr double kNegCap = -745.0;
/// A cell whose objective still increases at this g is declared divergent.
inline constexpr double kDivergenceProbe = 700.0;

struct DualSolveReport {
  double value = 0.0;
  TestFunction maximizer;
  int iterations = 0;
  bool converged = false;
  bool diverging = false;
};

/// g*(a,b) = log(pi/m) on supp(pi), kNegCap elsewhere.
/// Throws NotAbsolutelyContinuous if pi charges an m-null cell.
TestFunction optimal_tilt(const PairMeasure& pi, const PairMeasure& m);

/// <g, pi>/2 - spectral_potential(g). +inf if the potential overflows.
double dual_value(const TestFunction& g, const PairMeasure& pi, const PairMeasure& m);
double dual_value(const TestFunction& g, const PairMeasure& pi, const Kernel& lambda, const TypeLaw& mu);

/// Per-cell safeguarded Newton maximisation of (g pi + (1 - e^g) m)/2.
DualSolveReport legendre_sup(const PairMeasure& pi, const Kernel& lambda, const TypeLaw& mu, double tol);
DualSolveReport legendre_sup(const PairMeasure& pi, const PairMeasure& m, double tol);

/// Entrywise clip of g to [-t, t].
TestFunction truncate_test_function(const TestFunction& g, double t);

/// kullback_action - dual_value(truncate(optimal_tilt(pi, m), t)), evaluated
/// cell-wise in a cancellation-free form so the result is never negative.
double truncation_gap(const PairMeasure& pi, const Kernel& lambda, const TypeLaw& mu, double t);
double truncation_gap(const PairMeasure& pi, const PairMeasure& m, double t);

/// Cells where pi > 0 and m = 0, as (a, b) pairs with a <= b.
std::vector<std::pair<std::size_t, std::size_t>> witness_set(const PairMeasure& pi, const PairMeasure& m);

/// g_eta = -log(eta) on the witness set, 0 elsewhere. Throws ValidationError
/// when pi << m (no witness exists) or eta is outside (0, 1).
TestFunction divergence_witness(const PairMeasure& pi, const PairMeasure& m, double eta);

}  // namespace trg
