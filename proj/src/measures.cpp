#include "trg/measures.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "trg/error.hpp"
#include "trg/numeric.hpp"

namespace trg {

namespace {

// exp(g) overflows double above this.
constexpr double kExpOverflow = 709.782712893384;

}  // namespace

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw ValidationError(std::string("dimension mismatch in ") + what + ": " + std::to_string(a) +
                          " vs " + std::to_string(b));
}

TypeAlphabet::TypeAlphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("type alphabet must have at least one label");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw ValidationError("type labels must be distinct");
}

TypeAlphabet TypeAlphabet::numbered(std::size_t k) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < k; ++i) labels.push_back(std::to_string(i));
  return TypeAlphabet(std::move(labels));
}

TypeLaw::TypeLaw(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw ValidationError("type law must have at least one entry");
  for (double x : w_)
    if (!std::isfinite(x) || x < 0.0) throw ValidationError("type law entries must be finite and >= 0");
  const double s = compensated_sum(w_);
  if (std::abs(s - 1.0) > 1e-12)
    throw ValidationError("type law must sum to 1 (got " + std::to_string(s) + ")");
}

TypeLaw TypeLaw::uniform(std::size_t k) { return TypeLaw(std::vector<double>(k, 1.0 / static_cast<double>(k))); }

SquareTable SquareTable::from_rows(const std::vector<std::vector<double>>& rows) {
  SquareTable t(rows.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    if (rows[a].size() != rows.size()) throw ValidationError("table must be square");
    for (std::size_t b = 0; b < rows.size(); ++b) t(a, b) = rows[a][b];
  }
  return t;
}

double SquareTable::max_asymmetry() const {
  double worst = 0.0;
  for (std::size_t a = 0; a < k_; ++a)
    for (std::size_t b = a + 1; b < k_; ++b) worst = std::max(worst, std::abs((*this)(a, b) - (*this)(b, a)));
  return worst;
}

SymmetricTable::SymmetricTable(SquareTable t, const char* what) : t_(std::move(t)) {
  if (t_.dim() == 0) throw ValidationError(std::string(what) + " must be at least 1x1");
  for (double x : t_.values())
    if (!std::isfinite(x)) throw ValidationError(std::string(what) + " entries must be finite");
  const double asym = t_.max_asymmetry();
  if (asym > kSymmetryTolerance)
    throw ValidationError(std::string(what) + " is not symmetric (max |x(a,b) - x(b,a)| = " +
                          std::to_string(asym) + ")");
  for (std::size_t a = 0; a < t_.dim(); ++a)
    for (std::size_t b = a + 1; b < t_.dim(); ++b) {
      const double avg = 0.5 * (t_(a, b) + t_(b, a));
      t_(a, b) = avg;
      t_(b, a) = avg;
    }
}

Kernel::Kernel(SquareTable t) : SymmetricTable(std::move(t), "kernel") {
  bool positive = false;
  for (double x : values()) {
    if (x < 0.0) throw ValidationError("kernel entries must be >= 0");
    positive = positive || x > 0.0;
  }
  if (!positive) throw ValidationError("kernel must have a strictly positive entry");
}

Kernel Kernel::constant(std::size_t k, double value) { return Kernel(SquareTable(k, value)); }

PairMeasure::PairMeasure(SquareTable t) : SymmetricTable(std::move(t), "pair measure") {
  for (double x : values())
    if (x < 0.0) throw ValidationError("pair measure entries must be >= 0");
}

double PairMeasure::total_mass() const { return compensated_sum(values()); }

PairMeasure PairMeasure::scaled(double factor) const {
  SquareTable t = table();
  for (std::size_t a = 0; a < dim(); ++a)
    for (std::size_t b = 0; b < dim(); ++b) t(a, b) *= factor;
  return PairMeasure(std::move(t));
}

TestFunction::TestFunction(SquareTable t) : SymmetricTable(std::move(t), "test function") {}

TestFunction TestFunction::constant(std::size_t k, double value) { return TestFunction(SquareTable(k, value)); }

double pairing(const SymmetricTable& g, const PairMeasure& pi) {
  require_same_dim(g.dim(), pi.dim(), "pairing");
  return pairing(g.values(), pi.values());
}

double pairing(std::span<const double> g, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * w[i];
  return s;
}

PairMeasure product_measure(const Kernel& lambda, const TypeLaw& mu) {
  require_same_dim(lambda.dim(), mu.dim(), "product_measure");
  const std::size_t k = mu.dim();
  SquareTable t(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) t(a, b) = lambda(a, b) * mu[a] * mu[b];
  return PairMeasure(std::move(t));
}

double total_mass(const PairMeasure& pi) { return pi.total_mass(); }

PotentialValue spectral_potential(const TestFunction& g, const PairMeasure& m) {
  require_same_dim(g.dim(), m.dim(), "spectral_potential");
  CompensatedSum s;
  const auto gv = g.values();
  const auto mv = m.values();
  for (std::size_t i = 0; i < gv.size(); ++i) {
    if (mv[i] == 0.0) continue;
    if (gv[i] > kExpOverflow) return {kInf, true};
    // -(1 - e^g) m / 2 = expm1(g) m / 2
    s.add(0.5 * std::expm1(gv[i]) * mv[i]);
  }
  const double v = s.value();
  if (!std::isfinite(v)) return {kInf, true};
  return {v, false};
}

PotentialValue spectral_potential(const TestFunction& g, const Kernel& lambda, const TypeLaw& mu) {
  return spectral_potential(g, product_measure(lambda, mu));
}

double relative_entropy_extended(const PairMeasure& pi, const PairMeasure& sigma) {
  require_same_dim(pi.dim(), sigma.dim(), "relative_entropy_extended");
  // Per cell: pi log(pi/sigma) + sigma - pi >= 0, summed with compensation.
  CompensatedSum s;
  const auto pv = pi.values();
  const auto sv = sigma.values();
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (pv[i] == 0.0) {
      s.add(sv[i]);
      continue;
    }
    if (sv[i] == 0.0) return kInf;
    s.add(pv[i] * std::log(pv[i] / sv[i]) + sv[i] - pv[i]);
  }
  return std::max(0.0, s.value());
}

double kullback_action(const PairMeasure& pi, const PairMeasure& m) {
  return 0.5 * relative_entropy_extended(pi, m);
}

double kullback_action(const PairMeasure& pi, const Kernel& lambda, const TypeLaw& mu) {
  return kullback_action(pi, product_measure(lambda, mu));
}

double mcmillan_entropy(const PairMeasure& rho, const PairMeasure& m) {
  require_same_dim(rho.dim(), m.dim(), "mcmillan_entropy");
  const double mass_m = m.total_mass();
  CompensatedSum s;
  s.add(rho.total_mass());
  s.add(-mass_m);
  for (double r : rho.values()) s.add(-xlogx_over_y(r, mass_m));
  return 0.5 * s.value();
}

double mcmillan_entropy(const PairMeasure& rho, const Kernel& lambda, const TypeLaw& mu) {
  return mcmillan_entropy(rho, product_measure(lambda, mu));
}

bool absolutely_continuous(const PairMeasure& pi, const PairMeasure& m) {
  require_same_dim(pi.dim(), m.dim(), "absolutely_continuous");
  const auto pv = pi.values();
  const auto mv = m.values();
  for (std::size_t i = 0; i < pv.size(); ++i)
    if (pv[i] > 0.0 && mv[i] == 0.0) return false;
  return true;
}

}  // namespace trg
