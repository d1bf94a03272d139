#pragma once

// Measures on a finite type alphabet and the closed-form functionals of the
// coloured random graph: product measure, spectral potential, Kullback action
// and McMillan entropy.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace trg {

/// Ordered, distinct labels of the type alphabet. Index order is canonical.
class TypeAlphabet {
 public:
  explicit TypeAlphabet(std::vector<std::string> labels);
  /// Labels "0", "1", ..., "k-1".
  static TypeAlphabet numbered(std::size_t k);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
};

/// Probability vector over the alphabet.
class TypeLaw {
 public:
  TypeLaw() = default;
  explicit TypeLaw(std::vector<double> weights);
  static TypeLaw uniform(std::size_t k);

  std::size_t dim() const { return w_.size(); }
  double operator[](std::size_t a) const { return w_[a]; }
  std::span<const double> weights() const& { return w_; }
  std::span<const double> weights() const&& = delete;  // would dangle

 private:
  std::vector<double> w_;
};

/// Dense k x k array, row-major.
class SquareTable {
 public:
  SquareTable() = default;
  explicit SquareTable(std::size_t k, double fill = 0.0) : k_(k), v_(k * k, fill) {}
  static SquareTable from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const { return k_; }
  double operator()(std::size_t a, std::size_t b) const { return v_[a * k_ + b]; }
  double& operator()(std::size_t a, std::size_t b) { return v_[a * k_ + b]; }
  std::span<const double> values() const& { return v_; }
  std::span<const double> values() const&& = delete;

  double max_asymmetry() const;

  friend bool operator==(const SquareTable&, const SquareTable&) = default;

 private:
  std::size_t k_ = 0;
  std::vector<double> v_;
};

/// Symmetric array of finite reals. Construction averages the input with its
/// transpose and rejects inputs whose asymmetry exceeds kSymmetryTolerance.
class SymmetricTable {
 public:
  static constexpr double kSymmetryTolerance = 1e-9;

  std::size_t dim() const { return t_.dim(); }
  double operator()(std::size_t a, std::size_t b) const { return t_(a, b); }
  const SquareTable& table() const { return t_; }
  std::span<const double> values() const& { return t_.values(); }
  std::span<const double> values() const&& = delete;

  friend bool operator==(const SymmetricTable&, const SymmetricTable&) = default;

 protected:
  SymmetricTable() = default;
  SymmetricTable(SquareTable t, const char* what);
  SquareTable t_;
};

/// Limiting edge intensities lambda(a,b): symmetric, nonnegative, not all zero.
class Kernel : public SymmetricTable {
 public:
  Kernel() = default;
  explicit Kernel(SquareTable t);
  static Kernel constant(std::size_t k, double value);
};

/// Finite symmetric nonnegative measure on pairs of types.
class PairMeasure : public SymmetricTable {
 public:
  PairMeasure() = default;
  explicit PairMeasure(SquareTable t);
  static PairMeasure zero(std::size_t k) { return PairMeasure(SquareTable(k)); }

  double total_mass() const;
  PairMeasure scaled(double factor) const;
};

/// Symmetric real test function g on pairs of types.
class TestFunction : public SymmetricTable {
 public:
  TestFunction() = default;
  explicit TestFunction(SquareTable t);
  static TestFunction constant(std::size_t k, double value);
};

/// Result of the spectral potential; overflow of exp(g) gives value = +inf.
struct PotentialValue {
  double value = 0.0;
  bool overflow = false;
};

/// <g, pi> = sum over all k^2 cells, plain left-to-right accumulation in
/// row-major order. Monotone in every cell value.
double pairing(const SymmetricTable& g, const PairMeasure& pi);
double pairing(std::span<const double> g, std::span<const double> w);

/// (lambda mu (x) mu)(a,b) = lambda(a,b) mu(a) mu(b).
PairMeasure product_measure(const Kernel& lambda, const TypeLaw& mu);

double total_mass(const PairMeasure& pi);

/// -1/2 sum (1 - e^g) m with m = lambda mu (x) mu. Cells with m = 0 contribute 0.
PotentialValue spectral_potential(const TestFunction& g, const Kernel& lambda, const TypeLaw& mu);
PotentialValue spectral_potential(const TestFunction& g, const PairMeasure& m);

/// (sum pi log(pi/m) + ||m|| - ||pi||) / 2, in [0, +inf]. +inf iff pi charges an m-null cell.
double kullback_action(const PairMeasure& pi, const Kernel& lambda, const TypeLaw& mu);
double kullback_action(const PairMeasure& pi, const PairMeasure& m);

/// (||rho|| - ||m|| - sum rho log(rho/||m||)) / 2.
double mcmillan_entropy(const PairMeasure& rho, const Kernel& lambda, const TypeLaw& mu);
double mcmillan_entropy(const PairMeasure& rho, const PairMeasure& m);

/// Unhalved extended relative entropy <pi, log pi/sigma> + ||sigma|| - ||pi||.
double relative_entropy_extended(const PairMeasure& pi, const PairMeasure& sigma);

/// true iff pi(a,b) > 0 implies m(a,b) > 0.
bool absolutely_continuous(const PairMeasure& pi, const PairMeasure& m);

void require_same_dim(std::size_t a, std::size_t b, const char* what);

}  // namespace trg
