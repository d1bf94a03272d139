#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace trg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

/// Streaming log-sum-exp. Handles -inf terms (empty sum stays -inf).
class LogSumExp {
 public:
  void add(double log_term) {
    if (log_term == -kInf) return;
    if (log_term <= max_) {
      acc_ += std::exp(log_term - max_);
    } else {
      acc_ = acc_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }
  void merge(const LogSumExp& other) {
    if (other.max_ == -kInf) return;
    if (max_ == -kInf) {
      *this = other;
      return;
    }
    if (other.max_ <= max_) {
      acc_ += other.acc_ * std::exp(other.max_ - max_);
    } else {
      acc_ = acc_ * std::exp(max_ - other.max_) + other.acc_;
      max_ = other.max_;
    }
  }
  double value() const { return max_ == -kInf ? -kInf : max_ + std::log(acc_); }
  bool empty() const { return max_ == -kInf; }

 private:
  double max_ = -kInf;
  double acc_ = 0.0;
};

inline double log_sum_exp(std::span<const double> xs) {
  LogSumExp acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

/// x*log(x/y) with 0*log(0/y) = 0.
inline double xlogx_over_y(double x, double y) {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return kInf;
  return x * std::log(x / y);
}

/// log C(n, r) via log-gamma.
inline double log_binomial(double n, double r) {
  if (r < 0.0 || r > n) return -kInf;
  if (r == 0.0 || r == n) return 0.0;
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

/// log of the Binomial(n, p) mass at r, with p in [0,1].
inline double log_binomial_pmf(double n, double r, double p) {
  if (r < 0.0 || r > n) return -kInf;
  if (p == 0.0) return r == 0.0 ? 0.0 : -kInf;
  if (p == 1.0) return r == n ? 0.0 : -kInf;
  double out = log_binomial(n, r);
  if (r > 0.0) out += r * std::log(p);
  if (n - r > 0.0) out += (n - r) * std::log1p(-p);
  return out;
}

}  // namespace trg
