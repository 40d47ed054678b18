// Exact information and decision functionals over finite alphabets.
//
// All quantities are in nats. Labels and representation symbols are
// zero-based indices. Types are immutable after construction.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace infoloss {

/// Raised when a probability object fails validation.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Absolute tolerance on the total mass of a pmf or joint.
inline constexpr double kMassTolerance = 1e-12;

/// Probability mass function over labels 0..M-1.
///
/// Inputs whose total mass is within kMassTolerance of one are renormalized;
/// anything else (negative or non-finite entries, bad total) is rejected.
class Pmf {
 public:
  explicit Pmf(std::vector<double> probs);

  static Pmf uniform(std::size_t m);
  static Pmf degenerate(std::size_t m, std::size_t at);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  /// Index of the largest entry; the smallest index wins ties.
  std::size_t mode() const;

 private:
  std::vector<double> probs_;
};

/// Joint pmf over (representation symbol, label), stored row-major.
class DiscreteJoint {
 public:
  DiscreteJoint(std::size_t rows, std::size_t labels, std::vector<double> mass);

  /// Normalized joint from non-negative counts (row-major).
  static DiscreteJoint from_counts(std::size_t rows, std::size_t labels,
                                   std::span<const double> counts);

  std::size_t rows() const { return rows_; }
  std::size_t labels() const { return labels_; }
  double operator()(std::size_t row, std::size_t label) const {
    return mass_[row * labels_ + label];
  }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(mass_).subspan(r * labels_, labels_);
  }
  std::span<const double> mass() const { return mass_; }

  double row_mass(std::size_t r) const;
  Pmf label_marginal() const;
  Pmf row_marginal() const;
  /// p(.|row); the row must carry positive mass.
  Pmf row_posterior(std::size_t r) const;

  /// Joint obtained by merging row `b` into row `a` (row `b` removed).
  DiscreteJoint merge_rows(std::size_t a, std::size_t b) const;

 private:
  std::size_t rows_;
  std::size_t labels_;
  std::vector<double> mass_;
};

/// Joint pmf over (A symbol, B symbol, label), index (a * nb + b) * M + y.
class Joint3 {
 public:
  Joint3(std::size_t na, std::size_t nb, std::size_t labels, std::vector<double> mass);

  std::size_t a_size() const { return na_; }
  std::size_t b_size() const { return nb_; }
  std::size_t labels() const { return labels_; }
  double operator()(std::size_t a, std::size_t b, std::size_t y) const {
    return mass_[(a * nb_ + b) * labels_ + y];
  }

  /// Joint of ((A,B), Y) with row index a * nb + b.
  DiscreteJoint pair_joint() const;
  /// Joint of (B, Y).
  DiscreteJoint b_joint() const;

 private:
  std::size_t na_;
  std::size_t nb_;
  std::size_t labels_;
  std::vector<double> mass_;
};

double entropy(const Pmf& p);

/// h(r) = -r ln r - (1-r) ln(1-r).
double binary_entropy(double r);

/// 1 - max_y p(y).
double prior_error(const Pmf& p);

double mutual_information(const DiscreteJoint& j);

/// H(Y|U) = sum_u p(u) H(p(.|u)).
double conditional_entropy(const DiscreteJoint& j);

/// Minimum probability of error: sum_u p(u) (1 - max_y p(y|u)).
double bayes_error(const DiscreteJoint& j);

/// I(A;Y|B) = I((A,B);Y) - I(B;Y).
double conditional_mi(const Joint3& j);

/// phi(r) = h(r) + r ln(M-1), an upper bound on H(Y|U) at error r.
double fano_upper(double r, std::size_t m);

namespace detail {
/// -x ln x with 0 ln 0 = 0.
inline double neg_xlogx(double x) { return x > 0.0 ? -x * std::log(x) : 0.0; }
}  // namespace detail

}  // namespace infoloss
