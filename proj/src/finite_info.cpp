#include "infoloss/finite_info.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>

namespace infoloss {

namespace {

void validate_and_normalize(std::vector<double>& v, const char* what) {
  if (v.empty()) {
    throw ValidationError(std::string(what) + ": empty");
  }
  double total = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      std::ostringstream os;
      os << what << ": entry " << x << " is not a finite non-negative number";
      throw ValidationError(os.str());
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": total mass " << total << " differs from 1";
    throw ValidationError(os.str());
  }
  if (total != 1.0) {
    for (double& x : v) x /= total;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Pmf

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
  validate_and_normalize(probs_, "Pmf");
}

Pmf Pmf::uniform(std::size_t m) {
  if (m == 0) throw ValidationError("Pmf: alphabet size must be >= 1");
  return Pmf(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

Pmf Pmf::degenerate(std::size_t m, std::size_t at) {
  if (at >= m) throw ValidationError("Pmf: degenerate index out of range");
  std::vector<double> p(m, 0.0);
  p[at] = 1.0;
  return Pmf(std::move(p));
}

std::size_t Pmf::mode() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------
// DiscreteJoint

DiscreteJoint::DiscreteJoint(std::size_t rows, std::size_t labels, std::vector<double> mass)
    : rows_(rows), labels_(labels), mass_(std::move(mass)) {
  if (rows_ == 0 || labels_ == 0) throw ValidationError("DiscreteJoint: empty alphabet");
  if (mass_.size() != rows_ * labels_) {
    throw ValidationError("DiscreteJoint: mass size does not match rows * labels");
  }
  validate_and_normalize(mass_, "DiscreteJoint");
}

DiscreteJoint DiscreteJoint::from_counts(std::size_t rows, std::size_t labels,
                                         std::span<const double> counts) {
  if (counts.size() != rows * labels) {
    throw ValidationError("DiscreteJoint: counts size does not match rows * labels");
  }
  double total = 0.0;
  for (double c : counts) {
    if (!std::isfinite(c) || c < 0.0) throw ValidationError("DiscreteJoint: negative count");
    total += c;
  }
  if (total <= 0.0) throw ValidationError("DiscreteJoint: no mass");
  std::vector<double> mass(counts.begin(), counts.end());
  for (double& m : mass) m /= total;
  // Division can leave the sum a few ulps away from 1; the constructor
  // tolerance absorbs it.
  return DiscreteJoint(rows, labels, std::move(mass));
}

double DiscreteJoint::row_mass(std::size_t r) const {
  auto rr = row(r);
  return std::accumulate(rr.begin(), rr.end(), 0.0);
}

Pmf DiscreteJoint::label_marginal() const {
  std::vector<double> m(labels_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t y = 0; y < labels_; ++y) m[y] += (*this)(r, y);
  }
  return Pmf(std::move(m));
}

Pmf DiscreteJoint::row_marginal() const {
  std::vector<double> m(rows_);
  for (std::size_t r = 0; r < rows_; ++r) m[r] = row_mass(r);
  return Pmf(std::move(m));
}

Pmf DiscreteJoint::row_posterior(std::size_t r) const {
  const double total = row_mass(r);
  if (!(total > 0.0)) throw ValidationError("DiscreteJoint: posterior of a zero-mass row");
  auto rr = row(r);
  std::vector<double> p(rr.begin(), rr.end());
  for (double& x : p) x /= total;
  // Renormalize exactly so tiny drift never trips validation.
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= s;
  return Pmf(std::move(p));
}

DiscreteJoint DiscreteJoint::merge_rows(std::size_t a, std::size_t b) const {
  if (a >= rows_ || b >= rows_ || a == b) throw ValidationError("merge_rows: bad row indices");
  if (rows_ < 2) throw ValidationError("merge_rows: need at least two rows");
  std::vector<double> out;
  out.reserve((rows_ - 1) * labels_);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (r == b) continue;
    for (std::size_t y = 0; y < labels_; ++y) {
      double v = (*this)(r, y);
      if (r == a) v += (*this)(b, y);
      out.push_back(v);
    }
  }
  return DiscreteJoint(rows_ - 1, labels_, std::move(out));
}

// ---------------------------------------------------------------------------
// Joint3

Joint3::Joint3(std::size_t na, std::size_t nb, std::size_t labels, std::vector<double> mass)
    : na_(na), nb_(nb), labels_(labels), mass_(std::move(mass)) {
  if (na_ == 0 || nb_ == 0 || labels_ == 0) throw ValidationError("Joint3: empty alphabet");
  if (mass_.size() != na_ * nb_ * labels_) {
    throw ValidationError("Joint3: mass size does not match dimensions");
  }
  validate_and_normalize(mass_, "Joint3");
}

DiscreteJoint Joint3::pair_joint() const { return DiscreteJoint(na_ * nb_, labels_, mass_); }

DiscreteJoint Joint3::b_joint() const {
  std::vector<double> m(nb_ * labels_, 0.0);
  for (std::size_t a = 0; a < na_; ++a) {
    for (std::size_t b = 0; b < nb_; ++b) {
      for (std::size_t y = 0; y < labels_; ++y) m[b * labels_ + y] += (*this)(a, b, y);
    }
  }
  return DiscreteJoint(nb_, labels_, std::move(m));
}

// ---------------------------------------------------------------------------
// Functionals

double entropy(const Pmf& p) {
  double h = 0.0;
  for (double x : p.probs()) h += detail::neg_xlogx(x);
  return h;
}

double binary_entropy(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("binary_entropy: r outside [0,1]");
  return detail::neg_xlogx(r) + detail::neg_xlogx(1.0 - r);
}

double prior_error(const Pmf& p) { return 1.0 - p[p.mode()]; }

double mutual_information(const DiscreteJoint& j) {
  const Pmf py = j.label_marginal();
  double mi = 0.0;
  for (std::size_t r = 0; r < j.rows(); ++r) {
    const double pu = j.row_mass(r);
    if (pu <= 0.0) continue;
    for (std::size_t y = 0; y < j.labels(); ++y) {
      const double p = j(r, y);
      if (p <= 0.0) continue;
      mi += p * std::log(p / (pu * py[y]));
    }
  }
  return std::max(mi, 0.0);
}

double conditional_entropy(const DiscreteJoint& j) {
  double h = 0.0;
  for (std::size_t r = 0; r < j.rows(); ++r) {
    const double pu = j.row_mass(r);
    if (pu <= 0.0) continue;
    for (std::size_t y = 0; y < j.labels(); ++y) h += pu * detail::neg_xlogx(j(r, y) / pu);
  }
  return h;
}

double bayes_error(const DiscreteJoint& j) {
  // sum_u p(u)(1 - max_y p(y|u)) = 1 - sum_u max_y p(u,y)
  double correct = 0.0;
  for (std::size_t r = 0; r < j.rows(); ++r) {
    auto rr = j.row(r);
    correct += *std::max_element(rr.begin(), rr.end());
  }
  return std::max(0.0, 1.0 - correct);
}

double conditional_mi(const Joint3& j) {
  return std::max(0.0, mutual_information(j.pair_joint()) - mutual_information(j.b_joint()));
}

double fano_upper(double r, std::size_t m) {
  if (m < 2) throw std::domain_error("fano_upper: M must be >= 2");
  return binary_entropy(r) + r * std::log(static_cast<double>(m - 1));
}

}  // namespace infoloss
