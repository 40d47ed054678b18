// Extremal error-vs-entropy machinery.
//
// The central object is the extremal distribution R(mu, eps): among all
// channels from the label alphabet that keep the label marginal `mu` and
// reach minimum probability of error `eps`, the mutual information is
// minimized at H(mu) - H(R(mu, eps)). R moves eps_bar = prior_error(mu) - eps
// of mass onto the mode and waterfills the next K-1 largest entries down to a
// common level theta.

#pragma once

#include <cstddef>
#include <vector>

#include "infoloss/finite_info.hpp"

namespace infoloss {

struct ExtremalResult {
  Pmf pmf;         // R(mu, eps) in the caller's label order
  std::size_t K;   // waterfilling extent in sorted order; 1 means no transfer
  double theta;    // common level of sorted entries 2..K
  double eps_bar;  // mass moved onto the mode
};

/// R(mu, epsilon) for 0 <= epsilon <= prior_error(mu).
ExtremalResult extremal_pmf(const Pmf& mu, double epsilon);

/// Same construction parameterized directly by the transferred mass
/// 0 <= eps_bar <= prior_error(mu).
ExtremalResult extremal_pmf_by_transfer(const Pmf& mu, double eps_bar);

/// f(mu, eps) = H(mu) - H(R(mu, eps)).
double f_min_mi(const Pmf& mu, double epsilon);

/// Grid-search oracle for f on binary labels and binary observations. Scans
/// channels rho(x|y) on a (grid+1)^2 lattice and keeps those whose error lies
/// in [epsilon - 1/grid, epsilon]; returns the smallest mutual information.
double f_min_mi_bruteforce(const Pmf& mu, double epsilon, std::size_t grid);

/// f1(theta, eps) = (theta+eps) ln(1/(theta+eps)) - theta ln(1/theta).
/// theta = 0 is accepted as the continuous limit.
double f1(double theta, double epsilon);

/// Closed-form lower bound f1(1/2 - eps/(M-1), eps) - f1(1/2, eps) on
/// i_loss(eps, M). Throws std::domain_error outside its domain.
double i_loss_lower_bound(double epsilon, std::size_t m);

/// min over lattice pmfs v with prior_error(v) >= eps of
/// H(v) - H(R(v, prior_error(v) - eps)). Lattice denominator `grid`; the
/// uniform pmf is always included as a candidate.
double i_loss_bruteforce(double epsilon, std::size_t m, std::size_t grid);

struct MaxEntropyCheck {
  bool holds;
  double slack;  // lhs - rhs
  double lhs;
  double rhs;
  std::size_t K;
  double theta;
};

/// sum_{j=2..K} mu_(j) ln(1/mu_(j)) >= (theta+eps) ln(1/(theta+eps)) + (K-2) theta ln(1/theta)
/// with (K, theta) from the waterfilling of `epsilon` units of mass.
MaxEntropyCheck max_entropy_inequality_check(const Pmf& mu, double epsilon);

struct CellTerms {
  std::size_t cell;
  double mass;         // mu_X(B)
  double g;            // MPE gain of observing the MPE label inside B
  double eps;          // residual error inside B after observing the MPE label
  double info_term;    // I(U~; Y | X in B)
  double bound_term;   // H(mu_{Y|B}) - H(R(mu_{Y|B}, eps))
};

struct Theorem2Report {
  double wil;            // I((U~,U);Y) - I(U;Y), direct
  double wil_by_cells;   // sum_B mu(B) info_term
  double bound;          // sum_B mu(B) bound_term
  double ol;             // l(mu_{U,Y}) - l(mu_{X,Y}), direct
  double ol_by_cells;    // sum_B mu(B) g
  std::vector<CellTerms> per_cell;
  std::vector<std::size_t> mpe_label;  // MPE label of each X symbol
};

/// Exact weak-information-loss vs operation-loss accounting for a finite
/// model. `cells` must be a partition of the row indices of `joint`.
Theorem2Report theorem2_check(const DiscreteJoint& joint,
                              const std::vector<std::vector<std::size_t>>& cells);

}  // namespace infoloss
