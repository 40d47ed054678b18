#include "infoloss/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace infoloss {

namespace {

constexpr double kDomainSlack = 1e-12;

// Stable order: descending probability, ascending label on ties.
std::vector<std::size_t> descending_order(const Pmf& mu) {
  std::vector<std::size_t> order(mu.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mu[a] > mu[b]; });
  return order;
}

double f1_unchecked(double theta, double epsilon) {
  return detail::neg_xlogx(theta + epsilon) - detail::neg_xlogx(theta);
}

}  // namespace

ExtremalResult extremal_pmf_by_transfer(const Pmf& mu, double eps_bar) {
  const double prior = prior_error(mu);
  if (!std::isfinite(eps_bar) || eps_bar < -kDomainSlack || eps_bar > prior + kDomainSlack) {
    throw std::domain_error("extremal_pmf: transferred mass outside [0, prior_error]");
  }
  eps_bar = std::clamp(eps_bar, 0.0, prior);
  if (eps_bar == 0.0) {
    return ExtremalResult{mu, 1, 0.0, 0.0};
  }

  const std::size_t m = mu.size();
  const auto order = descending_order(mu);
  std::vector<double> s(m);
  for (std::size_t j = 0; j < m; ++j) s[j] = mu[order[j]];

  // Sorted positions are zero-based: s[0] is the mode and the waterfilled
  // block is s[1..K-1]. theta_K < s_K holds automatically once K-1 has been
  // rejected, so the search only tests the level against the next entry; the
  // slack keeps exact ties (theta_K == s_{K+1}) from slipping by rounding.
  std::size_t k_found = m;
  double theta = 0.0;
  double partial = 0.0;
  for (std::size_t k = 2; k <= m; ++k) {
    partial += s[k - 1];
    theta = (partial - eps_bar) / static_cast<double>(k - 1);
    if (k == m || theta >= s[k] - kDomainSlack) {
      k_found = k;
      break;
    }
  }
  theta = std::max(theta, 0.0);

  std::vector<double> out(mu.probs().begin(), mu.probs().end());
  out[order[0]] = s[0] + eps_bar;
  for (std::size_t j = 1; j < k_found; ++j) out[order[j]] = theta;
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& x : out) x /= total;
  return ExtremalResult{Pmf(std::move(out)), k_found, theta, eps_bar};
}

ExtremalResult extremal_pmf(const Pmf& mu, double epsilon) {
  const double prior = prior_error(mu);
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw std::domain_error("extremal_pmf: epsilon must be non-negative");
  }
  if (epsilon > prior + kDomainSlack) {
    throw std::domain_error("extremal_pmf: epsilon exceeds the prior error (trivial regime exceeded)");
  }
  return extremal_pmf_by_transfer(mu, std::max(0.0, prior - epsilon));
}

double f_min_mi(const Pmf& mu, double epsilon) {
  const ExtremalResult r = extremal_pmf(mu, epsilon);
  if (r.eps_bar == 0.0) return 0.0;
  return std::max(0.0, entropy(mu) - entropy(r.pmf));
}

double f_min_mi_bruteforce(const Pmf& mu, double epsilon, std::size_t grid) {
  if (mu.size() != 2) throw std::domain_error("f_min_mi_bruteforce: only binary labels are supported");
  if (grid < 100) throw std::domain_error("f_min_mi_bruteforce: grid must be >= 100");
  const double prior = prior_error(mu);
  if (!(epsilon >= 0.0) || epsilon > prior + kDomainSlack) {
    throw std::domain_error("f_min_mi_bruteforce: infeasible epsilon");
  }
  const double g = static_cast<double>(grid);
  const double band_lo = epsilon - 1.0 / g;
  const double band_hi = epsilon + kDomainSlack;
  const double p1 = mu[0];
  const double p2 = mu[1];

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t ia = 0; ia <= grid; ++ia) {
    const double a = static_cast<double>(ia) / g;  // rho(x=1 | y=1)
    for (std::size_t ib = 0; ib <= grid; ++ib) {
      const double b = static_cast<double>(ib) / g;  // rho(x=1 | y=2)
      const double j11 = p1 * a, j12 = p2 * b;
      const double j21 = p1 * (1.0 - a), j22 = p2 * (1.0 - b);
      const double err = 1.0 - std::max(j11, j12) - std::max(j21, j22);
      if (err < band_lo || err > band_hi) continue;
      const double px1 = j11 + j12, px2 = j21 + j22;
      double mi = 0.0;
      auto term = [&](double j, double px, double py) {
        if (j > 0.0) mi += j * std::log(j / (px * py));
      };
      term(j11, px1, p1);
      term(j12, px1, p2);
      term(j21, px2, p1);
      term(j22, px2, p2);
      best = std::min(best, std::max(mi, 0.0));
    }
  }
  if (!std::isfinite(best)) throw std::domain_error("f_min_mi_bruteforce: no channel meets the error band");
  return best;
}

double f1(double theta, double epsilon) {
  if (!(theta >= 0.0) || !(epsilon > 0.0) || theta + epsilon > 1.0 + kDomainSlack) {
    throw std::domain_error("f1: requires theta >= 0, epsilon > 0, theta + epsilon <= 1");
  }
  return f1_unchecked(theta, epsilon);
}

double i_loss_lower_bound(double epsilon, std::size_t m) {
  if (m < 2) throw std::domain_error("i_loss_lower_bound: M must be >= 2");
  const double md = static_cast<double>(m);
  if (!(epsilon > 0.0) || epsilon > 1.0 - 1.0 / md + kDomainSlack) {
    throw std::domain_error("i_loss_lower_bound: epsilon outside (0, 1 - 1/M]");
  }
  const double theta = 0.5 - epsilon / (md - 1.0);
  if (theta < -kDomainSlack) {
    throw std::domain_error("i_loss_lower_bound: closed form inapplicable (1/2 - eps/(M-1) < 0)");
  }
  return f1_unchecked(std::max(theta, 0.0), epsilon) - f1_unchecked(0.5, epsilon);
}

double i_loss_bruteforce(double epsilon, std::size_t m, std::size_t grid) {
  if (m < 2 || m > 6) throw std::domain_error("i_loss_bruteforce: M must be in 2..6");
  if (grid < 50) throw std::domain_error("i_loss_bruteforce: grid must be >= 50");
  const double md = static_cast<double>(m);
  if (!(epsilon > 0.0) || epsilon > 1.0 - 1.0 / md + kDomainSlack) {
    throw std::domain_error("i_loss_bruteforce: empty feasible set (epsilon outside (0, 1 - 1/M])");
  }

  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](std::vector<double> v) {
    const Pmf p(std::move(v));
    const double prior = prior_error(p);
    if (prior < epsilon - kDomainSlack) return;
    const ExtremalResult r = extremal_pmf_by_transfer(p, std::min(epsilon, prior));
    best = std::min(best, entropy(p) - entropy(r.pmf));
  };

  // Non-increasing compositions n_1 >= ... >= n_M >= 0 summing to grid.
  std::vector<std::size_t> parts(m, 0);
  const double g = static_cast<double>(grid);
  auto recurse = [&](auto&& self, std::size_t pos, std::size_t remaining, std::size_t cap) -> void {
    if (pos + 1 == m) {
      if (remaining > cap) return;
      parts[pos] = remaining;
      std::vector<double> v(m);
      for (std::size_t j = 0; j < m; ++j) v[j] = static_cast<double>(parts[j]) / g;
      consider(std::move(v));
      return;
    }
    const std::size_t slots = m - pos;
    // n_pos must be at least ceil(remaining / slots) for the tail to fit.
    const std::size_t lo = (remaining + slots - 1) / slots;
    for (std::size_t n = std::min(cap, remaining); n >= lo; --n) {
      parts[pos] = n;
      self(self, pos + 1, remaining - n, n);
      if (n == 0) break;
    }
  };
  recurse(recurse, 0, grid, grid);
  consider(std::vector<double>(m, 1.0 / md));
  return std::max(best, 0.0);
}

MaxEntropyCheck max_entropy_inequality_check(const Pmf& mu, double epsilon) {
  const double prior = prior_error(mu);
  if (!(epsilon > 0.0) || epsilon > prior + kDomainSlack) {
    throw std::domain_error("max_entropy_inequality_check: requires 0 < epsilon <= prior_error(mu)");
  }
  const ExtremalResult r = extremal_pmf_by_transfer(mu, std::min(epsilon, prior));
  const auto order = descending_order(mu);
  double lhs = 0.0;
  for (std::size_t j = 1; j < r.K; ++j) lhs += detail::neg_xlogx(mu[order[j]]);
  const double rhs = detail::neg_xlogx(r.theta + epsilon) +
                     static_cast<double>(r.K - 2) * detail::neg_xlogx(r.theta);
  const double slack = lhs - rhs;
  return MaxEntropyCheck{slack >= -1e-12, slack, lhs, rhs, r.K, r.theta};
}

Theorem2Report theorem2_check(const DiscreteJoint& joint,
                              const std::vector<std::vector<std::size_t>>& cells) {
  const std::size_t nx = joint.rows();
  const std::size_t m = joint.labels();

  std::vector<int> seen(nx, 0);
  for (const auto& cell : cells) {
    if (cell.empty()) throw std::invalid_argument("theorem2_check: empty cell");
    for (std::size_t x : cell) {
      if (x >= nx) throw std::invalid_argument("theorem2_check: symbol index out of range");
      if (seen[x]++ != 0) throw std::invalid_argument("theorem2_check: cells overlap");
    }
  }
  for (std::size_t x = 0; x < nx; ++x) {
    if (seen[x] == 0) throw std::invalid_argument("theorem2_check: cells do not cover the alphabet");
  }

  Theorem2Report rep{};
  rep.mpe_label.resize(nx);
  for (std::size_t x = 0; x < nx; ++x) {
    auto row = joint.row(x);
    rep.mpe_label[x] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }

  const std::size_t k = cells.size();
  std::vector<double> u_mass(k * m, 0.0);           // (cell, y)
  std::vector<double> refined_mass(k * m * m, 0.0);  // ((cell, u), y)
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t x : cells[c]) {
      const std::size_t u = rep.mpe_label[x];
      for (std::size_t y = 0; y < m; ++y) {
        u_mass[c * m + y] += joint(x, y);
        refined_mass[(c * m + u) * m + y] += joint(x, y);
      }
    }
  }

  auto err_of = [&](const double* w, double total) {
    // 1 - max_y w(y)/total
    return 1.0 - *std::max_element(w, w + m) / total;
  };
  auto ent_of = [&](const double* w, double total) {
    double h = 0.0;
    for (std::size_t y = 0; y < m; ++y) h += detail::neg_xlogx(w[y] / total);
    return h;
  };

  for (std::size_t c = 0; c < k; ++c) {
    const double* wb = &u_mass[c * m];
    const double mass_b = std::accumulate(wb, wb + m, 0.0);
    CellTerms t{c, mass_b, 0.0, 0.0, 0.0, 0.0};
    if (mass_b > 0.0) {
      const double prior_b = err_of(wb, mass_b);
      const double h_b = ent_of(wb, mass_b);
      double residual = 0.0;
      double cond_h = 0.0;
      for (std::size_t u = 0; u < m; ++u) {
        const double* wu = &refined_mass[(c * m + u) * m];
        const double mass_u = std::accumulate(wu, wu + m, 0.0);
        if (mass_u <= 0.0) continue;
        residual += (mass_u / mass_b) * err_of(wu, mass_u);
        cond_h += (mass_u / mass_b) * ent_of(wu, mass_u);
      }
      t.eps = std::clamp(residual, 0.0, prior_b);
      t.g = prior_b - t.eps;
      t.info_term = h_b - cond_h;
      std::vector<double> post(wb, wb + m);
      for (double& p : post) p /= mass_b;
      const Pmf post_b(std::move(post));
      t.bound_term = f_min_mi(post_b, std::min(t.eps, prior_error(post_b)));
    }
    rep.wil_by_cells += t.mass * t.info_term;
    rep.ol_by_cells += t.mass * t.g;
    rep.bound += t.mass * t.bound_term;
    rep.per_cell.push_back(t);
  }

  const DiscreteJoint u_joint(k, m, u_mass);
  const DiscreteJoint refined_joint(k * m, m, refined_mass);
  rep.wil = mutual_information(refined_joint) - mutual_information(u_joint);
  rep.ol = bayes_error(u_joint) - bayes_error(joint);
  return rep;
}

}  // namespace infoloss
