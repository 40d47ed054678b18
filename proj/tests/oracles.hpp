// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical code.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kLn2 = 0.693147180559945309417232121458176568;

// Frozen reference values; the tests recompute each from scratch.
inline constexpr double kExtremalExampleF = 0.21084455784169664;  // f((.5,.3,.2), .3)
inline constexpr double kScaleBayesRisk = 0.12915120039633843;     // 1 - Phi(1.5)^2
inline constexpr double kTwoClassBayesRisk = 0.15865525393145707;  // 1 - Phi(1)
inline constexpr double kTwoClassMI = 0.3368308203468938;          // I(X;Y), K = sigma = 1

inline double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double normal_pdf(double x, double mu, double s) {
  const double z = (x - mu) / s;
  return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * kPi));
}

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Direct-sum entropy of a vector, no renormalisation.
inline double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) h -= xlogx(v);
  return h;
}

inline double binary_entropy(double r) { return -xlogx(r) - xlogx(1.0 - r); }

// Mutual information of a row-major joint via sum p(x,y) ln p(x,y)/(p(x)p(y)).
inline double mutual_information(const std::vector<std::vector<double>>& j) {
  const std::size_t m = j.empty() ? 0 : j[0].size();
  std::vector<double> py(m, 0.0);
  std::vector<double> px(j.size(), 0.0);
  for (std::size_t x = 0; x < j.size(); ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      px[x] += j[x][y];
      py[y] += j[x][y];
    }
  }
  double mi = 0.0;
  for (std::size_t x = 0; x < j.size(); ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      if (j[x][y] > 0.0) mi += j[x][y] * std::log(j[x][y] / (px[x] * py[y]));
    }
  }
  return mi;
}

// Error of the per-row argmax decision.
inline double bayes_error(const std::vector<std::vector<double>>& j) {
  double correct = 0.0;
  for (const auto& row : j) correct += *std::max_element(row.begin(), row.end());
  return 1.0 - correct;
}

// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return s * h / 3.0;
}

// I(X;Y) for X|Y=1 ~ N(K, s^2), X|Y=2 ~ N(-K, s^2), equal priors.
inline double two_class_mi(double K, double s) {
  const auto integrand = [&](double x) {
    const double a = normal_pdf(x, K, s), b = normal_pdf(x, -K, s);
    const double mix = 0.5 * (a + b);
    double v = 0.0;
    if (a > 0.0) v += 0.5 * a * std::log(a / mix);
    if (b > 0.0) v += 0.5 * b * std::log(b / mix);
    return v;
  };
  const double r = K + 12.0 * s;
  return simpson(integrand, -r, r, 200000);
}

// I(sign X; Y) for the same model.
inline double two_class_sign_mi(double K, double s) { return kLn2 - binary_entropy(Phi(K / s)); }

// Brute-force waterfilling: bisection on the common level of the sorted tail.
inline std::vector<double> extremal_sorted(std::vector<double> v, double eps) {
  std::sort(v.begin(), v.end(), std::greater<>());
  const double prior = 1.0 - v[0];
  const double transfer = prior - eps;
  if (transfer <= 0.0) return v;
  // Level theta such that sum_{j>=1} max(v_j - theta, 0) = transfer.
  double lo = 0.0, hi = v.size() > 1 ? v[1] : 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double moved = 0.0;
    for (std::size_t j = 1; j < v.size(); ++j) moved += std::max(v[j] - mid, 0.0);
    (moved > transfer ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  std::vector<double> r = v;
  r[0] += transfer;
  for (std::size_t j = 1; j < r.size(); ++j) r[j] = std::min(r[j], theta);
  return r;
}

inline double f_min_mi(const std::vector<double>& mu, double eps) {
  return entropy(mu) - entropy(extremal_sorted(mu, eps));
}

}  // namespace oracle
