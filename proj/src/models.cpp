#include "infoloss/models.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "infoloss/rng.hpp"

namespace infoloss {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

GaussClassModel scale_model(double alpha, double sigma, double angle) {
  require(alpha >= 0.0 && std::isfinite(alpha), "ScaleInvariant: alpha must be finite and >= 0");
  require(sigma > 0.0 && std::isfinite(sigma), "ScaleInvariant: sigma must be > 0");
  const double base[8] = {alpha, alpha, -alpha, alpha, -alpha, -alpha, alpha, -alpha};
  std::vector<double> means(base, base + 8);
  if (angle != 0.0) {
    const double c = std::cos(angle), s = std::sin(angle);
    for (std::size_t y = 0; y < 4; ++y) {
      const double a = means[2 * y], b = means[2 * y + 1];
      means[2 * y] = c * a - s * b;
      means[2 * y + 1] = s * a + c * b;
    }
  }
  return GaussClassModel(Pmf::uniform(4), 2, std::move(means), std::vector<double>(4, sigma), angle);
}

struct Builder {
  GaussClassModel operator()(const ScaleInvariant& k) const { return scale_model(k.alpha, k.sigma, 0.0); }
  GaussClassModel operator()(const RotatedScaleInvariant& k) const {
    require(std::isfinite(k.angle), "RotatedScaleInvariant: angle must be finite");
    return scale_model(k.alpha, k.sigma, k.angle);
  }
  GaussClassModel operator()(const TranslationInvariant& k) const {
    require(k.classes >= 2, "TranslationInvariant: need at least 2 classes");
    require(k.spacing > 0.0 && std::isfinite(k.spacing), "TranslationInvariant: spacing must be > 0");
    require(k.sigma > 0.0 && std::isfinite(k.sigma), "TranslationInvariant: sigma must be > 0");
    require(std::isfinite(k.angle), "TranslationInvariant: angle must be finite");
    const double c = std::cos(k.angle), s = std::sin(k.angle);
    const double mid = 0.5 * static_cast<double>(k.classes - 1);
    std::vector<double> means;
    for (std::size_t y = 0; y < k.classes; ++y) {
      const double t = (static_cast<double>(y) - mid) * k.spacing;
      means.push_back(t * c);
      means.push_back(t * s);
    }
    return GaussClassModel(Pmf::uniform(k.classes), 2, std::move(means),
                           std::vector<double>(k.classes, k.sigma), k.angle);
  }
  GaussClassModel operator()(const RotationInvariant& k) const {
    require(k.sigmas.size() >= 2, "RotationInvariant: need at least 2 classes");
    for (double s : k.sigmas) require(s > 0.0 && std::isfinite(s), "RotationInvariant: sigmas must be > 0");
    return GaussClassModel(Pmf::uniform(k.sigmas.size()), 2, std::vector<double>(2 * k.sigmas.size(), 0.0),
                           k.sigmas, 0.0);
  }
  GaussClassModel operator()(const TwoClass1D& k) const {
    require(k.K > 0.0 && std::isfinite(k.K), "TwoClass1D: K must be > 0");
    require(k.sigma > 0.0 && std::isfinite(k.sigma), "TwoClass1D: sigma must be > 0");
    return GaussClassModel(Pmf::uniform(2), 1, {k.K, -k.K}, {k.sigma, k.sigma}, 0.0);
  }
};

}  // namespace

std::string kind_name(const ModelKind& kind) {
  static const char* names[] = {"scale", "rotated-scale", "translation", "rotation", "two-class-1d"};
  return names[kind.index()];
}

GaussClassModel::GaussClassModel(Pmf priors, std::size_t dim, std::vector<double> means,
                                 std::vector<double> sigmas, double rotation)
    : priors_(std::move(priors)),
      dim_(dim),
      means_(std::move(means)),
      sigmas_(std::move(sigmas)),
      rotation_(rotation) {
  require(dim_ >= 1, "GaussClassModel: dim must be >= 1");
  require(means_.size() == priors_.size() * dim_, "GaussClassModel: means size mismatch");
  require(sigmas_.size() == priors_.size(), "GaussClassModel: sigmas size mismatch");
  for (double m : means_) require(std::isfinite(m), "GaussClassModel: means must be finite");
  for (double s : sigmas_) require(s > 0.0 && std::isfinite(s), "GaussClassModel: sigmas must be > 0");
  log_prior_.resize(priors_.size());
  for (std::size_t y = 0; y < priors_.size(); ++y) {
    log_prior_[y] = priors_[y] > 0.0 ? std::log(priors_[y]) : -std::numeric_limits<double>::infinity();
  }
  homoscedastic_ = std::all_of(sigmas_.begin(), sigmas_.end(), [&](double s) { return s == sigmas_[0]; });
}

GaussClassModel GaussClassModel::build(const ModelKind& kind) { return std::visit(Builder{}, kind); }

void GaussClassModel::log_joint(std::span<const double> x, std::vector<double>& out) const {
  const std::size_t m = classes();
  out.resize(m);
  for (std::size_t y = 0; y < m; ++y) {
    const auto mu = mean(y);
    double d2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double t = x[i] - mu[i];
      d2 += t * t;
    }
    const double s = sigmas_[y];
    out[y] = log_prior_[y] - 0.5 * d2 / (s * s) - static_cast<double>(dim_) * std::log(s);
  }
}

Pmf GaussClassModel::posterior(std::span<const double> x) const {
  std::vector<double> lj;
  log_joint(x, lj);
  const double top = *std::max_element(lj.begin(), lj.end());
  double total = 0.0;
  for (double& v : lj) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : lj) v /= total;
  return Pmf(std::move(lj));
}

double GaussClassModel::log_posterior(std::span<const double> x, std::size_t y) const {
  std::vector<double> lj;
  log_joint(x, lj);
  const double top = *std::max_element(lj.begin(), lj.end());
  double total = 0.0;
  for (double v : lj) total += std::exp(v - top);
  return lj[y] - top - std::log(total);
}

std::size_t GaussClassModel::mpe_rule(std::span<const double> x) const {
  const std::size_t m = classes();
  if (homoscedastic_) {
    // Compare linear discriminants pairwise so that points arbitrarily close
    // to a boundary are resolved by the sign of x.(m_y - m_best) rather than
    // by rounding in the full quadratic form.
    const double inv_var = 1.0 / (sigmas_[0] * sigmas_[0]);
    auto offset = [&](std::size_t y) {
      const auto mu = mean(y);
      double n2 = 0.0;
      for (double v : mu) n2 += v * v;
      return log_prior_[y] - 0.5 * n2 * inv_var;
    };
    std::size_t best = 0;
    double best_off = offset(0);
    for (std::size_t y = 1; y < m; ++y) {
      const auto my = mean(y);
      const auto mb = mean(best);
      double lin = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) lin += x[i] * (my[i] - mb[i]);
      const double off = offset(y);
      if (lin * inv_var > best_off - off) {
        best = y;
        best_off = off;
      }
    }
    return best;
  }
  std::vector<double> lj;
  log_joint(x, lj);
  return static_cast<std::size_t>(std::max_element(lj.begin(), lj.end()) - lj.begin());
}

LabeledDataset GaussClassModel::sample(std::size_t n, std::uint64_t seed) const {
  if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
  Engine eng = make_engine(seed, "sample");
  NormalSource normal;
  std::vector<double> cdf(classes());
  std::partial_sum(priors_.probs().begin(), priors_.probs().end(), cdf.begin());
  LabeledDataset out;
  out.dim = dim_;
  out.seed = seed;
  out.points.resize(n * dim_);
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform01(eng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t y = static_cast<std::size_t>(it - cdf.begin());
    if (y >= classes()) y = classes() - 1;
    while (priors_[y] == 0.0 && y > 0) --y;
    out.labels[i] = y;
    const auto mu = mean(y);
    for (std::size_t j = 0; j < dim_; ++j) out.points[i * dim_ + j] = mu[j] + sigmas_[y] * normal(eng);
  }
  return out;
}

double GaussClassModel::natural_radius() const {
  double r = 0.0;
  for (double v : means_) r = std::max(r, std::abs(v));
  return r + 4.0 * *std::max_element(sigmas_.begin(), sigmas_.end());
}

namespace {

Estimate mean_and_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = v.size() > 1 ? ss / (n - 1.0) : 0.0;
  return Estimate{mean, std::sqrt(var / n)};
}

}  // namespace

Estimate bayes_risk_mc(const GaussClassModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 1000) throw std::invalid_argument("bayes_risk_mc: n must be >= 1000");
  const LabeledDataset data = model.sample(n, derive_seed(seed, "bayes_risk_mc"));
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < n; ++i) wrong += model.mpe_rule(data.point(i)) != data.labels[i];
  const double p = static_cast<double>(wrong) / static_cast<double>(n);
  return Estimate{p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

Estimate mi_mc(const GaussClassModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 1000) throw std::invalid_argument("mi_mc: n must be >= 1000");
  const LabeledDataset data = model.sample(n, derive_seed(seed, "mi_mc"));
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t y = data.labels[i];
    terms[i] = model.log_posterior(data.point(i), y) - std::log(model.priors()[y]);
  }
  return mean_and_se(terms);
}

bool has_invariant_projection(const ModelKind& kind) {
  return std::holds_alternative<TranslationInvariant>(kind) || std::holds_alternative<RotationInvariant>(kind);
}

Projection invariant_projection(const ModelKind& kind) {
  if (const auto* t = std::get_if<TranslationInvariant>(&kind)) {
    const double c = std::cos(t->angle), s = std::sin(t->angle);
    return [c, s](std::span<const double> x) { return c * x[0] + s * x[1]; };
  }
  if (std::holds_alternative<RotationInvariant>(kind)) {
    return [](std::span<const double> x) {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      return std::sqrt(r2);
    };
  }
  throw std::invalid_argument("invariant_projection: no known projection for model '" + kind_name(kind) + "'");
}

void write_csv(std::ostream& os, const LabeledDataset& data) {
  for (std::size_t j = 0; j < data.dim; ++j) os << 'x' << (j + 1) << ',';
  os << "y\n";
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.dim; ++j) os << data.points[i * data.dim + j] << ',';
    os << (data.labels[i] + 1) << '\n';
  }
  os.precision(old);
}

}  // namespace infoloss
