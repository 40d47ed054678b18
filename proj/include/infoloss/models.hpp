// Gaussian class-conditional models on R^d with isotropic covariances.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "infoloss/dataset.hpp"
#include "infoloss/finite_info.hpp"

namespace infoloss {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Class order matches the quadrant cells: class 1 = (+,+), 2 = (-,+),
// 3 = (-,-), 4 = (+,-).
struct ScaleInvariant {
  double alpha = 1.5;
  double sigma = 1.0;
};

struct RotatedScaleInvariant {
  double alpha = 1.5;
  double sigma = 1.0;
  double angle = 0.0;
};

// Equiprobable classes with means spaced along the line through the origin
// at `angle`, centred at the origin.
struct TranslationInvariant {
  double spacing = 3.0;
  double sigma = 1.0;
  double angle = kPi / 6.0;
  std::size_t classes = 5;
};

// Zero means, one standard deviation per class, uniform priors.
struct RotationInvariant {
  std::vector<double> sigmas{0.5, 1.0, 1.75, 2.75};
};

// X ~ N(K, sigma^2) for class 1 and N(-K, sigma^2) for class 2.
struct TwoClass1D {
  double K = 1.0;
  double sigma = 1.0;
};

using ModelKind =
    std::variant<ScaleInvariant, RotatedScaleInvariant, TranslationInvariant, RotationInvariant, TwoClass1D>;

std::string kind_name(const ModelKind& kind);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

class GaussClassModel {
 public:
  /// sigmas are standard deviations; means has classes * dim entries.
  GaussClassModel(Pmf priors, std::size_t dim, std::vector<double> means, std::vector<double> sigmas,
                  double rotation = 0.0);

  static GaussClassModel build(const ModelKind& kind);

  std::size_t dim() const { return dim_; }
  std::size_t classes() const { return priors_.size(); }
  const Pmf& priors() const { return priors_; }
  std::span<const double> mean(std::size_t y) const {
    return std::span<const double>(means_).subspan(y * dim_, dim_);
  }
  double sigma(std::size_t y) const { return sigmas_[y]; }
  double rotation() const { return rotation_; }

  Pmf posterior(std::span<const double> x) const;
  /// ln posterior(x)(y), stable for points far in the tails.
  double log_posterior(std::span<const double> x, std::size_t y) const;
  /// argmax of the posterior, smallest label on ties.
  std::size_t mpe_rule(std::span<const double> x) const;

  LabeledDataset sample(std::size_t n, std::uint64_t seed) const;

  /// Largest |mean coordinate| plus four of the largest sigma.
  double natural_radius() const;

 private:
  void log_joint(std::span<const double> x, std::vector<double>& out) const;

  Pmf priors_;
  std::size_t dim_;
  std::vector<double> means_;
  std::vector<double> sigmas_;
  double rotation_;
  std::vector<double> log_prior_;
  bool homoscedastic_;
};

Estimate bayes_risk_mc(const GaussClassModel& model, std::size_t n, std::uint64_t seed);
Estimate mi_mc(const GaussClassModel& model, std::size_t n, std::uint64_t seed);

using Projection = std::function<double(std::span<const double>)>;

/// Maximal-invariant projection: signed coordinate along the class-mean axis
/// for the translation family, Euclidean norm for the rotation family.
Projection invariant_projection(const ModelKind& kind);
bool has_invariant_projection(const ModelKind& kind);

}  // namespace infoloss
