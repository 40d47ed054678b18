// Plug-in estimators of information loss, operation loss, weak information
// loss and projected information loss for a (model, partition) pair.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "infoloss/dataset.hpp"
#include "infoloss/models.hpp"
#include "infoloss/partition.hpp"

namespace infoloss {

struct LossCurvePoint {
  std::string scheme;
  std::size_t k_requested = 0;
  std::size_t k = 0;  // achieved partition size
  double il = 0.0, se_il = 0.0;
  double ol = 0.0, se_ol = 0.0;
  double wil = 0.0, se_wil = 0.0;
  std::optional<double> pil;
  double se_pil = 0.0;
  std::size_t n_eval = 0, n_cal = 0;
  std::uint64_t seed = 0;
};

struct EstimatorConfig {
  std::size_t n_cal = 100000;
  std::size_t n_eval = 10000;
  std::size_t aux_resolution = 256;
  std::uint64_t seed = 20240601;

  void validate() const;
};

/// (1/n) sum_i ln[posterior(x_i)(y_i) / prior(y_i)].
Estimate empirical_mi_true(const GaussClassModel& model, const LabeledDataset& data);

/// Mutual information of the empirical joint of (cell id, label). The SE is
/// that of the per-sample terms ln(p(y_i|u_i) / p(y_i)).
Estimate plugin_mi(const LabeledDataset& data, const Partition& p);
Estimate plugin_mi(const std::vector<std::size_t>& ids, const std::vector<std::size_t>& labels);

Estimate info_loss(const GaussClassModel& model, const LabeledDataset& data, const Partition& p);

/// Risk difference on `eval` between the per-cell MAP rule learned on `cal`
/// and the exact model MPE rule. Cells unseen in `cal` predict the global
/// majority label of `cal`.
Estimate op_loss(const GaussClassModel& model, const LabeledDataset& cal, const LabeledDataset& eval,
                 const Partition& p);

/// plugin_mi(refine_with_rule(p, mpe_rule)) - plugin_mi(p).
Estimate weak_info_loss(const GaussClassModel& model, const LabeledDataset& data, const Partition& p);

/// Plug-in I((eta_q(X), U); Y) - I(U; Y), where eta_q is the projection
/// quantized on a uniform grid of `aux_resolution` bins over the empirical
/// 0.1%..99.9% quantile range plus two overflow bins.
Estimate projected_info_loss(const LabeledDataset& data, const Partition& p, const Projection& eta,
                             std::size_t aux_resolution);

/// Caches everything that does not depend on the partition so that many
/// partitions can be scored against the same evaluation and calibration data.
class EvaluationContext {
 public:
  EvaluationContext(const GaussClassModel& model, LabeledDataset eval, LabeledDataset cal,
                    std::optional<Projection> eta, std::size_t aux_resolution);

  const LabeledDataset& eval() const { return eval_; }
  const LabeledDataset& cal() const { return cal_; }

  /// Fills il, ol, wil, pil and their SEs; leaves scheme/k/seed alone.
  void score(const Partition& p, LossCurvePoint& out) const;

 private:
  const GaussClassModel& model_;
  LabeledDataset eval_, cal_;
  std::vector<double> true_terms_;
  std::vector<std::size_t> eval_mpe_;
  std::optional<std::vector<std::size_t>> aux_bins_;
  std::size_t aux_bins_total_ = 0;
};

enum class SchemeKind { Constant, Product, Gessaman, Tsp, Asymmetric, ProjectedUniform, Optimal };

struct SchemeSpec {
  SchemeKind kind = SchemeKind::Product;
  std::size_t l_n = 20;          // data-driven schemes
  double radius = 0.0;           // product grid half-width; 0 selects a model-based default
  double asymmetric_radius = 4.0;

  std::string name() const;
  static SchemeSpec parse(const std::string& name);
};

/// Builds the partition of `spec` closest in size to k. Data-driven schemes
/// draw their own unlabelled construction sample from `model` with a seed
/// derived from (seed, scheme, k).
Partition build_scheme(const GaussClassModel& model, const ModelKind& kind, const SchemeSpec& spec,
                       std::size_t k, std::uint64_t seed);

std::vector<LossCurvePoint> loss_curve(const ModelKind& kind, const SchemeSpec& spec,
                                       const std::vector<std::size_t>& sizes, const EstimatorConfig& config,
                                       std::vector<nlohmann::json>* partitions = nullptr);

/// Scores several schemes against shared evaluation/calibration samples.
std::vector<std::vector<LossCurvePoint>> loss_curves(const ModelKind& kind, const std::vector<SchemeSpec>& specs,
                                                     const std::vector<std::size_t>& sizes,
                                                     const EstimatorConfig& config,
                                                     std::vector<std::vector<nlohmann::json>>* partitions = nullptr);

inline constexpr const char* kCurveCsvHeader = "scheme,k,il,se_il,ol,se_ol,wil,pil,n_eval,n_cal,seed";

void write_curve_csv(std::ostream& os, const std::vector<LossCurvePoint>& points);
nlohmann::json curve_to_json(const std::vector<LossCurvePoint>& points);

}  // namespace infoloss
