#include "infoloss/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "infoloss/rng.hpp"

namespace infoloss {

using nlohmann::json;

namespace {

Estimate summarize(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  if (v.empty()) return {};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return Estimate{mean, v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0};
}

// Plug-in MI of (ids, labels) plus the per-sample terms ln(n_uy n / (n_u n_y)).
struct PluginResult {
  double mi;
  std::vector<double> terms;
};

PluginResult plugin(const std::vector<std::size_t>& ids, const std::vector<std::size_t>& labels) {
  const std::size_t n = ids.size();
  if (labels.size() != n) throw std::invalid_argument("plugin_mi: ids/labels length mismatch");
  if (n == 0) throw std::invalid_argument("plugin_mi: empty sample");
  const std::size_t m = *std::max_element(labels.begin(), labels.end()) + 1;

  std::unordered_map<std::size_t, std::size_t> dense;
  dense.reserve(n);
  std::vector<std::size_t> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    row[i] = dense.emplace(ids[i], dense.size()).first->second;
  }
  const std::size_t k = dense.size();
  std::vector<double> n_uy(k * m, 0.0), n_u(k, 0.0), n_y(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    n_uy[row[i] * m + labels[i]] += 1.0;
    n_u[row[i]] += 1.0;
    n_y[labels[i]] += 1.0;
  }
  const double nd = static_cast<double>(n);
  double mi = 0.0;
  for (std::size_t u = 0; u < k; ++u) {
    for (std::size_t y = 0; y < m; ++y) {
      const double c = n_uy[u * m + y];
      if (c > 0.0) mi += (c / nd) * std::log(c * nd / (n_u[u] * n_y[y]));
    }
  }
  PluginResult r{std::max(mi, 0.0), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    r.terms[i] = std::log(n_uy[row[i] * m + labels[i]] * nd / (n_u[row[i]] * n_y[labels[i]]));
  }
  return r;
}

std::vector<double> true_terms(const GaussClassModel& model, const LabeledDataset& data) {
  if (data.dim != model.dim()) throw std::invalid_argument("dataset dimension does not match the model");
  std::vector<double> t(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t y = data.labels[i];
    if (y >= model.classes()) throw std::invalid_argument("dataset label out of range for the model");
    t[i] = model.log_posterior(data.point(i), y) - std::log(model.priors()[y]);
  }
  return t;
}

std::vector<std::size_t> mpe_labels(const GaussClassModel& model, const LabeledDataset& data) {
  std::vector<std::size_t> u(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) u[i] = model.mpe_rule(data.point(i));
  return u;
}

Estimate difference(const PluginResult& a, const PluginResult& b) {
  std::vector<double> d(a.terms.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.terms[i] - b.terms[i];
  Estimate e = summarize(d);
  e.value = a.mi - b.mi;
  return e;
}

std::vector<std::size_t> combine(const std::vector<std::size_t>& ids, const std::vector<std::size_t>& sub,
                                 std::size_t radix) {
  std::vector<std::size_t> out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) out[i] = ids[i] * radix + sub[i];
  return out;
}

// Auxiliary bins of a scalar statistic: 0 below the 0.1% quantile,
// resolution + 1 at or above the 99.9% quantile, uniform bins between.
std::vector<std::size_t> aux_quantize(const std::vector<double>& t, std::size_t resolution) {
  if (resolution < 8) throw std::invalid_argument("aux_resolution must be >= 8");
  std::vector<double> s = t;
  std::sort(s.begin(), s.end());
  const double last = static_cast<double>(s.size() - 1);
  const double lo = s[static_cast<std::size_t>(std::floor(0.001 * last))];
  const double hi = s[static_cast<std::size_t>(std::ceil(0.999 * last))];
  std::vector<std::size_t> bins(t.size());
  const double r = static_cast<double>(resolution);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < lo) {
      bins[i] = 0;
    } else if (t[i] >= hi) {
      bins[i] = resolution + 1;
    } else {
      const double f = std::floor((t[i] - lo) / (hi - lo) * r);
      bins[i] = 1 + std::min(static_cast<std::size_t>(std::max(f, 0.0)), resolution - 1);
    }
  }
  return bins;
}

std::vector<std::size_t> project_and_bin(const LabeledDataset& data, const Projection& eta, std::size_t resolution) {
  std::vector<double> t(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) t[i] = eta(data.point(i));
  return aux_quantize(t, resolution);
}

Estimate op_loss_from_ids(const std::vector<std::size_t>& cal_ids, const std::vector<std::size_t>& cal_labels,
                          const std::vector<std::size_t>& eval_ids, const std::vector<std::size_t>& eval_labels,
                          const std::vector<std::size_t>& eval_mpe, std::size_t m) {
  if (cal_ids.empty() || eval_ids.empty()) throw std::invalid_argument("op_loss: empty sample");
  std::unordered_map<std::size_t, std::vector<std::size_t>> counts;
  std::vector<std::size_t> global(m, 0);
  for (std::size_t i = 0; i < cal_ids.size(); ++i) {
    auto& c = counts[cal_ids[i]];
    if (c.empty()) c.assign(m, 0);
    ++c[cal_labels[i]];
    ++global[cal_labels[i]];
  }
  auto argmax = [](const std::vector<std::size_t>& c) {
    return static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
  };
  const std::size_t fallback = argmax(global);
  std::unordered_map<std::size_t, std::size_t> rule;
  for (const auto& [id, c] : counts) rule[id] = argmax(c);

  std::vector<double> e(eval_ids.size());
  for (std::size_t i = 0; i < eval_ids.size(); ++i) {
    const auto it = rule.find(eval_ids[i]);
    const std::size_t pred = it == rule.end() ? fallback : it->second;
    e[i] = static_cast<double>(pred != eval_labels[i]) - static_cast<double>(eval_mpe[i] != eval_labels[i]);
  }
  return summarize(e);
}

}  // namespace

void EstimatorConfig::validate() const {
  if (n_cal < 1 || n_eval < 1) throw std::invalid_argument("EstimatorConfig: sample sizes must be >= 1");
  if (aux_resolution < 8) throw std::invalid_argument("EstimatorConfig: aux_resolution must be >= 8");
}

Estimate empirical_mi_true(const GaussClassModel& model, const LabeledDataset& data) {
  if (data.size() == 0) throw std::invalid_argument("empirical_mi_true: empty dataset");
  return summarize(true_terms(model, data));
}

Estimate plugin_mi(const std::vector<std::size_t>& ids, const std::vector<std::size_t>& labels) {
  PluginResult r = plugin(ids, labels);
  Estimate e = summarize(r.terms);
  e.value = r.mi;
  return e;
}

Estimate plugin_mi(const LabeledDataset& data, const Partition& p) {
  return plugin_mi(p.quantize_all(data), data.labels);
}

Estimate info_loss(const GaussClassModel& model, const LabeledDataset& data, const Partition& p) {
  const auto t = true_terms(model, data);
  const PluginResult r = plugin(p.quantize_all(data), data.labels);
  std::vector<double> d(t.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = t[i] - r.terms[i];
  Estimate e = summarize(d);
  e.value = summarize(t).value - r.mi;
  return e;
}

Estimate op_loss(const GaussClassModel& model, const LabeledDataset& cal, const LabeledDataset& eval,
                 const Partition& p) {
  return op_loss_from_ids(p.quantize_all(cal), cal.labels, p.quantize_all(eval), eval.labels,
                          mpe_labels(model, eval), model.classes());
}

Estimate weak_info_loss(const GaussClassModel& model, const LabeledDataset& data, const Partition& p) {
  const auto ids = p.quantize_all(data);
  const auto refined = combine(ids, mpe_labels(model, data), model.classes());
  return difference(plugin(refined, data.labels), plugin(ids, data.labels));
}

Estimate projected_info_loss(const LabeledDataset& data, const Partition& p, const Projection& eta,
                             std::size_t aux_resolution) {
  const auto ids = p.quantize_all(data);
  const auto bins = project_and_bin(data, eta, aux_resolution);
  const auto joint = combine(ids, bins, aux_resolution + 2);
  return difference(plugin(joint, data.labels), plugin(ids, data.labels));
}

// ---------------------------------------------------------------------------

EvaluationContext::EvaluationContext(const GaussClassModel& model, LabeledDataset eval, LabeledDataset cal,
                                     std::optional<Projection> eta, std::size_t aux_resolution)
    : model_(model), eval_(std::move(eval)), cal_(std::move(cal)) {
  true_terms_ = true_terms(model_, eval_);
  eval_mpe_ = mpe_labels(model_, eval_);
  if (eta) {
    aux_bins_ = project_and_bin(eval_, *eta, aux_resolution);
    aux_bins_total_ = aux_resolution + 2;
  }
}

void EvaluationContext::score(const Partition& p, LossCurvePoint& out) const {
  const auto ids = p.quantize_all(eval_);
  const PluginResult base = plugin(ids, eval_.labels);

  std::vector<double> d(ids.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = true_terms_[i] - base.terms[i];
  const Estimate il = summarize(d);
  out.il = summarize(true_terms_).value - base.mi;
  out.se_il = il.se;

  const Estimate ol = op_loss_from_ids(p.quantize_all(cal_), cal_.labels, ids, eval_.labels, eval_mpe_,
                                       model_.classes());
  out.ol = ol.value;
  out.se_ol = ol.se;

  const Estimate wil = difference(plugin(combine(ids, eval_mpe_, model_.classes()), eval_.labels), base);
  out.wil = wil.value;
  out.se_wil = wil.se;

  if (aux_bins_) {
    const Estimate pil = difference(plugin(combine(ids, *aux_bins_, aux_bins_total_), eval_.labels), base);
    out.pil = pil.value;
    out.se_pil = pil.se;
  } else {
    out.pil.reset();
    out.se_pil = 0.0;
  }
  out.n_eval = eval_.size();
  out.n_cal = cal_.size();
}

// ---------------------------------------------------------------------------

namespace {

struct SchemeName {
  SchemeKind kind;
  const char* name;
};

constexpr SchemeName kSchemeNames[] = {
    {SchemeKind::Constant, "constant"},     {SchemeKind::Product, "product"},
    {SchemeKind::Gessaman, "gessaman"},     {SchemeKind::Tsp, "tsp"},
    {SchemeKind::Asymmetric, "asymmetric"}, {SchemeKind::ProjectedUniform, "1d-uniform"},
    {SchemeKind::Optimal, "optimal"},
};

std::size_t nearest_depth(std::size_t k) {
  // asymmetric_cell_count(depth) = 12 + 12 depth
  const double d = std::round((static_cast<double>(k) - 12.0) / 12.0);
  return static_cast<std::size_t>(std::clamp(d, 0.0, static_cast<double>(kMaxAsymmetricDepth)));
}

}  // namespace

std::string SchemeSpec::name() const {
  for (const auto& s : kSchemeNames) {
    if (s.kind == kind) return s.name;
  }
  return "unknown";
}

SchemeSpec SchemeSpec::parse(const std::string& name) {
  for (const auto& s : kSchemeNames) {
    if (name == s.name) {
      SchemeSpec spec;
      spec.kind = s.kind;
      return spec;
    }
  }
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

Partition build_scheme(const GaussClassModel& model, const ModelKind& kind, const SchemeSpec& spec,
                       std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("build_scheme: k must be >= 1");
  const std::size_t d = model.dim();
  const std::uint64_t construct_seed = derive_seed(seed, "construct/" + spec.name(), k);
  switch (spec.kind) {
    case SchemeKind::Constant:
      return constant_partition(d);
    case SchemeKind::Product: {
      if (k < 2) return constant_partition(d);
      const double r = spec.radius > 0.0 ? spec.radius : model.natural_radius();
      const auto q = static_cast<std::size_t>(
          std::max(1.0, std::round(std::pow(static_cast<double>(k - 1), 1.0 / static_cast<double>(d)))));
      return uniform_grid(d, q, -r, r);
    }
    case SchemeKind::Gessaman: {
      const auto T = static_cast<std::size_t>(
          std::max(1.0, std::round(std::pow(static_cast<double>(k), 1.0 / static_cast<double>(d)))));
      std::size_t m = spec.l_n;
      for (std::size_t j = 0; j < d; ++j) m *= T;
      return gessaman(model.sample(m, construct_seed), spec.l_n);
    }
    case SchemeKind::Tsp: {
      // Leaf count grows by at most one per extra point, so the smallest m
      // reaching k leaves realizes k exactly.
      std::size_t lo = 1, hi = 1;
      while (tsp_leaf_count(hi, spec.l_n) < k) hi *= 2;
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (tsp_leaf_count(mid, spec.l_n) >= k) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      return tsp(model.sample(lo, construct_seed), spec.l_n);
    }
    case SchemeKind::Asymmetric:
      if (d != 2) throw std::invalid_argument("asymmetric scheme needs 2-D data");
      return asymmetric_dyadic(static_cast<unsigned>(nearest_depth(k)), spec.asymmetric_radius);
    case SchemeKind::ProjectedUniform: {
      const std::size_t kk = std::max<std::size_t>(k, 2);
      if (const auto* t = std::get_if<TranslationInvariant>(&kind)) {
        const Projection eta = invariant_projection(kind);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t y = 0; y < model.classes(); ++y) {
          lo = std::min(lo, eta(model.mean(y)));
          hi = std::max(hi, eta(model.mean(y)));
        }
        // Uniform over the span of the projected class means, where the
        // posterior varies; the end slabs absorb the tails.
        return projected_uniform({std::cos(t->angle), std::sin(t->angle)}, lo, hi, kk);
      }
      if (const auto* r = std::get_if<RotationInvariant>(&kind)) {
        const double smax = *std::max_element(r->sigmas.begin(), r->sigmas.end());
        return projected_uniform(std::vector<double>(d, 1.0), 0.0, 3.0 * smax, kk, true);
      }
      throw std::invalid_argument("1d-uniform scheme needs a translation or rotation model");
    }
    case SchemeKind::Optimal:
      if (!std::holds_alternative<ScaleInvariant>(kind)) {
        throw std::invalid_argument("optimal partition is only known for the scale-invariant model");
      }
      return quadrant_partition();
  }
  throw std::logic_error("unhandled scheme");
}

std::vector<std::vector<LossCurvePoint>> loss_curves(const ModelKind& kind, const std::vector<SchemeSpec>& specs,
                                                     const std::vector<std::size_t>& sizes,
                                                     const EstimatorConfig& config,
                                                     std::vector<std::vector<json>>* partitions) {
  config.validate();
  if (sizes.empty()) throw std::invalid_argument("loss_curve: empty size grid");
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw std::invalid_argument("loss_curve: sizes must be ascending");
  const GaussClassModel model = GaussClassModel::build(kind);
  std::optional<Projection> eta;
  if (has_invariant_projection(kind)) eta = invariant_projection(kind);
  const EvaluationContext ctx(model, model.sample(config.n_eval, derive_seed(config.seed, "eval")),
                              model.sample(config.n_cal, derive_seed(config.seed, "cal")), eta,
                              config.aux_resolution);
  std::vector<std::vector<LossCurvePoint>> out;
  if (partitions) partitions->assign(specs.size(), {});
  for (std::size_t s = 0; s < specs.size(); ++s) {
    std::vector<LossCurvePoint> curve;
    for (std::size_t k : sizes) {
      const Partition p = build_scheme(model, kind, specs[s], k, config.seed);
      LossCurvePoint pt;
      pt.scheme = specs[s].name();
      pt.k_requested = k;
      pt.k = p.size();
      pt.seed = config.seed;
      ctx.score(p, pt);
      curve.push_back(std::move(pt));
      if (partitions) (*partitions)[s].push_back(p.describe(64));
    }
    out.push_back(std::move(curve));
  }
  return out;
}

std::vector<LossCurvePoint> loss_curve(const ModelKind& kind, const SchemeSpec& spec,
                                       const std::vector<std::size_t>& sizes, const EstimatorConfig& config,
                                       std::vector<json>* partitions) {
  std::vector<std::vector<json>> parts;
  auto curves = loss_curves(kind, {spec}, sizes, config, partitions ? &parts : nullptr);
  if (partitions) *partitions = std::move(parts[0]);
  return std::move(curves[0]);
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_curve_csv(std::ostream& os, const std::vector<LossCurvePoint>& points) {
  os << kCurveCsvHeader << '\n';
  for (const auto& p : points) {
    os << p.scheme << ',' << p.k << ',' << num(p.il) << ',' << num(p.se_il) << ',' << num(p.ol) << ','
       << num(p.se_ol) << ',' << num(p.wil) << ',' << (p.pil ? num(*p.pil) : std::string()) << ',' << p.n_eval
       << ',' << p.n_cal << ',' << p.seed << '\n';
  }
}

json curve_to_json(const std::vector<LossCurvePoint>& points) {
  json arr = json::array();
  for (const auto& p : points) {
    json j{{"scheme", p.scheme}, {"k", p.k},         {"k_requested", p.k_requested},
           {"il", p.il},         {"se_il", p.se_il}, {"ol", p.ol},
           {"se_ol", p.se_ol},   {"wil", p.wil},     {"se_wil", p.se_wil},
           {"n_eval", p.n_eval}, {"n_cal", p.n_cal}, {"seed", p.seed}};
    j["pil"] = p.pil ? json(*p.pil) : json(nullptr);
    if (p.pil) j["se_pil"] = p.se_pil;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace infoloss
