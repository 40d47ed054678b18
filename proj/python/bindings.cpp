#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "infoloss/bounds.hpp"
#include "infoloss/estimators.hpp"
#include "infoloss/experiment.hpp"
#include "infoloss/finite_info.hpp"
#include "infoloss/models.hpp"
#include "infoloss/partition.hpp"
#include "infoloss/verify.hpp"

namespace py = pybind11;
using namespace infoloss;
using nlohmann::json;

namespace {

using Matrix = std::vector<std::vector<double>>;

DiscreteJoint joint_from(const Matrix& rows) {
  if (rows.empty()) throw ValidationError("joint must have at least one row");
  const std::size_t m = rows[0].size();
  std::vector<double> mass;
  for (const auto& r : rows) {
    if (r.size() != m) throw ValidationError("joint rows must have equal length");
    mass.insert(mass.end(), r.begin(), r.end());
  }
  return DiscreteJoint(rows.size(), m, std::move(mass));
}

std::vector<double> to_vec(const Pmf& p) { return {p.probs().begin(), p.probs().end()}; }

ModelKind model_from(const std::string& model_json) { return model_from_json(json::parse(model_json)); }

LabeledDataset dataset_from(const Matrix& points, const std::vector<std::size_t>& labels) {
  LabeledDataset d;
  d.dim = points.empty() ? 0 : points[0].size();
  for (const auto& p : points) {
    if (p.size() != d.dim) throw std::invalid_argument("points must share one dimension");
    d.points.insert(d.points.end(), p.begin(), p.end());
  }
  if (labels.empty()) {
    d.labels.assign(points.size(), 0);
  } else {
    if (labels.size() != points.size()) throw std::invalid_argument("labels and points differ in length");
    for (std::size_t y : labels) {
      if (y == 0) throw std::invalid_argument("labels are 1-based");
      d.labels.push_back(y - 1);
    }
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Information loss and operation loss of finite representations";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("entropy", [](const std::vector<double>& p) { return entropy(Pmf(p)); }, py::arg("pmf"));
  m.def("prior_error", [](const std::vector<double>& p) { return prior_error(Pmf(p)); }, py::arg("pmf"));
  m.def("mutual_information", [](const Matrix& j) { return mutual_information(joint_from(j)); }, py::arg("joint"));
  m.def("conditional_entropy", [](const Matrix& j) { return conditional_entropy(joint_from(j)); }, py::arg("joint"));
  m.def("bayes_error", [](const Matrix& j) { return bayes_error(joint_from(j)); }, py::arg("joint"));

  m.def(
      "extremal_pmf",
      [](const std::vector<double>& mu, double eps) {
        const ExtremalResult r = extremal_pmf(Pmf(mu), eps);
        return py::dict(py::arg("pmf") = to_vec(r.pmf), py::arg("K") = r.K, py::arg("theta") = r.theta,
                        py::arg("eps_bar") = r.eps_bar);
      },
      py::arg("mu"), py::arg("eps"));
  m.def(
      "f_min_mi", [](const std::vector<double>& mu, double eps) { return f_min_mi(Pmf(mu), eps); }, py::arg("mu"),
      py::arg("eps"));
  m.def("f1", &f1, py::arg("theta"), py::arg("eps"));
  m.def("i_loss_lower_bound", &i_loss_lower_bound, py::arg("eps"), py::arg("M"));
  m.def("i_loss_bruteforce", &i_loss_bruteforce, py::arg("eps"), py::arg("M"), py::arg("grid") = 200);
  m.def(
      "theorem2_check",
      [](const Matrix& j, const std::vector<std::vector<std::size_t>>& cells) {
        const Theorem2Report r = theorem2_check(joint_from(j), cells);
        return py::dict(py::arg("wil") = r.wil, py::arg("wil_by_cells") = r.wil_by_cells,
                        py::arg("bound") = r.bound, py::arg("ol") = r.ol, py::arg("ol_by_cells") = r.ol_by_cells,
                        py::arg("mpe_label") = r.mpe_label);
      },
      py::arg("joint"), py::arg("cells"));

  m.def(
      "_sample",
      [](const std::string& model, std::size_t n, std::uint64_t seed) {
        const LabeledDataset d = GaussClassModel::build(model_from(model)).sample(n, seed);
        Matrix pts(d.size());
        std::vector<std::size_t> labels(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
          const auto x = d.point(i);
          pts[i].assign(x.begin(), x.end());
          labels[i] = d.labels[i] + 1;
        }
        return py::make_tuple(pts, labels);
      },
      py::arg("model"), py::arg("n"), py::arg("seed"));
  m.def(
      "_bayes_risk_mc",
      [](const std::string& model, std::size_t n, std::uint64_t seed) {
        const Estimate e = bayes_risk_mc(GaussClassModel::build(model_from(model)), n, seed);
        return py::make_tuple(e.value, e.se);
      },
      py::arg("model"), py::arg("n"), py::arg("seed"));
  m.def(
      "_mi_mc",
      [](const std::string& model, std::size_t n, std::uint64_t seed) {
        const Estimate e = mi_mc(GaussClassModel::build(model_from(model)), n, seed);
        return py::make_tuple(e.value, e.se);
      },
      py::arg("model"), py::arg("n"), py::arg("seed"));

  py::class_<Partition>(m, "Partition")
      .def_property_readonly("kind", &Partition::kind)
      .def_property_readonly("dim", &Partition::dim)
      .def("__len__", &Partition::size)
      .def("quantize", [](const Partition& p, const std::vector<double>& x) { return p.quantize(x); })
      .def("quantize_all",
           [](const Partition& p, const Matrix& pts) { return p.quantize_all(dataset_from(pts, {})); })
      .def("_describe", [](const Partition& p, std::size_t max_cells) { return p.describe(max_cells).dump(); },
           py::arg("max_cells") = 4096);

  m.def("product_partition", &product_partition, py::arg("m"), py::arg("dim"));
  m.def("uniform_grid", &uniform_grid, py::arg("dim"), py::arg("q"), py::arg("lo"), py::arg("hi"));
  m.def("constant_partition", &constant_partition, py::arg("dim"));
  m.def("quadrant_partition", &quadrant_partition);
  m.def("asymmetric_dyadic", &asymmetric_dyadic, py::arg("depth"), py::arg("radius") = 4.0);
  m.def(
      "gessaman", [](const Matrix& pts, std::size_t l) { return gessaman(dataset_from(pts, {}), l); },
      py::arg("points"), py::arg("l_n"));
  m.def(
      "tsp", [](const Matrix& pts, std::size_t l) { return tsp(dataset_from(pts, {}), l); }, py::arg("points"),
      py::arg("l_n"));
  m.def("tsp_leaf_count", &tsp_leaf_count, py::arg("n"), py::arg("l_n"));

  m.def(
      "plugin_mi",
      [](const std::vector<std::size_t>& ids, const std::vector<std::size_t>& labels) {
        const Estimate e = plugin_mi(ids, labels);
        return py::make_tuple(e.value, e.se);
      },
      py::arg("ids"), py::arg("labels"));

  m.def(
      "_run_curves",
      [](const std::string& config) {
        const RunConfig cfg = RunConfig::from_json(json::parse(config));
        std::vector<std::vector<LossCurvePoint>> curves;
        {
          py::gil_scoped_release release;
          curves = loss_curves(cfg.model, cfg.schemes, cfg.sizes, cfg.estimator);
        }
        json out = json::array();
        for (const auto& c : curves) out.push_back(curve_to_json(c));
        return out.dump();
      },
      py::arg("config"));
  m.def(
      "_curve_csv",
      [](const std::string& points) {
        std::vector<LossCurvePoint> pts;
        for (const json& j : json::parse(points)) {
          LossCurvePoint p;
          p.scheme = j.at("scheme").get<std::string>();
          p.k = j.at("k").get<std::size_t>();
          p.il = j.at("il").get<double>();
          p.se_il = j.at("se_il").get<double>();
          p.ol = j.at("ol").get<double>();
          p.se_ol = j.at("se_ol").get<double>();
          p.wil = j.at("wil").get<double>();
          if (!j.at("pil").is_null()) p.pil = j.at("pil").get<double>();
          p.n_eval = j.at("n_eval").get<std::size_t>();
          p.n_cal = j.at("n_cal").get<std::size_t>();
          p.seed = j.at("seed").get<std::uint64_t>();
          pts.push_back(std::move(p));
        }
        std::ostringstream os;
        write_curve_csv(os, pts);
        return os.str();
      },
      py::arg("points"));
  m.def(
      "_verify",
      [](const std::string& suite, std::uint64_t seed, std::size_t trials) {
        VerifyOptions opt;
        opt.seed = seed;
        opt.trials = trials;
        py::gil_scoped_release release;
        return run_suite(suite, opt).to_json().dump();
      },
      py::arg("suite"), py::arg("seed") = kDefaultSeed, py::arg("trials") = 200);

  m.attr("CURVE_CSV_HEADER") = kCurveCsvHeader;
  m.attr("DEFAULT_SEED") = kDefaultSeed;
}
