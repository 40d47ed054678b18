#include <doctest.h>

#include <sstream>

#include "infoloss/estimators.hpp"
#include "oracles.hpp"

using namespace infoloss;

namespace {

const GaussClassModel& scale_model() {
  static const GaussClassModel m = GaussClassModel::build(ScaleInvariant{});
  return m;
}

}  // namespace

TEST_CASE("plug-in MI on hand data") {
  CHECK(plugin_mi({0, 0, 0, 0}, {0, 1, 0, 1}).value == 0.0);
  // Cells {0,0,1}, {1,1,1}: joint counts (2,1 | 0,3) of 6 points.
  const std::vector<std::size_t> ids{0, 0, 0, 1, 1, 1}, labels{0, 0, 1, 1, 1, 1};
  const double expected = oracle::mutual_information({{2.0 / 6, 1.0 / 6}, {0.0, 3.0 / 6}});
  CHECK(plugin_mi(ids, labels).value == doctest::Approx(expected).epsilon(1e-14));
  CHECK(plugin_mi(ids, labels).se >= 0.0);
  CHECK_THROWS(plugin_mi(std::vector<std::size_t>{0}, std::vector<std::size_t>{0, 1}));
}

TEST_CASE("plug-in MI on a dataset matches the id overload") {
  const LabeledDataset d = scale_model().sample(5000, 1);
  const Partition q = quadrant_partition();
  CHECK(plugin_mi(d, q).value == plugin_mi(q.quantize_all(d), d.labels).value);
}

TEST_CASE("constant and optimal partitions bracket the losses") {
  const GaussClassModel& m = scale_model();
  const LabeledDataset eval = m.sample(40000, 2), cal = m.sample(40000, 3);
  const Estimate true_mi = empirical_mi_true(m, eval);

  const Partition c = constant_partition(2);
  const Estimate il_c = info_loss(m, eval, c);
  CHECK(il_c.value == doctest::Approx(true_mi.value).epsilon(1e-12));
  const Estimate ol_c = op_loss(m, cal, eval, c);
  CHECK(std::abs(ol_c.value - (0.75 - oracle::kScaleBayesRisk)) < 4.0 * ol_c.se + 0.01);

  const Partition q = quadrant_partition();
  CHECK(std::abs(op_loss(m, cal, eval, q).value) < 1e-12);
  CHECK(std::abs(weak_info_loss(m, eval, q).value) < 1e-12);
  CHECK(info_loss(m, eval, q).value > 0.0);
}

TEST_CASE("weak loss decomposes the information loss") {
  // IL(P) = IL(P refined by the MPE rule) + WIL(P) on the same sample.
  const GaussClassModel& m = scale_model();
  const LabeledDataset d = m.sample(20000, 4);
  for (unsigned mm : {1u, 2u}) {
    const Partition p = product_partition(mm, 2);
    const Partition r = refine_with_rule(p, [&](std::span<const double> x) { return m.mpe_rule(x); }, 4);
    const double lhs = info_loss(m, d, p).value;
    const double rhs = info_loss(m, d, r).value + weak_info_loss(m, d, p).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    CHECK(weak_info_loss(m, d, p).value >= -1e-12);
  }
}

TEST_CASE("refining a partition never lowers plug-in information") {
  const LabeledDataset d = scale_model().sample(20000, 5);
  double prev = -1.0;
  for (std::size_t q : {1, 2, 4, 8, 16}) {
    const double v = plugin_mi(d, uniform_grid(2, q, -4.0, 4.0)).value;
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("projected loss vanishes for the projection's own slabs") {
  const TranslationInvariant t{};
  const GaussClassModel m = GaussClassModel::build(t);
  const Projection eta = invariant_projection(t);
  const LabeledDataset d = m.sample(20000, 6);
  const Estimate coarse = projected_info_loss(d, constant_partition(2), eta, 64);
  CHECK(coarse.value > 0.1);
  // A partition that carries the auxiliary bins loses nothing relative to them.
  const Partition fine = projected_uniform({std::cos(t.angle), std::sin(t.angle)}, -6.0, 6.0, 300);
  CHECK(projected_info_loss(d, fine, eta, 64).value < coarse.value);
}

TEST_CASE("scheme names parse and round trip") {
  for (const char* n : {"constant", "product", "gessaman", "tsp", "asymmetric", "1d-uniform", "optimal"}) {
    CHECK(SchemeSpec::parse(n).name() == n);
  }
  CHECK_THROWS(SchemeSpec::parse("voronoi"));
  CHECK_THROWS(build_scheme(GaussClassModel::build(TwoClass1D{}), TwoClass1D{}, SchemeSpec::parse("optimal"), 4, 1));
}

TEST_CASE("small curves: invariants and determinism") {
  EstimatorConfig cfg;
  cfg.n_eval = 4000;
  cfg.n_cal = 8000;
  cfg.seed = 77;
  const std::vector<std::size_t> sizes{5, 10, 20, 50};
  const auto a = loss_curve(ScaleInvariant{}, SchemeSpec::parse("product"), sizes, cfg);
  const auto b = loss_curve(ScaleInvariant{}, SchemeSpec::parse("product"), sizes, cfg);
  REQUIRE(a.size() == sizes.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].il == b[i].il);
    CHECK(a[i].ol == b[i].ol);
    CHECK(a[i].il >= -3.0 * a[i].se_il);
    CHECK(a[i].wil >= -1e-12);
    CHECK(a[i].n_eval == 4000);
    CHECK(a[i].seed == 77);
    CHECK_FALSE(a[i].pil.has_value());
  }
  cfg.seed = 78;
  const auto c = loss_curve(ScaleInvariant{}, SchemeSpec::parse("product"), sizes, cfg);
  CHECK(c[0].il != a[0].il);

  const auto t = loss_curve(TranslationInvariant{}, SchemeSpec::parse("1d-uniform"), {5, 10}, cfg);
  CHECK(t[0].pil.has_value());
}

TEST_CASE("curve CSV format") {
  LossCurvePoint p;
  p.scheme = "tsp";
  p.k = 16;
  p.il = 0.125;
  p.se_il = 0.0;
  p.ol = -0.5;
  p.se_ol = 0.25;
  p.wil = 1.0;
  p.n_eval = 10;
  p.n_cal = 20;
  p.seed = 3;
  std::ostringstream os;
  write_curve_csv(os, {p});
  const std::string s = os.str();
  CHECK(s.rfind(std::string(kCurveCsvHeader) + "\n", 0) == 0);
  const std::string row = s.substr(s.find('\n') + 1);
  CHECK(row.rfind("tsp,16,", 0) == 0);
  CHECK(row.find(",,10,20,3\n") != std::string::npos);  // empty pil
  const auto j = curve_to_json({p});
  CHECK(j[0]["pil"].is_null());
  CHECK(j[0]["k"] == 16);
}

TEST_CASE("estimator config validation") {
  EstimatorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.n_eval = 0;
  CHECK_THROWS(cfg.validate());
}
