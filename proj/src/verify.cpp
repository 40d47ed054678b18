#include "infoloss/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "infoloss/bounds.hpp"
#include "infoloss/estimators.hpp"
#include "infoloss/models.hpp"
#include "infoloss/partition.hpp"

namespace infoloss {

using nlohmann::json;

void VerifyReport::add(CheckResult c) {
  passed = passed && c.passed;
  checks.push_back(std::move(c));
}

json VerifyReport::to_json() const {
  json cs = json::array();
  for (const auto& c : checks) cs.push_back(json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return json{{"suite", suite}, {"seed", seed}, {"passed", passed}, {"checks", std::move(cs)}};
}

json FiniteInstance::to_json() const {
  std::vector<double> mass(joint.mass().begin(), joint.mass().end());
  return json{{"rows", joint.rows()}, {"labels", joint.labels()}, {"mass", mass}, {"cells", cells}};
}

Pmf random_pmf(Engine& eng, std::size_t m) {
  std::vector<double> w(m);
  double s = 0.0;
  for (auto& x : w) {
    const double u = uniform01(eng);
    x = u * u * u;
    s += x;
  }
  if (!(s > 0.0)) return Pmf::uniform(m);
  for (auto& x : w) x /= s;
  return Pmf(std::move(w));
}

FiniteInstance random_finite_instance(Engine& eng, std::size_t max_x, std::size_t max_m) {
  const std::size_t nx = 2 + static_cast<std::size_t>(uniform01(eng) * static_cast<double>(max_x - 1));
  const std::size_t m = 2 + static_cast<std::size_t>(uniform01(eng) * static_cast<double>(max_m - 1));
  const Pmf flat = random_pmf(eng, nx * m);
  std::vector<double> mass(flat.probs().begin(), flat.probs().end());
  const std::size_t k = 1 + static_cast<std::size_t>(uniform01(eng) * static_cast<double>(nx));
  std::vector<std::vector<std::size_t>> cells(k);
  // The first k symbols seed distinct cells so that none is empty.
  for (std::size_t x = 0; x < nx; ++x) {
    const std::size_t c = x < k ? x : static_cast<std::size_t>(uniform01(eng) * static_cast<double>(k));
    cells[c].push_back(x);
  }
  return FiniteInstance{DiscreteJoint(nx, m, std::move(mass)), std::move(cells)};
}

// ---------------------------------------------------------------------------

namespace {

VerifyReport start(std::string suite, std::uint64_t seed) {
  VerifyReport r;
  r.suite = std::move(suite);
  r.seed = seed;
  return r;
}

// Tracks the worst case of one property across many trials.
struct Tally {
  explicit Tally(std::string n) : name(std::move(n)) {}

  std::string name;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst = 0.0;
  json first_failure;

  void record(bool ok, double magnitude, const std::function<json()>& instance) {
    ++trials;
    worst = std::max(worst, magnitude);
    if (!ok) {
      if (violations == 0) first_failure = instance();
      ++violations;
    }
  }

  CheckResult result() const {
    CheckResult c{name, violations == 0, json{{"trials", trials}, {"violations", violations}, {"worst", worst}}};
    if (violations) c.detail["first_failure"] = first_failure;
    return c;
  }
};

}  // namespace

VerifyReport verify_theorem2(const VerifyOptions& opt) {
  VerifyReport rep = start("theorem2", opt.seed);
  Engine eng = make_engine(opt.seed, "verify/theorem2");
  Tally op_dec{"operation_loss_decomposition"}, info_dec{"weak_info_loss_decomposition"};
  Tally chain{"wil_ge_bound_ge_zero"}, corollary{"positive_ol_implies_positive_bound"};
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const FiniteInstance inst = random_finite_instance(eng);
    const Theorem2Report r = theorem2_check(inst.joint, inst.cells);
    auto dump = [&] {
      json j = inst.to_json();
      j["trial"] = t;
      j["wil"] = r.wil;
      j["bound"] = r.bound;
      j["ol"] = r.ol;
      return j;
    };
    const double e_ol = std::abs(r.ol - r.ol_by_cells);
    const double e_wil = std::abs(r.wil - r.wil_by_cells);
    op_dec.record(e_ol <= 1e-12, e_ol, dump);
    info_dec.record(e_wil <= 1e-12, e_wil, dump);
    const double gap = std::max(r.bound - r.wil, -r.bound);
    chain.record(r.wil >= r.bound - 1e-10 && r.bound >= -1e-10, std::max(gap, 0.0), dump);
    corollary.record(!(r.ol > 1e-9) || r.bound > 0.0, 0.0, dump);
  }
  for (const Tally* t : {&op_dec, &info_dec, &chain, &corollary}) rep.add(t->result());

  // Lossless and fully lossy representations of one fixed instance.
  Engine fixed = make_engine(opt.seed, "verify/theorem2/fixed");
  const FiniteInstance inst = random_finite_instance(fixed, 8, 4);
  std::vector<std::vector<std::size_t>> singletons, one(1);
  for (std::size_t x = 0; x < inst.joint.rows(); ++x) {
    singletons.push_back({x});
    one[0].push_back(x);
  }
  const Theorem2Report s = theorem2_check(inst.joint, singletons);
  rep.add({"singletons_are_lossless", s.wil == 0.0 && s.ol == 0.0 && s.bound == 0.0,
           json{{"wil", s.wil}, {"ol", s.ol}, {"bound", s.bound}}});
  const Theorem2Report c = theorem2_check(inst.joint, one);
  const double expected = prior_error(inst.joint.label_marginal()) - bayes_error(inst.joint);
  rep.add({"constant_representation_ol", std::abs(c.ol - expected) <= 1e-12 && (c.ol <= 1e-9 || c.bound > 0.0),
           json{{"ol", c.ol}, {"expected", expected}, {"bound", c.bound}}});
  return rep;
}

// ---------------------------------------------------------------------------

VerifyReport verify_bounds(const VerifyOptions& opt) {
  VerifyReport rep = start("bounds", opt.seed);
  Engine eng = make_engine(opt.seed, "verify/bounds");

  {
    json rows = json::array();
    bool ok = true;
    for (std::size_t t = 0; t < 20; ++t) {
      const double p = 0.5 + 0.45 * uniform01(eng);
      const Pmf mu(std::vector<double>{p, 1.0 - p});
      const double eps = (1.0 - p) * uniform01(eng);
      const double closed = f_min_mi(mu, eps);
      const double brute = f_min_mi_bruteforce(mu, eps, opt.channel_grid);
      const bool row_ok = brute >= closed - 1e-12 && brute - closed <= 1e-3;
      ok = ok && row_ok;
      rows.push_back(json{{"mu1", p}, {"eps", eps}, {"f", closed}, {"brute", brute}, {"ok", row_ok}});
    }
    rep.add({"f_matches_channel_grid", ok, json{{"grid", opt.channel_grid}, {"rows", rows}}});
  }

  {
    bool ok = true;
    for (std::size_t t = 0; t < 50; ++t) {
      const Pmf mu = random_pmf(eng, 2 + t % 5);
      ok = ok && f_min_mi(mu, prior_error(mu)) == 0.0;
    }
    rep.add({"trivial_regime_is_zero", ok, json::object()});
  }

  {
    json rows = json::array();
    bool ok = true;
    for (std::size_t m : {2, 3, 4}) {
      for (double eps : {0.05, 0.1, 0.2, 0.3}) {
        const double lb = i_loss_lower_bound(eps, m);
        const double brute = i_loss_bruteforce(eps, m, opt.grid);
        const bool row_ok = lb > 0.0 && brute >= lb - 2.0 / static_cast<double>(opt.grid);
        ok = ok && row_ok;
        rows.push_back(json{{"M", m}, {"eps", eps}, {"lower_bound", lb}, {"brute", brute}, {"ok", row_ok}});
      }
    }
    rep.add({"i_loss_lower_bound", ok, json{{"grid", opt.grid}, {"rows", rows}}});
  }

  {
    Tally t{"max_entropy_inequality"};
    for (std::size_t i = 0; i < std::max<std::size_t>(opt.trials, 1000); ++i) {
      const std::size_t m = 2 + i % 7;
      const Pmf mu = random_pmf(eng, m);
      const double prior = prior_error(mu);
      if (!(prior > 0.0)) continue;
      const double eps = prior * (1e-6 + (1.0 - 1e-6) * uniform01(eng));
      const MaxEntropyCheck c = max_entropy_inequality_check(mu, eps);
      t.record(c.holds, std::max(-c.slack, 0.0), [&] {
        return json{{"mu", std::vector<double>(mu.probs().begin(), mu.probs().end())}, {"eps", eps},
                    {"slack", c.slack}};
      });
    }
    rep.add(t.result());
  }

  {
    // f non-increasing and H(R) non-decreasing in eps on a grid.
    bool ok = true;
    for (std::size_t t = 0; t < 50; ++t) {
      const Pmf mu = random_pmf(eng, 2 + t % 5);
      const double prior = prior_error(mu);
      double prev_f = INFINITY, prev_h = -INFINITY;
      for (int j = 0; j <= 40; ++j) {
        const double eps = prior * j / 40.0;
        const double f = f_min_mi(mu, eps);
        const double h = entropy(extremal_pmf(mu, eps).pmf);
        ok = ok && f <= prev_f + 1e-12 && h >= prev_h - 1e-12 && f >= 0.0;
        prev_f = f;
        prev_h = h;
      }
    }
    rep.add({"monotone_in_eps", ok, json::object()});
  }
  return rep;
}

// ---------------------------------------------------------------------------

VerifyReport verify_example4d(const VerifyOptions& opt) {
  VerifyReport rep = start("example4d", opt.seed);
  const ModelKind kind = TwoClass1D{1.0, 1.0};
  const GaussClassModel model = GaussClassModel::build(kind);
  const EvaluationContext ctx(model, model.sample(opt.n, derive_seed(opt.seed, "example4d/eval")),
                              model.sample(opt.n, derive_seed(opt.seed, "example4d/cal")), std::nullopt, 256);
  const double floor = 0.5 * kTwoClassSignGap;
  json rows = json::array();
  LossCurvePoint last;
  for (int i = 1; i <= 12; ++i) {
    const double a = std::ldexp(1.0, -i);
    const Partition p = slab_partition({1.0}, false, {-a, a});
    LossCurvePoint pt;
    ctx.score(p, pt);
    rows.push_back(json{{"i", i}, {"il", pt.il}, {"se_il", pt.se_il}, {"ol", pt.ol}, {"se_ol", pt.se_ol},
                        {"wil", pt.wil}, {"se_wil", pt.se_wil}});
    last = pt;
  }
  rep.add({"table", true, json{{"n", opt.n}, {"rows", rows}}});
  rep.add({"wil_vanishes", last.wil < 0.01, json{{"wil", last.wil}, {"threshold", 0.01}}});
  rep.add({"il_bounded_away_from_zero", last.il > floor, json{{"il", last.il}, {"floor", floor}}});
  rep.add({"ol_vanishes", last.ol < 0.005, json{{"ol", last.ol}, {"threshold", 0.005}}});
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

// Multiset of leaf sizes produced by exact median splits on points in
// general position.
void tsp_sizes(std::size_t n, std::size_t l, std::vector<std::size_t>& out) {
  if (n < 2 || n / 2 < l) {
    out.push_back(n);
    return;
  }
  tsp_sizes(n - n / 2, l, out);
  tsp_sizes(n / 2, l, out);
}

LabeledDataset probe_points(Engine& eng, std::size_t n, double scale) {
  NormalSource normal;
  LabeledDataset d;
  d.dim = 2;
  for (std::size_t i = 0; i < n; ++i) {
    // Every fourth point is snapped to a coarse dyadic lattice so that cell
    // boundaries and axes are hit exactly.
    double a = scale * normal(eng), b = scale * normal(eng);
    if (i % 4 == 0) {
      a = std::round(a * 8.0) / 8.0;
      b = std::round(b * 8.0) / 8.0;
    }
    d.points.push_back(a);
    d.points.push_back(b);
    d.labels.push_back(0);
  }
  return d;
}

bool total_and_disjoint(const Partition& p, const LabeledDataset& probe, json& detail) {
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const auto x = probe.point(i);
    const std::size_t id = p.quantize(x);
    const std::size_t hits = p.membership_count(x);
    if (hits != 1 || !p.member(id, x)) {
      detail = json{{"partition", p.kind()}, {"point", std::vector<double>(x.begin(), x.end())},
                    {"quantized", id}, {"memberships", hits}};
      return false;
    }
  }
  return true;
}

}  // namespace

VerifyReport verify_partitions(const VerifyOptions& opt) {
  VerifyReport rep = start("partitions", opt.seed);
  Engine eng = make_engine(opt.seed, "verify/partitions");
  const GaussClassModel scale = GaussClassModel::build(ScaleInvariant{});

  {
    const LabeledDataset probe = probe_points(eng, 2000, 2.5);
    const LabeledDataset construct = scale.sample(2000, derive_seed(opt.seed, "verify/partitions/construct"));
    const std::vector<Partition> parts = {
        constant_partition(2),
        product_partition(1, 2),
        product_partition(2, 2),
        uniform_grid(2, 7, -3.0, 3.0),
        gessaman(construct, 20),
        tsp(construct, 20),
        asymmetric_dyadic(3, 4.0),
        projected_uniform({1.0, 1.0}, -3.0, 3.0, 9),
        projected_uniform({1.0, 0.0}, 0.0, 4.0, 6, true),
        quadrant_partition(),
        refine_with_rule(product_partition(1, 2),
                         [&](std::span<const double> x) { return scale.mpe_rule(x); }, 4),
    };
    json failures = json::array();
    for (const auto& p : parts) {
      json detail;
      if (!total_and_disjoint(p, probe, detail)) failures.push_back(detail);
    }
    rep.add({"total_and_disjoint", failures.empty(),
             json{{"partitions", parts.size()}, {"points", probe.size()}, {"failures", failures}}});
  }

  {
    Tally counts{"data_driven_cell_counts_ge_l"};
    Tally medians{"tsp_median_splits"};
    for (std::size_t t = 0; t < std::max<std::size_t>(opt.trials / 10, 1); ++t) {
      const std::size_t n = 200 + static_cast<std::size_t>(uniform01(eng) * 1800.0);
      const std::size_t l = 5 + static_cast<std::size_t>(uniform01(eng) * 45.0);
      const LabeledDataset data = scale.sample(n, derive_seed(opt.seed, "verify/partitions/round", t));
      for (const Partition& p : {gessaman(data, l), tsp(data, l)}) {
        const auto c = cell_counts(p, data);
        const std::size_t smallest = *std::min_element(c.begin(), c.end());
        counts.record(smallest >= l, 0.0, [&] {
          return json{{"scheme", p.kind()}, {"n", n}, {"l_n", l}, {"smallest", smallest}};
        });
        if (p.kind() == "tsp") {
          std::vector<std::size_t> expect;
          tsp_sizes(n, l, expect);
          auto got = c;
          std::sort(expect.begin(), expect.end());
          std::sort(got.begin(), got.end());
          medians.record(got == expect, 0.0, [&] { return json{{"n", n}, {"l_n", l}}; });
        }
      }
    }
    rep.add(counts.result());
    rep.add(medians.result());
  }

  {
    // All-identical points exercise the tie rules.
    LabeledDataset same;
    same.dim = 2;
    for (int i = 0; i < 50; ++i) {
      same.points.push_back(1.0);
      same.points.push_back(1.0);
      same.labels.push_back(0);
    }
    const Partition g = gessaman(same, 5);
    const Partition t = tsp(same, 5);
    const auto cg = cell_counts(g, same);
    const auto ct = cell_counts(t, same);
    json d1, d2;
    const LabeledDataset probe = probe_points(eng, 200, 1.5);
    const bool ok = g.provenance()["T"] == 3 && g.size() == 9 && cg[g.quantize(same.point(0))] == 50 &&
                    t.size() == 1 && ct[0] == 50 && total_and_disjoint(g, probe, d1) &&
                    total_and_disjoint(t, probe, d2);
    rep.add({"degenerate_identical_points", ok, json{{"gessaman_cells", g.size()}, {"tsp_cells", t.size()}}});
  }

  {
    // Cells are clipped to [-3, 3]^2 before measuring: tail cells are
    // unbounded at every n.
    const LabeledDataset probe = scale.sample(5000, derive_seed(opt.seed, "verify/partitions/probe"));
    const double clip = 3.0;
    auto trend = [&](const std::string& name, double exponent, double delta, bool strict) {
      json fractions = json::object();
      bool ok = true;
      for (const char* scheme : {"gessaman", "tsp"}) {
        std::vector<double> f;
        for (std::size_t n : {100, 1000, 10000}) {
          const auto l = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), exponent)));
          const LabeledDataset data = scale.sample(n, derive_seed(opt.seed, "verify/partitions/shrink", n));
          const Partition p = std::string(scheme) == "tsp" ? tsp(data, l) : gessaman(data, l);
          f.push_back(shrink_diagnostic(p, probe, delta, clip));
        }
        ok = ok && f[1] <= f[0] && f[2] <= f[1] && (!strict || f[2] < f[0]);
        fractions[scheme] = f;
      }
      rep.add({name, ok,
               json{{"delta", delta}, {"clip", clip}, {"l_n_exponent", exponent}, {"fractions", fractions}}});
    };
    trend("shrinking_cells_trend", 0.7, 3.0, false);
    trend("shrinking_cells_sqrt_l", 0.5, 2.0, true);
  }
  return rep;
}

VerifyReport run_suite(const std::string& suite, const VerifyOptions& opt) {
  if (suite == "theorem2") return verify_theorem2(opt);
  if (suite == "bounds") return verify_bounds(opt);
  if (suite == "example4d") return verify_example4d(opt);
  if (suite == "partitions") return verify_partitions(opt);
  throw std::invalid_argument("unknown verify suite '" + suite + "'");
}

}  // namespace infoloss
