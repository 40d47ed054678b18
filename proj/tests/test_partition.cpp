#include <doctest.h>

#include <algorithm>
#include <array>
#include <map>
#include <random>

#include "infoloss/models.hpp"
#include "infoloss/partition.hpp"
#include "oracles.hpp"

using namespace infoloss;

namespace {

LabeledDataset points_1d(std::vector<double> xs) {
  LabeledDataset d;
  d.dim = 1;
  d.points = std::move(xs);
  d.labels.assign(d.points.size(), 0);
  return d;
}

// Brute-force membership over every cell must agree with the lookup.
void check_cover(const Partition& p, const LabeledDataset& probe) {
  const std::size_t k = p.size();
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const auto x = probe.point(i);
    const std::size_t id = p.quantize(x);
    REQUIRE(id < k);
    std::size_t hits = 0, hit = k;
    for (std::size_t c = 0; c < k; ++c) {
      if (p.member(c, x)) {
        ++hits;
        hit = c;
      }
    }
    CHECK(hits == 1);
    CHECK(hit == id);
  }
}

LabeledDataset random_probe(std::size_t n, std::uint64_t seed, double scale) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> nd(0.0, scale);
  std::uniform_int_distribution<int> lattice(-24, 24);
  LabeledDataset d;
  d.dim = 2;
  for (std::size_t i = 0; i < n; ++i) {
    // A quarter of the points sit on a 1/8 lattice to hit boundaries.
    const bool snap = i % 4 == 0;
    d.points.push_back(snap ? lattice(g) / 8.0 : nd(g));
    d.points.push_back(snap ? lattice(g) / 8.0 : nd(g));
    d.labels.push_back(0);
  }
  return d;
}

}  // namespace

TEST_CASE("product partition counts and floor arithmetic") {
  const Partition p = product_partition(1, 2);
  CHECK(p.size() == 17);
  CHECK(product_partition(2, 1).size() == 2 * 2 * 4 + 1);
  CHECK(p.quantize(std::array<double, 2>{5.0, 5.0}) == 0);
  CHECK(p.quantize(std::array<double, 2>{1.0, 0.0}) == 0);  // [-1, 1) is half-open
  CHECK(p.quantize(std::array<double, 2>{-1.0, -1.0}) != 0);
  // (0.3, -0.7): j = (0, -2); the box is [0, .5) x [-1, -.5).
  const Cell c = p.cell(p.quantize(std::array<double, 2>{0.3, -0.7}));
  const Box& b = std::get<Box>(c.geometry);
  CHECK(b.dims[0].lo == 0.0);
  CHECK(b.dims[0].hi == 0.5);
  CHECK(b.dims[1].lo == -1.0);
  CHECK(b.dims[1].hi == -0.5);
  CHECK(diameter(c, 2) == doctest::Approx(std::sqrt(2.0) * 0.5));
  CHECK(std::isinf(diameter(p.cell(0), 2)));
}

TEST_CASE("product boxes tile [-m, m)^d") {
  for (unsigned m : {1u, 2u}) {
    const Partition p = product_partition(m, 2);
    double area = 0.0;
    for (std::size_t c = 1; c < p.size(); ++c) {
      const Cell cell = p.cell(c);
      const Box& b = std::get<Box>(cell.geometry);
      for (const Interval& iv : b.dims) {
        CHECK(iv.lo >= -static_cast<double>(m));
        CHECK(iv.hi <= static_cast<double>(m));
      }
      area += (b.dims[0].hi - b.dims[0].lo) * (b.dims[1].hi - b.dims[1].lo);
    }
    CHECK(area == doctest::Approx(4.0 * m * m));
  }
  CHECK_THROWS(product_partition(12, 3));
}

TEST_CASE("every scheme is a disjoint cover") {
  const LabeledDataset probe = random_probe(3000, 1, 2.5);
  const GaussClassModel model = GaussClassModel::build(ScaleInvariant{});
  const LabeledDataset construct = model.sample(3000, 2);
  check_cover(constant_partition(2), probe);
  check_cover(product_partition(1, 2), probe);
  check_cover(uniform_grid(2, 5, -2.0, 2.0), probe);
  check_cover(gessaman(construct, 30), probe);
  check_cover(tsp(construct, 30), probe);
  check_cover(asymmetric_dyadic(4, 4.0), probe);
  check_cover(quadrant_partition(), probe);
  check_cover(projected_uniform({0.6, 0.8}, -3.0, 3.0, 7), probe);
  check_cover(projected_uniform({1.0, 1.0}, 0.0, 3.0, 5, true), probe);
  check_cover(refine_with_rule(gessaman(construct, 100), [&](std::span<const double> x) { return model.mpe_rule(x); },
                               4),
              probe);
}

TEST_CASE("gessaman small cases") {
  SUBCASE("d = 1, split at the fifth order statistic") {
    const LabeledDataset d = points_1d({9, 3, 7, 1, 5, 2, 8, 4, 10, 6});
    const Partition p = gessaman(d, 5);
    CHECK(p.size() == 2);
    CHECK(p.quantize(std::array<double, 1>{5.0}) == p.quantize(std::array<double, 1>{-100.0}));
    CHECK(p.quantize(std::array<double, 1>{5.0 + 1e-12}) != p.quantize(std::array<double, 1>{5.0}));
    const auto counts = cell_counts(p, d);
    CHECK(counts[0] == 5);
    CHECK(counts[1] == 5);
  }
  SUBCASE("16 points, l = 4, d = 2") {
    LabeledDataset d;
    d.dim = 2;
    for (int i = 0; i < 16; ++i) {
      d.points.push_back((i * 7) % 16);
      d.points.push_back((i * 11) % 16);
      d.labels.push_back(0);
    }
    const Partition p = gessaman(d, 4);
    CHECK(p.size() == 4);
    for (std::size_t c : cell_counts(p, d)) CHECK(c >= 4);
  }
  SUBCASE("identical points") {
    LabeledDataset d;
    d.dim = 2;
    for (int i = 0; i < 40; ++i) {
      d.points.insert(d.points.end(), {1.0, 1.0});
      d.labels.push_back(0);
    }
    const Partition p = gessaman(d, 10);
    CHECK(p.size() == 4);
    const auto counts = cell_counts(p, d);
    CHECK(*std::max_element(counts.begin(), counts.end()) == 40);
  }
  CHECK_THROWS(gessaman(points_1d({1, 2, 3}), 4));
}

TEST_CASE("tsp small cases") {
  const LabeledDataset d = points_1d({8, 1, 6, 3, 5, 2, 7, 4});
  const Partition p = tsp(d, 2);
  CHECK(p.size() == 4);
  for (std::size_t c : cell_counts(p, d)) CHECK(c == 2);
  CHECK(tsp(d, 9).size() == 1);
  CHECK(tsp_leaf_count(8, 2) == 4);
  CHECK(tsp_leaf_count(8, 9) == 1);
}

TEST_CASE("data-driven cell counts reach l_n and tsp splits at medians") {
  const GaussClassModel model = GaussClassModel::build(ScaleInvariant{});
  const LabeledDataset d = model.sample(10000, 8);
  const auto l = static_cast<std::size_t>(std::pow(10000.0, 0.6));
  for (const Partition& p : {gessaman(d, l), tsp(d, l)}) {
    const auto counts = cell_counts(p, d);
    CHECK(*std::min_element(counts.begin(), counts.end()) >= l);
    std::size_t total = 0;
    for (auto c : counts) total += c;
    CHECK(total == d.size());
  }
  CHECK(tsp(d, l).size() == tsp_leaf_count(d.size(), l));
}

TEST_CASE("asymmetric scheme geometry") {
  for (unsigned depth = 0; depth < 12; ++depth) {
    CHECK(asymmetric_dyadic(depth, 4.0).size() == asymmetric_cell_count(depth));
    if (depth) CHECK(asymmetric_cell_count(depth) > asymmetric_cell_count(depth - 1));
  }
  for (unsigned depth : {1u, 4u, 9u}) {
    const Partition p = asymmetric_dyadic(depth, 4.0);
    const Cell c = p.cell(p.quantize(std::array<double, 2>{0.01, 0.01}));
    CHECK(diameter(c, 2) <= std::sqrt(2.0) * 4.0 * std::ldexp(1.0, -static_cast<int>(depth) + 1) + 1e-12);
    // No cell straddles an axis: all cells are inside one quadrant cell.
    const Partition q = quadrant_partition();
    for (std::size_t id = 0; id < p.size(); ++id) {
      const Cell cell = p.cell(id);
      const Box& b = std::get<Box>(cell.geometry);
      CHECK((b.dims[0].lo >= 0.0 || b.dims[0].hi <= 0.0));
      CHECK((b.dims[1].lo >= 0.0 || b.dims[1].hi <= 0.0));
    }
    const LabeledDataset probe = random_probe(500, depth, 3.0);
    std::map<std::size_t, std::size_t> quadrant_of_cell;
    for (std::size_t i = 0; i < probe.size(); ++i) {
      const auto x = probe.point(i);
      const auto [it, fresh] = quadrant_of_cell.emplace(p.quantize(x), q.quantize(x));
      CHECK(it->second == q.quantize(x));
    }
  }
  CHECK_THROWS(asymmetric_dyadic(2, 0.0));
}

TEST_CASE("quadrant partition closures") {
  const Partition q = quadrant_partition();
  CHECK(q.quantize(std::array<double, 2>{0.0, 0.0}) == 0);
  CHECK(q.quantize(std::array<double, 2>{-1.0, 0.0}) == 1);
  CHECK(q.quantize(std::array<double, 2>{0.0, -1.0}) == 2);
  CHECK(q.quantize(std::array<double, 2>{1.0, -1.0}) == 3);
  // Quadrant ids coincide with the scale model's MPE labels.
  const GaussClassModel m = GaussClassModel::build(ScaleInvariant{});
  const LabeledDataset probe = random_probe(2000, 9, 2.0);
  for (std::size_t i = 0; i < probe.size(); ++i) CHECK(q.quantize(probe.point(i)) == m.mpe_rule(probe.point(i)));
}

TEST_CASE("projected uniform slabs") {
  const Partition p = projected_uniform({1.0, 0.0}, -3.0, 3.0, 5);
  CHECK(p.size() == 5);
  const double at[] = {-3.5, -2.0, 0.0, 2.0, 3.5};
  for (std::size_t i = 0; i < 5; ++i) CHECK(p.quantize(std::array<double, 2>{at[i], 0.0}) == i);
  CHECK(p.quantize(std::array<double, 2>{-3.0, 0.0}) == 1);  // boundaries are left-closed
  CHECK(p.quantize(std::array<double, 2>{1.0, 0.0}) == 3);
  CHECK(p.quantize(std::array<double, 2>{0.5, 100.0}) == p.quantize(std::array<double, 2>{0.5, -7.0}));
  CHECK_THROWS(projected_uniform({0.0, 0.0}, -1.0, 1.0, 4));
  CHECK_THROWS(projected_uniform({1.0, 0.0}, -1.0, 1.0, 1));

  const Partition r = projected_uniform({1.0, 1.0}, 0.0, 3.0, 6, true);
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * oracle::kPi), rad(0.0, 4.0);
  for (int t = 0; t < 100; ++t) {
    const double rr = rad(g), a = ang(g), b = ang(g);
    CHECK(r.quantize(std::array<double, 2>{rr * std::cos(a), rr * std::sin(a)}) ==
          r.quantize(std::array<double, 2>{rr * std::cos(b), rr * std::sin(b)}));
  }
}

TEST_CASE("refinement by a labelling rule") {
  const Partition base = uniform_grid(2, 3, -2.0, 2.0);
  const GaussClassModel m = GaussClassModel::build(ScaleInvariant{});
  const Partition r = refine_with_rule(base, [&](std::span<const double> x) { return m.mpe_rule(x); }, 4);
  CHECK(r.size() == base.size() * 4);
  const LabeledDataset probe = random_probe(1000, 3, 2.0);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const auto x = probe.point(i);
    const std::size_t id = r.quantize(x);
    CHECK(id / 4 == base.quantize(x));
    CHECK(id % 4 == m.mpe_rule(x));
  }
  // A constant rule leaves the cell structure alone.
  const Partition c = refine_with_rule(base, [](std::span<const double>) { return std::size_t{0}; }, 1);
  for (std::size_t i = 0; i < probe.size(); ++i) CHECK(c.quantize(probe.point(i)) == base.quantize(probe.point(i)));
}

TEST_CASE("shrink diagnostic") {
  const LabeledDataset probe = random_probe(200, 5, 1.0);
  CHECK(shrink_diagnostic(constant_partition(2), probe, 100.0) == 1.0);
  CHECK(shrink_diagnostic(constant_partition(2), probe, 100.0, 2.0) == 0.0);
  const Partition p = product_partition(3, 2);
  const double side = 1.0 / 8.0;
  const double inside = shrink_diagnostic(p, probe, std::sqrt(2.0) * side * 1.01);
  const double outside_frac = shrink_diagnostic(p, probe, 1e6);
  CHECK(inside == doctest::Approx(outside_frac));  // only the outer cell is wider
  CHECK_THROWS(shrink_diagnostic(p, probe, 0.0));
}

TEST_CASE("describe serializes geometry") {
  const auto j = product_partition(1, 1).describe();
  CHECK(j["kind"] == "product");
  CHECK(j["size"] == 5);
  CHECK(j["cells"].size() == 5);
  CHECK(j["cells"][0]["type"] == "outer");
  const auto big = product_partition(4, 2).describe(16);
  CHECK_FALSE(big.contains("cells"));
}
