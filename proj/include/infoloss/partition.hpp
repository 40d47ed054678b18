// Finite partitions of R^d with point-to-cell lookup.
//
// A Partition is an immutable value: a kind tag, provenance, and a shared
// lookup strategy that knows how many cells exist, how to locate a point,
// and how to describe any cell's geometry. Cell ids are 0..size()-1.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "infoloss/dataset.hpp"

namespace infoloss {

struct Interval {
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;

  bool contains(double t) const {
    return (lo_closed ? t >= lo : t > lo) && (hi_closed ? t <= hi : t < hi);
  }
  bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

  static Interval real_line();
  /// [lo, hi)
  static Interval half_open(double lo, double hi);
};

struct Box {
  std::vector<Interval> dims;
};

/// {x : t(x) in range}, where t is direction.x or ||x|| when radial.
struct Slab {
  std::vector<double> direction;
  bool radial = false;
  Interval range;
};

/// Complement of a box.
struct Outer {
  Box inner;
};

struct CellGeometryHolder;

/// Points of base cell `base` that a labelling rule sends to `label`.
struct RuleSlice {
  std::size_t base;
  std::size_t label;
  std::shared_ptr<const CellGeometryHolder> parent;
};

using Geometry = std::variant<Box, Slab, Outer, RuleSlice>;

struct CellGeometryHolder {
  Geometry geometry;
};

struct Cell {
  std::size_t id;
  Geometry geometry;
};

/// Euclidean diameter; +inf for unbounded cells. A rule slice reports the
/// diameter of its base cell.
double diameter(const Cell& cell, std::size_t dim);

/// Diameter of the cell intersected with [-radius, radius]^d. Exact for
/// boxes; other geometries are capped at the cube diagonal.
double diameter_within(const Cell& cell, std::size_t dim, double radius);

nlohmann::json describe(const Cell& cell);

class Lookup {
 public:
  virtual ~Lookup() = default;
  virtual std::size_t size() const = 0;
  virtual std::size_t locate(std::span<const double> x) const = 0;
  virtual Cell cell(std::size_t id) const = 0;
  /// Membership decided from the cell geometry alone.
  virtual bool member(std::size_t id, std::span<const double> x) const;
};

/// Geometric membership for boxes, slabs and outer cells.
bool geometric_member(const Geometry& g, std::span<const double> x);

class Partition {
 public:
  Partition(std::string kind, std::size_t dim, std::shared_ptr<const Lookup> lookup,
            nlohmann::json provenance);

  const std::string& kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return lookup_->size(); }
  const nlohmann::json& provenance() const { return provenance_; }
  const Lookup& lookup() const { return *lookup_; }
  std::shared_ptr<const Lookup> shared_lookup() const { return lookup_; }

  std::size_t quantize(std::span<const double> x) const;
  std::vector<std::size_t> quantize_all(const LabeledDataset& data) const;

  Cell cell(std::size_t id) const { return lookup_->cell(id); }
  std::vector<Cell> cells() const;
  bool member(std::size_t id, std::span<const double> x) const { return lookup_->member(id, x); }
  /// Number of cells whose geometry contains x (1 for a valid partition).
  std::size_t membership_count(std::span<const double> x) const;

  /// kind, provenance and, when the partition has at most `max_cells`
  /// cells, every cell geometry.
  nlohmann::json describe(std::size_t max_cells = 4096) const;

 private:
  std::string kind_;
  std::size_t dim_;
  std::shared_ptr<const Lookup> lookup_;
  nlohmann::json provenance_;
};

/// Hard cap on the number of cells a grid partition may have.
inline constexpr std::size_t kMaxGridCells = std::size_t{1} << 24;

/// Dyadic boxes of side 2^-m covering [-m, m)^d plus one outer cell (id 0).
Partition product_partition(unsigned m, std::size_t dim);

/// q^d equal boxes covering [lo, hi)^d plus one outer cell (id 0).
Partition uniform_grid(std::size_t dim, std::size_t q, double lo, double hi);

/// Single cell covering R^d.
Partition constant_partition(std::size_t dim);

/// Statistically equivalent blocks: T = floor((n/l)^(1/d)) intervals per
/// axis, coordinates split in order 1..d, intervals closed on the right.
Partition gessaman(const LabeledDataset& data, std::size_t l_n);

/// Balanced binary tree of median splits cycling through the coordinates.
/// A split is kept only if both children hold at least l_n points.
Partition tsp(const LabeledDataset& data, std::size_t l_n);

/// Leaf count of tsp() on n points in general position.
std::size_t tsp_leaf_count(std::size_t n, std::size_t l_n);

/// Per-quadrant dyadic refinement of [0, radius)^2 in |x| coordinates that
/// only ever splits the square touching the origin, plus two outer cells per
/// quadrant. depth 0 leaves [0, radius)^2 unsplit; every level adds three
/// cells per quadrant.
inline constexpr unsigned kMaxAsymmetricDepth = 256;
Partition asymmetric_dyadic(unsigned depth, double radius);
std::size_t asymmetric_cell_count(unsigned depth);

/// Slabs along `direction` with the given sorted boundaries; slab i is
/// [b_{i-1}, b_i) with b_{-1} = -inf and b_k = +inf.
Partition slab_partition(std::vector<double> direction, bool radial, std::vector<double> boundaries);

/// k slabs: two unbounded end slabs and k-2 equal slabs over [lo, hi].
Partition projected_uniform(std::vector<double> direction, double lo, double hi, std::size_t k,
                            bool radial = false);

/// The four quadrant cells A1 = [0,inf)^2, A2 = (-inf,0) x [0,inf),
/// A3 = (-inf,0] x (-inf,0), A4 = (0,inf) x (-inf,0), ids 0..3.
Partition quadrant_partition();

using LabelRule = std::function<std::size_t(std::span<const double>)>;

/// Joint cells {cell} x {label}: id = base_id * labels + rule(x). Every
/// (cell, label) pair gets an id whether or not it is empty.
Partition refine_with_rule(const Partition& p, LabelRule rule, std::size_t labels);

/// Fraction of probe points whose cell has diameter > delta, with cells
/// first clipped to [-clip, clip]^d (no clipping by default).
double shrink_diagnostic(const Partition& p, const LabeledDataset& probe, double delta,
                         double clip = INFINITY);

/// Construction-sample count of every cell.
std::vector<std::size_t> cell_counts(const Partition& p, const LabeledDataset& data);

}  // namespace infoloss
