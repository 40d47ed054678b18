#include "infoloss/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace infoloss {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json bound_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

json interval_json(const Interval& iv) {
  return json{{"lo", bound_json(iv.lo)},
              {"hi", bound_json(iv.hi)},
              {"lo_closed", iv.lo_closed},
              {"hi_closed", iv.hi_closed}};
}

json box_json(const Box& b) {
  json dims = json::array();
  for (const auto& iv : b.dims) dims.push_back(interval_json(iv));
  return dims;
}

double box_diameter(const Box& b) {
  double s = 0.0;
  for (const auto& iv : b.dims) {
    if (!iv.bounded()) return kInf;
    s += (iv.hi - iv.lo) * (iv.hi - iv.lo);
  }
  return std::sqrt(s);
}

double geometry_diameter(const Geometry& g, std::size_t dim) {
  if (const auto* b = std::get_if<Box>(&g)) return box_diameter(*b);
  if (const auto* s = std::get_if<Slab>(&g)) {
    if (s->radial) return std::isfinite(s->range.hi) ? 2.0 * s->range.hi : kInf;
    return (dim == 1 && s->range.bounded()) ? s->range.hi - s->range.lo : kInf;
  }
  if (std::holds_alternative<Outer>(g)) return kInf;
  const auto& r = std::get<RuleSlice>(g);
  return geometry_diameter(r.parent->geometry, dim);
}

json geometry_json(const Geometry& g) {
  if (const auto* b = std::get_if<Box>(&g)) return json{{"type", "box"}, {"intervals", box_json(*b)}};
  if (const auto* s = std::get_if<Slab>(&g)) {
    json j{{"type", "slab"}, {"radial", s->radial}, {"range", interval_json(s->range)}};
    if (!s->radial) j["direction"] = s->direction;
    return j;
  }
  if (const auto* o = std::get_if<Outer>(&g)) {
    return json{{"type", "outer"}, {"excluded_box", box_json(o->inner)}};
  }
  const auto& r = std::get<RuleSlice>(g);
  return json{{"type", "rule_slice"}, {"base", r.base}, {"label", r.label},
              {"base_geometry", geometry_json(r.parent->geometry)}};
}

double project(const Slab& s, std::span<const double> x) {
  double t = 0.0;
  if (s.radial) {
    for (double v : x) t += v * v;
    return std::sqrt(t);
  }
  for (std::size_t i = 0; i < x.size(); ++i) t += s.direction[i] * x[i];
  return t;
}

void check_dim(std::span<const double> x, std::size_t dim) {
  if (x.size() != dim) throw std::invalid_argument("quantize: point dimension mismatch");
}

// ---------------------------------------------------------------------------
// Uniform grid over [lo, hi)^d; id 0 is the outer cell, box ids are
// 1 + sum_k j_k q^k with coordinate 1 least significant.

class GridLookup final : public Lookup {
 public:
  GridLookup(std::size_t dim, std::size_t q, double lo, double hi)
      : dim_(dim), q_(q), lo_(lo), hi_(hi), h_((hi - lo) / static_cast<double>(q)) {
    bounds_.resize(q + 1);
    for (std::size_t j = 0; j <= q; ++j) bounds_[j] = lo + static_cast<double>(j) * h_;
    bounds_[q] = hi;
    boxes_ = 1;
    for (std::size_t k = 0; k < dim; ++k) boxes_ *= q;
  }

  std::size_t size() const override { return boxes_ + 1; }

  std::size_t locate(std::span<const double> x) const override {
    std::size_t id = 0;
    std::size_t stride = 1;
    for (std::size_t k = 0; k < dim_; ++k) {
      const double t = x[k];
      if (!(t >= lo_ && t < hi_)) return 0;
      const double raw = std::floor((t - lo_) / h_);
      std::size_t j = raw <= 0.0 ? 0 : std::min(static_cast<std::size_t>(raw), q_ - 1);
      // Floor arithmetic can be off by one next to a boundary; the stored
      // boundaries are authoritative.
      while (j > 0 && t < bounds_[j]) --j;
      while (j + 1 < q_ && t >= bounds_[j + 1]) ++j;
      id += j * stride;
      stride *= q_;
    }
    return id + 1;
  }

  Cell cell(std::size_t id) const override {
    if (id >= size()) throw std::out_of_range("grid cell id out of range");
    if (id == 0) {
      Box inner{std::vector<Interval>(dim_, Interval::half_open(lo_, hi_))};
      return Cell{0, Outer{std::move(inner)}};
    }
    std::size_t rest = id - 1;
    Box b;
    for (std::size_t k = 0; k < dim_; ++k) {
      const std::size_t j = rest % q_;
      rest /= q_;
      b.dims.push_back(Interval::half_open(bounds_[j], bounds_[j + 1]));
    }
    return Cell{id, std::move(b)};
  }

 private:
  std::size_t dim_, q_;
  double lo_, hi_, h_;
  std::vector<double> bounds_;
  std::size_t boxes_;
};

class ConstantLookup final : public Lookup {
 public:
  explicit ConstantLookup(std::size_t dim) : dim_(dim) {}
  std::size_t size() const override { return 1; }
  std::size_t locate(std::span<const double>) const override { return 0; }
  Cell cell(std::size_t id) const override {
    if (id != 0) throw std::out_of_range("constant cell id out of range");
    return Cell{0, Box{std::vector<Interval>(dim_, Interval::real_line())}};
  }

 private:
  std::size_t dim_;
};

// ---------------------------------------------------------------------------
// k-ary axis-aligned tree. Child i of a node covers (t_{i-1}, t_i] on the
// node's coordinate, so values equal to a threshold go left.

struct TreeNode {
  std::size_t coord = 0;
  std::vector<double> thresholds;
  std::vector<std::size_t> children;
  std::size_t leaf = std::numeric_limits<std::size_t>::max();
};

class TreeLookup final : public Lookup {
 public:
  TreeLookup(std::vector<TreeNode> nodes, std::vector<Box> leaves)
      : nodes_(std::move(nodes)), leaves_(std::move(leaves)) {}

  std::size_t size() const override { return leaves_.size(); }

  std::size_t locate(std::span<const double> x) const override {
    std::size_t n = 0;
    while (nodes_[n].leaf == std::numeric_limits<std::size_t>::max()) {
      const auto& node = nodes_[n];
      const auto it = std::lower_bound(node.thresholds.begin(), node.thresholds.end(), x[node.coord]);
      n = node.children[static_cast<std::size_t>(it - node.thresholds.begin())];
    }
    return nodes_[n].leaf;
  }

  Cell cell(std::size_t id) const override {
    if (id >= leaves_.size()) throw std::out_of_range("tree cell id out of range");
    return Cell{id, leaves_[id]};
  }

 private:
  std::vector<TreeNode> nodes_;
  std::vector<Box> leaves_;
};

class TreeBuilder {
 public:
  explicit TreeBuilder(std::size_t dim) : dim_(dim) {}

  std::size_t add_leaf(const Box& box) {
    TreeNode n;
    n.leaf = leaves_.size();
    leaves_.push_back(box);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  std::size_t add_split(std::size_t coord, std::vector<double> thresholds) {
    TreeNode n;
    n.coord = coord;
    n.thresholds = std::move(thresholds);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  void set_children(std::size_t node, std::vector<std::size_t> children) {
    nodes_[node].children = std::move(children);
  }

  // Sub-box for child i of a split at `coord` with the given thresholds.
  static Box child_box(const Box& box, std::size_t coord, const std::vector<double>& t, std::size_t i) {
    Box out = box;
    Interval& iv = out.dims[coord];
    if (i > 0 && t[i - 1] >= iv.lo) {
      iv.lo = t[i - 1];
      iv.lo_closed = false;
    }
    if (i < t.size() && t[i] <= iv.hi) {
      iv.hi = t[i];
      iv.hi_closed = true;
    }
    return out;
  }

  std::shared_ptr<const Lookup> finish() {
    return std::make_shared<TreeLookup>(std::move(nodes_), std::move(leaves_));
  }

  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_;
  std::vector<TreeNode> nodes_;
  std::vector<Box> leaves_;
};

std::vector<std::size_t> route(const LabeledDataset& data, const std::vector<std::size_t>& idx,
                               std::size_t coord, const std::vector<double>& t) {
  std::vector<std::size_t> child(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double v = data.points[idx[i] * data.dim + coord];
    child[i] = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), v) - t.begin());
  }
  return child;
}

std::size_t gessaman_node(TreeBuilder& tb, const LabeledDataset& data, const std::vector<std::size_t>& idx,
                          std::size_t coord, std::size_t T, const Box& box) {
  if (coord == data.dim) return tb.add_leaf(box);
  const std::size_t n = idx.size();
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = data.points[idx[i] * data.dim + coord];
  std::sort(vals.begin(), vals.end());
  const std::size_t s = n / T;
  std::vector<double> t(T - 1, kInf);
  if (n > 0) {
    for (std::size_t j = 1; j < T; ++j) {
      const std::size_t rank = std::clamp<std::size_t>(j * s, 1, n);  // one-based order statistic
      t[j - 1] = vals[rank - 1];
    }
  }
  const std::size_t node = tb.add_split(coord, t);
  const auto child = route(data, idx, coord, t);
  std::vector<std::vector<std::size_t>> parts(T);
  for (std::size_t i = 0; i < n; ++i) parts[child[i]].push_back(idx[i]);
  std::vector<std::size_t> kids(T);
  for (std::size_t c = 0; c < T; ++c) {
    kids[c] = gessaman_node(tb, data, parts[c], coord + 1, T, TreeBuilder::child_box(box, coord, t, c));
  }
  tb.set_children(node, std::move(kids));
  return node;
}

std::size_t tsp_node(TreeBuilder& tb, const LabeledDataset& data, const std::vector<std::size_t>& idx,
                     std::size_t depth, std::size_t l_n, const Box& box) {
  const std::size_t n = idx.size();
  if (n >= 2 && n / 2 >= l_n) {
    const std::size_t coord = depth % data.dim;
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = data.points[idx[i] * data.dim + coord];
    const std::size_t rank = (n + 1) / 2;  // ceil(n/2), one-based
    std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(rank - 1), vals.end());
    const double median = vals[rank - 1];
    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
      (data.points[i * data.dim + coord] <= median ? left : right).push_back(i);
    }
    if (left.size() >= l_n && right.size() >= l_n) {
      const std::vector<double> t{median};
      const std::size_t node = tb.add_split(coord, t);
      const std::size_t a = tsp_node(tb, data, left, depth + 1, l_n, TreeBuilder::child_box(box, coord, t, 0));
      const std::size_t b = tsp_node(tb, data, right, depth + 1, l_n, TreeBuilder::child_box(box, coord, t, 1));
      tb.set_children(node, {a, b});
      return node;
    }
  }
  return tb.add_leaf(box);
}

// ---------------------------------------------------------------------------
// Asymmetric scheme. Quadrants follow the closures of quadrant_partition().
// Only the square at the origin is ever split.

std::size_t quadrant_of(double x1, double x2) {
  if (x2 >= 0.0) return x1 >= 0.0 ? 0 : 1;
  return x1 <= 0.0 ? 2 : 3;
}

struct QuadrantSigns {
  bool neg1, neg2;        // coordinate sign inside the quadrant
  bool closed1, closed2;  // whether the quadrant contains the axis value 0
};

constexpr QuadrantSigns kQuadrants[4] = {
    {false, false, true, true},
    {true, false, false, true},
    {true, true, true, false},
    {false, true, false, false},
};

// Map an |x|-interval [a, b) back to signed coordinates.
Interval signed_interval(double a, double b, bool negative, bool zero_closed) {
  const bool lower_closed = a > 0.0 || zero_closed;
  if (!negative) return Interval{a, b, lower_closed, false};
  return Interval{-b, -a, false, lower_closed};
}

struct QuadNode {
  double u0, u1, v0, v1, um, vm;
  std::size_t child[4];
  std::size_t leaf;
};

class AsymmetricLookup final : public Lookup {
 public:
  AsymmetricLookup(unsigned depth, double radius) : radius_(radius) {
    build(0.0, radius, 0.0, radius, 0, depth);
    per_quadrant_ = 2 + leaves_;
  }

  std::size_t size() const override { return 4 * per_quadrant_; }

  std::size_t locate(std::span<const double> x) const override {
    const std::size_t q = quadrant_of(x[0], x[1]);
    const double u = std::abs(x[0]), v = std::abs(x[1]);
    std::size_t local;
    if (u >= radius_) {
      local = 0;
    } else if (v >= radius_) {
      local = 1;
    } else {
      std::size_t n = 0;
      while (nodes_[n].leaf == kNone) {
        const auto& nd = nodes_[n];
        n = nd.child[(u >= nd.um ? 1 : 0) + (v >= nd.vm ? 2 : 0)];
      }
      local = 2 + nodes_[n].leaf;
    }
    return q * per_quadrant_ + local;
  }

  Cell cell(std::size_t id) const override {
    if (id >= size()) throw std::out_of_range("asymmetric cell id out of range");
    const std::size_t q = id / per_quadrant_;
    const std::size_t local = id % per_quadrant_;
    double u0, u1, v0, v1;
    if (local == 0) {
      u0 = radius_, u1 = kInf, v0 = 0.0, v1 = kInf;
    } else if (local == 1) {
      u0 = 0.0, u1 = radius_, v0 = radius_, v1 = kInf;
    } else {
      const auto& nd = nodes_[leaf_node_[local - 2]];
      u0 = nd.u0, u1 = nd.u1, v0 = nd.v0, v1 = nd.v1;
    }
    const auto& s = kQuadrants[q];
    Box b{{signed_interval(u0, u1, s.neg1, s.closed1), signed_interval(v0, v1, s.neg2, s.closed2)}};
    return Cell{id, std::move(b)};
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::size_t build(double u0, double u1, double v0, double v1, unsigned level, unsigned depth) {
    const std::size_t me = nodes_.size();
    nodes_.push_back(QuadNode{u0, u1, v0, v1, 0.0, 0.0, {0, 0, 0, 0}, kNone});
    if (level < depth && u0 == 0.0 && v0 == 0.0) {
      const double um = u0 + 0.5 * (u1 - u0);
      const double vm = v0 + 0.5 * (v1 - v0);
      nodes_[me].um = um;
      nodes_[me].vm = vm;
      const std::size_t c0 = build(u0, um, v0, vm, level + 1, depth);
      const std::size_t c1 = build(um, u1, v0, vm, level + 1, depth);
      const std::size_t c2 = build(u0, um, vm, v1, level + 1, depth);
      const std::size_t c3 = build(um, u1, vm, v1, level + 1, depth);
      nodes_[me].child[0] = c0;
      nodes_[me].child[1] = c1;
      nodes_[me].child[2] = c2;
      nodes_[me].child[3] = c3;
    } else {
      nodes_[me].leaf = leaves_++;
      leaf_node_.push_back(me);
    }
    return me;
  }

  double radius_;
  std::vector<QuadNode> nodes_;
  std::vector<std::size_t> leaf_node_;
  std::size_t leaves_ = 0;
  std::size_t per_quadrant_ = 0;
};


// ---------------------------------------------------------------------------

class SlabLookup final : public Lookup {
 public:
  SlabLookup(std::vector<double> direction, bool radial, std::vector<double> bounds)
      : direction_(std::move(direction)), radial_(radial), bounds_(std::move(bounds)) {}

  std::size_t size() const override { return bounds_.size() + 1; }

  std::size_t locate(std::span<const double> x) const override {
    const double t = project(Slab{direction_, radial_, Interval::real_line()}, x);
    return static_cast<std::size_t>(std::upper_bound(bounds_.begin(), bounds_.end(), t) - bounds_.begin());
  }

  Cell cell(std::size_t id) const override {
    if (id >= size()) throw std::out_of_range("slab cell id out of range");
    const double lo = id == 0 ? -kInf : bounds_[id - 1];
    const double hi = id == bounds_.size() ? kInf : bounds_[id];
    return Cell{id, Slab{direction_, radial_, Interval::half_open(lo, hi)}};
  }

 private:
  std::vector<double> direction_;
  bool radial_;
  std::vector<double> bounds_;
};

class QuadrantLookup final : public Lookup {
 public:
  std::size_t size() const override { return 4; }
  std::size_t locate(std::span<const double> x) const override { return quadrant_of(x[0], x[1]); }
  Cell cell(std::size_t id) const override {
    if (id >= 4) throw std::out_of_range("quadrant cell id out of range");
    const auto& s = kQuadrants[id];
    return Cell{id, Box{{signed_interval(0.0, kInf, s.neg1, s.closed1),
                         signed_interval(0.0, kInf, s.neg2, s.closed2)}}};
  }
};

class RefinedLookup final : public Lookup {
 public:
  RefinedLookup(std::shared_ptr<const Lookup> base, LabelRule rule, std::size_t labels)
      : base_(std::move(base)), rule_(std::move(rule)), labels_(labels) {}

  std::size_t size() const override { return base_->size() * labels_; }

  std::size_t locate(std::span<const double> x) const override {
    return base_->locate(x) * labels_ + label(x);
  }

  Cell cell(std::size_t id) const override {
    if (id >= size()) throw std::out_of_range("refined cell id out of range");
    const std::size_t b = id / labels_;
    auto holder = std::make_shared<const CellGeometryHolder>(CellGeometryHolder{base_->cell(b).geometry});
    return Cell{id, RuleSlice{b, id % labels_, std::move(holder)}};
  }

  bool member(std::size_t id, std::span<const double> x) const override {
    return base_->member(id / labels_, x) && label(x) == id % labels_;
  }

 private:
  std::size_t label(std::span<const double> x) const {
    const std::size_t y = rule_(x);
    if (y >= labels_) throw std::out_of_range("refine_with_rule: rule returned a label out of range");
    return y;
  }

  std::shared_ptr<const Lookup> base_;
  LabelRule rule_;
  std::size_t labels_;
};

std::vector<double> unit_direction(std::vector<double> direction) {
  double n2 = 0.0;
  for (double v : direction) {
    if (!std::isfinite(v)) throw std::invalid_argument("slab direction must be finite");
    n2 += v * v;
  }
  if (!(n2 > 0.0)) throw std::invalid_argument("slab direction must be non-zero");
  const double n = std::sqrt(n2);
  for (double& v : direction) v /= n;
  return direction;
}

}  // namespace

// ---------------------------------------------------------------------------

Interval Interval::real_line() { return Interval{-kInf, kInf, false, false}; }

Interval Interval::half_open(double lo, double hi) { return Interval{lo, hi, std::isfinite(lo), false}; }

bool geometric_member(const Geometry& g, std::span<const double> x) {
  if (const auto* b = std::get_if<Box>(&g)) {
    for (std::size_t k = 0; k < b->dims.size(); ++k) {
      if (!b->dims[k].contains(x[k])) return false;
    }
    return true;
  }
  if (const auto* s = std::get_if<Slab>(&g)) return s->range.contains(project(*s, x));
  if (const auto* o = std::get_if<Outer>(&g)) return !geometric_member(o->inner, x);
  throw std::logic_error("rule-slice membership needs the labelling rule");
}

bool Lookup::member(std::size_t id, std::span<const double> x) const {
  return geometric_member(cell(id).geometry, x);
}

double diameter(const Cell& cell, std::size_t dim) { return geometry_diameter(cell.geometry, dim); }

double diameter_within(const Cell& cell, std::size_t dim, double radius) {
  if (!std::isfinite(radius)) return diameter(cell, dim);
  if (!(radius > 0.0)) throw std::invalid_argument("diameter_within: radius must be > 0");
  const double cube = 2.0 * radius * std::sqrt(static_cast<double>(dim));
  const auto* b = std::get_if<Box>(&cell.geometry);
  if (!b) return std::min(diameter(cell, dim), cube);
  double sq = 0.0;
  for (const Interval& iv : b->dims) {
    const double lo = std::max(iv.lo, -radius), hi = std::min(iv.hi, radius);
    if (hi < lo) return 0.0;
    sq += (hi - lo) * (hi - lo);
  }
  return std::sqrt(sq);
}

json describe(const Cell& cell) {
  json j = geometry_json(cell.geometry);
  j["id"] = cell.id;
  return j;
}

Partition::Partition(std::string kind, std::size_t dim, std::shared_ptr<const Lookup> lookup, json provenance)
    : kind_(std::move(kind)), dim_(dim), lookup_(std::move(lookup)), provenance_(std::move(provenance)) {
  if (dim_ == 0) throw std::invalid_argument("Partition: dim must be >= 1");
  if (!lookup_ || lookup_->size() == 0) throw std::invalid_argument("Partition: empty lookup");
}

std::size_t Partition::quantize(std::span<const double> x) const {
  check_dim(x, dim_);
  return lookup_->locate(x);
}

std::vector<std::size_t> Partition::quantize_all(const LabeledDataset& data) const {
  if (data.dim != dim_) throw std::invalid_argument("quantize: dataset dimension mismatch");
  std::vector<std::size_t> ids(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) ids[i] = lookup_->locate(data.point(i));
  return ids;
}

std::vector<Cell> Partition::cells() const {
  std::vector<Cell> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(lookup_->cell(i));
  return out;
}

std::size_t Partition::membership_count(std::span<const double> x) const {
  check_dim(x, dim_);
  std::size_t c = 0;
  for (std::size_t i = 0; i < size(); ++i) c += lookup_->member(i, x) ? 1 : 0;
  return c;
}

json Partition::describe(std::size_t max_cells) const {
  json j{{"kind", kind_}, {"dim", dim_}, {"size", size()}, {"provenance", provenance_}};
  if (size() <= max_cells) {
    json cells = json::array();
    for (std::size_t i = 0; i < size(); ++i) cells.push_back(infoloss::describe(lookup_->cell(i)));
    j["cells"] = std::move(cells);
  }
  return j;
}

Partition uniform_grid(std::size_t dim, std::size_t q, double lo, double hi) {
  if (dim == 0 || q == 0) throw std::invalid_argument("uniform_grid: dim and q must be >= 1");
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw std::invalid_argument("uniform_grid: need finite lo < hi");
  }
  std::size_t boxes = 1;
  for (std::size_t k = 0; k < dim; ++k) {
    if (boxes > (kMaxGridCells - 1) / q) throw std::overflow_error("uniform_grid: too many cells");
    boxes *= q;
  }
  return Partition("uniform-grid", dim, std::make_shared<GridLookup>(dim, q, lo, hi),
                   json{{"q", q}, {"lo", lo}, {"hi", hi}, {"dim", dim}});
}

Partition product_partition(unsigned m, std::size_t dim) {
  if (m == 0 || dim == 0) throw std::invalid_argument("product_partition: m and d must be >= 1");
  if (m > 40) throw std::overflow_error("product_partition: index range overflow");
  const std::size_t per_axis = (2 * static_cast<std::size_t>(m)) << m;
  const double md = static_cast<double>(m);
  const Partition grid = uniform_grid(dim, per_axis, -md, md);
  return Partition("product", dim, grid.shared_lookup(),
                   json{{"m", m}, {"dim", dim}, {"side", std::ldexp(1.0, -static_cast<int>(m))},
                        {"boxes_per_axis", per_axis}});
}

Partition constant_partition(std::size_t dim) {
  return Partition("constant", dim, std::make_shared<ConstantLookup>(dim), json{{"dim", dim}});
}

Partition gessaman(const LabeledDataset& data, std::size_t l_n) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim;
  if (d == 0) throw std::invalid_argument("gessaman: empty dimension");
  if (l_n == 0) throw std::invalid_argument("gessaman: l_n must be >= 1");
  if (n < l_n) throw std::invalid_argument("gessaman: need n >= l_n");
  // Largest T with T^d * l_n <= n, in integers.
  auto fits = [&](std::size_t T) {
    long double prod = static_cast<long double>(l_n);
    for (std::size_t k = 0; k < d; ++k) prod *= static_cast<long double>(T);
    return prod <= static_cast<long double>(n);
  };
  std::size_t T = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n) / static_cast<double>(l_n),
                                                      1.0 / static_cast<double>(d)))));
  while (T > 1 && !fits(T)) --T;
  while (fits(T + 1)) ++T;

  TreeBuilder tb(d);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  gessaman_node(tb, data, idx, 0, T, Box{std::vector<Interval>(d, Interval::real_line())});
  return Partition("gessaman", d, tb.finish(),
                   json{{"n", n}, {"l_n", l_n}, {"T", T}, {"dim", d}, {"seed", data.seed}});
}

std::size_t tsp_leaf_count(std::size_t n, std::size_t l_n) {
  if (l_n == 0) throw std::invalid_argument("tsp_leaf_count: l_n must be >= 1");
  if (n < 2 || n / 2 < l_n) return 1;
  return tsp_leaf_count(n - n / 2, l_n) + tsp_leaf_count(n / 2, l_n);
}

Partition tsp(const LabeledDataset& data, std::size_t l_n) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim;
  if (d == 0) throw std::invalid_argument("tsp: empty dimension");
  if (n == 0) throw std::invalid_argument("tsp: need n >= 1");
  if (l_n == 0) throw std::invalid_argument("tsp: l_n must be >= 1");
  TreeBuilder tb(d);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  tsp_node(tb, data, idx, 0, l_n, Box{std::vector<Interval>(d, Interval::real_line())});
  return Partition("tsp", d, tb.finish(), json{{"n", n}, {"l_n", l_n}, {"dim", d}, {"seed", data.seed}});
}

// Each level replaces the corner square by four squares: three leaves and a
// new corner.
std::size_t asymmetric_cell_count(unsigned depth) { return 4 * (3 + 3 * static_cast<std::size_t>(depth)); }

Partition asymmetric_dyadic(unsigned depth, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("asymmetric_dyadic: radius must be > 0");
  if (depth > kMaxAsymmetricDepth) throw std::overflow_error("asymmetric_dyadic: depth too large");
  return Partition("asymmetric", 2, std::make_shared<AsymmetricLookup>(depth, radius),
                   json{{"depth", depth}, {"radius", radius}});
}

Partition slab_partition(std::vector<double> direction, bool radial, std::vector<double> boundaries) {
  const std::size_t d = direction.size();
  if (d == 0) throw std::invalid_argument("slab_partition: empty direction");
  if (!radial) direction = unit_direction(std::move(direction));
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    if (!std::isfinite(boundaries[i])) throw std::invalid_argument("slab_partition: boundaries must be finite");
    if (i > 0 && !(boundaries[i] > boundaries[i - 1])) {
      throw std::invalid_argument("slab_partition: boundaries must be strictly increasing");
    }
  }
  json prov{{"radial", radial}, {"boundaries", boundaries}};
  if (!radial) prov["direction"] = direction;
  return Partition("slab", d, std::make_shared<SlabLookup>(std::move(direction), radial, std::move(boundaries)),
                   std::move(prov));
}

Partition projected_uniform(std::vector<double> direction, double lo, double hi, std::size_t k, bool radial) {
  if (k < 2) throw std::invalid_argument("projected_uniform: k must be >= 2");
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw std::invalid_argument("projected_uniform: need finite lo < hi");
  }
  std::vector<double> b;
  if (k == 2) {
    b.push_back(0.5 * (lo + hi));
  } else {
    const double h = (hi - lo) / static_cast<double>(k - 2);
    for (std::size_t i = 0; i + 1 < k; ++i) b.push_back(lo + static_cast<double>(i) * h);
    b.back() = hi;
  }
  Partition slabs = slab_partition(std::move(direction), radial, std::move(b));
  json prov = slabs.provenance();
  prov["lo"] = lo;
  prov["hi"] = hi;
  prov["k"] = k;
  return Partition("projected-uniform", slabs.dim(), slabs.shared_lookup(), std::move(prov));
}

Partition quadrant_partition() {
  return Partition("quadrant", 2, std::make_shared<QuadrantLookup>(), json::object());
}

Partition refine_with_rule(const Partition& p, LabelRule rule, std::size_t labels) {
  if (labels == 0) throw std::invalid_argument("refine_with_rule: labels must be >= 1");
  if (!rule) throw std::invalid_argument("refine_with_rule: empty rule");
  if (p.size() > std::numeric_limits<std::size_t>::max() / labels) {
    throw std::overflow_error("refine_with_rule: too many cells");
  }
  return Partition("refined", p.dim(), std::make_shared<RefinedLookup>(p.shared_lookup(), std::move(rule), labels),
                   json{{"base", p.kind()}, {"base_provenance", p.provenance()}, {"labels", labels},
                        {"encoding", "base_id * labels + label"}});
}

double shrink_diagnostic(const Partition& p, const LabeledDataset& probe, double delta, double clip) {
  if (!(delta > 0.0)) throw std::invalid_argument("shrink_diagnostic: delta must be > 0");
  if (probe.size() == 0) throw std::invalid_argument("shrink_diagnostic: empty probe");
  std::unordered_map<std::size_t, double> diam;
  std::size_t big = 0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const std::size_t id = p.quantize(probe.point(i));
    auto it = diam.find(id);
    if (it == diam.end()) it = diam.emplace(id, diameter_within(p.cell(id), p.dim(), clip)).first;
    big += it->second > delta ? 1 : 0;
  }
  return static_cast<double>(big) / static_cast<double>(probe.size());
}

std::vector<std::size_t> cell_counts(const Partition& p, const LabeledDataset& data) {
  std::vector<std::size_t> counts(p.size(), 0);
  for (std::size_t id : p.quantize_all(data)) ++counts[id];
  return counts;
}

}  // namespace infoloss
