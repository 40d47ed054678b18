#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace infoloss {

/// n labelled points in R^d, stored row-major. Labels are zero-based.
struct LabeledDataset {
  std::size_t dim = 0;
  std::vector<double> points;
  std::vector<std::size_t> labels;
  std::uint64_t seed = 0;

  std::size_t size() const { return labels.size(); }
  std::span<const double> point(std::size_t i) const {
    return std::span<const double>(points).subspan(i * dim, dim);
  }
};

/// CSV with header x1..xd,y; labels written one-based.
void write_csv(std::ostream& os, const LabeledDataset& data);

}  // namespace infoloss
