// Self-checking suites used by `infoloss verify` and the acceptance runner.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "infoloss/finite_info.hpp"
#include "infoloss/rng.hpp"

namespace infoloss {

struct CheckResult {
  std::string name;
  bool passed = true;
  nlohmann::json detail = nlohmann::json::object();
};

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  bool passed = true;
  std::vector<CheckResult> checks;

  void add(CheckResult c);
  nlohmann::json to_json() const;
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  std::size_t trials = 200;
  std::size_t grid = 200;            // simplex lattice for the I_loss oracle
  std::size_t channel_grid = 2000;   // channel lattice for the f oracle
  std::size_t n = 100000;            // sample size for the 1-D construction
};

/// A random finite model with a random grouping of its symbols.
struct FiniteInstance {
  DiscreteJoint joint;
  std::vector<std::vector<std::size_t>> cells;

  nlohmann::json to_json() const;
};

/// |X| in 2..max_x, M in 2..max_m; masses are cubed uniforms so that some
/// rows are nearly deterministic.
FiniteInstance random_finite_instance(Engine& eng, std::size_t max_x = 20, std::size_t max_m = 5);

/// Random pmf over m labels with the same cubed-uniform profile.
Pmf random_pmf(Engine& eng, std::size_t m);

/// Prior-error gap of the 1-D two-class construction: I(X;Y) - I(sign X; Y)
/// for K = 1, sigma = 1, computed once by quadrature.
inline constexpr double kTwoClassSignGap = 0.08111688071400547;

VerifyReport verify_theorem2(const VerifyOptions& opt);
VerifyReport verify_bounds(const VerifyOptions& opt);
VerifyReport verify_example4d(const VerifyOptions& opt);
VerifyReport verify_partitions(const VerifyOptions& opt);

/// Dispatch by suite name; throws std::invalid_argument for unknown names.
VerifyReport run_suite(const std::string& suite, const VerifyOptions& opt);

}  // namespace infoloss
