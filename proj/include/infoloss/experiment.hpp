// Run configuration, the bounds table and the curve runner behind the CLI.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "infoloss/estimators.hpp"
#include "infoloss/models.hpp"

namespace infoloss {

/// Bad configuration or flag values. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output could not be written. Maps to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSeed = 20240601;
inline constexpr const char* kOutDirEnv = "INFOLOSS_OUT_DIR";
inline constexpr const char* kDefaultOutDir = "infoloss-out";

enum class OutputFormat { Csv, Json };

OutputFormat parse_format(const std::string& s);
std::string format_name(OutputFormat f);

struct RunConfig {
  ModelKind model = ScaleInvariant{};
  std::vector<SchemeSpec> schemes;
  std::vector<std::size_t> sizes;
  EstimatorConfig estimator;
  OutputFormat format = OutputFormat::Csv;
  std::optional<std::string> out;
  bool save_samples = false;

  /// "scale", "rotated-scale", "translation" or "rotation".
  static RunConfig preset(const std::string& name);
  /// Strict parse: unknown keys and wrong types are ConfigErrors. Missing
  /// keys take the values of the preset named by model.kind.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);

  /// Round-trips through from_json. `out` is omitted so that the echo does
  /// not depend on where results are written.
  nlohmann::json to_json() const;

  void validate() const;
};

nlohmann::json model_to_json(const ModelKind& kind);
ModelKind model_from_json(const nlohmann::json& j);

/// --out, then the config's `out`, then $INFOLOSS_OUT_DIR, then kDefaultOutDir.
std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag, const std::optional<std::string>& config);

/// Writes `content` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// ---------------------------------------------------------------------------

struct BoundsOptions {
  std::vector<double> eps{0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  std::vector<std::size_t> ms{2, 3, 4};
  std::size_t grid = 200;

  void validate() const;
};

struct BoundsRow {
  double eps = 0.0;
  std::size_t m = 0;
  bool feasible = false;             // eps <= 1 - 1/M
  double f_uniform = 0.0;            // f(uniform, eps)
  std::optional<double> f_geometric; // f(v, eps) with v_j proportional to 2^-j, when feasible for v
  double lower_bound = 0.0;
  double brute_force = 0.0;
  bool ok = true;                    // lower_bound <= brute_force + 2/grid
};

std::vector<BoundsRow> bounds_table(const BoundsOptions& opt);
std::string bounds_csv(const std::vector<BoundsRow>& rows);
nlohmann::json bounds_json(const std::vector<BoundsRow>& rows, const BoundsOptions& opt);

// ---------------------------------------------------------------------------

struct CurveRun {
  std::vector<std::vector<LossCurvePoint>> curves;  // one per scheme
  std::vector<std::filesystem::path> files;          // in write order
};

/// Runs every scheme of `cfg`, then writes curve_<model>_<scheme>.<fmt>,
/// provenance_<model>.json and, if requested, the evaluation sample. Nothing
/// is written until all curves are computed.
CurveRun run_curve(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace infoloss
