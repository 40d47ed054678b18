// Command-line front end. Exit codes: 0 ok, 1 a check failed, 2 bad
// configuration or I/O.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "infoloss/experiment.hpp"
#include "infoloss/verify.hpp"

namespace {

using namespace infoloss;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string format = "csv";
};

// Report files are only written when a destination was asked for.
std::optional<std::filesystem::path> explicit_out(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return std::filesystem::path(*flag);
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

int run_verify(const std::string& suite, const VerifyOptions& opt, const Common& c) {
  const VerifyReport rep = run_suite(suite, opt);
  const std::string body = rep.to_json().dump(2) + "\n";
  std::cout << body;
  for (const auto& chk : rep.checks) std::cerr << (chk.passed ? "PASS " : "FAIL ") << suite << '/' << chk.name << '\n';
  if (auto dir = explicit_out(c.out)) write_file_atomic(*dir / ("verify_" + suite + ".json"), body);
  return rep.passed ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information loss versus operation loss of finite representations"};
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&](CLI::App* sub, bool with_format) {
    sub->add_option("--seed", common.seed, "Master seed");
    sub->add_option("--out", common.out, std::string("Output directory (default: $") + kOutDirEnv + ")");
    if (with_format) sub->add_option("--format", common.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };

  BoundsOptions bopt;
  auto* bounds = app.add_subcommand("bounds", "Tabulate f, the I_loss lower bound and its brute-force oracle");
  add_common(bounds, true);
  bounds->add_option("--eps", bopt.eps, "Error levels");
  bounds->add_option("--M", bopt.ms, "Label alphabet sizes (2..6)");
  bounds->add_option("--grid", bopt.grid, "Simplex lattice resolution (>= 50)");

  std::optional<std::string> config_path;
  std::string preset = "scale";
  std::optional<std::size_t> curve_trials;
  auto* curve = app.add_subcommand("curve", "Loss curves for a model and a set of partition schemes");
  add_common(curve, true);
  curve->add_option("--config", config_path, "JSON run configuration");
  curve->add_option("--preset", preset, "scale, rotated-scale, translation or rotation (ignored with --config)");
  curve->add_option("--trials", curve_trials, "Evaluation sample size n_eval");

  VerifyOptions vopt;
  std::string suite;
  std::optional<std::size_t> trials, grid;
  auto* verify = app.add_subcommand("verify", "Run a self-checking suite");
  add_common(verify, false);
  verify->add_option("suite", suite, "theorem2, bounds, example4d or partitions")
      ->required()
      ->check(CLI::IsMember({"theorem2", "bounds", "example4d", "partitions"}));
  verify->add_option("--trials", trials, "Random trials");
  verify->add_option("--grid", grid, "I_loss oracle lattice resolution");

  auto* ex4d = app.add_subcommand("example-4d", "Alias of 'verify example4d'");
  add_common(ex4d, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*bounds) {
      const auto rows = bounds_table(bopt);
      const json j = bounds_json(rows, bopt);
      const bool csv = common.format == "csv";
      const std::string body = csv ? bounds_csv(rows) : j.dump(2) + "\n";
      std::cout << body;
      if (auto dir = explicit_out(common.out)) write_file_atomic(*dir / (csv ? "bounds.csv" : "bounds.json"), body);
      return j.at("passed").get<bool>() ? kOk : kCheckFailed;
    }
    if (*curve) {
      RunConfig cfg = config_path ? RunConfig::load(*config_path) : RunConfig::preset(preset);
      if (common.seed) cfg.estimator.seed = *common.seed;
      if (curve_trials) cfg.estimator.n_eval = *curve_trials;
      if (curve->count("--format")) cfg.format = parse_format(common.format);
      cfg.validate();
      const auto dir = resolve_out_dir(common.out, cfg.out);
      const CurveRun run = run_curve(cfg, dir);
      for (const auto& f : run.files) std::cout << f.string() << '\n';
      return kOk;
    }
    if (common.seed) vopt.seed = *common.seed;
    if (*verify) {
      if (trials) vopt.trials = *trials;
      if (grid) {
        if (*grid < 50) throw ConfigError("--grid must be >= 50");
        vopt.grid = *grid;
      }
      return run_verify(suite, vopt, common);
    }
    return run_verify("example4d", vopt, common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kConfigError;
}
