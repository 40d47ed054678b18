#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "infoloss/experiment.hpp"

using namespace infoloss;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("infoloss_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig small_config() {
  RunConfig c = RunConfig::from_json(json::parse(R"({
    "model": {"kind": "scale"},
    "schemes": ["product", {"name": "tsp", "l_n": 15}],
    "sizes": [4, 16, 64],
    "n_eval": 2000, "n_cal": 4000, "seed": 5
  })"));
  return c;
}

}  // namespace

TEST_CASE("presets") {
  for (const char* n : {"scale", "rotated-scale", "translation", "rotation"}) {
    const RunConfig c = RunConfig::preset(n);
    CHECK_NOTHROW(c.validate());
    CHECK(c.schemes.size() == 4);
  }
  CHECK(RunConfig::preset("scale").sizes.back() == 1000);
  CHECK_THROWS_AS(RunConfig::preset("nope"), ConfigError);
}

TEST_CASE("config parsing accepts the documented shape") {
  const RunConfig c = small_config();
  CHECK(c.schemes.size() == 2);
  CHECK(c.schemes[1].l_n == 15);
  CHECK(c.estimator.seed == 5);
  CHECK(c.format == OutputFormat::Csv);
  // to_json feeds back into from_json unchanged.
  CHECK(RunConfig::from_json(c.to_json()).to_json() == c.to_json());
}

TEST_CASE("config errors") {
  const auto bad = [](const char* text) { CHECK_THROWS_AS(RunConfig::from_json(json::parse(text)), ConfigError); };
  bad(R"({})");
  bad(R"({"model": {"kind": "cube"}})");
  bad(R"({"model": {"kind": "scale", "beta": 1}})");
  bad(R"({"model": {"kind": "scale"}, "colour": 1})");
  bad(R"({"model": {"kind": "scale"}, "sizes": [10, 5]})");
  bad(R"({"model": {"kind": "scale"}, "sizes": []})");
  bad(R"({"model": {"kind": "scale"}, "schemes": ["tsp", "tsp"]})");
  bad(R"({"model": {"kind": "scale"}, "schemes": ["voronoi"]})");
  bad(R"({"model": {"kind": "scale"}, "schemes": ["1d-uniform"]})");
  bad(R"({"model": {"kind": "two-class-1d"}, "schemes": ["asymmetric"]})");
  bad(R"({"model": {"kind": "scale", "sigma": -1}})");
  bad(R"({"model": {"kind": "scale"}, "n_eval": "many"})");
  bad(R"({"model": {"kind": "scale"}, "format": "xml"})");
  bad(R"({"model": {"kind": "scale"}, "l_n": 0})");
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("output directory precedence") {
  ::setenv(kOutDirEnv, "from-env", 1);
  CHECK(resolve_out_dir("flag", "cfg") == fs::path("flag"));
  CHECK(resolve_out_dir(std::nullopt, "cfg") == fs::path("cfg"));
  CHECK(resolve_out_dir(std::nullopt, std::nullopt) == fs::path("from-env"));
  ::unsetenv(kOutDirEnv);
  CHECK(resolve_out_dir(std::nullopt, std::nullopt) == fs::path(kDefaultOutDir));
}

TEST_CASE("atomic writes") {
  const fs::path dir = scratch("atomic");
  const fs::path f = dir / "nested" / "a.txt";
  write_file_atomic(f, "one");
  write_file_atomic(f, "two");
  CHECK(slurp(f) == "two");
  CHECK_FALSE(fs::exists(f.string() + ".tmp"));
  CHECK_THROWS_AS(write_file_atomic(f / "under-a-file", "x"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("bounds table") {
  BoundsOptions opt;
  opt.eps = {0.1, 0.6};
  opt.ms = {2, 3};
  opt.grid = 60;
  const auto rows = bounds_table(opt);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].feasible);
  CHECK_FALSE(rows[1].feasible);  // 0.6 > 1 - 1/2
  CHECK(rows[3].feasible);        // 0.6 <= 2/3
  for (const auto& r : rows) CHECK(r.ok);
  const std::string csv = bounds_csv(rows);
  CHECK(csv.rfind("eps,M,status,f_uniform,f_geometric,lower_bound,brute_force\n", 0) == 0);
  CHECK(csv.find("infeasible") != std::string::npos);
  const json j = bounds_json(rows, opt);
  CHECK(j["passed"] == true);

  BoundsOptions bad = opt;
  bad.ms = {9};
  CHECK_THROWS(bad.validate());
  bad = opt;
  bad.grid = 10;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("run_curve writes reproducible files") {
  const RunConfig c = small_config();
  const fs::path a = scratch("curve_a"), b = scratch("curve_b");
  const CurveRun ra = run_curve(c, a);
  const CurveRun rb = run_curve(c, b);
  REQUIRE(ra.files.size() == 3);
  CHECK(ra.files[0].filename() == "curve_scale_product.csv");
  CHECK(ra.files[2].filename() == "provenance_scale.json");
  for (std::size_t i = 0; i < ra.files.size(); ++i) CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));

  const std::string csv = slurp(ra.files[1]);
  CHECK(csv.rfind(std::string(kCurveCsvHeader) + "\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 1 + c.sizes.size());

  const json prov = json::parse(slurp(ra.files[2]));
  CHECK(prov["config"] == c.to_json());
  CHECK(prov["files"].size() == 2);
  CHECK(prov["partitions"]["tsp"].size() == c.sizes.size());

  RunConfig js = c;
  js.format = OutputFormat::Json;
  js.save_samples = true;
  const fs::path d = scratch("curve_json");
  const CurveRun rj = run_curve(js, d);
  CHECK(rj.files[0].extension() == ".json");
  const std::string samples = slurp(d / "samples_scale_eval.csv");
  CHECK(samples.rfind("x1,x2,y\n", 0) == 0);
  for (const auto& p : {a, b, d}) fs::remove_all(p);
}
