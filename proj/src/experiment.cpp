#include "infoloss/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "infoloss/bounds.hpp"
#include "infoloss/rng.hpp"

namespace infoloss {

using nlohmann::json;
namespace fs = std::filesystem;

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ConfigError("format must be 'csv' or 'json', got '" + s + "'");
}

std::string format_name(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

namespace {

// Typed field access that reports the offending key.
template <class T>
T get_as(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

template <class T>
void read_opt(const json& obj, const char* key, T& dst, const std::string& where) {
  if (obj.contains(key)) dst = get_as<T>(obj, key, where);
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || item.key() == a;
    if (!known) throw ConfigError("unknown key " + where + "." + item.key());
  }
}

}  // namespace

json model_to_json(const ModelKind& kind) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ScaleInvariant>) {
          return {{"kind", "scale"}, {"alpha", m.alpha}, {"sigma", m.sigma}};
        } else if constexpr (std::is_same_v<T, RotatedScaleInvariant>) {
          return {{"kind", "rotated-scale"}, {"alpha", m.alpha}, {"sigma", m.sigma}, {"angle", m.angle}};
        } else if constexpr (std::is_same_v<T, TranslationInvariant>) {
          return {{"kind", "translation"},
                  {"spacing", m.spacing},
                  {"sigma", m.sigma},
                  {"angle", m.angle},
                  {"classes", m.classes}};
        } else if constexpr (std::is_same_v<T, RotationInvariant>) {
          return {{"kind", "rotation"}, {"sigmas", m.sigmas}};
        } else {
          return {{"kind", "two-class-1d"}, {"K", m.K}, {"sigma", m.sigma}};
        }
      },
      kind);
}

ModelKind model_from_json(const json& j) {
  const std::string w = "model";
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("model.kind is required");
  const auto kind = get_as<std::string>(j, "kind", w);
  if (kind == "scale") {
    reject_unknown(j, {"kind", "alpha", "sigma"}, w);
    ScaleInvariant m;
    read_opt(j, "alpha", m.alpha, w);
    read_opt(j, "sigma", m.sigma, w);
    return m;
  }
  if (kind == "rotated-scale") {
    reject_unknown(j, {"kind", "alpha", "sigma", "angle"}, w);
    RotatedScaleInvariant m;
    read_opt(j, "alpha", m.alpha, w);
    read_opt(j, "sigma", m.sigma, w);
    read_opt(j, "angle", m.angle, w);
    return m;
  }
  if (kind == "translation") {
    reject_unknown(j, {"kind", "spacing", "sigma", "angle", "classes"}, w);
    TranslationInvariant m;
    read_opt(j, "spacing", m.spacing, w);
    read_opt(j, "sigma", m.sigma, w);
    read_opt(j, "angle", m.angle, w);
    read_opt(j, "classes", m.classes, w);
    return m;
  }
  if (kind == "rotation") {
    reject_unknown(j, {"kind", "sigmas"}, w);
    RotationInvariant m;
    read_opt(j, "sigmas", m.sigmas, w);
    return m;
  }
  if (kind == "two-class-1d") {
    reject_unknown(j, {"kind", "K", "sigma"}, w);
    TwoClass1D m;
    read_opt(j, "K", m.K, w);
    read_opt(j, "sigma", m.sigma, w);
    return m;
  }
  throw ConfigError("unknown model.kind '" + kind + "'");
}

RunConfig RunConfig::preset(const std::string& name) {
  RunConfig c;
  const std::vector<std::size_t> fig_sizes{10, 20, 50, 100, 200, 500, 1000};
  const auto specs = [](std::initializer_list<const char*> names) {
    std::vector<SchemeSpec> out;
    for (const char* n : names) out.push_back(SchemeSpec::parse(n));
    return out;
  };
  if (name == "scale") {
    c.model = ScaleInvariant{};
    c.schemes = specs({"product", "gessaman", "tsp", "asymmetric"});
    c.sizes = fig_sizes;
  } else if (name == "rotated-scale") {
    c.model = RotatedScaleInvariant{1.5, 1.0, kPi / 8.0};
    c.schemes = specs({"product", "gessaman", "tsp", "asymmetric"});
    c.sizes = fig_sizes;
  } else if (name == "translation") {
    c.model = TranslationInvariant{};
    c.schemes = specs({"1d-uniform", "product", "gessaman", "tsp"});
    c.sizes = {5, 10, 20, 50, 100, 200, 500, 1000};
  } else if (name == "rotation") {
    c.model = RotationInvariant{};
    c.schemes = specs({"1d-uniform", "product", "gessaman", "tsp"});
    c.sizes = {5, 10, 20, 50, 100, 200, 500, 1000};
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected scale, rotated-scale, translation or rotation)");
  }
  return c;
}

RunConfig RunConfig::from_json(const json& j) {
  const std::string w = "config";
  reject_unknown(j, {"model", "schemes", "sizes", "n_eval", "n_cal", "seed", "l_n", "aux_resolution", "format",
                     "out", "save_samples"},
                 w);
  if (!j.contains("model")) throw ConfigError("config.model is required");
  const ModelKind model = model_from_json(j.at("model"));
  const std::string kind = kind_name(model);
  RunConfig c = preset(kind == "two-class-1d" ? "scale" : kind);
  c.model = model;
  if (kind == "two-class-1d") c.schemes = {SchemeSpec::parse("product"), SchemeSpec::parse("gessaman")};

  std::optional<std::size_t> l_n;
  if (j.contains("l_n")) l_n = get_as<std::size_t>(j, "l_n", w);
  if (j.contains("schemes")) {
    const json& arr = j.at("schemes");
    if (!arr.is_array() || arr.empty()) throw ConfigError("config.schemes must be a nonempty array");
    c.schemes.clear();
    const std::string ws = "config.schemes[]";
    for (const json& s : arr) {
      const bool named = s.is_string();
      if (!named) reject_unknown(s, {"name", "l_n", "radius", "asymmetric_radius"}, ws);
      SchemeSpec spec;
      try {
        spec = SchemeSpec::parse(named ? s.get<std::string>() : get_as<std::string>(s, "name", ws));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      if (l_n) spec.l_n = *l_n;
      if (!named) {
        read_opt(s, "l_n", spec.l_n, ws);
        read_opt(s, "radius", spec.radius, ws);
        read_opt(s, "asymmetric_radius", spec.asymmetric_radius, ws);
      }
      c.schemes.push_back(spec);
    }
  } else if (l_n) {
    for (auto& s : c.schemes) s.l_n = *l_n;
  }
  read_opt(j, "sizes", c.sizes, w);
  read_opt(j, "n_eval", c.estimator.n_eval, w);
  read_opt(j, "n_cal", c.estimator.n_cal, w);
  read_opt(j, "seed", c.estimator.seed, w);
  read_opt(j, "aux_resolution", c.estimator.aux_resolution, w);
  read_opt(j, "save_samples", c.save_samples, w);
  if (j.contains("format")) c.format = parse_format(get_as<std::string>(j, "format", w));
  if (j.contains("out")) c.out = get_as<std::string>(j, "out", w);
  c.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  json schemes = json::array();
  for (const auto& s : this->schemes) {
    json e{{"name", s.name()}, {"l_n", s.l_n}};
    if (s.radius > 0.0) e["radius"] = s.radius;
    if (s.kind == SchemeKind::Asymmetric) e["asymmetric_radius"] = s.asymmetric_radius;
    schemes.push_back(std::move(e));
  }
  return {{"model", model_to_json(model)},
          {"schemes", std::move(schemes)},
          {"sizes", sizes},
          {"n_eval", estimator.n_eval},
          {"n_cal", estimator.n_cal},
          {"seed", estimator.seed},
          {"aux_resolution", estimator.aux_resolution},
          {"format", format_name(format)},
          {"save_samples", save_samples}};
}

void RunConfig::validate() const {
  if (sizes.empty()) throw ConfigError("sizes must be nonempty");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0) throw ConfigError("sizes must be >= 1");
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw ConfigError("sizes must be strictly ascending");
  }
  if (schemes.empty()) throw ConfigError("schemes must be nonempty");
  try {
    estimator.validate();
    (void)GaussClassModel::build(model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::string kind = kind_name(model);
  std::set<std::string> seen;
  for (const auto& s : schemes) {
    const std::string name = s.name();
    if (!seen.insert(name).second) throw ConfigError("scheme '" + name + "' listed twice");
    if ((s.kind == SchemeKind::Gessaman || s.kind == SchemeKind::Tsp) && s.l_n == 0) {
      throw ConfigError("l_n must be >= 1 for scheme '" + name + "'");
    }
    if (s.kind == SchemeKind::Asymmetric && kind == "two-class-1d") {
      throw ConfigError("scheme 'asymmetric' needs a 2-D model");
    }
    if (s.kind == SchemeKind::ProjectedUniform && kind != "translation" && kind != "rotation") {
      throw ConfigError("scheme '1d-uniform' needs a translation or rotation model");
    }
    if (s.kind == SchemeKind::Optimal && kind != "scale") {
      throw ConfigError("scheme 'optimal' needs the scale model");
    }
  }
}

fs::path resolve_out_dir(const std::optional<std::string>& flag, const std::optional<std::string>& config) {
  if (flag && !flag->empty()) return *flag;
  if (config && !config->empty()) return *config;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return kDefaultOutDir;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

// ---------------------------------------------------------------------------

void BoundsOptions::validate() const {
  if (eps.empty()) throw ConfigError("bounds: eps grid is empty");
  if (ms.empty()) throw ConfigError("bounds: M list is empty");
  for (double e : eps) {
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("bounds: eps=" + std::to_string(e) + " outside (0, 1]");
  }
  for (std::size_t m : ms) {
    if (m < 2 || m > 6) throw ConfigError("bounds: M=" + std::to_string(m) + " outside 2..6");
  }
  if (grid < 50) throw ConfigError("bounds: grid=" + std::to_string(grid) + " must be >= 50");
}

std::vector<BoundsRow> bounds_table(const BoundsOptions& opt) {
  opt.validate();
  std::vector<BoundsRow> rows;
  for (std::size_t m : opt.ms) {
    std::vector<double> geo(m);
    for (std::size_t j = 0; j < m; ++j) geo[j] = std::ldexp(1.0, -static_cast<int>(j));
    double total = 0.0;
    for (double g : geo) total += g;
    for (double& g : geo) g /= total;
    const Pmf geometric(geo);
    const Pmf uniform = Pmf::uniform(m);
    for (double e : opt.eps) {
      BoundsRow r;
      r.eps = e;
      r.m = m;
      r.feasible = e <= 1.0 - 1.0 / static_cast<double>(m) + 1e-12;
      if (r.feasible) {
        r.f_uniform = f_min_mi(uniform, std::min(e, prior_error(uniform)));
        if (e <= prior_error(geometric)) r.f_geometric = f_min_mi(geometric, e);
        r.lower_bound = i_loss_lower_bound(e, m);
        r.brute_force = i_loss_bruteforce(e, m, opt.grid);
        r.ok = r.lower_bound > 0.0 && r.lower_bound <= r.brute_force + 2.0 / static_cast<double>(opt.grid);
      }
      rows.push_back(r);
    }
  }
  return rows;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string row_status(const BoundsRow& r) { return !r.feasible ? "infeasible" : (r.ok ? "ok" : "FAIL"); }

}  // namespace

std::string bounds_csv(const std::vector<BoundsRow>& rows) {
  std::ostringstream os;
  os << "eps,M,status,f_uniform,f_geometric,lower_bound,brute_force\n";
  for (const auto& r : rows) {
    os << num(r.eps) << ',' << r.m << ',' << row_status(r) << ',';
    if (r.feasible) {
      os << num(r.f_uniform) << ',' << (r.f_geometric ? num(*r.f_geometric) : "") << ',' << num(r.lower_bound)
         << ',' << num(r.brute_force);
    } else {
      os << ",,,";
    }
    os << '\n';
  }
  return os.str();
}

json bounds_json(const std::vector<BoundsRow>& rows, const BoundsOptions& opt) {
  json arr = json::array();
  bool all_ok = true;
  for (const auto& r : rows) {
    json j{{"eps", r.eps}, {"M", r.m}, {"status", row_status(r)}};
    if (r.feasible) {
      j["f_uniform"] = r.f_uniform;
      j["f_geometric"] = r.f_geometric ? json(*r.f_geometric) : json(nullptr);
      j["lower_bound"] = r.lower_bound;
      j["brute_force"] = r.brute_force;
    }
    all_ok = all_ok && r.ok;
    arr.push_back(std::move(j));
  }
  return {{"grid", opt.grid}, {"passed", all_ok}, {"rows", std::move(arr)}};
}

// ---------------------------------------------------------------------------

CurveRun run_curve(const RunConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  CurveRun run;
  std::vector<std::vector<json>> parts;
  try {
    run.curves = loss_curves(cfg.model, cfg.schemes, cfg.sizes, cfg.estimator, &parts);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const std::string model = kind_name(cfg.model);
  const std::string ext = format_name(cfg.format);
  std::vector<std::pair<fs::path, std::string>> outputs;
  json partitions = json::object();
  for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
    const std::string scheme = cfg.schemes[s].name();
    std::string body;
    if (cfg.format == OutputFormat::Csv) {
      std::ostringstream os;
      write_curve_csv(os, run.curves[s]);
      body = os.str();
    } else {
      body = curve_to_json(run.curves[s]).dump(2) + "\n";
    }
    outputs.emplace_back(out_dir / ("curve_" + model + "_" + scheme + "." + ext), std::move(body));
    partitions[scheme] = parts[s];
  }
  if (cfg.save_samples) {
    const GaussClassModel m = GaussClassModel::build(cfg.model);
    std::ostringstream os;
    write_csv(os, m.sample(cfg.estimator.n_eval, derive_seed(cfg.estimator.seed, "eval")));
    outputs.emplace_back(out_dir / ("samples_" + model + "_eval.csv"), os.str());
  }
  json files = json::array();
  for (const auto& o : outputs) files.push_back(o.first.filename().string());
  const json provenance{{"tool", "infoloss"},
                        {"config", cfg.to_json()},
                        {"files", files},
                        {"partitions", std::move(partitions)}};
  outputs.emplace_back(out_dir / ("provenance_" + model + ".json"), provenance.dump(2) + "\n");

  for (const auto& [path, body] : outputs) {
    write_file_atomic(path, body);
    run.files.push_back(path);
  }
  return run;
}

}  // namespace infoloss
