#include "onlineid/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "onlineid/errors.hpp"

namespace onlineid {

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Exact: return "exact";
    case Regime::Noisy: return "noisy";
    case Regime::Smooth: return "smooth";
  }
  return "?";
}

const char* to_string(TruthKind k) noexcept {
  return k == TruthKind::Analytic ? "analytic" : "forward";
}

Regime regime_from_string(const std::string& s) {
  if (s == "exact") return Regime::Exact;
  if (s == "noisy") return Regime::Noisy;
  if (s == "smooth") return Regime::Smooth;
  throw ConfigError("regime", "expected exact, noisy or smooth, got '" + s + "'");
}

TruthKind truth_from_string(const std::string& s) {
  if (s == "analytic") return TruthKind::Analytic;
  if (s == "forward") return TruthKind::Forward;
  throw ConfigError("truth", "expected analytic or forward, got '" + s + "'");
}

namespace {

struct Field {
  const char* name;
  std::function<void(RunConfig&, const YAML::Node&)> read;
  std::function<void(const RunConfig&, YAML::Emitter&)> write;
};

template <class T>
T scalar(const YAML::Node& node, const char* name) {
  if (!node.IsScalar()) throw ConfigError(name, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(name, "cannot parse '" + node.Scalar() + "'");
  }
}

std::vector<double> number_list(const YAML::Node& node, const char* name) {
  if (node.IsNull()) return {};
  if (!node.IsSequence()) throw ConfigError(name, "expected a list of numbers");
  std::vector<double> out;
  for (const auto& item : node) out.push_back(scalar<double>(item, name));
  return out;
}

template <class T>
Field plain(const char* name, T RunConfig::*member) {
  return {name,
          [name, member](RunConfig& c, const YAML::Node& n) { c.*member = scalar<T>(n, name); },
          [member](const RunConfig& c, YAML::Emitter& e) { e << c.*member; }};
}

Field list(const char* name, std::vector<double> RunConfig::*member) {
  return {name,
          [name, member](RunConfig& c, const YAML::Node& n) { c.*member = number_list(n, name); },
          [member](const RunConfig& c, YAML::Emitter& e) {
            e << YAML::Flow << YAML::BeginSeq;
            for (double v : c.*member) e << v;
            e << YAML::EndSeq;
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      plain("n_nodes", &RunConfig::n_nodes),
      plain("time_step", &RunConfig::time_step),
      plain("horizon", &RunConfig::horizon),
      plain("window_a", &RunConfig::window_a),
      plain("window_b", &RunConfig::window_b),
      plain("diffusion", &RunConfig::diffusion),
      {"truth",
       [](RunConfig& c, const YAML::Node& n) {
         c.truth = truth_from_string(scalar<std::string>(n, "truth"));
       },
       [](const RunConfig& c, YAML::Emitter& e) { e << to_string(c.truth); }},
      {"regime",
       [](RunConfig& c, const YAML::Node& n) {
         c.regime = regime_from_string(scalar<std::string>(n, "regime"));
       },
       [](const RunConfig& c, YAML::Emitter& e) { e << to_string(c.regime); }},
      plain("noise_level", &RunConfig::noise_level),
      plain("seed", &RunConfig::seed),
      plain("sigma", &RunConfig::sigma),
      plain("alpha", &RunConfig::alpha),
      plain("smoothing_window", &RunConfig::smoothing_window),
      {"gain_mode",
       [](RunConfig& c, const YAML::Node& n) {
         const auto s = scalar<std::string>(n, "gain_mode");
         try {
           c.gain_mode = gains::gain_mode_from_string(s);
         } catch (const ContractError&) {
           throw ConfigError("gain_mode", "expected oracle_exact, oracle_noisy, "
                                          "oracle_smooth or heuristic, got '" + s + "'");
         }
       },
       [](const RunConfig& c, YAML::Emitter& e) { e << gains::to_string(c.gain_mode); }},
      plain("c1", &RunConfig::c1),
      plain("nu_min", &RunConfig::nu_min),
      plain("mu_bar", &RunConfig::mu_bar),
      plain("nu_bar", &RunConfig::nu_bar),
      plain("tune_target", &RunConfig::tune_target),
      list("tune_grid", &RunConfig::tune_grid),
      plain("u_hat0_scale", &RunConfig::u_hat0_scale),
      list("snapshot_times", &RunConfig::snapshot_times),
      plain("snapshot_samples", &RunConfig::snapshot_samples),
      plain("output_dir", &RunConfig::output_dir),
  };
  return table;
}

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void validate(const RunConfig& c) {
  require(c.n_nodes >= 3, "n_nodes", "must be at least 3");
  require(finite(c.time_step) && c.time_step > 0, "time_step", "must be positive");
  require(finite(c.horizon) && c.horizon >= 0, "horizon", "must be nonnegative");
  require(finite(c.window_a) && c.window_a >= 0, "window_a", "must lie in [0, 1)");
  require(finite(c.window_b) && c.window_b <= 1 && c.window_b > c.window_a, "window_b",
          "must lie in (window_a, 1]");
  require(finite(c.diffusion), "diffusion", "must be finite");
  require(finite(c.noise_level) && c.noise_level >= 0, "noise_level", "must be nonnegative");
  require(finite(c.sigma) && c.sigma >= 0, "sigma", "must be nonnegative");
  require(finite(c.alpha) && c.alpha >= 0, "alpha", "must be nonnegative");
  require(c.smoothing_window >= 0, "smoothing_window", "must be nonnegative");
  require(finite(c.c1) && c.c1 > 0, "c1", "must be positive");
  require(finite(c.nu_min) && c.nu_min >= 0, "nu_min", "must be nonnegative");
  require(finite(c.mu_bar) && c.mu_bar >= 0, "mu_bar", "must be nonnegative");
  require(finite(c.nu_bar) && c.nu_bar >= 0, "nu_bar", "must be nonnegative");
  require(finite(c.u_hat0_scale), "u_hat0_scale", "must be finite");
  require(c.snapshot_samples >= 2, "snapshot_samples", "must be at least 2");
  require(!c.output_dir.empty(), "output_dir", "must not be empty");

  switch (c.regime) {
    case Regime::Exact:
      require(c.noise_level == 0, "noise_level", "must be 0 for the exact regime");
      require(c.alpha == 0, "alpha", "must be 0 for the exact regime");
      require(c.sigma == 0, "sigma", "must be 0 for the exact regime");
      require(c.smoothing_window == 0, "smoothing_window", "must be 0 for the exact regime");
      break;
    case Regime::Noisy:
      require(c.smoothing_window == 0, "smoothing_window",
              "must be 0 for the noisy regime (use regime: smooth)");
      break;
    case Regime::Smooth:
      require(c.smoothing_window >= 1, "smoothing_window",
              "must be at least 1 for the smooth regime");
      require(c.sigma == 0, "sigma", "must be 0 for the smooth regime");
      break;
  }

  require(c.tune_target == "c1" || c.tune_target == "mu_bar" || c.tune_target == "nu_bar" ||
              c.tune_target == "mu_nu",
          "tune_target", "expected c1, mu_bar, nu_bar or mu_nu");
  for (double v : c.tune_grid) {
    require(finite(v) && v > 0, "tune_grid", "entries must be positive");
  }
  for (double t : c.snapshot_times) {
    require(finite(t) && t >= 0 && t <= c.horizon + 1e-9, "snapshot_times",
            "entries must lie in [0, horizon]");
  }
}

RunConfig parse_config(const std::string& yaml) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& ex) {
    throw ConfigError("<file>", std::string("malformed YAML: ") + ex.what());
  }
  RunConfig c;
  if (root.IsNull()) {
    validate(c);
    return c;
  }
  if (!root.IsMap()) throw ConfigError("<file>", "expected a map of fields");

  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const Field* field = nullptr;
    for (const auto& f : fields()) {
      if (key == f.name) field = &f;
    }
    if (!field) throw ConfigError(key, "unknown key");
    field->read(c, kv.second);
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const RunConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  for (const auto& f : fields()) {
    e << YAML::Key << f.name << YAML::Value;
    f.write(c, e);
  }
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

void save_config(const RunConfig& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << dump_config(c);
}

}  // namespace onlineid
