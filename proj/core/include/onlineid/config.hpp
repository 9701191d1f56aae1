#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "onlineid/gains.hpp"

namespace onlineid {

enum class Regime { Exact, Noisy, Smooth };
enum class TruthKind { Analytic, Forward };

const char* to_string(Regime r) noexcept;
const char* to_string(TruthKind k) noexcept;

/// Everything that defines one experiment. Serialized as a flat YAML map
/// whose keys are exactly the member names.
struct RunConfig {
  int n_nodes = 31;
  double time_step = 0.6;
  double horizon = 60.0;
  double window_a = 0.3;
  double window_b = 0.87;
  double diffusion = 1.0;
  TruthKind truth = TruthKind::Analytic;

  Regime regime = Regime::Exact;
  double noise_level = 0.0;
  std::uint64_t seed = 1;
  double sigma = 0.0;
  double alpha = 0.0;
  int smoothing_window = 0;

  gains::GainMode gain_mode = gains::GainMode::OracleExact;
  double c1 = 1.0;
  double nu_min = 1.0;
  double mu_bar = 1.0;
  double nu_bar = 1.0;

  /// One of c1, mu_bar, nu_bar, mu_nu (the product grid over mu_bar, nu_bar).
  std::string tune_target = "c1";
  /// Empty means the decimal grid 0.1 ... 1000.
  std::vector<double> tune_grid;

  /// Scale of the initial state estimate relative to the interpolant of u0.
  double u_hat0_scale = 1.0;
  std::vector<double> snapshot_times = {0.0, 6.0, 15.0, 30.0, 45.0, 60.0};
  int snapshot_samples = 201;
  std::string output_dir = "out";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError naming the first offending field.
void validate(const RunConfig& c);

/// Parses YAML text; unknown keys, wrong types and invalid values throw
/// ConfigError. Missing keys keep their defaults.
RunConfig parse_config(const std::string& yaml);
RunConfig load_config(const std::filesystem::path& path);

/// Emits every field with 17 significant digits so that
/// parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& c);
void save_config(const RunConfig& c, const std::filesystem::path& path);

Regime regime_from_string(const std::string& s);
TruthKind truth_from_string(const std::string& s);

}  // namespace onlineid
