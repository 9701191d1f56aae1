#include "onlineid/tuning.hpp"

#include "onlineid/errors.hpp"
#include "onlineid/estimator.hpp"

namespace onlineid::est {

TuneSetup tune_setup(const RunConfig& c) {
  const auto values = c.tune_grid.empty() ? gains::decimal_grid() : c.tune_grid;
  TuneSetup s;
  if (c.tune_target == "mu_nu") {
    s.names = {"mu_bar", "nu_bar"};
    for (double mu : values) {
      for (double nu : values) s.grid.push_back({mu, nu});
    }
    return s;
  }
  if (c.tune_target != "c1" && c.tune_target != "mu_bar" && c.tune_target != "nu_bar") {
    throw ConfigError("tune_target", "expected c1, mu_bar, nu_bar or mu_nu");
  }
  s.names = {c.tune_target};
  for (double v : values) s.grid.push_back({v});
  return s;
}

RunConfig apply_point(RunConfig c, const TuneSetup& setup, std::span<const double> point) {
  if (point.size() != setup.names.size()) throw ContractError("apply_point: size mismatch");
  for (std::size_t i = 0; i < point.size(); ++i) {
    const auto& name = setup.names[i];
    if (name == "c1") c.c1 = point[i];
    else if (name == "mu_bar") c.mu_bar = point[i];
    else if (name == "nu_bar") c.nu_bar = point[i];
    else throw ContractError("apply_point: unknown constant " + name);
  }
  return c;
}

double tune_objective(const RunConfig& c) {
  return observed_error_integral(run(c, /*rethrow=*/true));
}

gains::TuneResult tune(const RunConfig& c, const std::function<bool()>& should_stop,
                       const std::function<void(const gains::ScoreEntry&)>& on_entry) {
  const TuneSetup setup = tune_setup(c);
  return gains::tune_heuristic(
      [&](std::span<const double> point) {
        return tune_objective(apply_point(c, setup, point));
      },
      setup.grid, should_stop, on_entry);
}

}  // namespace onlineid::est
