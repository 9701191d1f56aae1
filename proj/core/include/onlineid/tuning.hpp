#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "onlineid/config.hpp"
#include "onlineid/gains.hpp"

namespace onlineid::est {

/// The constants a tune run varies and the points it visits.
struct TuneSetup {
  std::vector<std::string> names;
  std::vector<std::vector<double>> grid;
};

/// From tune_target and tune_grid (decimal grid when empty); mu_nu forms the
/// product grid over mu_bar and nu_bar.
TuneSetup tune_setup(const RunConfig& c);

/// Copy of `c` with the named constants set to `point`.
RunConfig apply_point(RunConfig c, const TuneSetup& setup, std::span<const double> point);

/// Runs the configuration and returns the time integral of |R u_hat - R u*|_X^2.
/// Throws SolverError when a step fails.
double tune_objective(const RunConfig& c);

gains::TuneResult tune(const RunConfig& c, const std::function<bool()>& should_stop = {},
                       const std::function<void(const gains::ScoreEntry&)>& on_entry = {});

}  // namespace onlineid::est
