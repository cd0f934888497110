#pragma once

#include <iosfwd>
#include <string>

#include "sinailab/config.hpp"

namespace sinailab {

/// Rough wall-clock estimate in seconds for an estimate run on the current
/// worker count. Deliberately pessimistic: every path is charged its full
/// length.
double estimate_cost_seconds(const RunConfig& config);

/// quenched | annealed. Writes the rate CSV (or JSON) to out, preceded by a
/// comment line holding the resolved config. UsageError unless t > v > 0;
/// BudgetError when max_seconds is set and the cost estimate exceeds it.
void run_estimate(const RunConfig& config, std::ostream& out);

/// xpath | potential | xi. Paths go to out as CSV; a potential is written to
/// config.output in the CSV or binary layout (binary gets a .json sidecar
/// with the config). UsageError on a missing potential path.
void run_simulate(const RunConfig& config, std::ostream& out);

} // namespace sinailab
