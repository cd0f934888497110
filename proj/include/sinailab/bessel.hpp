#pragma once

#include <limits>

#include "sinailab/brownian.hpp"
#include "sinailab/rng.hpp"
#include "sinailab/special_functions.hpp"

namespace sinailab {

struct BesselSpec {
    double dimension = 2.0;
    double start = 0.0;
};

struct HittingSample {
    double from = 0.0;
    double to = 0.0;
    double duration = 0.0;
    bool censored = false;
};

/// Exact BESQ(delta) transition from x0 over dt.
/// delta >= 1: (sqrt(x0) + sqrt(dt) Z)^2 + dt chi^2_{delta-1}.
/// delta < 1:  2 dt Gamma(delta/2 + N), N ~ Poisson(x0 / (2 dt)); Gamma(0) is the atom at 0.
double sample_besq_transition(double delta, double x0, double dt, RngStream& rng);

/// Markov chain of exact transitions on the grid.
SamplePath sample_besq_path(const BesselSpec& spec, const TimeGrid& grid, RngStream& rng);

struct HittingOptions {
    double horizon = 1e6;
    /// Step is max(dt, (step_fraction * distance)^2) where distance = r - to.
    double step_fraction = 0.1;
};

/// First passage of BES(delta) from `from` down to `to` (0 <= delta <= 2).
/// BESQ transitions are exact; a Brownian-bridge crossing probability is
/// applied within each step. Runs past `horizon` are returned censored with
/// duration = horizon.
HittingSample sample_bes_hitting(double delta, double from, double to, double dt, RngStream& rng,
                                 const HittingOptions& options = {});

} // namespace sinailab
