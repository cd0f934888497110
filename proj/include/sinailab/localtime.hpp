#pragma once

#include <cstddef>
#include <vector>

#include "sinailab/brownian.hpp"
#include "sinailab/rng.hpp"
#include "sinailab/stats.hpp"

namespace sinailab {

enum class StoppingKind { sigma, tau, exit_pm1 };
enum class FieldMode { path_estimate, ray_knight_exact };

struct StoppingRecord {
    StoppingKind kind = StoppingKind::sigma;
    double level = 0.0;
    double time = 0.0;
    bool censored = false;
};

/// Local time profile y -> L(T, y) on positions[i], bin width h.
struct LocalTimeField {
    std::vector<double> positions;
    std::vector<double> values;
    double h = 0.0;
    StoppingKind stopping = StoppingKind::sigma;
    FieldMode mode = FieldMode::path_estimate;

    double mass() const;
    /// Linear interpolation in position; zero outside the support.
    double at(double y) const;
};

/// First passage strictly above `level`. Each step draws one uniform from
/// `rng` for the bridge test, so calls with the same stream are coupled
/// across levels and sigma(a) <= sigma(b) whenever a <= b.
StoppingRecord hitting_time_sigma(const SamplePath& path, double level, RngStream rng);

/// First time the occupation of [-h/2, h/2], divided by h, exceeds r.
StoppingRecord inverse_local_time_tau(const SamplePath& path, double r, double h);

/// Occupation measure per bin of width h (bins centred on multiples of h),
/// left-endpoint rule, up to time up_to.
LocalTimeField estimate_local_time_field(const SamplePath& path, double up_to, double h);

/// Exact-in-law field x -> L(sigma(a), a - x) on x = 0, h, 2h, ... up to
/// a + truncation: BESQ(2) from 0 on [0, a], BESQ(0) beyond. Positions are
/// reported as y = a - x in ascending order.
LocalTimeField ray_knight_field(double a, double truncation, double h, RngStream& rng);

/// The same field read only at the given positions y <= a, exact
/// transitions between consecutive points.
std::vector<double> ray_knight_at(double a, const std::vector<double>& points, RngStream& rng);

/// Integral of L(sigma(b), x) over [a, b] from a Ray-Knight field with n_steps cells.
double exit_area_sample(double a, double b, RngStream& rng, std::size_t n_steps = 256);

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// (2/pi, 4/pi) * exp(-pi^2 v / (8 (b - a)^2)).
Bounds exit_area_bounds(double a, double b, double v);

/// First passage of |B| from 0 to level, adaptive steps with bridge correction.
double abs_bm_exit_time(double level, double dt, RngStream& rng);

enum class AreaSide { left, full };

struct WeightedAreaOptions {
    double h = 0.02;
    double relative_tol = 1e-6;
    std::size_t max_steps = 10000;
};

struct WeightedAreaSample {
    double value = 0.0;
    /// Bound on the mean of the neglected tail when the step budget runs out.
    double remainder = 0.0;
    bool truncated = false;
};

/// left:  int_0^inf e^{-s} L(sigma(r), -s) ds
/// full:  int_{-inf}^a e^{-|x|} L(sigma(r), x) dx, a <= r
WeightedAreaSample exp_weighted_area_sample(double r, AreaSide side, double a, RngStream& rng,
                                            const WeightedAreaOptions& options = {});

struct FunctionalSample {
    double value = 0.0;
    bool censored = false;
};

struct WalkOptions {
    double cap = 1e4;
    std::size_t max_steps = 50'000'000;
    /// Steps grow as (step_fraction * distance)^2 away from the level.
    double step_fraction = 0.1;
};

/// Integral of (b - B)^{1/kappa - 2} up to sigma(a), adaptive Brownian walk
/// with bridge-corrected passage detection. Censored at options.cap.
FunctionalSample gs_functional_sample(double kappa, double a, double b, RngStream& rng, double dt,
                                      const WalkOptions& options = {});

/// Local time at sigma(level) of a Brownian motion from 0, estimated by
/// occupation of bins of width h centred at `points`. Steps are
/// min(dt, h^2/64) inside bins and near the level and grow with the distance
/// elsewhere.
std::vector<double> local_time_at_sigma(double level, const std::vector<double>& points, double h,
                                        double dt, RngStream& rng);

struct ProbabilityEstimate {
    double p_hat = 0.0;
    Interval ci;
    std::size_t successes = 0;
    std::size_t n = 0;
};

/// P{ inf_{|y| <= 1/2} L(sigma(1) ^ sigma(-1), y) < x }, infimum over bin
/// centres of width h.
ProbabilityEstimate psi_estimate(double x, std::size_t n, RngStream rng, double h = 0.01,
                                 double dt = 2.5e-5);

} // namespace sinailab
