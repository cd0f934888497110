#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "sinailab/brownian.hpp"
#include "sinailab/localtime.hpp"
#include "sinailab/potential.hpp"
#include "sinailab/rng.hpp"
#include "sinailab/stats.hpp"

namespace sinailab {

/// Time spent at nonnegative (theta1) and negative (theta2) positions before
/// H(v). theta2 stops growing at `cap`; censored marks that case.
struct OccupationPair {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double v = 0.0;
    bool censored = false;
    /// Ray-Knight mode: negative tail not absorbed within the step budget or
    /// the realised extent. remainder is the field value left at the cut.
    bool truncated = false;
    double remainder = 0.0;

    double total() const { return theta1 + theta2; }
};

enum class OccupationMode { path, ray_knight };

struct OccupationOptions {
    /// Stop integrating once theta2 reaches this value.
    double cap = std::numeric_limits<double>::infinity();
    /// Driving-path step in path mode.
    double dt = 1e-4;
    /// Negative-side grid budget in Ray-Knight mode.
    std::size_t max_steps = 20'000'000;
};

/// X on the grid k*dt, k = 0..ceil(horizon/dt), through the time change
/// X(t) = A^{-1}(B(T^{-1}(t))). The driving path B uses the same step dt.
SamplePath simulate_x(Potential& p, double horizon, double dt, RngStream rng);

/// H(v) = T(sigma(A(v))) along a driving path with step dt, bridge-corrected
/// passage and left-endpoint clock. Censored at `cap`.
StoppingRecord hitting_time_h(Potential& p, double v, RngStream rng, double dt, double cap);

/// Path mode walks the driving path and splits the clock by the sign of B.
/// Ray-Knight mode draws the local time field of B at sigma(A(v)) exactly at
/// grid points and integrates it against e^{-W_kappa}. The potential is
/// extended on demand.
OccupationPair occupation_pair(Potential& p, double v, RngStream rng, OccupationMode mode,
                               const OccupationOptions& options = {});

/// Ray-Knight mode without extension: leaving the realised extent marks the
/// sample truncated. Safe to call concurrently on one potential.
OccupationPair occupation_pair_frozen(const Potential& p, double v, RngStream rng,
                                      const OccupationOptions& options = {});

enum class KotaniScheme { pathwise, euler };

struct KotaniOptions {
    double burn_in = 10.0;
    KotaniScheme scheme = KotaniScheme::pathwise;
    /// RK4 steps per potential cell; the Euler scheme always takes one.
    int substeps = 2;
};

/// Positive root of 1 + z/2 - 2 lambda z^2.
double kotani_fixed_point(double lambda);

/// Z on the potential grid over [-burn_in, v], started at the fixed point.
/// pathwise: Z' = 1 + W_kappa' Z - 2 lambda Z^2 with W_kappa linear in each
/// cell, RK4. euler: Euler-Maruyama of the Ito form, negative proposals
/// clipped to 1e-12.
SamplePath kotani_z_path(const Potential& p, double lambda, double v, const KotaniOptions& options = {});

/// exp(-2 lambda int_0^v Z).
double kotani_rhs(const Potential& p, double lambda, double v, const KotaniOptions& options = {});

struct KotaniResult {
    double lambda = 0.0;
    double v = 0.0;
    double lhs = 0.0;
    double lhs_se = 0.0;
    double rhs = 0.0;
    double z = 0.0;
    double rhs_double_burn = 0.0;
    double burn_shift = 0.0;
    std::size_t n = 0;
    std::size_t censored = 0;
    std::size_t truncated = 0;
};

struct KotaniCheckOptions {
    KotaniOptions z;
    OccupationMode mode = OccupationMode::ray_knight;
    /// e^{-lambda H} is dropped below e^{-cap_exponent}.
    double cap_exponent = 40.0;
    double dt = 1e-4;
};

/// Monte Carlo E_omega e^{-lambda H(v)} against exp(-2 lambda int Z).
/// The potential is realised on [-2 burn_in - margin, v] first.
KotaniResult kotani_check(Potential& p, double lambda, double v, std::size_t n_paths, RngStream rng,
                          const KotaniCheckOptions& options = {});

/// Several lambda values on shared samples of H(v).
std::vector<KotaniResult> kotani_check_multi(Potential& p, const std::vector<double>& lambdas, double v,
                                             std::size_t n_paths, RngStream rng,
                                             const KotaniCheckOptions& options = {});

enum class TailKind { quenched, annealed };

struct RateEstimate {
    TailKind kind = TailKind::quenched;
    std::string estimator;
    double t = 0.0;
    double v = 0.0;
    double kappa = 0.0;
    std::size_t successes = 0;
    std::size_t n = 0;
    std::size_t censored = 0;
    double p_hat = 0.0;
    Interval ci;
    /// Point rate; NaN when p_hat = 0.
    double rate = 0.0;
    /// Rate interval from ci; rate_lo is -inf on zero counts.
    double rate_lo = 0.0;
    double rate_hi = 0.0;
    /// Fewer than 30 successes: the interval is the estimate.
    bool interval_only = false;
};

/// Fills p_hat, ci, rate fields from counts. scale multiplies log p.
void finalize_rate(RateEstimate& e, double scale);

struct QuenchedOptions {
    /// Coarse chain cell; 0 selects log(t)/4.
    double cell = 0.0;
    /// Realised half-width around [0, v]; 0 selects 2 log^2 t.
    double margin = 0.0;
    std::size_t max_jumps = 200'000'000;
};

/// Birth-death chain on the sites k*cell with exact exit probabilities from
/// A_kappa and exponential holding times carrying the exact mean exit time.
class CoarseChain {
public:
    CoarseChain(const Potential& p, double cell, double x_lo, double x_hi);

    double cell() const { return cell_; }
    long k_min() const { return k_min_; }
    long k_max() const { return k_max_; }
    double p_up(long k) const { return up_[static_cast<std::size_t>(k - k_min_)]; }
    double mean_hold(long k) const { return hold_[static_cast<std::size_t>(k - k_min_)]; }

    struct Run {
        long final_site = 0;
        long max_site = 0;
        double first_passage = std::numeric_limits<double>::infinity();
        bool budget_exhausted = false;
    };
    /// Runs from site 0 up to time t; first_passage is the first time at or
    /// above target_site.
    Run run(double t, long target_site, RngStream& rng, std::size_t max_jumps) const;

private:
    double cell_;
    long k_min_;
    long k_max_;
    std::vector<double> up_;
    std::vector<double> hold_;
};

struct QuenchedTail {
    RateEstimate at_time;
    RateEstimate sup;
};

/// P_omega{X(t) > v} and P_omega{H(v) < t}, rate scale 2 log(t/v)/v.
QuenchedTail quenched_tail(Potential& p, double t, double v, std::size_t n, RngStream rng,
                           const QuenchedOptions& options = {});

struct AnnealedOptions {
    double resolution = 1e-3;
    double xi_dt = 0.01;
    std::size_t n_xi = 0;
    bool direct = true;
    bool xi_route = true;
    QuenchedOptions quenched;
};

struct AnnealedTail {
    RateEstimate direct;
    RateEstimate xi_route;
};

/// Direct: pooled quenched sup counts over n_env potentials, n_path each.
/// Xi route: P{int_0^v e^Xi < t/4 + v}. Rate scale log^2 t / v.
AnnealedTail annealed_tail(double kappa, double t, double v, std::size_t n_env, std::size_t n_path,
                           RngStream rng, const AnnealedOptions& options = {});

/// Header and rows of the per-run CSV schema.
void write_rate_csv_header(std::ostream& out);
void write_rate_csv_row(std::ostream& out, std::uint64_t seed, const RateEstimate& e);

} // namespace sinailab
