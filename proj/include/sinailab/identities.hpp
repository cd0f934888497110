#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sinailab/bessel.hpp"
#include "sinailab/brownian.hpp"
#include "sinailab/diffusion.hpp"
#include "sinailab/localtime.hpp"
#include "sinailab/rng.hpp"
#include "sinailab/stats.hpp"

namespace sinailab {

struct XiPath {
    SamplePath path;
    double kappa;
};

struct JacobiPath {
    SamplePath path;
    double d1;
    double d2;
    double start;
};

/// One reflected Euler step of
/// dXi = sqrt(1 - e^{-Xi}) dbeta + (-kappa/2 + (1+kappa)/2 e^{-Xi}) dt.
double xi_step(double xi, double kappa, double dt, double normal);

XiPath simulate_xi(double kappa, double horizon, double dt, RngStream& rng);

/// Euler scheme for dY = 2 sqrt(Y(1-Y)) dbeta + (d1 - (d1+d2) Y) dt, clipped to [0, 1].
double jacobi_step(double y, double d1, double d2, double dt, double normal);
JacobiPath simulate_jacobi(double d1, double d2, double a, double horizon, double dt, RngStream& rng);

enum class Route { a_diffusion, b_xi_bessel };

/// Deliberate corruptions used to show the comparisons have power.
enum class Mutation {
    none,
    /// Integrates e^Xi instead of e^Xi - 1 in the first component.
    drop_minus_one,
    /// Starts the Bessel hitting from e^{Xi(v)} instead of e^{Xi(v)/2}.
    bessel_start_squared
};

struct TwoRouteSample {
    Route route = Route::a_diffusion;
    OccupationPair pair;
};

struct Theorem41Options {
    /// Common cap on theta2 for both routes.
    double cap = 400.0;
    /// Potential resolution for route A.
    double resolution = 1e-3;
    /// Floor step of the adaptive Bessel hitting walk.
    double bessel_dt = 1e-5;
    Mutation mutation = Mutation::none;
};

/// (4 int_0^v (e^Xi - 1) ds, 16 Upsilon_{2-2kappa}(e^{Xi(v)/2} -> 1)); the
/// hitting time uses a stream split from rng, independent of Xi.
TwoRouteSample theorem41_route_b(double kappa, double v, double dt, RngStream rng,
                                 const Theorem41Options& options = {});

/// Occupation pair of the diffusion in a fresh potential, Ray-Knight mode.
TwoRouteSample theorem41_route_a(double kappa, double v, RngStream rng, const Theorem41Options& options = {});

struct KsBlock {
    std::string name;
    KsResult ks;
};

struct Theorem41Report {
    double kappa = 0.0;
    double v = 0.0;
    std::size_t n = 0;
    double dt = 0.0;
    Theorem41Options options;
    KsBlock theta1;
    KsBlock theta2;
    KsBlock sum;
    std::size_t censored_a = 0;
    std::size_t censored_b = 0;
    std::size_t truncated_a = 0;
};

/// n samples of one route; sample i uses rng.split(i). Route A ignores dt
/// and the mutation.
std::vector<TwoRouteSample> theorem41_samples(Route route, double kappa, double v, std::size_t n, double dt,
                                              RngStream rng, const Theorem41Options& options = {});

/// KS blocks on theta1, theta2 and the sum for two prepared sample sets.
Theorem41Report theorem41_report(double kappa, double v, double dt, const Theorem41Options& options,
                                 const std::vector<TwoRouteSample>& a, const std::vector<TwoRouteSample>& b);

/// KS comparisons of theta1, min(theta2, cap) and their sum. Route A uses
/// streams split(0).split(i), route B split(1).split(i).
Theorem41Report theorem41_compare(double kappa, double v, std::size_t n, double dt, RngStream rng,
                                  const Theorem41Options& options = {});

/// Route B against route B on independent streams.
Theorem41Report theorem41_null(double kappa, double v, std::size_t n, double dt, RngStream rng,
                               const Theorem41Options& options = {});

/// (1/4) R^2(u*) where R is BES(2 + 2 kappa) from 2 and 4 int_0^{u*} ds/R^2 = x.
/// Steps are eps * R^2 in the R clock, so each adds about 4 eps to the x clock.
double lamperti_marginal(double kappa, double x, RngStream& rng, double eps = 1e-4);

struct SkewProductReport {
    double d1 = 0.0, d2 = 0.0, r1 = 0.0, r2 = 0.0, u = 0.0;
    std::size_t n = 0;
    double dt = 0.0;
    KsResult marginal;
    MeanSe correlation;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
};

/// Ratio R1^2/(R1^2 + R2^2) at the time the clock int ds/(R1^2 + R2^2)
/// reaches u, against direct Jacobi(d1, d2) simulation of Y(u).
SkewProductReport skewproduct_check(double d1, double d2, double r1, double r2, double u, std::size_t n,
                                    double dt, RngStream rng, double eps = 1e-4);

/// One skew-product draw: (ratio, R1^2 + R2^2) at the clock time.
std::pair<double, double> skewproduct_sample(double d1, double d2, double r1, double r2, double u,
                                             RngStream& rng, double eps = 1e-4);

/// (2/pi) e^{-pi^2 v / (8 x^2)} and 9 e^{-pi^2 v / (8 x^2)}.
Bounds xi_bounds_reference(double v, double x);

/// c (t/a) e^{-x^2 / (9a)}.
double xi_modulus_reference(double t, double a, double x, double c = 1.0);

/// P(sup_{s <= v} Xi < x) with per-step bridge correction for the maximum.
ProbabilityEstimate xi_confinement(double kappa, double v, double x, std::size_t n, double dt, RngStream rng);

/// Realised variance of the martingale part of Xi against int (1 - e^{-Xi}) ds.
double xi_quadratic_variation_ratio(double kappa, double horizon, double dt, RngStream& rng);

} // namespace sinailab
