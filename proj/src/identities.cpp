#include "sinailab/identities.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sinailab/parallel.hpp"
#include "sinailab/potential.hpp"

namespace sinailab {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> column(const std::vector<TwoRouteSample>& s, int which)
{
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& p = s[i].pair;
        out[i] = which == 0 ? p.theta1 : which == 1 ? p.theta2 : p.total();
    }
    return out;
}

} // namespace

Theorem41Report theorem41_report(double kappa, double v, double dt, const Theorem41Options& options,
                                 const std::vector<TwoRouteSample>& a, const std::vector<TwoRouteSample>& b)
{
    Theorem41Report rep;
    rep.kappa = kappa;
    rep.v = v;
    rep.n = a.size();
    rep.dt = dt;
    rep.options = options;
    const char* names[3] = {"theta1", "theta2", "sum"};
    KsBlock* blocks[3] = {&rep.theta1, &rep.theta2, &rep.sum};
    for (int w = 0; w < 3; ++w) {
        blocks[w]->name = names[w];
        blocks[w]->ks = ks_two_sample(EmpiricalDistribution(column(a, w)), EmpiricalDistribution(column(b, w)));
    }
    for (const auto& s : a) {
        rep.censored_a += s.pair.censored ? 1 : 0;
        rep.truncated_a += s.pair.truncated ? 1 : 0;
    }
    for (const auto& s : b) rep.censored_b += s.pair.censored ? 1 : 0;
    return rep;
}

double xi_step(double xi, double kappa, double dt, double normal)
{
    const double e = std::exp(-xi);
    const double drift = -0.5 * kappa + 0.5 * (1.0 + kappa) * e;
    const double diff = std::sqrt(std::max(0.0, -std::expm1(-xi)));
    return std::fabs(xi + drift * dt + diff * std::sqrt(dt) * normal);
}

XiPath simulate_xi(double kappa, double horizon, double dt, RngStream& rng)
{
    if (!(kappa >= 0.0)) throw std::invalid_argument("simulate_xi: kappa must be nonnegative");
    const TimeGrid grid = TimeGrid::covering(0.0, dt, horizon);
    std::vector<double> xs(grid.points(), 0.0);
    for (std::size_t k = 1; k < xs.size(); ++k) xs[k] = xi_step(xs[k - 1], kappa, dt, rng.normal());
    return {SamplePath(grid, std::move(xs)), kappa};
}

double jacobi_step(double y, double d1, double d2, double dt, double normal)
{
    const double diff = 2.0 * std::sqrt(std::max(0.0, y * (1.0 - y)));
    const double y1 = y + (d1 - (d1 + d2) * y) * dt + diff * std::sqrt(dt) * normal;
    return std::clamp(y1, 0.0, 1.0);
}

JacobiPath simulate_jacobi(double d1, double d2, double a, double horizon, double dt, RngStream& rng)
{
    if (!(d1 >= 0.0) || !(d2 >= 0.0)) throw std::invalid_argument("simulate_jacobi: dimensions must be nonnegative");
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("simulate_jacobi: start must lie in [0, 1]");
    const TimeGrid grid = TimeGrid::covering(0.0, dt, horizon);
    std::vector<double> ys(grid.points(), a);
    for (std::size_t k = 1; k < ys.size(); ++k) ys[k] = jacobi_step(ys[k - 1], d1, d2, dt, rng.normal());
    return {SamplePath(grid, std::move(ys)), d1, d2, a};
}

TwoRouteSample theorem41_route_b(double kappa, double v, double dt, RngStream rng, const Theorem41Options& options)
{
    if (!(kappa >= 0.0 && kappa < 1.0)) throw std::invalid_argument("route B: kappa must lie in [0, 1)");
    if (!(v > 0.0) || !(dt > 0.0)) throw std::invalid_argument("route B: v, dt must be positive");
    RngStream xi_rng = rng.split(0);
    RngStream hit_rng = rng.split(1);
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(v / dt - 1e-9)));
    const double h = v / static_cast<double>(steps);
    const double shift = options.mutation == Mutation::drop_minus_one ? 0.0 : 1.0;
    double xi = 0.0, integral = 0.0, f0 = 1.0 - shift;
    for (std::size_t k = 0; k < steps; ++k) {
        xi = xi_step(xi, kappa, h, xi_rng.normal());
        const double f1 = std::exp(xi) - shift;
        integral += 0.5 * (f0 + f1) * h;
        f0 = f1;
    }
    TwoRouteSample s;
    s.route = Route::b_xi_bessel;
    s.pair.v = v;
    s.pair.theta1 = 4.0 * integral;
    const double start = options.mutation == Mutation::bessel_start_squared ? std::exp(xi) : std::exp(0.5 * xi);
    if (start > 1.0) {
        HittingOptions ho;
        ho.horizon = options.cap / 16.0;
        const HittingSample hs = sample_bes_hitting(2.0 - 2.0 * kappa, start, 1.0, options.bessel_dt, hit_rng, ho);
        s.pair.theta2 = 16.0 * hs.duration;
        s.pair.censored = hs.censored;
        if (hs.censored) s.pair.theta2 = options.cap;
    }
    return s;
}

TwoRouteSample theorem41_route_a(double kappa, double v, RngStream rng, const Theorem41Options& options)
{
    Potential p(kappa, options.resolution, rng.split(0));
    OccupationOptions occ;
    occ.cap = options.cap;
    TwoRouteSample s;
    s.route = Route::a_diffusion;
    s.pair = occupation_pair(p, v, rng.split(1), OccupationMode::ray_knight, occ);
    return s;
}

std::vector<TwoRouteSample> theorem41_samples(Route route, double kappa, double v, std::size_t n, double dt,
                                              RngStream rng, const Theorem41Options& options)
{
    if (route == Route::a_diffusion)
        return replicate(n, [&](std::size_t i) { return theorem41_route_a(kappa, v, rng.split(i), options); });
    return replicate(n, [&](std::size_t i) { return theorem41_route_b(kappa, v, dt, rng.split(i), options); });
}

Theorem41Report theorem41_compare(double kappa, double v, std::size_t n, double dt, RngStream rng,
                                  const Theorem41Options& options)
{
    Theorem41Options clean = options;
    clean.mutation = Mutation::none;
    const auto a = theorem41_samples(Route::a_diffusion, kappa, v, n, dt, rng.split(0), clean);
    const auto b = theorem41_samples(Route::b_xi_bessel, kappa, v, n, dt, rng.split(1), options);
    return theorem41_report(kappa, v, dt, options, a, b);
}

Theorem41Report theorem41_null(double kappa, double v, std::size_t n, double dt, RngStream rng,
                               const Theorem41Options& options)
{
    const auto a = theorem41_samples(Route::b_xi_bessel, kappa, v, n, dt, rng.split(1), options);
    const auto b = theorem41_samples(Route::b_xi_bessel, kappa, v, n, dt, rng.split(2), options);
    return theorem41_report(kappa, v, dt, options, a, b);
}

double lamperti_marginal(double kappa, double x, RngStream& rng, double eps)
{
    if (!(x > 0.0)) throw std::invalid_argument("lamperti_marginal: x must be positive");
    if (!(kappa >= 0.0) || !(eps > 0.0)) throw std::invalid_argument("lamperti_marginal: bad kappa or eps");
    const double delta = 2.0 + 2.0 * kappa;
    double y = 4.0, clock = 0.0;
    for (;;) {
        const double du = eps * y;
        const double y1 = sample_besq_transition(delta, y, du, rng);
        const double dc = 2.0 * du * (1.0 / y + 1.0 / y1);
        if (clock + dc >= x) {
            const double f = (x - clock) / dc;
            return 0.25 * (y + f * (y1 - y));
        }
        clock += dc;
        y = y1;
    }
}

std::pair<double, double> skewproduct_sample(double d1, double d2, double r1, double r2, double u, RngStream& rng,
                                             double eps)
{
    double y1 = r1 * r1, y2 = r2 * r2;
    if (!(y1 + y2 > 0.0)) throw std::invalid_argument("skewproduct: need r1^2 + r2^2 > 0");
    double clock = 0.0;
    if (u <= 0.0) return {y1 / (y1 + y2), y1 + y2};
    for (;;) {
        const double rho = y1 + y2;
        const double du = eps * rho;
        const double z1 = sample_besq_transition(d1, y1, du, rng);
        const double z2 = sample_besq_transition(d2, y2, du, rng);
        const double rho1 = z1 + z2;
        const double dc = 0.5 * du * (1.0 / rho + 1.0 / rho1);
        if (clock + dc >= u) {
            const double f = (u - clock) / dc;
            const double a = y1 + f * (z1 - y1);
            const double s = rho + f * (rho1 - rho);
            return {a / s, s};
        }
        clock += dc;
        y1 = z1;
        y2 = z2;
    }
}

SkewProductReport skewproduct_check(double d1, double d2, double r1, double r2, double u, std::size_t n, double dt,
                                    RngStream rng, double eps)
{
    if (!(d1 + d2 >= 2.0)) throw std::invalid_argument("skewproduct_check: need d1 + d2 >= 2");
    const RngStream rs = rng.split(0), rj = rng.split(1);
    const double a = r1 * r1 / (r1 * r1 + r2 * r2);
    const auto pairs = replicate(n, [&](std::size_t i) {
        RngStream r = rs.split(i);
        return skewproduct_sample(d1, d2, r1, r2, u, r, eps);
    });
    const auto direct = replicate(n, [&](std::size_t i) {
        RngStream r = rj.split(i);
        const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(u / dt - 1e-9)));
        const double h = u / static_cast<double>(steps);
        double y = a;
        for (std::size_t k = 0; k < steps; ++k) y = jacobi_step(y, d1, d2, h, r.normal());
        return y;
    });
    std::vector<double> ratio(n), rho(n);
    for (std::size_t i = 0; i < n; ++i) {
        ratio[i] = pairs[i].first;
        rho[i] = pairs[i].second;
    }
    SkewProductReport rep{d1, d2, r1, r2, u, n, dt, {}, {}, 0.0, 0.0};
    rep.marginal = ks_two_sample(EmpiricalDistribution(ratio), EmpiricalDistribution(direct));
    rep.correlation = correlation(ratio, rho);
    rep.ratio_min = *std::min_element(ratio.begin(), ratio.end());
    rep.ratio_max = *std::max_element(ratio.begin(), ratio.end());
    return rep;
}

Bounds xi_bounds_reference(double v, double x)
{
    if (!(v > 0.0) || !(x > 0.0)) throw std::invalid_argument("xi_bounds_reference: v, x must be positive");
    const double e = std::exp(-kPi * kPi * v / (8.0 * x * x));
    return {2.0 / kPi * e, 9.0 * e};
}

double xi_modulus_reference(double t, double a, double x, double c)
{
    if (!(a > 0.0)) throw std::invalid_argument("xi_modulus_reference: a must be positive");
    return c * (t / a) * std::exp(-x * x / (9.0 * a));
}

ProbabilityEstimate xi_confinement(double kappa, double v, double x, std::size_t n, double dt, RngStream rng)
{
    if (!(v > 0.0) || !(x > 0.0) || !(dt > 0.0) || n < 1)
        throw std::invalid_argument("xi_confinement: need v, x, dt > 0 and n >= 1");
    const auto hits = replicate(n, [&](std::size_t i) -> int {
        RngStream r = rng.split(i);
        double xi = 0.0, s = 0.0;
        while (s < v) {
            const double h = std::min(dt, v - s);
            const double xi1 = xi_step(xi, kappa, h, r.normal());
            const double u = r.uniform();
            if (xi1 >= x) return 0;
            const double var = -std::expm1(-std::max(xi, xi1)) * h;
            if (var > 0.0 && u < std::exp(-2.0 * (x - xi) * (x - xi1) / var)) return 0;
            xi = xi1;
            s += h;
        }
        return 1;
    });
    ProbabilityEstimate est;
    est.n = n;
    for (int h : hits) est.successes += static_cast<std::size_t>(h);
    est.p_hat = static_cast<double>(est.successes) / static_cast<double>(n);
    est.ci = binomial_ci(est.successes, n);
    return est;
}

double xi_quadratic_variation_ratio(double kappa, double horizon, double dt, RngStream& rng)
{
    const XiPath p = simulate_xi(kappa, horizon, dt, rng);
    const auto& xs = p.path.values();
    double realized = 0.0, expected = 0.0;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        const double drift = -0.5 * kappa + 0.5 * (1.0 + kappa) * std::exp(-xs[k]);
        const double dm = xs[k + 1] - xs[k] - drift * dt;
        realized += dm * dm;
        expected += -std::expm1(-xs[k]) * dt;
    }
    return realized / expected;
}

} // namespace sinailab
