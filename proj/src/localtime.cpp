#include "sinailab/localtime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sinailab/bessel.hpp"
#include "sinailab/parallel.hpp"

namespace sinailab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Probability that a Brownian bridge of variance `var` between values at
// distances d0, d1 >= 0 below a barrier touches it.
double bridge_cross(double d0, double d1, double var)
{
    if (d0 <= 0.0 || d1 <= 0.0) return 1.0;
    return std::exp(-2.0 * d0 * d1 / var);
}

} // namespace

double LocalTimeField::mass() const
{
    double s = 0.0;
    for (double v : values) s += v;
    return s * h;
}

double LocalTimeField::at(double y) const
{
    if (positions.empty() || y < positions.front() || y > positions.back()) return 0.0;
    const auto it = std::lower_bound(positions.begin(), positions.end(), y);
    const auto k = static_cast<std::size_t>(it - positions.begin());
    if (k == 0) return values[0];
    const double w = (y - positions[k - 1]) / (positions[k] - positions[k - 1]);
    return values[k - 1] + w * (values[k] - values[k - 1]);
}

StoppingRecord hitting_time_sigma(const SamplePath& path, double level, RngStream rng)
{
    StoppingRecord rec{StoppingKind::sigma, level, 0.0, false};
    const auto& v = path.values();
    const auto& g = path.grid();
    if (v[0] >= level) {
        rec.time = g.t0();
        return rec;
    }
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        const double u = rng.uniform();
        if (v[k + 1] > level || u < bridge_cross(level - v[k], level - v[k + 1], g.dt())) {
            rec.time = g.time(k + 1);
            return rec;
        }
    }
    rec.time = g.end();
    rec.censored = true;
    return rec;
}

StoppingRecord inverse_local_time_tau(const SamplePath& path, double r, double h)
{
    if (!(r > 0.0) || !(h > 0.0)) throw std::invalid_argument("inverse_local_time_tau: r, h must be positive");
    StoppingRecord rec{StoppingKind::tau, r, 0.0, false};
    const auto& v = path.values();
    const auto& g = path.grid();
    double occ = 0.0;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        if (std::fabs(v[k]) <= 0.5 * h) occ += g.dt();
        if (occ / h > r) {
            rec.time = g.time(k + 1);
            return rec;
        }
    }
    rec.time = g.end();
    rec.censored = true;
    return rec;
}

LocalTimeField estimate_local_time_field(const SamplePath& path, double up_to, double h)
{
    if (!(h > 0.0)) throw std::invalid_argument("estimate_local_time_field: h must be positive");
    const auto& g = path.grid();
    if (!(up_to > g.t0()) || up_to > g.end() + 1e-12 * std::fabs(g.end()))
        throw std::invalid_argument("estimate_local_time_field: up_to outside the path horizon");
    const auto& v = path.values();
    const auto bin = [h](double x) { return static_cast<long>(std::llround(x / h)); };
    long lo = bin(v[0]), hi = lo;
    std::size_t last = 0;
    for (std::size_t k = 0; k + 1 < v.size() && g.time(k) < up_to; ++k) {
        lo = std::min(lo, bin(v[k]));
        hi = std::max(hi, bin(v[k]));
        last = k;
    }
    LocalTimeField f;
    f.h = h;
    f.mode = FieldMode::path_estimate;
    f.positions.resize(static_cast<std::size_t>(hi - lo + 1));
    f.values.assign(f.positions.size(), 0.0);
    for (std::size_t i = 0; i < f.positions.size(); ++i) f.positions[i] = static_cast<double>(lo + static_cast<long>(i)) * h;
    for (std::size_t k = 0; k <= last; ++k) {
        const double span = std::min(g.dt(), up_to - g.time(k));
        f.values[static_cast<std::size_t>(bin(v[k]) - lo)] += span / h;
    }
    return f;
}

LocalTimeField ray_knight_field(double a, double truncation, double h, RngStream& rng)
{
    if (!(a > 0.0) || !(h > 0.0) || !(truncation >= 0.0))
        throw std::invalid_argument("ray_knight_field: need a > 0, h > 0, truncation >= 0");
    const double total = a + truncation;
    const auto steps = static_cast<std::size_t>(std::ceil(total / h - 1e-9));
    std::vector<double> xs(steps + 1), vals(steps + 1, 0.0);
    double z = 0.0;
    for (std::size_t k = 0; k <= steps; ++k) {
        xs[k] = std::min(total, static_cast<double>(k) * h);
        if (k == 0) continue;
        const double x0 = xs[k - 1], x1 = xs[k];
        if (x1 <= a) {
            z = sample_besq_transition(2.0, z, x1 - x0, rng);
        } else if (x0 >= a) {
            if (z > 0.0) z = sample_besq_transition(0.0, z, x1 - x0, rng);
        } else {
            z = sample_besq_transition(2.0, z, a - x0, rng);
            z = sample_besq_transition(0.0, z, x1 - a, rng);
        }
        vals[k] = z;
    }
    LocalTimeField f;
    f.h = h;
    f.mode = FieldMode::ray_knight_exact;
    f.positions.resize(xs.size());
    f.values.resize(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        f.positions[xs.size() - 1 - k] = a - xs[k];
        f.values[xs.size() - 1 - k] = vals[k];
    }
    return f;
}

std::vector<double> ray_knight_at(double a, const std::vector<double>& points, RngStream& rng)
{
    if (!(a > 0.0)) throw std::invalid_argument("ray_knight_at: need a > 0");
    std::vector<std::size_t> order(points.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        if (!(points[j] <= a)) throw std::invalid_argument("ray_knight_at: points must not exceed a");
        order[j] = j;
    }
    // descending y is ascending x = a - y
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return points[i] > points[j]; });
    std::vector<double> out(points.size(), 0.0);
    double z = 0.0, x = 0.0;
    for (std::size_t j : order) {
        const double x1 = a - points[j];
        if (x1 > x) {
            if (x1 <= a) {
                z = sample_besq_transition(2.0, z, x1 - x, rng);
            } else if (x >= a) {
                if (z > 0.0) z = sample_besq_transition(0.0, z, x1 - x, rng);
            } else {
                z = sample_besq_transition(2.0, z, a - x, rng);
                if (z > 0.0) z = sample_besq_transition(0.0, z, x1 - a, rng);
            }
            x = x1;
        }
        out[j] = z;
    }
    return out;
}

double exit_area_sample(double a, double b, RngStream& rng, std::size_t n_steps)
{
    if (!(a >= 0.0) || !(b > a)) throw std::invalid_argument("exit_area_sample: need 0 <= a < b");
    if (n_steps < 1) throw std::invalid_argument("exit_area_sample: need at least one step");
    const double len = b - a;
    const double h = len / static_cast<double>(n_steps);
    double z = 0.0, sum = 0.0;
    for (std::size_t k = 1; k <= n_steps; ++k) {
        const double z1 = sample_besq_transition(2.0, z, h, rng);
        sum += 0.5 * (z + z1);
        z = z1;
    }
    return sum * h;
}

Bounds exit_area_bounds(double a, double b, double v)
{
    if (!(v > 0.0) || !(b > a) || !(a >= 0.0)) throw std::invalid_argument("exit_area_bounds: need v > 0, b > a >= 0");
    const double e = std::exp(-kPi * kPi / 8.0 * v / ((b - a) * (b - a)));
    return {2.0 / kPi * e, 4.0 / kPi * e};
}

double abs_bm_exit_time(double level, double dt, RngStream& rng)
{
    if (!(level > 0.0) || !(dt > 0.0)) throw std::invalid_argument("abs_bm_exit_time: level, dt > 0");
    double b = 0.0, t = 0.0;
    for (;;) {
        const double d = level - std::fabs(b);
        const double step = std::max(dt, 0.01 * d * d);
        const double b1 = b + std::sqrt(step) * rng.normal();
        t += step;
        if (std::fabs(b1) >= level) return t;
        const double pu = bridge_cross(level - b, level - b1, step);
        const double pl = bridge_cross(level + b, level + b1, step);
        if (rng.uniform() < pu + pl - pu * pl) return t;
        b = b1;
    }
}

WeightedAreaSample exp_weighted_area_sample(double r, AreaSide side, double a, RngStream& rng,
                                            const WeightedAreaOptions& options)
{
    if (!(r > 0.0)) throw std::invalid_argument("exp_weighted_area_sample: r must be positive");
    if (side == AreaSide::full && !(a <= r)) throw std::invalid_argument("exp_weighted_area_sample: need a <= r");
    const double h = options.h;
    WeightedAreaSample out;
    double total = 0.0;
    double z;
    if (side == AreaSide::full && a > 0.0) {
        // Positive part: y from a down to 0, field coordinate x = r - y.
        z = r - a > 0.0 ? sample_besq_transition(2.0, 0.0, r - a, rng) : 0.0;
        const auto steps = static_cast<std::size_t>(std::ceil(a / h - 1e-9));
        double y = a;
        for (std::size_t k = 0; k < steps; ++k) {
            const double y1 = std::max(0.0, y - h);
            const double z1 = sample_besq_transition(2.0, z, y - y1, rng);
            total += 0.5 * (std::exp(-y) * z + std::exp(-y1) * z1) * (y - y1);
            z = z1;
            y = y1;
        }
    } else {
        // Field at the origin; for a <= 0 the weight covers only y <= a.
        z = sample_besq_transition(2.0, 0.0, r, rng);
    }
    // Negative side: BESQ(0) in s = -y.
    double s = 0.0;
    const double s_start = side == AreaSide::full ? std::max(0.0, -a) : 0.0;
    if (s_start > 0.0) {
        z = sample_besq_transition(0.0, z, s_start, rng);
        s = s_start;
    }
    std::size_t k = 0;
    while (z > 0.0) {
        if (k++ >= options.max_steps) {
            out.truncated = true;
            out.remainder = std::exp(-s) * z;
            break;
        }
        const double z1 = sample_besq_transition(0.0, z, h, rng);
        total += 0.5 * (std::exp(-s) * z + std::exp(-(s + h)) * z1) * h;
        z = z1;
        s += h;
        if (std::exp(-s) * z < options.relative_tol * total) {
            total += std::exp(-s) * z;
            break;
        }
    }
    out.value = total;
    return out;
}

FunctionalSample gs_functional_sample(double kappa, double a, double b, RngStream& rng, double dt,
                                      const WalkOptions& options)
{
    if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("gs_functional: kappa must lie in (0, 1]");
    if (!(a > 0.0) || !(b > a)) throw std::invalid_argument("gs_functional: need 0 < a < b");
    if (!(dt > 0.0)) throw std::invalid_argument("gs_functional: dt must be positive");
    const double p = 1.0 / kappa - 2.0;
    const auto f = [&](double x) { return p == 0.0 ? 1.0 : std::pow(b - x, p); };
    double x = 0.0, value = 0.0, fx = f(0.0);
    const double frac2 = options.step_fraction * options.step_fraction;
    for (std::size_t k = 0; k < options.max_steps; ++k) {
        const double d = a - x;
        const double step = std::max(dt, frac2 * d * d);
        const double x1 = x + std::sqrt(step) * rng.normal();
        const double u = rng.uniform();
        if (x1 >= a || u < bridge_cross(d, a - x1, step)) {
            value += fx * step;
            return {std::min(value, options.cap), value >= options.cap};
        }
        const double f1 = f(x1);
        value += 0.5 * (fx + f1) * step;
        if (value >= options.cap) return {options.cap, true};
        x = x1;
        fx = f1;
    }
    return {std::min(value, options.cap), true};
}

std::vector<double> local_time_at_sigma(double level, const std::vector<double>& points, double h,
                                        double dt, RngStream& rng)
{
    if (!(level > 0.0) || !(h > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("local_time_at_sigma: level, h, dt must be positive");
    std::vector<double> occ(points.size(), 0.0);
    // bins are resolved with at least 8 steps of spread across their width
    const double floor_step = std::min(dt, h * h / 64.0);
    double x = 0.0;
    for (;;) {
        double d = level - x;
        std::size_t in_bin = points.size();
        for (std::size_t j = 0; j < points.size(); ++j) {
            const double e = std::fabs(x - points[j]) - 0.5 * h;
            if (e <= 0.0) in_bin = j;
            d = std::min(d, std::max(0.0, e));
        }
        const double step = std::max(floor_step, d * d / 16.0);
        if (in_bin < points.size()) occ[in_bin] += step;
        const double x1 = x + std::sqrt(step) * rng.normal();
        if (x1 > level || rng.uniform() < bridge_cross(level - x, level - x1, step)) break;
        x = x1;
    }
    for (auto& o : occ) o /= h;
    return occ;
}

ProbabilityEstimate psi_estimate(double x, std::size_t n, RngStream rng, double h, double dt)
{
    if (n < 1) throw std::invalid_argument("psi_estimate: n must be >= 1");
    if (!(x > 0.0)) throw std::invalid_argument("psi_estimate: x must be positive");
    const long half = static_cast<long>(std::floor(0.5 / h + 1e-9));
    const auto hits = replicate(n, [&](std::size_t i) -> int {
        RngStream r = rng.split(i);
        std::vector<double> occ(static_cast<std::size_t>(2 * half + 1), 0.0);
        double b = 0.0;
        for (;;) {
            const double ab = std::fabs(b);
            double step = dt;
            if (ab > 0.5 + 0.5 * h) {
                const double d = std::min(ab - 0.5 - 0.5 * h, 1.0 - ab);
                step = std::max(dt, d * d / 16.0);
            } else {
                const long j = std::lround(b / h);
                if (std::labs(j) <= half) occ[static_cast<std::size_t>(j + half)] += dt;
            }
            const double b1 = b + std::sqrt(step) * r.normal();
            if (std::fabs(b1) >= 1.0) break;
            const double pu = bridge_cross(1.0 - b, 1.0 - b1, step);
            const double pl = bridge_cross(1.0 + b, 1.0 + b1, step);
            if (r.uniform() < pu + pl - pu * pl) break;
            b = b1;
        }
        const double inf = *std::min_element(occ.begin(), occ.end()) / h;
        return inf < x ? 1 : 0;
    });
    ProbabilityEstimate est;
    est.n = n;
    for (int hflag : hits) est.successes += static_cast<std::size_t>(hflag);
    est.p_hat = static_cast<double>(est.successes) / static_cast<double>(n);
    est.ci = binomial_ci(est.successes, n);
    return est;
}

} // namespace sinailab
