#include "sinailab/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sinailab {

double sample_besq_transition(double delta, double x0, double dt, RngStream& rng)
{
    if (!(delta >= 0.0)) throw std::invalid_argument("besq: dimension must be nonnegative");
    if (!(x0 >= 0.0)) throw std::invalid_argument("besq: start must be nonnegative");
    if (!(dt > 0.0)) throw std::invalid_argument("besq: step must be positive");
    if (delta >= 1.0) {
        const double g = std::sqrt(x0) + std::sqrt(dt) * rng.normal();
        double y = g * g;
        if (delta > 1.0) y += 2.0 * dt * rng.gamma(0.5 * (delta - 1.0));
        return y;
    }
    const double n = x0 > 0.0 ? static_cast<double>(rng.poisson(x0 / (2.0 * dt))) : 0.0;
    const double shape = 0.5 * delta + n;
    if (shape == 0.0) return 0.0;
    return 2.0 * dt * rng.gamma(shape);
}

SamplePath sample_besq_path(const BesselSpec& spec, const TimeGrid& grid, RngStream& rng)
{
    if (!(spec.dimension >= 0.0)) throw std::invalid_argument("besq path: dimension must be nonnegative");
    if (!(spec.start >= 0.0)) throw std::invalid_argument("besq path: start must be nonnegative");
    std::vector<double> v(grid.points());
    v[0] = spec.start;
    for (std::size_t k = 1; k < v.size(); ++k)
        v[k] = sample_besq_transition(spec.dimension, v[k - 1], grid.dt(), rng);
    return SamplePath(grid, std::move(v));
}

HittingSample sample_bes_hitting(double delta, double from, double to, double dt, RngStream& rng,
                                 const HittingOptions& options)
{
    if (!(to > 0.0) || !(from > to)) throw std::invalid_argument("bes hitting: need from > to > 0");
    if (!(delta >= 0.0 && delta <= 2.0))
        throw std::invalid_argument("bes hitting: dimension must lie in [0, 2]");
    if (!(dt > 0.0)) throw std::invalid_argument("bes hitting: dt must be positive");
    HittingSample out{from, to, 0.0, false};
    double t = 0.0;
    double y = from * from;
    double r = from;
    for (;;) {
        const double dist = r - to;
        double step = std::max(dt, options.step_fraction * options.step_fraction * dist * dist);
        if (t + step >= options.horizon) step = options.horizon - t;
        const double y1 = sample_besq_transition(delta, y, step, rng);
        const double r1 = std::sqrt(y1);
        t += step;
        const double u = rng.uniform();
        if (r1 <= to || u < std::exp(-2.0 * dist * (r1 - to) / step)) {
            out.duration = t;
            return out;
        }
        if (t >= options.horizon) {
            out.duration = options.horizon;
            out.censored = true;
            return out;
        }
        y = y1;
        r = r1;
    }
}

} // namespace sinailab
