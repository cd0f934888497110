#include "sinailab/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sinailab {

TimeGrid::TimeGrid(double t0, double dt, std::size_t n) : t0_(t0), dt_(dt), n_(n)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TimeGrid: dt must be positive");
    if (n < 1) throw std::invalid_argument("TimeGrid: need at least one step");
    if (!std::isfinite(t0)) throw std::invalid_argument("TimeGrid: t0 must be finite");
}

TimeGrid TimeGrid::covering(double t0, double dt, double horizon)
{
    if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
    const double steps = std::ceil(horizon / dt - 1e-9);
    return TimeGrid(t0, dt, static_cast<std::size_t>(std::max(1.0, steps)));
}

SamplePath::SamplePath(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.points())
        throw std::invalid_argument("SamplePath: value count must equal grid points");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("SamplePath: non-finite value");
}

double SamplePath::at(double t) const
{
    const double u = (t - grid_.t0()) / grid_.dt();
    if (u <= 0.0) return values_.front();
    if (u >= static_cast<double>(grid_.steps())) return values_.back();
    const auto k = static_cast<std::size_t>(u);
    const double frac = u - static_cast<double>(k);
    return values_[k] + frac * (values_[k + 1] - values_[k]);
}

SamplePath sample_brownian(const TimeGrid& grid, RngStream& rng)
{
    std::vector<double> v(grid.points());
    const double sd = std::sqrt(grid.dt());
    v[0] = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) v[k] = v[k - 1] + sd * rng.normal();
    return SamplePath(grid, std::move(v));
}

SamplePath refine_bridge(const SamplePath& path, int levels, RngStream& rng)
{
    if (levels < 1) throw std::invalid_argument("refine_bridge: levels must be >= 1");
    std::vector<double> cur = path.values();
    double dt = path.grid().dt();
    for (int level = 0; level < levels; ++level) {
        // Midpoint of a bridge over dt: mean of the knots, variance dt/4.
        const double sd = 0.5 * std::sqrt(dt);
        std::vector<double> next(2 * (cur.size() - 1) + 1);
        for (std::size_t k = 0; k + 1 < cur.size(); ++k) {
            next[2 * k] = cur[k];
            next[2 * k + 1] = 0.5 * (cur[k] + cur[k + 1]) + sd * rng.normal();
        }
        next.back() = cur.back();
        cur = std::move(next);
        dt *= 0.5;
    }
    const TimeGrid grid(path.grid().t0(), dt, cur.size() - 1);
    return SamplePath(grid, std::move(cur));
}

TwoSidedBrownian::TwoSidedBrownian(double resolution, RngStream rng) : res_(resolution), rng_(rng)
{
    if (!(resolution > 0.0)) throw std::invalid_argument("TwoSidedBrownian: resolution must be positive");
    values_[0].push_back(0.0);
    values_[1].push_back(0.0);
}

void TwoSidedBrownian::ensure(Side side, std::size_t count)
{
    auto& v = values_[index(side)];
    const double sd = std::sqrt(res_);
    while (v.size() < count) {
        // Points 1 + b*kBlock .. (b+1)*kBlock belong to block b.
        const std::size_t block = (v.size() - 1) / kBlock;
        RngStream sub = rng_.split(mix64((static_cast<std::uint64_t>(index(side)) << 40) ^ block));
        v.reserve(v.size() + kBlock);
        double w = v.back();
        for (std::size_t i = 0; i < kBlock; ++i) {
            w += sd * sub.normal();
            v.push_back(w);
        }
    }
}

std::pair<SamplePath, SamplePath> sample_two_sided(double extent_left, double extent_right,
                                                   double dt, RngStream rng)
{
    if (!(extent_left > 0.0) || !(extent_right > 0.0))
        throw std::invalid_argument("sample_two_sided: extents must be positive");
    TwoSidedBrownian w(dt, rng);
    const TimeGrid gl = TimeGrid::covering(0.0, dt, extent_left);
    const TimeGrid gr = TimeGrid::covering(0.0, dt, extent_right);
    w.ensure(Side::left, gl.points());
    w.ensure(Side::right, gr.points());
    const auto& l = w.values(Side::left);
    const auto& r = w.values(Side::right);
    return {SamplePath(gl, std::vector<double>(l.begin(), l.begin() + gl.points())),
            SamplePath(gr, std::vector<double>(r.begin(), r.begin() + gr.points()))};
}

} // namespace sinailab
