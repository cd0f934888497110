#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "sinailab/rng.hpp"

namespace sinailab {

/// Uniform grid t0 + k*dt, k = 0..n.
class TimeGrid {
public:
    TimeGrid(double t0, double dt, std::size_t n);

    double t0() const { return t0_; }
    double dt() const { return dt_; }
    std::size_t steps() const { return n_; }
    std::size_t points() const { return n_ + 1; }
    double time(std::size_t k) const { return t0_ + static_cast<double>(k) * dt_; }
    double end() const { return time(n_); }

    /// Grid covering [t0, t0 + horizon] with the last point at or beyond the horizon.
    static TimeGrid covering(double t0, double dt, double horizon);

private:
    double t0_;
    double dt_;
    std::size_t n_;
};

/// Process values on a TimeGrid.
class SamplePath {
public:
    SamplePath(TimeGrid grid, std::vector<double> values);

    const TimeGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    std::size_t size() const { return values_.size(); }

    /// Linear interpolation between knots; t is clamped to the grid.
    double at(double t) const;

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

/// Standard Brownian motion on the grid, started at 0.
SamplePath sample_brownian(const TimeGrid& grid, RngStream& rng);

/// Inserts Brownian-bridge midpoints `levels` times; knots keep their values.
SamplePath refine_bridge(const SamplePath& path, int levels, RngStream& rng);

enum class Side { left = 0, right = 1 };

/// Two-sided Brownian motion x -> W(x) on a fixed resolution grid, realised
/// lazily in blocks. Block b of a side is drawn from its own sub-stream keyed
/// by (side, b), so growing the extent never changes realised values.
/// Left values are stored with a sign-flipped abscissa: left(k) = W(-k*res).
class TwoSidedBrownian {
public:
    static constexpr std::size_t kBlock = 4096;

    TwoSidedBrownian(double resolution, RngStream rng);

    double resolution() const { return res_; }
    const RngStream& stream() const { return rng_; }

    /// Ensure indices 0..count-1 exist on the side.
    void ensure(Side side, std::size_t count);
    std::size_t realized(Side side) const { return values_[index(side)].size(); }
    const std::vector<double>& values(Side side) const { return values_[index(side)]; }

private:
    static std::size_t index(Side s) { return static_cast<std::size_t>(s); }

    double res_;
    RngStream rng_;
    std::vector<double> values_[2];
};

/// Two independent one-sided paths glued at the origin; the first covers
/// [0, extent_left] in |x| and represents x -> W(-x).
std::pair<SamplePath, SamplePath> sample_two_sided(double extent_left, double extent_right,
                                                   double dt, RngStream rng);

} // namespace sinailab
