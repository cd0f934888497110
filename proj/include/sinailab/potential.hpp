#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sinailab/brownian.hpp"
#include "sinailab/rng.hpp"

namespace sinailab {

/// Two-sided potential W on the grid x = k * resolution with drift kappa,
/// W_kappa(x) = W(x) - kappa x / 2. Alongside W each side keeps the
/// cumulative trapezoidal integral of e^{W_kappa} from the origin, so
/// A_kappa is piecewise linear between grid points and its inverse is exact
/// on that interpolant.
///
/// Const queries never extend; they throw std::out_of_range past the
/// realised extent. realize() extends a sampled potential in blocks; loaded
/// or explicitly constructed potentials are frozen.
class Potential {
public:
    Potential(double kappa, double resolution, RngStream rng);

    /// Frozen potential from explicit values; left[k] = W(-k res), right[k] = W(k res).
    static Potential from_values(double kappa, double resolution, std::vector<double> left,
                                 std::vector<double> right, std::uint64_t seed = 0,
                                 std::uint64_t stream_id = 0);

    /// W = 0 on [-extent, extent].
    static Potential flat(double kappa, double resolution, double extent);

    double kappa() const { return kappa_; }
    double resolution() const { return res_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    bool frozen() const { return !base_.has_value(); }

    /// Realised interval [x_min, x_max].
    double x_min() const;
    double x_max() const;

    /// Extends the realised extent to cover [lo, hi]. Throws std::out_of_range
    /// if frozen and not covered, or if max_points per side would be exceeded.
    void realize(double lo, double hi);
    void set_max_points(std::size_t n) { max_points_ = n; }
    std::size_t max_points() const { return max_points_; }

    double w(double x) const;
    double w_kappa(double x) const { return w(x) - 0.5 * kappa_ * x; }
    double a_kappa(double x) const;
    double a_kappa_inverse(double u) const;

    /// Extends as needed before evaluating.
    double a_kappa_inverse_extend(double u);

    /// Realised grid: index i in [-(n_left-1), n_right-1] at x = i * res.
    long index_min() const { return -static_cast<long>(left_.w.size()) + 1; }
    long index_max() const { return static_cast<long>(right_.w.size()) - 1; }
    double w_at(long i) const { return i < 0 ? left_.w[static_cast<std::size_t>(-i)] : right_.w[static_cast<std::size_t>(i)]; }
    double a_at(long i) const { return i < 0 ? -left_.a[static_cast<std::size_t>(-i)] : right_.a[static_cast<std::size_t>(i)]; }
    double x_at(long i) const { return static_cast<double>(i) * res_; }

    /// Largest grid index with x_at(i) <= x.
    long floor_index(double x) const;

    /// Serialization. CSV: comment header then "x,W" rows in %.17g.
    /// Binary: magic "SINAIPOT", u32 version, f64 kappa, f64 resolution,
    /// u64 seed, u64 stream, u64 count, then count (x, W) f64 pairs,
    /// little-endian, ascending in x.
    void save_csv(std::ostream& out) const;
    void save_binary(std::ostream& out) const;
    static Potential load_csv(std::istream& in);
    static Potential load_binary(std::istream& in);
    void save(const std::string& path) const;
    static Potential load(const std::string& path);

private:
    struct SideData {
        std::vector<double> w;
        std::vector<double> a;
    };

    Potential(double kappa, double resolution, std::uint64_t seed, std::uint64_t stream_id);
    void rebuild(SideData& side, double sign, std::size_t from);
    void grow(Side side, std::size_t count);

    double kappa_;
    double res_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::optional<TwoSidedBrownian> base_;
    SideData left_;
    SideData right_;
    std::size_t max_points_ = 1'000'000;
};

struct Oscillation {
    double w_bar = 0.0;
    double w_under = 0.0;
    double sharp_ab = 0.0;
    double sharp_ba = 0.0;
};

/// Sup, inf and the two directed oscillations of W over the segment between
/// a and b: sharp_ab is the largest rise met travelling from a to b.
Oscillation oscillation_stats(const Potential& p, double a, double b);

struct ValleyReport {
    double v = 0.0;
    double r = 0.0;
    double eps = 0.0;
    double d_minus = 0.0;
    double eta = 0.0;
    double alpha = 0.0;
    double m = 0.0;
};

/// Grid scans for d_-(r), eta, alpha and m, extending the potential on demand.
/// Throws std::runtime_error when the extension budget is exhausted.
ValleyReport valley_times(Potential& p, double v, double r, double eps);

struct EventFlags {
    bool f1 = false, f2 = false, f3 = false, f4 = false;
    bool f1_width = false, f1_depth = false, f1_mass = false;
    bool f2_sharp = false, f2_max = false;
    bool f3_width = false, f3_rise = false, f3_sharp = false, f3_mass = false;
    bool f4_width = false, f4_drop = false, f4_sharp_eta_m = false, f4_sharp_alpha_eta = false,
         f4_local = false, f4_mass = false;
};

EventFlags event_flags(const Potential& p, const ValleyReport& valley);

/// Only F2, which needs W on [0, v] alone.
bool f2_flag(const Potential& p, double v, double r, double eps);

/// (4 sin(pi / (6 (1 - 20 eps))) / pi) exp(-pi^2 v / (8 (1 - 20 eps)^2 r^2)).
double f2_asymptotic_reference(double v, double r, double eps);

/// Trapezoid of e^{W(y) - W(x0)} over [from, to] (from < to).
double exp_integral(const Potential& p, double from, double to, double shift);

/// min( int_a^x e^{W(y)-W(x)} dy, int_x^c e^{W(y)-W(x)} dy ).
double gamma_functional(const Potential& p, double a, double x, double c);

} // namespace sinailab
