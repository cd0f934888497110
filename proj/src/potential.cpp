#include "sinailab/potential.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sinailab/errors.hpp"

namespace sinailab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr char kMagic[8] = {'S', 'I', 'N', 'A', 'I', 'P', 'O', 'T'};
constexpr std::uint32_t kBinaryVersion = 1;

template <class T>
void write_le(std::ostream& out, T value)
{
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T read_le(std::istream& in)
{
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if (!in) throw IoError("potential: truncated binary file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Values along the segment from a to b: interpolated endpoints and every
// grid point strictly between.
template <class F>
void for_segment(const Potential& p, double a, double b, F&& f)
{
    const double lo = std::min(a, b), hi = std::max(a, b);
    const long i_lo = p.floor_index(lo) + 1;
    const long i_hi = p.floor_index(hi);
    if (a <= b) {
        f(a, p.w(a));
        for (long i = i_lo; i <= i_hi; ++i)
            if (p.x_at(i) > lo && p.x_at(i) < hi) f(p.x_at(i), p.w_at(i));
        f(b, p.w(b));
    } else {
        f(a, p.w(a));
        for (long i = i_hi; i >= i_lo; --i)
            if (p.x_at(i) > lo && p.x_at(i) < hi) f(p.x_at(i), p.w_at(i));
        f(b, p.w(b));
    }
}

} // namespace

Potential::Potential(double kappa, double resolution, std::uint64_t seed, std::uint64_t stream_id)
    : kappa_(kappa), res_(resolution), seed_(seed), stream_id_(stream_id)
{
    if (!(kappa >= 0.0)) throw std::invalid_argument("Potential: kappa must be nonnegative");
    if (!(resolution > 0.0)) throw std::invalid_argument("Potential: resolution must be positive");
}

Potential::Potential(double kappa, double resolution, RngStream rng)
    : Potential(kappa, resolution, rng.seed(), rng.stream_id())
{
    base_.emplace(resolution, rng);
    left_.w = {0.0};
    left_.a = {0.0};
    right_.w = {0.0};
    right_.a = {0.0};
    grow(Side::left, 2);
    grow(Side::right, 2);
}

Potential Potential::from_values(double kappa, double resolution, std::vector<double> left,
                                 std::vector<double> right, std::uint64_t seed, std::uint64_t stream_id)
{
    if (left.empty() || right.empty() || left[0] != right[0])
        throw std::invalid_argument("Potential: sides must share the origin value");
    if (left.size() + right.size() < 3) throw std::invalid_argument("Potential: need at least one cell");
    for (double x : left)
        if (!std::isfinite(x)) throw std::invalid_argument("Potential: non-finite value");
    for (double x : right)
        if (!std::isfinite(x)) throw std::invalid_argument("Potential: non-finite value");
    Potential p(kappa, resolution, seed, stream_id);
    p.left_.w = std::move(left);
    p.right_.w = std::move(right);
    p.left_.a.assign(p.left_.w.size(), 0.0);
    p.right_.a.assign(p.right_.w.size(), 0.0);
    p.rebuild(p.left_, -1.0, 1);
    p.rebuild(p.right_, 1.0, 1);
    return p;
}

Potential Potential::flat(double kappa, double resolution, double extent)
{
    const auto n = static_cast<std::size_t>(std::ceil(extent / resolution - 1e-9)) + 1;
    return from_values(kappa, resolution, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0));
}

void Potential::rebuild(SideData& side, double sign, std::size_t from)
{
    side.a.resize(side.w.size());
    auto wk = [&](std::size_t k) { return side.w[k] - 0.5 * kappa_ * sign * static_cast<double>(k) * res_; };
    double prev = std::exp(wk(from - 1));
    for (std::size_t k = from; k < side.w.size(); ++k) {
        const double cur = std::exp(wk(k));
        side.a[k] = side.a[k - 1] + 0.5 * res_ * (prev + cur);
        prev = cur;
    }
}

void Potential::grow(Side side, std::size_t count)
{
    if (!base_) throw std::out_of_range("Potential: frozen potential cannot be extended");
    if (count > max_points_) throw std::out_of_range("Potential: extension budget exhausted");
    auto& data = side == Side::left ? left_ : right_;
    const std::size_t old = data.w.size();
    if (count <= old) return;
    base_->ensure(side, count);
    const auto& src = base_->values(side);
    const std::size_t take = std::min(src.size(), max_points_);
    data.w.assign(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(take));
    rebuild(data, side == Side::left ? -1.0 : 1.0, old);
}

double Potential::x_min() const { return -static_cast<double>(left_.w.size() - 1) * res_; }
double Potential::x_max() const { return static_cast<double>(right_.w.size() - 1) * res_; }

void Potential::realize(double lo, double hi)
{
    const auto need = [this](double x) {
        return static_cast<std::size_t>(std::ceil(std::fabs(x) / res_ - 1e-9)) + 2;
    };
    if (lo < x_min()) {
        if (frozen()) throw std::out_of_range("Potential: frozen extent does not cover the request");
        grow(Side::left, need(lo));
    }
    if (hi > x_max()) {
        if (frozen()) throw std::out_of_range("Potential: frozen extent does not cover the request");
        grow(Side::right, need(hi));
    }
}

long Potential::floor_index(double x) const { return static_cast<long>(std::floor(x / res_)); }

double Potential::w(double x) const
{
    if (x < x_min() || x > x_max()) throw std::out_of_range("Potential: query outside realised extent");
    const long i = std::clamp(floor_index(x), index_min(), index_max());
    if (i == index_max()) return w_at(i);
    const double frac = (x - x_at(i)) / res_;
    return w_at(i) + frac * (w_at(i + 1) - w_at(i));
}

double Potential::a_kappa(double x) const
{
    if (x < x_min() || x > x_max()) throw std::out_of_range("Potential: query outside realised extent");
    const long i = std::clamp(floor_index(x), index_min(), index_max());
    if (i == index_max()) return a_at(i);
    const double frac = (x - x_at(i)) / res_;
    return a_at(i) + frac * (a_at(i + 1) - a_at(i));
}

double Potential::a_kappa_inverse(double u) const
{
    const SideData& side = u >= 0.0 ? right_ : left_;
    const double target = std::fabs(u);
    if (target > side.a.back()) throw std::out_of_range("Potential: A_kappa inverse outside realised range");
    if (target == 0.0) return 0.0;
    const auto it = std::lower_bound(side.a.begin(), side.a.end(), target);
    const auto k = static_cast<std::size_t>(it - side.a.begin());
    const double frac = (target - side.a[k - 1]) / (side.a[k] - side.a[k - 1]);
    const double mag = (static_cast<double>(k - 1) + frac) * res_;
    return u >= 0.0 ? mag : -mag;
}

double Potential::a_kappa_inverse_extend(double u)
{
    const Side s = u >= 0.0 ? Side::right : Side::left;
    SideData& side = u >= 0.0 ? right_ : left_;
    while (std::fabs(u) > side.a.back()) {
        if (frozen()) throw std::out_of_range("Potential: A_kappa inverse outside frozen range");
        if (side.w.size() >= max_points_)
            throw std::out_of_range("Potential: A_kappa inverse unreachable within extension budget");
        grow(s, std::min(max_points_, side.w.size() + TwoSidedBrownian::kBlock));
    }
    return a_kappa_inverse(u);
}

void Potential::save_csv(std::ostream& out) const
{
    out << "# sinailab potential\n";
    out << "# kappa=" << fmt17(kappa_) << "\n";
    out << "# resolution=" << fmt17(res_) << "\n";
    out << "# seed=" << seed_ << "\n";
    out << "# stream=" << stream_id_ << "\n";
    out << "x,W\n";
    for (long i = index_min(); i <= index_max(); ++i) out << fmt17(x_at(i)) << ',' << fmt17(w_at(i)) << '\n';
    if (!out) throw IoError("potential: write failed");
}

void Potential::save_binary(std::ostream& out) const
{
    out.write(kMagic, sizeof kMagic);
    write_le<std::uint32_t>(out, kBinaryVersion);
    write_le<double>(out, kappa_);
    write_le<double>(out, res_);
    write_le<std::uint64_t>(out, seed_);
    write_le<std::uint64_t>(out, stream_id_);
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(index_max() - index_min() + 1));
    for (long i = index_min(); i <= index_max(); ++i) {
        write_le<double>(out, x_at(i));
        write_le<double>(out, w_at(i));
    }
    if (!out) throw IoError("potential: write failed");
}

namespace {

Potential assemble(double kappa, double res, std::uint64_t seed, std::uint64_t stream,
                   const std::vector<double>& xs, const std::vector<double>& ws)
{
    if (xs.empty()) throw IoError("potential: no samples");
    const long first = std::lround(xs.front() / res);
    if (first > 0) throw IoError("potential: samples must include the origin");
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const long i = first + static_cast<long>(j);
        if (static_cast<double>(i) * res != xs[j]) throw IoError("potential: abscissa off the grid");
    }
    const auto origin = static_cast<std::size_t>(-first);
    if (origin >= xs.size()) throw IoError("potential: samples must include the origin");
    std::vector<double> left(ws.rend() - static_cast<std::ptrdiff_t>(origin + 1), ws.rend());
    std::vector<double> right(ws.begin() + static_cast<std::ptrdiff_t>(origin), ws.end());
    return Potential::from_values(kappa, res, std::move(left), std::move(right), seed, stream);
}

} // namespace

Potential Potential::load_csv(std::istream& in)
{
    double kappa = 0.0, res = 0.0;
    std::uint64_t seed = 0, stream = 0;
    bool have_kappa = false, have_res = false;
    std::vector<double> xs, ws;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string val = line.substr(eq + 1);
            if (key == "kappa") { kappa = std::strtod(val.c_str(), nullptr); have_kappa = true; }
            else if (key == "resolution") { res = std::strtod(val.c_str(), nullptr); have_res = true; }
            else if (key == "seed") seed = std::strtoull(val.c_str(), nullptr, 10);
            else if (key == "stream") stream = std::strtoull(val.c_str(), nullptr, 10);
            continue;
        }
        if (line == "x,W") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("potential: malformed CSV row");
        char* end = nullptr;
        xs.push_back(std::strtod(line.c_str(), &end));
        ws.push_back(std::strtod(line.c_str() + comma + 1, &end));
    }
    if (!have_kappa || !have_res) throw IoError("potential: CSV header lacks kappa or resolution");
    return assemble(kappa, res, seed, stream, xs, ws);
}

Potential Potential::load_binary(std::istream& in)
{
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw IoError("potential: bad magic");
    if (read_le<std::uint32_t>(in) != kBinaryVersion) throw IoError("potential: unsupported version");
    const double kappa = read_le<double>(in);
    const double res = read_le<double>(in);
    const auto seed = read_le<std::uint64_t>(in);
    const auto stream = read_le<std::uint64_t>(in);
    const auto count = read_le<std::uint64_t>(in);
    std::vector<double> xs(count), ws(count);
    for (std::uint64_t j = 0; j < count; ++j) {
        xs[j] = read_le<double>(in);
        ws[j] = read_le<double>(in);
    }
    return assemble(kappa, res, seed, stream, xs, ws);
}

void Potential::save(const std::string& path) const
{
    const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    std::ofstream out(path, csv ? std::ios::out : std::ios::out | std::ios::binary);
    if (!out) throw IoError("potential: cannot open " + path);
    csv ? save_csv(out) : save_binary(out);
}

Potential Potential::load(const std::string& path)
{
    const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    std::ifstream in(path, csv ? std::ios::in : std::ios::in | std::ios::binary);
    if (!in) throw IoError("potential: cannot open " + path);
    return csv ? load_csv(in) : load_binary(in);
}

Oscillation oscillation_stats(const Potential& p, double a, double b)
{
    if (a == b) throw std::invalid_argument("oscillation_stats: need a != b");
    Oscillation o;
    bool first = true;
    double run_min = 0.0, run_max = 0.0;
    for_segment(p, a, b, [&](double, double w) {
        if (first) {
            o.w_bar = o.w_under = run_min = run_max = w;
            first = false;
        }
        run_min = std::min(run_min, w);
        run_max = std::max(run_max, w);
        o.w_bar = std::max(o.w_bar, w);
        o.w_under = std::min(o.w_under, w);
        o.sharp_ab = std::max(o.sharp_ab, w - run_min);
        o.sharp_ba = std::max(o.sharp_ba, run_max - w);
    });
    return o;
}

namespace {

// Makes sure grid index i exists, extending by blocks.
void ensure_index(Potential& p, long i)
{
    if (i >= p.index_min() && i <= p.index_max()) return;
    const double x = p.x_at(i);
    const double pad = static_cast<double>(TwoSidedBrownian::kBlock) * p.resolution();
    try {
        p.realize(std::min(x - (x < 0 ? pad : 0.0), p.x_min()), std::max(x + (x > 0 ? pad : 0.0), p.x_max()));
    } catch (const std::out_of_range&) {
        p.realize(std::min(x, p.x_min()), std::max(x, p.x_max()));
    }
}

} // namespace

ValleyReport valley_times(Potential& p, double v, double r, double eps)
{
    if (!(r > 0.0)) throw std::invalid_argument("valley_times: r must be positive");
    if (!(eps > 0.0 && eps < 0.05)) throw std::invalid_argument("valley_times: eps must lie in (0, 1/20)");
    if (!(v > 0.0)) throw std::invalid_argument("valley_times: v must be positive");
    ValleyReport rep{v, r, eps, 0.0, 0.0, 0.0, 0.0};
    try {
        // d_-(r): leftward scan with the running maximum over [t, 0].
        double run_max = p.w_at(0);
        for (long i = -1;; --i) {
            ensure_index(p, i);
            const double w = p.w_at(i);
            run_max = std::max(run_max, w);
            if (run_max - w > r) {
                rep.d_minus = p.x_at(i);
                break;
            }
        }
        const long iv = std::lround(v / p.resolution());
        ensure_index(p, iv);
        rep.v = p.x_at(iv);
        const double wv = p.w_at(iv);
        long ieta = iv;
        for (long i = iv + 1;; ++i) {
            ensure_index(p, i);
            if (p.w_at(i) - wv <= -(1.0 - 3.0 * eps) * r) {
                ieta = i;
                break;
            }
        }
        const double weta = p.w_at(ieta);
        long ialpha = ieta;
        for (long i = ieta + 1;; ++i) {
            ensure_index(p, i);
            if (p.w_at(i) - weta >= r) {
                ialpha = i;
                break;
            }
        }
        long im = ieta + 1;
        for (long i = ieta + 1; i <= ialpha; ++i)
            if (p.w_at(i) < p.w_at(im)) im = i;
        rep.eta = p.x_at(ieta);
        rep.alpha = p.x_at(ialpha);
        rep.m = p.x_at(im);
        ensure_index(p, p.floor_index(rep.m + 1.0) + 1);
    } catch (const std::out_of_range& e) {
        throw std::runtime_error(std::string("valley_times: extension budget exhausted (") + e.what() + ")");
    }
    return rep;
}

double exp_integral(const Potential& p, double from, double to, double shift)
{
    if (!(to > from)) return 0.0;
    double sum = 0.0, px = 0.0, pe = 0.0;
    bool first = true;
    for_segment(p, from, to, [&](double x, double w) {
        const double e = std::exp(w - shift);
        if (!first) sum += 0.5 * (pe + e) * (x - px);
        first = false;
        px = x;
        pe = e;
    });
    return sum;
}

EventFlags event_flags(const Potential& p, const ValleyReport& vr)
{
    const double r = vr.r, eps = vr.eps, v = vr.v;
    EventFlags f;
    const Oscillation left = oscillation_stats(p, vr.d_minus, 0.0);
    f.f1_width = std::fabs(vr.d_minus) < r * r;
    f.f1_depth = std::fabs(left.w_under) <= eps * r;
    f.f1_mass = exp_integral(p, vr.d_minus, 0.0, 0.0) > std::exp(0.5 * r);
    f.f1 = f.f1_width && f.f1_depth && f.f1_mass;

    const Oscillation o2 = oscillation_stats(p, 0.0, v);
    f.f2_sharp = o2.sharp_ab < (1.0 - 20.0 * eps) * r;
    f.f2_max = o2.w_bar < r / 3.0;
    f.f2 = f.f2_sharp && f.f2_max;

    const double wv = p.w(v), weta = p.w(vr.eta), wm = p.w(vr.m);
    const Oscillation o3 = oscillation_stats(p, v, vr.eta);
    f.f3_width = vr.eta - v <= std::pow(r, 2.5);
    f.f3_rise = o3.w_bar - wv < eps * r;
    f.f3_sharp = o3.sharp_ab < r / 3.0;
    f.f3_mass = exp_integral(p, v, vr.eta, weta) > std::exp((1.0 - 4.0 * eps) * r);
    f.f3 = f.f3_width && f.f3_rise && f.f3_sharp && f.f3_mass;

    const Oscillation o4 = oscillation_stats(p, vr.eta, vr.alpha);
    f.f4_width = vr.alpha - vr.eta <= std::pow(r, 2.5);
    f.f4_drop = o4.w_under - weta > -eps * r;
    f.f4_sharp_eta_m = vr.m > vr.eta ? oscillation_stats(p, vr.eta, vr.m).sharp_ab < r / 3.0 : true;
    f.f4_sharp_alpha_eta = o4.sharp_ba < r / 3.0;
    f.f4_local = oscillation_stats(p, vr.m, vr.m + 1.0).w_bar - wm < std::pow(r, 2.0 / 3.0);
    f.f4_mass = exp_integral(p, vr.m, vr.alpha, wm) > std::exp((1.0 - eps) * r);
    f.f4 = f.f4_width && f.f4_drop && f.f4_sharp_eta_m && f.f4_sharp_alpha_eta && f.f4_local && f.f4_mass;
    return f;
}

bool f2_flag(const Potential& p, double v, double r, double eps)
{
    const Oscillation o = oscillation_stats(p, 0.0, v);
    return o.sharp_ab < (1.0 - 20.0 * eps) * r && o.w_bar < r / 3.0;
}

double f2_asymptotic_reference(double v, double r, double eps)
{
    if (!(eps > 0.0 && eps < 0.05)) throw std::invalid_argument("f2_asymptotic_reference: eps must lie in (0, 1/20)");
    if (!(r > 0.0) || !(v > 0.0)) throw std::invalid_argument("f2_asymptotic_reference: v, r must be positive");
    const double c = 1.0 - 20.0 * eps;
    return 4.0 * std::sin(kPi / (6.0 * c)) / kPi * std::exp(-kPi * kPi / (8.0 * c * c) * v / (r * r));
}

double gamma_functional(const Potential& p, double a, double x, double c)
{
    if (!(a < x && x < c)) throw std::invalid_argument("gamma_functional: need a < x < c");
    const double wx = p.w(x);
    return std::min(exp_integral(p, a, x, wx), exp_integral(p, x, c, wx));
}

} // namespace sinailab
