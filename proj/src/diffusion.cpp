#include "sinailab/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "sinailab/bessel.hpp"
#include "sinailab/identities.hpp"
#include "sinailab/parallel.hpp"

namespace sinailab {

namespace {

double bridge_cross(double d0, double d1, double var)
{
    if (d0 <= 0.0 || d1 <= 0.0) return 1.0;
    return std::exp(-2.0 * d0 * d1 / var);
}

double wk_at(const Potential& p, long i) { return p.w_at(i) - 0.5 * p.kappa() * p.x_at(i); }

// Ray-Knight construction of the occupation pair. `ensure(i)` must make grid
// index i available or return false.
template <class Ensure>
OccupationPair ray_knight_core(const Potential& p, double v, RngStream& rng, const OccupationOptions& o,
                               Ensure&& ensure)
{
    if (!(v > 0.0)) throw std::invalid_argument("occupation_pair: v must be positive");
    OccupationPair out;
    out.v = v;
    const long iv = p.floor_index(v);
    if (!ensure(iv + 1)) throw std::out_of_range("occupation_pair: potential does not cover [0, v]");
    const double kappa = p.kappa();
    // From y = v (field 0) down to y = 0: BESQ(2) in the A clock.
    double y = v;
    double a = p.a_kappa(v);
    double g = std::exp(-(p.w(v) - 0.5 * kappa * v));
    double z = 0.0;
    double theta1 = 0.0;
    for (long i = (p.x_at(iv) == v ? iv - 1 : iv); i >= 0; --i) {
        const double a1 = p.a_at(i);
        const double z1 = sample_besq_transition(2.0, z, a - a1, rng);
        const double g1 = std::exp(-wk_at(p, i));
        theta1 += 0.5 * (g * z + g1 * z1) * (y - p.x_at(i));
        y = p.x_at(i);
        a = a1;
        g = g1;
        z = z1;
    }
    out.theta1 = theta1;
    // Negative side: BESQ(0) until absorbed, capped, or out of budget.
    double theta2 = 0.0;
    std::size_t steps = 0;
    for (long i = -1; z > 0.0; --i) {
        if (steps++ >= o.max_steps || !ensure(i)) {
            out.truncated = true;
            out.remainder = z;
            break;
        }
        const double a1 = p.a_at(i);
        const double z1 = sample_besq_transition(0.0, z, a - a1, rng);
        const double g1 = std::exp(-wk_at(p, i));
        theta2 += 0.5 * (g * z + g1 * z1) * p.resolution();
        a = a1;
        g = g1;
        z = z1;
        if (theta2 >= o.cap) {
            theta2 = o.cap;
            out.censored = true;
            break;
        }
    }
    out.theta2 = theta2;
    return out;
}

bool ensure_extend(Potential& p, long i)
{
    if (i >= p.index_min() && i <= p.index_max()) return true;
    if (p.frozen()) return false;
    const double pad = static_cast<double>(TwoSidedBrownian::kBlock) * p.resolution();
    const double x = p.x_at(i);
    try {
        p.realize(std::min(p.x_min(), x - (i < 0 ? pad : 0.0)), std::max(p.x_max(), x + (i > 0 ? pad : 0.0)));
    } catch (const std::out_of_range&) {
        try {
            p.realize(std::min(p.x_min(), x), std::max(p.x_max(), x));
        } catch (const std::out_of_range&) {
            return false;
        }
    }
    return true;
}

// Driving-path walk shared by hitting_time_h and path-mode occupation.
OccupationPair path_walk(Potential& p, double v, RngStream& rng, double dt, double cap_total, double cap_theta2)
{
    if (!(v > 0.0) || !(dt > 0.0)) throw std::invalid_argument("path walk: v, dt must be positive");
    p.realize(std::min(p.x_min(), -1.0), std::max(p.x_max(), v + 1.0));
    const double target = p.a_kappa(v);
    const double sd = std::sqrt(dt);
    OccupationPair out;
    out.v = v;
    double b = 0.0;
    for (;;) {
        const double x = p.a_kappa_inverse_extend(b);
        const double inc = std::exp(-2.0 * p.w_kappa(x)) * dt;
        if (b >= 0.0) out.theta1 += inc;
        else out.theta2 += inc;
        const double b1 = b + sd * rng.normal();
        const double u = rng.uniform();
        if (b1 >= target || u < bridge_cross(target - b, target - b1, dt)) return out;
        if (out.theta2 >= cap_theta2) {
            out.theta2 = cap_theta2;
            out.censored = true;
            return out;
        }
        if (out.total() >= cap_total) {
            out.censored = true;
            return out;
        }
        b = b1;
    }
}

} // namespace

SamplePath simulate_x(Potential& p, double horizon, double dt, RngStream rng)
{
    const TimeGrid grid = TimeGrid::covering(0.0, dt, horizon);
    std::vector<double> xs(grid.points(), 0.0);
    const double sd = std::sqrt(dt);
    double b = 0.0, t = 0.0;
    double x = 0.0;
    std::size_t j = 1;
    const std::size_t max_steps = 2'000'000'000;
    for (std::size_t k = 0; j < xs.size(); ++k) {
        if (k >= max_steps) throw std::runtime_error("simulate_x: driving path step budget exhausted");
        const double rate = std::exp(-2.0 * p.w_kappa(x));
        const double b1 = b + sd * rng.normal();
        const double t1 = t + rate * dt;
        while (j < xs.size() && grid.time(j) <= t1) {
            const double frac = (grid.time(j) - t) / (t1 - t);
            xs[j] = p.a_kappa_inverse_extend(b + frac * (b1 - b));
            ++j;
        }
        b = b1;
        t = t1;
        x = p.a_kappa_inverse_extend(b);
    }
    return SamplePath(grid, std::move(xs));
}

StoppingRecord hitting_time_h(Potential& p, double v, RngStream rng, double dt, double cap)
{
    const OccupationPair pair = path_walk(p, v, rng, dt, cap, std::numeric_limits<double>::infinity());
    StoppingRecord rec{StoppingKind::sigma, v, std::min(pair.total(), cap), pair.censored};
    return rec;
}

OccupationPair occupation_pair(Potential& p, double v, RngStream rng, OccupationMode mode,
                               const OccupationOptions& options)
{
    if (mode == OccupationMode::path)
        return path_walk(p, v, rng, options.dt, std::numeric_limits<double>::infinity(), options.cap);
    return ray_knight_core(p, v, rng, options, [&p](long i) { return ensure_extend(p, i); });
}

OccupationPair occupation_pair_frozen(const Potential& p, double v, RngStream rng, const OccupationOptions& options)
{
    return ray_knight_core(p, v, rng, options,
                           [&p](long i) { return i >= p.index_min() && i <= p.index_max(); });
}

double kotani_fixed_point(double lambda)
{
    if (!(lambda > 0.0)) throw std::invalid_argument("kotani: lambda must be positive");
    return (0.5 + std::sqrt(0.25 + 8.0 * lambda)) / (4.0 * lambda);
}

SamplePath kotani_z_path(const Potential& p, double lambda, double v, const KotaniOptions& options)
{
    if (!(options.burn_in >= 0.0) || options.substeps < 1) throw std::invalid_argument("kotani: bad options");
    if (!(v > 0.0)) throw std::invalid_argument("kotani: v must be positive");
    const double res = p.resolution();
    const long i0 = -std::lround(options.burn_in / res);
    const long i1 = std::lround(v / res);
    if (i0 < p.index_min() || i1 > p.index_max())
        throw std::out_of_range("kotani: potential not realised on [-burn_in, v]");
    std::vector<double> zs(static_cast<std::size_t>(i1 - i0 + 1));
    double z = kotani_fixed_point(lambda);
    zs[0] = z;
    const int m = options.substeps;
    const double h = res / m;
    const auto drift = [lambda](double zz, double slope) { return 1.0 + slope * zz - 2.0 * lambda * zz * zz; };
    for (long i = i0; i < i1; ++i) {
        const double dw = wk_at(p, i + 1) - wk_at(p, i);
        if (options.scheme == KotaniScheme::pathwise) {
            const double slope = dw / res;
            for (int s = 0; s < m; ++s) {
                const double k1 = drift(z, slope);
                const double k2 = drift(z + 0.5 * h * k1, slope);
                const double k3 = drift(z + 0.5 * h * k2, slope);
                const double k4 = drift(z + h * k3, slope);
                z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        } else {
            // One Ito step per cell: an evenly split increment would carry
            // only 1/m of the quadratic variation the Z/2 term assumes.
            z += z * dw + (1.0 + 0.5 * z - 2.0 * lambda * z * z) * res;
            if (z < 1e-12) z = 1e-12;
        }
        zs[static_cast<std::size_t>(i - i0 + 1)] = z;
    }
    const TimeGrid grid(p.x_at(i0), res, zs.size() - 1);
    return SamplePath(grid, std::move(zs));
}

double kotani_rhs(const Potential& p, double lambda, double v, const KotaniOptions& options)
{
    const SamplePath z = kotani_z_path(p, lambda, v, options);
    const auto& zs = z.values();
    const std::size_t start = static_cast<std::size_t>(std::lround(options.burn_in / p.resolution()));
    double integral = 0.0;
    for (std::size_t k = start; k + 1 < zs.size(); ++k) integral += 0.5 * (zs[k] + zs[k + 1]) * p.resolution();
    return std::exp(-2.0 * lambda * integral);
}

std::vector<KotaniResult> kotani_check_multi(Potential& p, const std::vector<double>& lambdas, double v,
                                             std::size_t n_paths, RngStream rng, const KotaniCheckOptions& options)
{
    if (lambdas.empty() || n_paths < 2) throw std::invalid_argument("kotani_check: need lambdas and n >= 2");
    const double res = p.resolution();
    const double v_grid = static_cast<double>(std::lround(v / res)) * res;
    p.realize(std::min(p.x_min(), -2.0 * options.z.burn_in - 1.0), std::max(p.x_max(), v_grid + 1.0));
    const double lambda_min = *std::min_element(lambdas.begin(), lambdas.end());
    OccupationOptions occ;
    occ.cap = options.cap_exponent / lambda_min;
    occ.dt = options.dt;

    std::vector<OccupationPair> pairs;
    if (options.mode == OccupationMode::ray_knight) {
        pairs = replicate(n_paths, [&](std::size_t i) { return occupation_pair_frozen(p, v_grid, rng.split(i), occ); });
        // Rerun samples that left the realised extent after extending it
        // serially; a sample depends only on its stream and the potential.
        for (int round = 0; round < 64; ++round) {
            bool any = false;
            for (std::size_t i = 0; i < n_paths; ++i) {
                if (!pairs[i].truncated) continue;
                any = true;
                pairs[i] = occupation_pair(p, v_grid, rng.split(i), OccupationMode::ray_knight, occ);
            }
            if (!any) break;
        }
    } else {
        for (std::size_t i = 0; i < n_paths; ++i)
            pairs.push_back(occupation_pair(p, v_grid, rng.split(i), OccupationMode::path, occ));
    }

    std::vector<KotaniResult> results;
    for (double lambda : lambdas) {
        KotaniResult r;
        r.lambda = lambda;
        r.v = v_grid;
        r.n = n_paths;
        std::vector<double> e(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) {
            e[i] = std::exp(-lambda * pairs[i].total());
            r.censored += pairs[i].censored ? 1 : 0;
            r.truncated += pairs[i].truncated ? 1 : 0;
        }
        const MeanSe ms = mean_se(e);
        r.lhs = ms.mean;
        r.lhs_se = ms.se;
        r.rhs = kotani_rhs(p, lambda, v_grid, options.z);
        KotaniOptions doubled = options.z;
        doubled.burn_in *= 2.0;
        r.rhs_double_burn = kotani_rhs(p, lambda, v_grid, doubled);
        r.burn_shift = std::fabs(r.rhs_double_burn - r.rhs) / r.rhs;
        r.z = ms.se > 0.0 ? (r.lhs - r.rhs) / ms.se : 0.0;
        results.push_back(r);
    }
    return results;
}

KotaniResult kotani_check(Potential& p, double lambda, double v, std::size_t n_paths, RngStream rng,
                          const KotaniCheckOptions& options)
{
    return kotani_check_multi(p, {lambda}, v, n_paths, rng, options).front();
}

void finalize_rate(RateEstimate& e, double scale)
{
    if (e.n == 0) throw std::invalid_argument("finalize_rate: no trials");
    e.p_hat = static_cast<double>(e.successes) / static_cast<double>(e.n);
    e.ci = binomial_ci(e.successes, e.n);
    const double inf = std::numeric_limits<double>::infinity();
    if (e.successes == 0) {
        e.ci.hi = one_sided_zero_bound(e.n);
        e.rate = std::numeric_limits<double>::quiet_NaN();
        e.rate_lo = -inf;
        e.rate_hi = scale * std::log(e.ci.hi);
    } else {
        e.rate = scale * std::log(e.p_hat);
        e.rate_lo = e.ci.lo > 0.0 ? scale * std::log(e.ci.lo) : -inf;
        e.rate_hi = scale * std::log(e.ci.hi);
    }
    e.interval_only = e.successes < 30;
}

CoarseChain::CoarseChain(const Potential& p, double cell, double x_lo, double x_hi)
{
    const double res = p.resolution();
    const long per = std::max(1L, std::lround(cell / res));
    cell_ = static_cast<double>(per) * res;
    k_min_ = static_cast<long>(std::ceil(x_lo / cell_));
    k_max_ = static_cast<long>(std::floor(x_hi / cell_));
    if (k_min_ >= 0 || k_max_ <= 0) throw std::invalid_argument("CoarseChain: extent must contain the origin");
    if (k_min_ * per < p.index_min() || k_max_ * per > p.index_max())
        throw std::out_of_range("CoarseChain: potential not realised on the chain extent");
    const std::size_t sites = static_cast<std::size_t>(k_max_ - k_min_ + 1);
    up_.assign(sites, 0.5);
    hold_.assign(sites, 0.0);
    for (long k = k_min_ + 1; k < k_max_; ++k) {
        const long il = (k - 1) * per, ic = k * per, ir = (k + 1) * per;
        const double al = p.a_at(il), ac = p.a_at(ic), ar = p.a_at(ir);
        const double span = ar - al;
        // Mean exit time from (x_{k-1}, x_{k+1}): Green kernel against the
        // speed density 2 e^{-W_kappa}, trapezoid on the potential grid.
        double mean = 0.0, prev = 0.0;
        for (long i = il; i <= ir; ++i) {
            const double ai = p.a_at(i);
            const double gk = i <= ic ? (ai - al) * (ar - ac) / span : (ac - al) * (ar - ai) / span;
            const double f = gk * 2.0 * std::exp(-wk_at(p, i));
            if (i > il) mean += 0.5 * (prev + f) * res;
            prev = f;
        }
        const auto idx = static_cast<std::size_t>(k - k_min_);
        up_[idx] = (ac - al) / span;
        hold_[idx] = mean;
    }
    up_.front() = 1.0;
    up_.back() = 0.0;
    hold_.front() = hold_[1];
    hold_.back() = hold_[sites - 2];
}

CoarseChain::Run CoarseChain::run(double t, long target_site, RngStream& rng, std::size_t max_jumps) const
{
    Run out;
    long k = 0;
    double time = 0.0;
    if (target_site <= 0) out.first_passage = 0.0;
    for (std::size_t jumps = 0;; ++jumps) {
        if (jumps >= max_jumps) {
            out.budget_exhausted = true;
            break;
        }
        const auto idx = static_cast<std::size_t>(k - k_min_);
        const double hold = hold_[idx] * rng.exponential();
        if (time + hold > t) break;
        time += hold;
        k += rng.uniform() < up_[idx] ? 1 : -1;
        out.max_site = std::max(out.max_site, k);
        if (k >= target_site && !(out.first_passage <= t)) out.first_passage = time;
    }
    out.final_site = k;
    return out;
}

namespace {

struct ChainCounts {
    std::size_t above = 0;
    std::size_t passed = 0;
    std::size_t censored = 0;
};

ChainCounts run_chain(const CoarseChain& chain, double t, double v, std::size_t n, const RngStream& rng,
                      std::size_t max_jumps)
{
    const long target = static_cast<long>(std::ceil(v / chain.cell() - 1e-9));
    const auto runs = replicate(n, [&](std::size_t i) {
        RngStream r = rng.split(i);
        return chain.run(t, target, r, max_jumps);
    });
    ChainCounts c;
    for (const auto& run : runs) {
        if (static_cast<double>(run.final_site) * chain.cell() > v) ++c.above;
        if (run.first_passage <= t) ++c.passed;
        if (run.budget_exhausted) ++c.censored;
    }
    return c;
}

CoarseChain build_chain(Potential& p, double t, double v, const QuenchedOptions& options)
{
    const double lt = std::log(t);
    const double cell = options.cell > 0.0 ? options.cell : std::max(10.0 * p.resolution(), 0.25 * lt);
    const double margin = options.margin > 0.0 ? options.margin : std::max(2.0 * lt * lt, 10.0 * cell);
    p.realize(std::min(p.x_min(), -margin), std::max(p.x_max(), v + margin));
    return CoarseChain(p, cell, -margin, v + margin);
}

} // namespace

QuenchedTail quenched_tail(Potential& p, double t, double v, std::size_t n, RngStream rng,
                           const QuenchedOptions& options)
{
    if (!(t > v) || !(v > 0.0)) throw std::invalid_argument("quenched_tail: need t > v > 0");
    if (n < 1) throw std::invalid_argument("quenched_tail: n must be >= 1");
    const CoarseChain chain = build_chain(p, t, v, options);
    const ChainCounts c = run_chain(chain, t, v, n, rng, options.max_jumps);
    const double scale = 2.0 * std::log(t / v) / v;
    QuenchedTail q;
    for (auto* e : {&q.at_time, &q.sup}) {
        e->kind = TailKind::quenched;
        e->t = t;
        e->v = v;
        e->kappa = p.kappa();
        e->n = n;
        e->censored = c.censored;
    }
    q.at_time.estimator = "quenched_x";
    q.at_time.successes = c.above;
    q.sup.estimator = "quenched_sup";
    q.sup.successes = c.passed;
    finalize_rate(q.at_time, scale);
    finalize_rate(q.sup, scale);
    return q;
}

AnnealedTail annealed_tail(double kappa, double t, double v, std::size_t n_env, std::size_t n_path,
                           RngStream rng, const AnnealedOptions& options)
{
    if (!(t > v) || !(v > 0.0)) throw std::invalid_argument("annealed_tail: need t > v > 0");
    const double scale = std::log(t) * std::log(t) / v;
    AnnealedTail out;
    out.direct.kind = out.xi_route.kind = TailKind::annealed;
    out.direct.estimator = "annealed_direct";
    out.xi_route.estimator = "annealed_xi";
    for (auto* e : {&out.direct, &out.xi_route}) {
        e->t = t;
        e->v = v;
        e->kappa = kappa;
    }
    if (options.direct && n_env > 0 && n_path > 0) {
        for (std::size_t e = 0; e < n_env; ++e) {
            Potential p(kappa, options.resolution, rng.split(0).split(e));
            const CoarseChain chain = build_chain(p, t, v, options.quenched);
            const ChainCounts c = run_chain(chain, t, v, n_path, rng.split(1).split(e), options.quenched.max_jumps);
            out.direct.successes += c.passed;
            out.direct.censored += c.censored;
            out.direct.n += n_path;
        }
        finalize_rate(out.direct, scale);
    }
    if (options.xi_route) {
        const std::size_t n = options.n_xi > 0 ? options.n_xi : n_env * n_path;
        if (n == 0) throw std::invalid_argument("annealed_tail: Xi route needs n > 0");
        const double threshold = 0.25 * t + v;
        const double dt = options.xi_dt;
        const RngStream base = rng.split(2);
        const auto hits = replicate(n, [&](std::size_t i) -> int {
            RngStream r = base.split(i);
            double xi = 0.0, s = 0.0, integral = 0.0, e0 = 1.0;
            while (s < v) {
                const double step = std::min(dt, v - s);
                xi = xi_step(xi, kappa, step, r.normal());
                const double e1 = std::exp(xi);
                integral += 0.5 * (e0 + e1) * step;
                e0 = e1;
                s += step;
                if (integral >= threshold) return 0;
            }
            return 1;
        });
        out.xi_route.n = n;
        for (int h : hits) out.xi_route.successes += static_cast<std::size_t>(h);
        finalize_rate(out.xi_route, scale);
    }
    return out;
}

void write_rate_csv_header(std::ostream& out)
{
    out << "seed,kappa,t,v,estimator,p_hat,ci_lo,ci_hi,rate,n,censored_count,rate_lo,rate_hi,interval_only\n";
}

void write_rate_csv_row(std::ostream& out, std::uint64_t seed, const RateEstimate& e)
{
    const auto num = [](double x) {
        char buf[40];
        if (std::isnan(x)) return std::string();
        if (std::isinf(x)) return std::string(x < 0 ? "-inf" : "inf");
        std::snprintf(buf, sizeof buf, "%.10g", x);
        return std::string(buf);
    };
    out << seed << ',' << num(e.kappa) << ',' << num(e.t) << ',' << num(e.v) << ',' << e.estimator << ','
        << num(e.p_hat) << ',' << num(e.ci.lo) << ',' << num(e.ci.hi) << ',' << num(e.rate) << ',' << e.n << ','
        << e.censored << ',' << num(e.rate_lo) << ',' << num(e.rate_hi) << ',' << (e.interval_only ? 1 : 0) << '\n';
}

} // namespace sinailab
