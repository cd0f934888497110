#include "sinailab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "sinailab/diffusion.hpp"
#include "sinailab/errors.hpp"
#include "sinailab/identities.hpp"
#include "sinailab/localtime.hpp"
#include "sinailab/parallel.hpp"
#include "sinailab/potential.hpp"
#include "sinailab/special_functions.hpp"

namespace sinailab {

namespace {

std::string tag(const std::string& base, std::initializer_list<std::pair<const char*, double>> kv)
{
    std::ostringstream os;
    os << base << '[';
    bool first = true;
    for (const auto& [k, v] : kv) {
        os << (first ? "" : ",") << k << '=' << v;
        first = false;
    }
    os << ']';
    return os.str();
}

Mutation parse_mutation(const std::string& s)
{
    if (s == "none") return Mutation::none;
    if (s == "drop_minus_one") return Mutation::drop_minus_one;
    if (s == "bessel_start_squared") return Mutation::bessel_start_squared;
    throw UsageError("unknown mutation: " + s);
}

void require(bool ok, const std::string& what)
{
    if (!ok) throw UsageError(what);
}

void run_thm41(const RunConfig& c, Report& rep, RngStream rng)
{
    Theorem41Options o;
    o.cap = c.cap;
    o.resolution = c.resolution;
    o.mutation = parse_mutation(c.mutation);
    require(c.kappa >= 0.0 && c.kappa < 1.0, "thm41: kappa must lie in [0, 1)");
    require(c.v > 0.0 && c.dt > 0.0 && c.n >= 25, "thm41: need v, dt > 0 and n >= 25");
    const Theorem41Report r = theorem41_compare(c.kappa, c.v, c.n, c.dt, rng, o);
    rep.parameter("kappa", c.kappa);
    rep.parameter("v", c.v);
    rep.parameter("cap", o.cap);
    rep.parameter("resolution", o.resolution);
    rep.parameter("bessel_dt", o.bessel_dt);
    rep.parameter("mutation", c.mutation);
    rep.ks("theta1", r.theta1.ks, c.alpha);
    rep.ks("theta2", r.theta2.ks, c.alpha);
    rep.ks("sum", r.sum.ks, c.alpha);
    rep.note("censored_a", r.censored_a);
    rep.note("censored_b", r.censored_b);
    rep.note("truncated_a", r.truncated_a);
}

void run_kotani(const RunConfig& c, Report& rep, RngStream rng)
{
    require(c.v > 0.0 && c.n >= 2 && c.potentials >= 1 && !c.lambdas.empty(), "kotani: need v > 0, n >= 2, lambdas");
    KotaniCheckOptions o;
    o.z.burn_in = c.burn_in;
    o.dt = c.dt;
    rep.parameter("kappa", c.kappa);
    rep.parameter("v", c.v);
    rep.parameter("lambdas", c.lambdas);
    rep.parameter("potentials", c.potentials);
    rep.parameter("burn_in", c.burn_in);
    rep.parameter("resolution", c.resolution);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < c.potentials; ++k) {
        Potential p(c.kappa, c.resolution, rng.split(2 * k));
        const auto results = kotani_check_multi(p, c.lambdas, c.v, c.n, rng.split(2 * k + 1), o);
        for (const auto& r : results) {
            const double kk = static_cast<double>(k);
            rep.check(tag("z", {{"potential", kk}, {"lambda", r.lambda}}), r.z, -3.0, 3.0);
            rep.check(tag("burn_shift", {{"potential", kk}, {"lambda", r.lambda}}), r.burn_shift, 0.0, 0.01);
            rows.push_back({{"potential", k}, {"lambda", r.lambda}, {"v", r.v}, {"lhs", r.lhs},
                            {"lhs_se", r.lhs_se}, {"rhs", r.rhs}, {"rhs_double_burn", r.rhs_double_burn},
                            {"z", r.z}, {"censored", r.censored}, {"truncated", r.truncated}});
        }
    }
    rep.note("rows", rows);
}

void run_rayknight(const RunConfig& c, Report& rep, RngStream rng)
{
    const double level = c.b;
    require(level > 0.0 && c.h > 0.0 && c.dt > 0.0 && c.n >= 25, "rayknight: need b, h, dt > 0 and n >= 25");
    for (double y : c.points) require(y <= level, "rayknight: points must not exceed the level b");
    rep.parameter("level", level);
    rep.parameter("points", c.points);
    rep.parameter("h", c.h);
    const RngStream rp = rng.split(0), re = rng.split(1);
    const auto est = replicate(c.n, [&](std::size_t i) {
        RngStream r = rp.split(i);
        return local_time_at_sigma(level, c.points, c.h, c.dt, r);
    });
    const auto exact = replicate(c.n, [&](std::size_t i) {
        RngStream r = re.split(i);
        return ray_knight_at(level, c.points, r);
    });
    for (std::size_t j = 0; j < c.points.size(); ++j) {
        std::vector<double> a(c.n), b(c.n);
        for (std::size_t i = 0; i < c.n; ++i) {
            a[i] = est[i][j];
            b[i] = exact[i][j];
        }
        rep.ks(tag("field", {{"y", c.points[j]}}), ks_two_sample(EmpiricalDistribution(a), EmpiricalDistribution(b)),
               c.alpha);
        if (c.points[j] == 0.0) {
            const MeanSe ms = mean_se(a);
            rep.within_se("mean_at_0", ms.mean, 2.0 * level, ms.se);
        }
    }
}

void run_lemma22(const RunConfig& c, Report& rep, RngStream rng)
{
    require(c.a >= 0.0 && c.b > c.a && c.n >= 2, "lemma22: need 0 <= a < b and n >= 2");
    rep.parameter("a", c.a);
    rep.parameter("b", c.b);
    rep.parameter("tail_points", c.tail_points);
    rep.parameter("lambda", c.lambda);
    const RngStream rs = rng.split(0);
    const auto area = replicate(c.n, [&](std::size_t i) {
        RngStream r = rs.split(i);
        return exit_area_sample(c.a, c.b, r);
    });
    const double n = static_cast<double>(c.n);
    for (double v : c.tail_points) {
        const auto k = std::count_if(area.begin(), area.end(), [v](double x) { return x > v; });
        const double p = static_cast<double>(k) / n;
        const double se = std::sqrt(p * (1.0 - p) / n);
        const Bounds bd = exit_area_bounds(c.a, c.b, v);
        rep.check(tag("tail", {{"v", v}}), p, bd.lower - 3.0 * se, bd.upper + 3.0 * se);
    }
    const double s = 0.5 * c.lambda * c.lambda;
    const auto lt = [s](const std::vector<double>& xs) { return laplace_mean(xs, s); };
    const double se = bootstrap_se(area, lt, c.bootstrap, rng.split(1));
    rep.within_se(tag("laplace", {{"lambda", c.lambda}}), lt(area), 1.0 / std::cosh(c.lambda * (c.b - c.a)), se);
}

void run_lemma23(const RunConfig& c, Report& rep, RngStream rng)
{
    require(c.kappa > 0.0 && c.kappa < 1.0, "lemma23: kappa must lie in (0, 1)");
    require(c.a > 0.0 && c.b > c.a && c.dt > 0.0 && c.n >= 25, "lemma23: need 0 < a < b, dt > 0, n >= 25");
    const double from = 2.0 * c.kappa * std::pow(c.b, 0.5 / c.kappa);
    const double to = 2.0 * c.kappa * std::pow(c.b - c.a, 0.5 / c.kappa);
    rep.parameter("kappa", c.kappa);
    rep.parameter("a", c.a);
    rep.parameter("b", c.b);
    rep.parameter("cap", c.cap);
    rep.parameter("lambda", c.lambda);
    rep.parameter("bessel_from", from);
    rep.parameter("bessel_to", to);
    WalkOptions wo;
    wo.cap = c.cap;
    HittingOptions ho;
    ho.horizon = c.cap;
    const RngStream rg = rng.split(0), rb = rng.split(1);
    const auto gs = replicate(c.n, [&](std::size_t i) {
        RngStream r = rg.split(i);
        return gs_functional_sample(c.kappa, c.a, c.b, r, c.dt, wo);
    });
    const auto hit = replicate(c.n, [&](std::size_t i) {
        RngStream r = rb.split(i);
        return sample_bes_hitting(2.0 - 2.0 * c.kappa, from, to, c.dt, r, ho);
    });
    std::vector<double> a, b, la(c.n), lb(c.n);
    std::size_t ca = 0, cb = 0;
    const double s = 0.5 * c.lambda * c.lambda;
    for (std::size_t i = 0; i < c.n; ++i) {
        if (gs[i].censored) ++ca;
        else a.push_back(gs[i].value);
        if (hit[i].censored) ++cb;
        else b.push_back(hit[i].duration);
        la[i] = gs[i].censored ? std::exp(-s * c.cap) : std::exp(-s * gs[i].value);
        lb[i] = hit[i].censored ? std::exp(-s * c.cap) : std::exp(-s * hit[i].duration);
    }
    rep.ks("functional_vs_hitting", ks_two_sample(EmpiricalDistribution(a, ca), EmpiricalDistribution(b, cb)),
           c.alpha);
    const double ref = lemma23_laplace_reference(c.kappa, c.lambda, c.b, c.a);
    const MeanSe ma = mean_se(la), mb = mean_se(lb);
    rep.within_se("laplace_functional", ma.mean, ref, ma.se);
    rep.within_se("laplace_hitting", mb.mean, ref, mb.se);
    rep.note("laplace_reference", ref);
    rep.note("censored_functional", ca);
    rep.note("censored_hitting", cb);
}

void run_lemma25(const RunConfig& c, Report& rep, RngStream rng)
{
    require(c.r > 0.0 && c.h > 0.0 && c.n >= 2 && !c.lambdas.empty(), "lemma25: need r, h > 0, n >= 2, lambdas");
    rep.parameter("r", c.r);
    rep.parameter("lambdas", c.lambdas);
    rep.parameter("h", c.h);
    WeightedAreaOptions wo;
    wo.h = c.h;
    const RngStream rs = rng.split(0);
    const auto draws = replicate(c.n, [&](std::size_t i) {
        RngStream r = rs.split(i);
        return exp_weighted_area_sample(c.r, AreaSide::left, 0.0, r, wo);
    });
    std::vector<double> xs(c.n);
    std::size_t truncated = 0;
    double remainder = 0.0;
    for (std::size_t i = 0; i < c.n; ++i) {
        xs[i] = draws[i].value;
        truncated += draws[i].truncated ? 1 : 0;
        remainder = std::max(remainder, draws[i].remainder);
    }
    for (std::size_t k = 0; k < c.lambdas.size(); ++k) {
        const double lambda = c.lambdas[k];
        const auto lt = [lambda](const std::vector<double>& v) { return laplace_mean(v, lambda); };
        const double se = bootstrap_se(xs, lt, c.bootstrap, rng.split(1 + k));
        const double m = lt(xs);
        rep.within_se(tag("laplace", {{"r", c.r}, {"lambda", lambda}}), m, exp_weighted_area_laplace(c.r, lambda), se);
        rep.within_se(tag("laplace_normalized", {{"r", c.r}, {"lambda", lambda}}), m,
                      exp_weighted_area_laplace_normalized(c.r, lambda), se);
    }
    const MeanSe m2 = mean_se([&] {
        std::vector<double> sq(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = xs[i] * xs[i];
        return sq;
    }());
    rep.within_se("second_moment", m2.mean, 8.0 * c.r * c.r + 4.0 * c.r, m2.se);
    rep.note("truncated", truncated);
    rep.note("max_remainder", remainder);
}

void run_lamperti(const RunConfig& c, Report& rep, RngStream rng)
{
    require(c.kappa >= 0.0 && c.x > 0.0 && c.eps > 0.0 && c.n >= 25, "lamperti: need kappa >= 0, x, eps > 0");
    rep.parameter("kappa", c.kappa);
    rep.parameter("x", c.x);
    rep.parameter("eps", c.eps);
    const auto ys = replicate(c.n, [&](std::size_t i) {
        RngStream r = rng.split(i);
        return lamperti_marginal(c.kappa, c.x, r, c.eps);
    });
    // exp(W(x) + kappa x / 2) is lognormal(kappa x / 2, x)
    const double mu = 0.5 * c.kappa * c.x, sd = std::sqrt(c.x);
    rep.ks("lognormal", ks_one_sample(EmpiricalDistribution(ys), [&](double y) {
               return y <= 0.0 ? 0.0 : normal_cdf((std::log(y) - mu) / sd);
           }),
           c.alpha);
}

void run_skewproduct(const RunConfig& c, Report& rep, RngStream rng)
{
    require(c.d1 >= 0.0 && c.d2 >= 0.0 && c.d1 + c.d2 >= 2.0, "skewproduct: need d1, d2 >= 0 and d1 + d2 >= 2");
    require(c.u > 0.0 && c.dt > 0.0 && c.n >= 25, "skewproduct: need u, dt > 0 and n >= 25");
    rep.parameter("d1", c.d1);
    rep.parameter("d2", c.d2);
    rep.parameter("r1", c.r1);
    rep.parameter("r2", c.r2);
    rep.parameter("u", c.u);
    rep.parameter("eps", c.eps);
    const SkewProductReport r = skewproduct_check(c.d1, c.d2, c.r1, c.r2, c.u, c.n, c.dt, rng, c.eps);
    rep.ks("ratio_vs_jacobi", r.marginal, c.alpha);
    rep.within_se("correlation", r.correlation.mean, 0.0, r.correlation.se);
    rep.check("ratio_range", r.ratio_min >= 0.0 && r.ratio_max <= 1.0 ? 1.0 : 0.0, 1.0, 1.0);
}

void run_lemma52(const RunConfig& c, Report& rep, RngStream rng)
{
    require(c.v > 0.0 && c.x > 0.0 && c.horizon > 0.0 && c.dt > 0.0 && c.n >= 1, "lemma52: need v, x, horizon, dt > 0");
    rep.parameter("kappa", c.kappa);
    rep.parameter("v", c.v);
    rep.parameter("x", c.x);
    rep.parameter("t", c.horizon);
    const double n = static_cast<double>(c.n);
    const ProbabilityEstimate conf = xi_confinement(c.kappa, c.v, c.x, c.n, c.dt, rng.split(0));
    const double se = std::sqrt(conf.p_hat * (1.0 - conf.p_hat) / n);
    const Bounds bd = xi_bounds_reference(c.v, c.x);
    rep.check(tag("sandwich", {{"v", c.v}, {"x", c.x}}), conf.p_hat, bd.lower - 3.0 * se, bd.upper + 3.0 * se);
    const ProbabilityEstimate below = xi_confinement(c.kappa, c.horizon, 1.0, c.n, c.dt, rng.split(1));
    const double se1 = std::sqrt(below.p_hat * (1.0 - below.p_hat) / n);
    rep.check(tag("sup_below_1", {{"t", c.horizon}}), below.p_hat, 0.0, 2.0 * std::exp(-c.horizon / 50.0) + 3.0 * se1);
    rep.note("sandwich_successes", conf.successes);
    rep.note("sup_below_1_successes", below.successes);
}

using Runner = void (*)(const RunConfig&, Report&, RngStream);

const std::vector<std::pair<std::string, Runner>>& runners()
{
    static const std::vector<std::pair<std::string, Runner>> table{
        {"thm41", run_thm41},       {"kotani", run_kotani},     {"rayknight", run_rayknight},
        {"lemma22", run_lemma22},   {"lemma23", run_lemma23},   {"lemma25", run_lemma25},
        {"lamperti", run_lamperti}, {"skewproduct", run_skewproduct}, {"lemma52", run_lemma52}};
    return table;
}

} // namespace

const std::vector<std::string>& identity_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, fn] : runners()) out.push_back(name);
        return out;
    }();
    return names;
}

std::uint64_t identity_stream(const std::string& name)
{
    const auto& t = runners();
    for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k].first == name) return k + 1;
    throw UsageError("unknown identity: " + name);
}

Report run_identity(const RunConfig& config)
{
    const std::uint64_t stream = identity_stream(config.target);
    Report rep(config.target, config, stream);
    rep.set_n(config.n);
    rep.set_dt(config.dt);
    const auto& t = runners();
    t[stream - 1].second(config, rep, RngStream(config.seed, stream));
    return rep;
}

} // namespace sinailab
