#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sinailab/bessel.hpp"
#include "sinailab/brownian.hpp"
#include "sinailab/localtime.hpp"
#include "sinailab/special_functions.hpp"
#include "sinailab/stats.hpp"

using namespace sinailab;

TEST_CASE("brownian grid and bridge refinement")
{
    const TimeGrid g(0.0, 0.01, 100);
    CHECK(g.points() == 101);
    CHECK(g.end() == doctest::Approx(1.0));
    CHECK(TimeGrid::covering(0.0, 0.3, 1.0).end() >= 1.0);
    RngStream r(1);
    const SamplePath p = sample_brownian(g, r);
    CHECK(p[0] == 0.0);
    const SamplePath q = refine_bridge(p, 2, r);
    CHECK(q.size() == 401);
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(q[4 * k] == p[k]);
    CHECK(q.at(0.5) == doctest::Approx(p[50]));
}

TEST_CASE("brownian: variance at time 1")
{
    const TimeGrid g(0.0, 0.05, 20);
    RngStream r(2);
    double s2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const SamplePath p = sample_brownian(g, r);
        s2 += p[20] * p[20];
    }
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("two-sided brownian is stable under extension")
{
    TwoSidedBrownian w(0.01, RngStream(4));
    w.ensure(Side::right, 100);
    const std::vector<double> before(w.values(Side::right).begin(), w.values(Side::right).begin() + 100);
    w.ensure(Side::right, 10000);
    CHECK(std::equal(before.begin(), before.end(), w.values(Side::right).begin()));
    CHECK(w.values(Side::left)[0] == 0.0);
}

TEST_CASE("BESQ transitions")
{
    RngStream r(3);
    const int n = 40000;
    std::vector<double> two(n);
    double m3 = 0.0, m_half = 0.0;
    for (int i = 0; i < n; ++i) {
        two[i] = sample_besq_transition(2.0, 0.0, 1.5, r);
        m3 += sample_besq_transition(3.0, 1.0, 0.5, r);
        m_half += sample_besq_transition(0.5, 1.0, 0.5, r);
    }
    // BESQ(2) from 0 at time t is exponential with mean 2t
    const auto ks = ks_one_sample(EmpiricalDistribution(two), [](double x) { return x > 0 ? 1.0 - std::exp(-x / 3.0) : 0.0; });
    CHECK(ks.p_value > 0.001);
    // E X_t = x0 + delta t
    CHECK(m3 / n == doctest::Approx(2.5).epsilon(0.02));
    CHECK(m_half / n == doctest::Approx(1.25).epsilon(0.02));
    CHECK(sample_besq_transition(0.0, 0.0, 1.0, r) == 0.0);
}

TEST_CASE("BES(1) hitting of 0 is the Brownian passage time")
{
    // |B| from 1 down to 0.01: P(T <= t) = 2 Phi(-0.99 / sqrt t)
    RngStream r(12);
    const int n = 4000;
    std::vector<double> d;
    std::size_t censored = 0;
    HittingOptions o;
    o.horizon = 1e4;
    for (int i = 0; i < n; ++i) {
        const HittingSample h = sample_bes_hitting(1.0, 1.0, 0.01, 1e-4, r, o);
        if (h.censored) ++censored;
        else d.push_back(h.duration);
    }
    CHECK(censored < 40);
    const auto ks = ks_one_sample(EmpiricalDistribution(d, censored),
                                  [](double t) { return t > 0 ? 2.0 * normal_cdf(-0.99 / std::sqrt(t)) : 0.0; });
    CHECK(ks.p_value > 0.001);
}

TEST_CASE("hitting times on a path")
{
    const TimeGrid g(0.0, 0.1, 4);
    const SamplePath p(g, {0.0, 0.5, 1.5, 0.2, 2.0});
    const StoppingRecord s = hitting_time_sigma(p, 1.0, RngStream(1));
    CHECK_FALSE(s.censored);
    CHECK(s.time <= 0.2 + 1e-12);
    CHECK(hitting_time_sigma(p, 5.0, RngStream(1)).censored);
}

TEST_CASE("occupation field: total mass equals the horizon")
{
    RngStream r(5);
    const SamplePath p = sample_brownian(TimeGrid(0.0, 1e-3, 2000), r);
    const LocalTimeField f = estimate_local_time_field(p, 2.0, 0.05);
    CHECK(f.mass() == doctest::Approx(2.0).epsilon(1e-9));
    for (double v : f.values) CHECK(v >= 0.0);
}

TEST_CASE("Ray-Knight field shape")
{
    RngStream r(6);
    const LocalTimeField f = ray_knight_field(1.0, 3.0, 0.01, r);
    CHECK(f.mode == FieldMode::ray_knight_exact);
    CHECK(f.at(1.0) == 0.0);
    CHECK(f.at(1.5) == 0.0);
    for (double v : f.values) CHECK(v >= 0.0);
    const auto at = ray_knight_at(1.0, {0.0, 0.5, 0.9}, r);
    CHECK(at.size() == 3);
    for (double v : at) CHECK(v >= 0.0);
}

TEST_CASE("Ray-Knight value at 0 is exponential with mean 2a")
{
    const int n = 20000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) {
        RngStream r(7, static_cast<std::uint64_t>(i));
        xs[i] = ray_knight_at(1.5, {0.0}, r)[0];
    }
    const auto ks = ks_one_sample(EmpiricalDistribution(xs), [](double x) { return x > 0 ? 1.0 - std::exp(-x / 3.0) : 0.0; });
    CHECK(ks.p_value > 0.001);
}

TEST_CASE("exit area bounds and passage time law")
{
    const Bounds b = exit_area_bounds(0.0, 1.0, 2.0);
    CHECK(b.lower == doctest::Approx(0.053989).epsilon(1e-4));
    CHECK(b.upper == doctest::Approx(0.107977).epsilon(1e-4));
    // the exit area equals in law the exit time of |B| from (-1, 1)
    const int n = 3000;
    std::vector<double> area(n), exit(n);
    for (int i = 0; i < n; ++i) {
        RngStream r(8, static_cast<std::uint64_t>(i));
        area[i] = exit_area_sample(0.0, 1.0, r);
        exit[i] = abs_bm_exit_time(1.0, 1e-4, r);
    }
    CHECK(ks_two_sample(EmpiricalDistribution(area), EmpiricalDistribution(exit)).p_value > 0.001);
    CHECK(EmpiricalDistribution(area).mean() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("exp-weighted area: mean 2r and remainder bookkeeping")
{
    const int n = 4000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        RngStream r(9, static_cast<std::uint64_t>(i));
        const WeightedAreaSample w = exp_weighted_area_sample(1.0, AreaSide::left, 0.0, r);
        CHECK(w.value >= 0.0);
        s += w.value;
    }
    // E L(sigma(r), -s) = 2r for every s >= 0
    CHECK(s / n == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("local time at sigma(1): mean 2(1 - y)")
{
    const int n = 1500;
    double s0 = 0.0, s5 = 0.0;
    for (int i = 0; i < n; ++i) {
        RngStream r(10, static_cast<std::uint64_t>(i));
        const auto v = local_time_at_sigma(1.0, {0.0, 0.5}, 0.02, 1e-4, r);
        s0 += v[0];
        s5 += v[1];
    }
    CHECK(s0 / n == doctest::Approx(2.0).epsilon(0.1));
    CHECK(s5 / n == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("argument checks")
{
    RngStream r(1);
    CHECK_THROWS_AS(local_time_at_sigma(0.0, {0.0}, 0.02, 1e-4, r), std::invalid_argument);
    CHECK_THROWS(exit_area_sample(1.0, 0.5, r));
}
