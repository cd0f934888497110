#include <doctest.h>

#include <cmath>
#include <vector>

#include "sinailab/parallel.hpp"
#include "sinailab/rng.hpp"
#include "sinailab/special_functions.hpp"
#include "sinailab/stats.hpp"

using namespace sinailab;

TEST_CASE("rng: same key, same draws; split does not advance")
{
    RngStream a(7, 3), b(7, 3);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    RngStream c(7, 3);
    const RngStream child = c.split(5);
    CHECK(c() == RngStream(7, 3)());
    CHECK(child.stream_id() != c.stream_id());
    RngStream c1 = c.split(5), c2 = c.split(6);
    CHECK(c1() != c2());
}

TEST_CASE("rng: variate moments")
{
    RngStream r(11);
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0, se = 0, sg = 0, sp = 0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        su += u;
        const double z = r.normal();
        sn += z;
        sn2 += z * z;
        se += r.exponential();
        sg += r.gamma(0.4);
        sp += static_cast<double>(r.poisson(i % 2 ? 3.0 : 40.0));
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.005));
    CHECK(std::fabs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(se / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sg / n == doctest::Approx(0.4).epsilon(0.015));
    CHECK(sp / n == doctest::Approx(21.5).epsilon(0.005));
}

TEST_CASE("replicate is independent of worker count")
{
    const RngStream base(3, 9);
    auto draw = [&](std::size_t i) {
        RngStream r = base.split(i);
        return r.normal();
    };
    setenv("SINAILAB_THREADS", "1", 1);
    const auto one = replicate(50, draw);
    setenv("SINAILAB_THREADS", "4", 1);
    const auto four = replicate(50, draw);
    unsetenv("SINAILAB_THREADS");
    CHECK(one == four);
}

TEST_CASE("special functions against tabulated values")
{
    CHECK(bessel_i(1.0, 2.0) == doctest::Approx(1.5906368546).epsilon(1e-9));
    CHECK(bessel_i(0.0, 1.0) == doctest::Approx(1.2660658778).epsilon(1e-9));
    CHECK(bessel_i(0.0, 50.0) == doctest::Approx(2.93255378e20).epsilon(1e-7));
    CHECK(bessel_k(1.0, 1.0) == doctest::Approx(0.6019072302).epsilon(1e-8));
    CHECK(bessel_k(0.5, 1.0) == doctest::Approx(0.4610685044).epsilon(1e-8));
    CHECK(bessel_k_scaled(0.5, 1.0) == doctest::Approx(0.4610685044 * std::exp(1.0)).epsilon(1e-8));
    CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447461).epsilon(1e-9));
}

TEST_CASE("closed-form references")
{
    // kappa = 1/2: the functional is the passage time itself, transform e^{-lambda a}
    CHECK(lemma23_laplace_reference(0.5, 1.0, 2.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
    CHECK(exp_weighted_area_laplace(1.0, 0.5) == doctest::Approx(0.38601).epsilon(1e-4));
    CHECK(exp_weighted_area_laplace_normalized(1.0, 0.5) == doctest::Approx(0.58901).epsilon(1e-4));
    // second moment of the normalised transform, by finite differences at small lambda
    const double r = 1.0, h = 1e-4;
    const auto f = [&](double l) { return exp_weighted_area_laplace_normalized(r, l); };
    const double d2 = (f(3 * h) - 2 * f(2 * h) + f(h)) / (h * h);
    CHECK(d2 == doctest::Approx(8 * r * r + 4 * r).epsilon(0.03));
    CHECK_THROWS_AS(exp_weighted_area_laplace(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("empirical distribution with censoring")
{
    EmpiricalDistribution e({3.0, 1.0, 2.0}, 1);
    CHECK(e.total() == 4);
    CHECK(e.cdf(0.5) == 0.0);
    CHECK(e.cdf(2.0) == doctest::Approx(0.5));
    CHECK(e.cdf(10.0) == doctest::Approx(0.75));
    CHECK(e.mean() == doctest::Approx(2.0));
}

TEST_CASE("KS: null calibration and power")
{
    CHECK(kolmogorov_q(0.0) == doctest::Approx(1.0));
    CHECK(kolmogorov_q(1.358) == doctest::Approx(0.05).epsilon(0.01));
    // p-values of same-law comparisons are roughly uniform
    const RngStream base(5);
    int below = 0;
    const int reps = 400;
    for (int k = 0; k < reps; ++k) {
        RngStream r = base.split(static_cast<std::uint64_t>(k));
        std::vector<double> a(300), b(300);
        for (auto& x : a) x = r.normal();
        for (auto& x : b) x = r.normal();
        if (ks_two_sample(EmpiricalDistribution(a), EmpiricalDistribution(b)).p_value < 0.1) ++below;
    }
    CHECK(below > 20);
    CHECK(below < 62);

    RngStream r(6);
    std::vector<double> a(2000), b(2000);
    for (auto& x : a) x = r.normal();
    for (auto& x : b) x = r.normal(0.2, 1.0);
    CHECK(ks_two_sample(EmpiricalDistribution(a), EmpiricalDistribution(b)).p_value < 1e-6);
    CHECK(ks_one_sample(EmpiricalDistribution(a), normal_cdf).p_value > 0.001);
}

TEST_CASE("intervals, bootstrap, correlation")
{
    const Interval ci = binomial_ci(50, 100);
    CHECK(ci.lo < 0.5);
    CHECK(ci.hi > 0.5);
    CHECK(ci.hi - ci.lo == doctest::Approx(0.19).epsilon(0.05));
    CHECK(one_sided_zero_bound(100) == doctest::Approx(1.0 - std::pow(0.05, 0.01)));

    RngStream r(8);
    std::vector<double> xs(4000), ys(4000);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = r.normal();
        ys[i] = r.normal();
    }
    const MeanSe m = mean_se(xs);
    CHECK(m.se == doctest::Approx(1.0 / std::sqrt(4000.0)).epsilon(0.05));
    const double bse = bootstrap_se(xs, [](const std::vector<double>& v) { return mean_se(v).mean; }, 300, RngStream(9));
    CHECK(bse == doctest::Approx(m.se).epsilon(0.15));
    CHECK(std::fabs(correlation(xs, ys).mean) < 0.05);
    CHECK(laplace_mean({0.0, 0.0}, 2.0) == doctest::Approx(1.0));
}
