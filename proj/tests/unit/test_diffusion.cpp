#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "sinailab/diffusion.hpp"
#include "sinailab/identities.hpp"
#include "sinailab/special_functions.hpp"

using namespace sinailab;

TEST_CASE("Kotani fixed point solves 1 + z/2 - 2 lambda z^2 = 0")
{
    CHECK(kotani_fixed_point(0.5) == doctest::Approx(1.2808).epsilon(1e-4));
    for (double l : {0.1, 1.0, 3.0}) {
        const double z = kotani_fixed_point(l);
        CHECK(1.0 + 0.5 * z - 2.0 * l * z * z == doctest::Approx(0.0).scale(1.0));
    }
    CHECK_THROWS_AS(kotani_fixed_point(0.0), std::invalid_argument);
}

TEST_CASE("Kotani on a flat potential is the Brownian transform")
{
    const Potential p = Potential::flat(0.0, 0.01, 30.0);
    for (double l : {0.25, 0.5}) {
        for (double v : {0.5, 2.0})
            CHECK(kotani_rhs(p, l, v) == doctest::Approx(std::exp(-v * std::sqrt(2.0 * l))).epsilon(1e-6));
    }
}

TEST_CASE("Kotani schemes: refinement changes little, schemes agree")
{
    Potential p(0.0, 5e-4, RngStream(31));
    p.realize(-25.0, 2.0);
    KotaniOptions a, b;
    a.substeps = 2;
    b.substeps = 4;
    const double pa = kotani_rhs(p, 0.5, 1.0, a), pb = kotani_rhs(p, 0.5, 1.0, b);
    CHECK(std::fabs(pa / pb - 1.0) < 0.01);
    const SamplePath z = kotani_z_path(p, 0.5, 1.0);
    for (double x : z.values()) CHECK(x > 0.0);

    // Euler on the same path at half the resolution
    std::vector<double> left, right;
    for (long i = 0; i >= p.index_min(); i -= 2) left.push_back(p.w_at(i));
    for (long i = 0; i <= p.index_max(); i += 2) right.push_back(p.w_at(i));
    const Potential coarse = Potential::from_values(0.0, 1e-3, left, right);
    a.scheme = KotaniScheme::euler;
    const double ef = kotani_rhs(p, 0.5, 1.0, a), ec = kotani_rhs(coarse, 0.5, 1.0, a);
    CHECK(std::fabs(ef / ec - 1.0) < 0.01);
    CHECK(std::fabs(ef / pa - 1.0) < 0.02);
}

TEST_CASE("flat potential: H(1) is the Brownian passage time")
{
    // P(H(1) <= 1) = 2 Phi(-1)
    const int n = 3000;
    int hit = 0;
    for (int i = 0; i < n; ++i) {
        Potential p = Potential::flat(0.0, 0.01, 20.0);
        const StoppingRecord h = hitting_time_h(p, 1.0, RngStream(2, static_cast<std::uint64_t>(i)), 1e-3, 5.0);
        if (!h.censored && h.time <= 1.0) ++hit;
    }
    const double ph = static_cast<double>(hit) / n, se = std::sqrt(0.3173 * 0.6827 / n);
    CHECK(std::fabs(ph - 2.0 * normal_cdf(-1.0)) < 3.0 * se + 0.01);
}

TEST_CASE("simulate_x on a flat potential is Brownian")
{
    double s = 0.0, s2 = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        Potential p = Potential::flat(0.0, 0.01, 20.0);
        const SamplePath x = simulate_x(p, 1.0, 1e-3, RngStream(3, static_cast<std::uint64_t>(i)));
        s += x.values().back();
        s2 += x.values().back() * x.values().back();
    }
    CHECK(std::fabs(s / n) < 0.08);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.08));
}

TEST_CASE("occupation pair: path and Ray-Knight modes")
{
    Potential p(0.0, 1e-3, RngStream(44));
    OccupationOptions o;
    o.cap = 30.0;
    std::vector<double> a, b;
    for (std::uint64_t i = 0; i < 300; ++i) {
        const OccupationPair x = occupation_pair(p, 0.5, RngStream(5, i), OccupationMode::path, o);
        const OccupationPair y = occupation_pair(p, 0.5, RngStream(6, i), OccupationMode::ray_knight, o);
        CHECK(x.theta1 >= 0.0);
        CHECK(x.theta2 >= 0.0);
        CHECK(x.theta2 <= o.cap + 1e-9);
        a.push_back(x.theta1);
        b.push_back(y.theta1);
    }
    CHECK(ks_two_sample(EmpiricalDistribution(a), EmpiricalDistribution(b)).p_value > 0.001);
}

TEST_CASE("mean of theta1 at kappa = 0")
{
    // E 4 int_0^v (e^Xi - 1) = 8(e^{v/2} - 1) - 4v
    const int n = 3000;
    double s = 0.0, s2 = 0.0;
    Theorem41Options o;
    for (int i = 0; i < n; ++i) {
        const TwoRouteSample t = theorem41_route_b(0.0, 1.0, 1e-3, RngStream(7, static_cast<std::uint64_t>(i)), o);
        s += t.pair.theta1;
        s2 += t.pair.theta1 * t.pair.theta1;
    }
    const double m = s / n, se = std::sqrt((s2 / n - m * m) / n);
    CHECK(std::fabs(m - 1.18977) < 3.5 * se);
}

TEST_CASE("rate fields on zero and positive counts")
{
    RateEstimate e;
    e.n = 1000;
    e.successes = 0;
    finalize_rate(e, 2.0);
    CHECK(std::isnan(e.rate));
    CHECK(std::isinf(e.rate_lo));
    CHECK(e.rate_hi < 0.0);
    CHECK(e.interval_only);
    e.successes = 100;
    finalize_rate(e, 2.0);
    CHECK(e.rate == doctest::Approx(2.0 * std::log(0.1)));
    CHECK(e.rate_lo < e.rate);
    CHECK(e.rate < e.rate_hi);
    CHECK_FALSE(e.interval_only);
    std::ostringstream os;
    write_rate_csv_header(os);
    write_rate_csv_row(os, 7, e);
    CHECK(os.str().find('\n') != std::string::npos);
}

TEST_CASE("coarse chain on a flat potential is a simple walk")
{
    const Potential p = Potential::flat(0.0, 0.01, 10.0);
    const CoarseChain c(p, 0.5, -5.0, 5.0);
    CHECK(c.cell() == doctest::Approx(0.5));
    for (long k = c.k_min() + 1; k < c.k_max(); ++k) {
        CHECK(c.p_up(k) == doctest::Approx(0.5));
        CHECK(c.mean_hold(k) == doctest::Approx(0.25).epsilon(1e-3));
    }
    RngStream r(1);
    const CoarseChain::Run run = c.run(100.0, 4, r, 1'000'000);
    CHECK(run.max_site >= run.final_site);
}
