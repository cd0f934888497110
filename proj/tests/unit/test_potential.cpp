#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "sinailab/potential.hpp"

using namespace sinailab;

TEST_CASE("flat potential: A(x) = x and exact inverse")
{
    const Potential p = Potential::flat(0.0, 0.01, 5.0);
    CHECK(p.frozen());
    CHECK(p.a_kappa(2.345) == doctest::Approx(2.345).epsilon(1e-12));
    CHECK(p.a_kappa(-1.5) == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(p.a_kappa_inverse(3.21) == doctest::Approx(3.21).epsilon(1e-12));
    CHECK_THROWS_AS(p.w(6.0), std::out_of_range);
}

TEST_CASE("drift enters through W_kappa")
{
    const Potential p = Potential::flat(1.0, 0.001, 3.0);
    CHECK(p.w_kappa(2.0) == doctest::Approx(-1.0));
    // A(x) = int_0^x e^{-y/2} dy
    CHECK(p.a_kappa(2.0) == doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-6));
    for (double u : {-1.0, 0.3, 1.1}) CHECK(p.a_kappa(p.a_kappa_inverse(u)) == doctest::Approx(u).epsilon(1e-10));
}

TEST_CASE("sampled potential: extension keeps values, A monotone")
{
    Potential p(0.0, 0.01, RngStream(42, 1));
    p.realize(-1.0, 1.0);
    const double w05 = p.w(0.5), wm = p.w(-0.73);
    p.realize(-50.0, 50.0);
    CHECK(p.w(0.5) == w05);
    CHECK(p.w(-0.73) == wm);
    CHECK(p.w(0.0) == 0.0);
    for (long i = p.index_min(); i < p.index_max(); ++i) CHECK(p.a_at(i) < p.a_at(i + 1));
    Potential q(0.0, 0.01, RngStream(42, 1));
    q.realize(-50.0, 50.0);
    CHECK(q.w(37.3) == p.w(37.3));
    p.set_max_points(100);
    CHECK_THROWS_AS(p.realize(-1e4, 1e4), std::out_of_range);
}

TEST_CASE("csv and binary round trips")
{
    Potential p(0.5, 0.02, RngStream(9, 4));
    p.realize(-3.0, 3.0);
    std::stringstream csv;
    p.save_csv(csv);
    const Potential c = Potential::load_csv(csv);
    std::stringstream bin;
    p.save_binary(bin);
    const Potential b = Potential::load_binary(bin);
    for (const Potential* q : {&c, &b}) {
        CHECK(q->kappa() == 0.5);
        CHECK(q->resolution() == doctest::Approx(0.02));
        CHECK(q->index_min() == p.index_min());
        CHECK(q->index_max() == p.index_max());
        for (long i = p.index_min(); i <= p.index_max(); ++i) CHECK(q->w_at(i) == p.w_at(i));
    }
    CHECK(b.seed() == 9);
    CHECK(b.stream_id() == 4);
    std::stringstream bad("not a potential");
    CHECK_THROWS(Potential::load_binary(bad));
}

TEST_CASE("oscillations on a constructed potential")
{
    // W on [0, 1]: up to 1, down to -0.5, up to 0.2
    const std::vector<double> right{0.0, 0.5, 1.0, 0.25, -0.5, -0.15, 0.2};
    const Potential p = Potential::from_values(0.0, 1.0 / 6.0, {0.0, 0.0}, right);
    const Oscillation o = oscillation_stats(p, 0.0, 1.0);
    CHECK(o.w_bar == doctest::Approx(1.0));
    CHECK(o.w_under == doctest::Approx(-0.5));
    CHECK(o.sharp_ab == doctest::Approx(1.0));
    CHECK(o.sharp_ba == doctest::Approx(1.5));
    CHECK(f2_flag(p, 1.0, 4.0, 0.01));
    CHECK_FALSE(f2_flag(p, 1.0, 2.0, 0.01));
}

TEST_CASE("F2 reference tends to (2/pi) e^{-pi^2 v / 8 r^2}")
{
    const double pi = 3.14159265358979323846;
    CHECK(f2_asymptotic_reference(4.0, 2.0, 1e-9) ==
          doctest::Approx(2.0 / pi * std::exp(-pi * pi / 8.0)).epsilon(1e-6));
    CHECK(f2_asymptotic_reference(4.0, 2.0, 0.01) < f2_asymptotic_reference(4.0, 2.0, 1e-9));
}

TEST_CASE("valley scan ordering")
{
    Potential p(0.0, 0.01, RngStream(77));
    p.realize(-20.0, 40.0);
    const ValleyReport v = valley_times(p, 4.0, 2.0, 0.01);
    CHECK(v.d_minus < 0.0);
    CHECK(v.eta >= v.v);
    CHECK(v.alpha >= v.eta);
    CHECK(v.m >= v.eta);
    CHECK(v.m <= v.alpha);
    CHECK_THROWS_AS(valley_times(p, 4.0, 2.0, 0.1), std::invalid_argument);
}

TEST_CASE("gamma functional on a flat potential is the shorter side")
{
    const Potential p = Potential::flat(0.0, 0.01, 5.0);
    CHECK(gamma_functional(p, -2.0, 0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(exp_integral(p, -1.0, 1.0, 0.0) == doctest::Approx(2.0));
}
