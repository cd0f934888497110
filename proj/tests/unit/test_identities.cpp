#include <doctest.h>

#include <cmath>

#include "sinailab/identities.hpp"

using namespace sinailab;

TEST_CASE("Xi step: drift (1 + kappa)/2 - kappa/2 at the origin, reflection")
{
    CHECK(xi_step(0.0, 0.0, 0.01, 0.0) == doctest::Approx(0.005));
    CHECK(xi_step(0.0, 1.0, 0.01, 0.0) == doctest::Approx(0.005));
    CHECK(xi_step(0.1, 0.0, 0.01, -50.0) >= 0.0);
}

TEST_CASE("Xi: E e^{Xi(s)} = e^{s/2} at kappa = 0, nonnegative paths")
{
    const int n = 4000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        RngStream r(1, static_cast<std::uint64_t>(i));
        const XiPath p = simulate_xi(0.0, 1.0, 1e-3, r);
        for (double x : p.path.values()) REQUIRE(x >= 0.0);
        const double e = std::exp(p.path.values().back());
        s += e;
        s2 += e * e;
    }
    const double m = s / n, se = std::sqrt((s2 / n - m * m) / n);
    CHECK(std::fabs(m - std::exp(0.5)) < 3.5 * se + 0.005);
}

TEST_CASE("Xi quadratic variation matches the diffusion coefficient")
{
    RngStream r(2);
    CHECK(xi_quadratic_variation_ratio(0.0, 20.0, 1e-3, r) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("Jacobi stays in [0, 1]")
{
    RngStream r(3);
    const JacobiPath j = simulate_jacobi(2.0, 4.0, 0.5, 5.0, 1e-3, r);
    for (double y : j.path.values()) {
        CHECK(y >= 0.0);
        CHECK(y <= 1.0);
    }
    CHECK(jacobi_step(1.0, 2.0, 4.0, 0.01, 0.0) < 1.0);
    CHECK_THROWS(simulate_jacobi(2.0, 4.0, 1.5, 1.0, 1e-3, r));
}

TEST_CASE("skew product at u = 0 returns the start ratio")
{
    RngStream r(4);
    const auto [ratio, radius] = skewproduct_sample(2.0, 4.0, 1.0, 1.0, 0.0, r);
    CHECK(ratio == doctest::Approx(0.5));
    CHECK(radius == doctest::Approx(2.0));
}

TEST_CASE("Lamperti marginal: mean e^{(kappa + 1) x / 2}")
{
    const int n = 4000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        RngStream r(5, static_cast<std::uint64_t>(i));
        s += lamperti_marginal(0.0, 0.5, r, 1e-3);
    }
    CHECK(s / n == doctest::Approx(std::exp(0.25)).epsilon(0.03));
}

TEST_CASE("confinement references")
{
    const Bounds b = xi_bounds_reference(50.0, 3.0);
    CHECK(b.lower < b.upper);
    CHECK(b.upper / b.lower == doctest::Approx(9.0 * 3.14159265358979 / 2.0).epsilon(1e-6));
    const ProbabilityEstimate e = xi_confinement(0.0, 5.0, 3.0, 500, 1e-2, RngStream(6));
    CHECK(e.p_hat > 0.0);
    CHECK(e.p_hat <= 1.0);
}

TEST_CASE("mutations change route B")
{
    Theorem41Options o;
    const RngStream r(8);
    const TwoRouteSample clean = theorem41_route_b(0.0, 1.0, 1e-3, r, o);
    o.mutation = Mutation::drop_minus_one;
    const TwoRouteSample m = theorem41_route_b(0.0, 1.0, 1e-3, r, o);
    CHECK(m.pair.theta1 == doctest::Approx(clean.pair.theta1 + 4.0).epsilon(1e-6));
    CHECK(m.pair.theta2 == clean.pair.theta2);
}
