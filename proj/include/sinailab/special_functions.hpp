#pragma once

namespace sinailab {

/// Modified Bessel function of the first kind I_nu(x), x >= 0.
/// Power series up to kBesselSeriesLimit, Hankel asymptotic expansion above.
/// Throws std::out_of_range when the result would overflow a double.
double bessel_i(double nu, double x);

/// Modified Bessel function of the second kind K_nu(x), x > 0, nu >= 0.
/// Trapezoidal quadrature of the integral over e^{-x cosh t} cosh(nu t).
double bessel_k(double nu, double x);

/// e^x K_nu(x); finite for every x > 0.
double bessel_k_scaled(double nu, double x);

constexpr double kBesselSeriesLimit = 40.0;

/// Closed-form Laplace transform, at lambda^2/2, of the integral of
/// (b - B)^{1/kappa - 2} up to the first passage of B above a.
double lemma23_laplace_reference(double kappa, double lambda, double b, double a);

/// Laplace transform 1 / (1 + r sqrt(2 lambda) I_1(sqrt(8 lambda))) of the
/// e^{-s}-weighted local time below the origin at the passage time above r.
double exp_weighted_area_laplace(double r, double lambda);

/// Same transform with the Sturm-Liouville solution I_0(sqrt(8 lambda) e^{-x/2})
/// scaled to 1 at x = 0, i.e. I_1 replaced by I_1 / I_0. Its second moment
/// is 8 r^2 + 4 r, the value computed directly from the BESQ(0) covariance.
double exp_weighted_area_laplace_normalized(double r, double lambda);

/// Standard normal CDF.
double normal_cdf(double x);

} // namespace sinailab
