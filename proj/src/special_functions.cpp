#include "sinailab/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace sinailab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMaxExpArg = 700.0;

double bessel_i_series(double nu, double x)
{
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const double q = 0.25 * x * x;
    double term = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0));
    double sum = term;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<double>(k) * (static_cast<double>(k) + nu));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

double bessel_i_asymptotic(double nu, double x)
{
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (static_cast<double>(k) * 8.0 * x);
        if (std::fabs(next) > std::fabs(term)) break;
        term = next;
        sum += term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    }
    return std::exp(x) / std::sqrt(2.0 * kPi * x) * sum;
}

} // namespace

double bessel_i(double nu, double x)
{
    if (!(x >= 0.0)) throw std::invalid_argument("bessel_i: x must be nonnegative");
    if (nu < 0.0) throw std::invalid_argument("bessel_i: order must be nonnegative");
    if (x > kMaxExpArg) throw std::out_of_range("bessel_i: argument overflows");
    return x <= kBesselSeriesLimit ? bessel_i_series(nu, x) : bessel_i_asymptotic(nu, x);
}

double bessel_k_scaled(double nu, double x)
{
    if (!(x > 0.0)) throw std::invalid_argument("bessel_k: x must be positive");
    if (!(nu >= 0.0)) throw std::invalid_argument("bessel_k: order must be nonnegative");
    // e^x K_nu(x) = int_0^inf exp(-2x sinh^2(t/2)) cosh(nu t) dt, trapezoid rule.
    constexpr double h = 0.05;
    double sum = 0.5;
    for (int k = 1;; ++k) {
        const double t = k * h;
        const double s = std::sinh(0.5 * t);
        const double log_term = -2.0 * x * s * s + nu * t;
        const double term = std::exp(-2.0 * x * s * s) * std::cosh(nu * t);
        sum += term;
        if (log_term < -45.0 && t > 1.0) break;
        if (k > 100000) break;
    }
    return h * sum;
}

double bessel_k(double nu, double x)
{
    if (x > kMaxExpArg) throw std::out_of_range("bessel_k: argument underflows");
    return bessel_k_scaled(nu, x) * std::exp(-x);
}

double lemma23_laplace_reference(double kappa, double lambda, double b, double a)
{
    if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("lemma23: kappa must lie in (0, 1]");
    if (!(lambda > 0.0)) throw std::invalid_argument("lemma23: lambda must be positive");
    if (!(b > 0.0) || !(a > 0.0 && a < b)) throw std::invalid_argument("lemma23: need 0 < a < b");
    const double e = 1.0 / (2.0 * kappa);
    const double x1 = 2.0 * kappa * lambda * std::pow(b, e);
    const double x2 = 2.0 * kappa * lambda * std::pow(b - a, e);
    const double ratio = bessel_k_scaled(kappa, x1) / bessel_k_scaled(kappa, x2);
    const double value = std::sqrt(b / (b - a)) * ratio * std::exp(x2 - x1);
    if (!std::isfinite(value)) throw std::out_of_range("lemma23: K ratio out of range");
    return value;
}

double exp_weighted_area_laplace(double r, double lambda)
{
    if (!(r > 0.0) || !(lambda > 0.0)) throw std::invalid_argument("exp_weighted_area_laplace: r, lambda > 0");
    return 1.0 / (1.0 + r * std::sqrt(2.0 * lambda) * bessel_i(1.0, std::sqrt(8.0 * lambda)));
}

double exp_weighted_area_laplace_normalized(double r, double lambda)
{
    if (!(r > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("exp_weighted_area_laplace_normalized: r, lambda > 0");
    const double z = std::sqrt(8.0 * lambda);
    return 1.0 / (1.0 + r * std::sqrt(2.0 * lambda) * bessel_i(1.0, z) / bessel_i(0.0, z));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace sinailab
