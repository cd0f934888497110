#include "sinailab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sinailab {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values, std::size_t censored)
    : values_(std::move(values)), censored_(censored)
{
    if (values_.empty()) throw std::invalid_argument("EmpiricalDistribution: need at least one observed value");
    for (double v : values_)
        if (std::isnan(v)) throw std::invalid_argument("EmpiricalDistribution: NaN sample");
    std::sort(values_.begin(), values_.end());
}

double EmpiricalDistribution::cdf(double x) const
{
    const auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(total());
}

double EmpiricalDistribution::mean() const
{
    return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(n());
}

double EmpiricalDistribution::variance() const
{
    if (n() < 2) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (double v : values_) s += (v - m) * (v - m);
    return s / static_cast<double>(n() - 1);
}

double EmpiricalDistribution::quantile(double p) const
{
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0, 1]");
    const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n())));
    return values_[std::min(n() - 1, k == 0 ? 0 : k - 1)];
}

double kolmogorov_q(double lambda)
{
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b)
{
    if (a.total() < 25 || b.total() < 25) throw std::invalid_argument("ks_two_sample: need n, m >= 25");
    const auto& x = a.values();
    const auto& y = b.values();
    const double na = static_cast<double>(a.total());
    const double nb = static_cast<double>(b.total());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() || j < y.size()) {
        double v;
        if (j == y.size() || (i < x.size() && x[i] <= y[j])) v = x[i];
        else v = y[j];
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    r.n = a.total();
    r.m = b.total();
    const double ne = na * nb / (na + nb);
    r.p_value = kolmogorov_q(d * std::sqrt(ne));
    return r;
}

KsResult ks_one_sample(const EmpiricalDistribution& a, const std::function<double(double)>& cdf)
{
    const auto& x = a.values();
    const double n = static_cast<double>(a.total());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    KsResult r;
    r.statistic = d;
    r.n = a.total();
    r.m = 0;
    r.p_value = kolmogorov_q(d * std::sqrt(n));
    return r;
}

namespace {

// Acklam's rational approximation refined by one Halley step.
double normal_quantile(double p)
{
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01, -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    double x;
    if (p < 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p > 1.0 - 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

} // namespace

Interval binomial_ci(std::size_t successes, std::size_t n, double level)
{
    if (n == 0) throw std::invalid_argument("binomial_ci: n must be positive");
    if (successes > n) throw std::invalid_argument("binomial_ci: successes exceed n");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("binomial_ci: level outside (0, 1)");
    const double z = normal_quantile(0.5 + 0.5 * level);
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
    const double half = z / (1.0 + z2 / nn) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    if (successes == 0) ci.lo = 0.0;
    if (successes == n) ci.hi = 1.0;
    return ci;
}

double one_sided_zero_bound(std::size_t n, double level)
{
    if (n == 0) throw std::invalid_argument("one_sided_zero_bound: n must be positive");
    return 1.0 - std::pow(1.0 - level, 1.0 / static_cast<double>(n));
}

double bootstrap_se(const std::vector<double>& samples,
                    const std::function<double(const std::vector<double>&)>& functional,
                    std::size_t resamples, RngStream rng)
{
    if (resamples < 200) throw std::invalid_argument("bootstrap_se: need at least 200 resamples");
    if (samples.empty()) throw std::invalid_argument("bootstrap_se: empty sample");
    const std::size_t n = samples.size();
    std::vector<double> stats(resamples);
    std::vector<double> draw(n);
    for (std::size_t b = 0; b < resamples; ++b) {
        for (auto& d : draw) d = samples[static_cast<std::size_t>(rng() % n)];
        stats[b] = functional(draw);
    }
    return mean_se(stats).se * std::sqrt(static_cast<double>(resamples));
}

MeanSe mean_se(const std::vector<double>& xs)
{
    if (xs.empty()) throw std::invalid_argument("mean_se: empty sample");
    const double n = static_cast<double>(xs.size());
    const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return {m, 0.0};
    double s = 0.0;
    for (double v : xs) s += (v - m) * (v - m);
    return {m, std::sqrt(s / (n - 1.0) / n)};
}

MeanSe correlation(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("correlation: need matched samples, n >= 3");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    const double r = (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
    return {r, (1.0 - r * r) / std::sqrt(n - 1.0)};
}

double laplace_mean(const std::vector<double>& xs, double lambda)
{
    if (xs.empty()) throw std::invalid_argument("laplace_mean: empty sample");
    double s = 0.0;
    for (double v : xs) s += std::exp(-lambda * v);
    return s / static_cast<double>(xs.size());
}

} // namespace sinailab
