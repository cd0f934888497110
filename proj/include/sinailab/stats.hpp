#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "sinailab/rng.hpp"

namespace sinailab {

/// Sorted sample set. Censored samples carry no value; they enlarge the
/// denominator of the CDF so that cdf() is the sub-distribution of the
/// observed part (cdf(+inf) = n / (n + censored)).
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> values, std::size_t censored = 0);

    std::size_t n() const { return values_.size(); }
    std::size_t censored() const { return censored_; }
    std::size_t total() const { return values_.size() + censored_; }
    const std::vector<double>& values() const { return values_; }

    double cdf(double x) const;
    double mean() const;
    double variance() const;
    double quantile(double p) const;

private:
    std::vector<double> values_;
    std::size_t censored_;
};

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    std::size_t m = 0;
};

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_q(double lambda);

/// Two-sample KS; ties are handled by stepping both CDFs past equal values together.
KsResult ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// One-sample KS against a continuous reference CDF.
KsResult ks_one_sample(const EmpiricalDistribution& a, const std::function<double(double)>& cdf);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval.
Interval binomial_ci(std::size_t successes, std::size_t n, double level = 0.95);

/// Upper bound 1 - (1 - level)^{1/n} on p after zero successes in n trials.
double one_sided_zero_bound(std::size_t n, double level = 0.95);

/// Standard deviation of a functional over B nonparametric resamples.
double bootstrap_se(const std::vector<double>& samples,
                    const std::function<double(const std::vector<double>&)>& functional,
                    std::size_t resamples, RngStream rng);

/// Mean and standard error of a sample.
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};
MeanSe mean_se(const std::vector<double>& xs);

/// Pearson correlation and its approximate standard error (1 - r^2)/sqrt(n - 1).
MeanSe correlation(const std::vector<double>& x, const std::vector<double>& y);

/// Empirical Laplace transform mean(exp(-lambda x)).
double laplace_mean(const std::vector<double>& xs, double lambda);

} // namespace sinailab
