#ifndef WISHLAB_STATS_HPP
#define WISHLAB_STATS_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wishlab {

/// Point estimate with its error bar, and optionally a KS comparison.
struct StatSummary {
  std::string name;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::pair<double, double> ci95{0.0, 0.0};
  std::optional<double> ks_D;
  std::optional<double> ks_p;
  long long n_samples = 0;
};

struct KsResult {
  double D = 0.0;
  double p = 1.0;
};

/// Kolmogorov survival function P(K > x) for the limiting KS law.
double kolmogorov_survival(double x) noexcept;

/// sup |F_n - F| for ascending samples; defined for any nonempty sample.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// One-sample KS test; `sorted` must be ascending. Needs at least 8 samples.
KsResult ks_test(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// Two-sample KS test on ascending samples, asymptotic p-value.
KsResult ks_two_sample(std::span<const double> sorted_a, std::span<const double> sorted_b);

/// Sample mean, standard error and normal 95% interval.
StatSummary mean_summary(std::string name, std::span<const double> samples);

/// Binomial proportion with the Wilson 95% interval.
StatSummary proportion_summary(std::string name, long long successes, long long trials);

/// Mean of exp(-mu * s) over nonnegative samples s.
StatSummary empirical_laplace(std::span<const double> integral_samples, double mu);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h. A DomainError thrown
/// by f, or a non-finite value, is reported as DomainError.
std::vector<double> finite_diff_gradient(const std::function<double(std::span<const double>)>& f,
                                         std::span<const double> x, double h);

double normal_cdf(double x) noexcept;
/// Regularized lower incomplete gamma: CDF of Gamma(shape, rate).
double gamma_cdf(double x, double shape, double rate);
/// Upper tail of the chi-square law with k degrees of freedom.
double chi_square_sf(double x, double dof);

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p = 1.0;
};

/// Goodness of fit of observed counts against expected probabilities.
ChiSquareResult chi_square_gof(std::span<const long long> observed, std::span<const double> probs);
/// Homogeneity of two count vectors over the same bins; empty bins are skipped.
ChiSquareResult chi_square_two_sample(std::span<const long long> a, std::span<const long long> b);

/// Potential scale reduction factor over equally long chains.
double gelman_rubin(const std::vector<std::vector<double>>& chains);

double sample_mean(std::span<const double> v) noexcept;
double sample_variance(std::span<const double> v) noexcept;

}  // namespace wishlab

#endif  // WISHLAB_STATS_HPP
