#include "wishlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "wishlab/error.hpp"

namespace wishlab {

double kolmogorov_survival(double x) noexcept {
  if (x <= 0.0) return 1.0;
  if (x < 1.0) {
    // Jacobi-transformed series, fast for small x.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      s += std::exp(-m * m * pi2 / (8.0 * x * x));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / x * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

namespace {

double ks_pvalue(double D, double n_eff) {
  const double rn = std::sqrt(n_eff);
  return kolmogorov_survival((rn + 0.12 + 0.11 / rn) * D);
}

}  // namespace

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  if (sorted.empty()) throw TooFewSamples("ks_statistic needs a nonempty sample");
  const double n = static_cast<double>(sorted.size());
  double D = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = cdf(sorted[i]);
    D = std::max({D, (static_cast<double>(i) + 1.0) / n - F, F - static_cast<double>(i) / n});
  }
  return std::clamp(D, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  if (sorted.size() < 8) throw TooFewSamples("ks_test needs at least 8 samples, got " + std::to_string(sorted.size()));
  const double D = ks_statistic(sorted, cdf);
  return {D, ks_pvalue(D, static_cast<double>(sorted.size()))};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 8 || b.size() < 8) throw TooFewSamples("ks_two_sample needs at least 8 samples per side");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double D = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    D = std::max(D, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {D, ks_pvalue(D, na * nb / (na + nb))};
}

double sample_mean(std::span<const double> v) noexcept {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) noexcept {
  if (v.size() < 2) return 0.0;
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

StatSummary mean_summary(std::string name, std::span<const double> samples) {
  StatSummary s;
  s.name = std::move(name);
  s.n_samples = static_cast<long long>(samples.size());
  s.estimate = sample_mean(samples);
  s.stderr_ = samples.size() > 1 ? std::sqrt(sample_variance(samples) / static_cast<double>(samples.size())) : 0.0;
  s.ci95 = {s.estimate - 1.96 * s.stderr_, s.estimate + 1.96 * s.stderr_};
  return s;
}

StatSummary proportion_summary(std::string name, long long successes, long long trials) {
  StatSummary s;
  s.name = std::move(name);
  s.n_samples = trials;
  if (trials <= 0) return s;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  s.estimate = p;
  s.stderr_ = std::sqrt(p * (1.0 - p) / n);
  const double z = 1.96;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  s.ci95 = {std::max(0.0, centre - half), std::min(1.0, centre + half)};
  return s;
}

StatSummary empirical_laplace(std::span<const double> integral_samples, double mu) {
  if (!(mu >= 0.0)) throw DomainError("mu must be >= 0");
  std::vector<double> v;
  v.reserve(integral_samples.size());
  for (double s : integral_samples) v.push_back(mu == 0.0 ? 1.0 : std::exp(-mu * s));
  return mean_summary("laplace(mu=" + std::to_string(mu) + ")", v);
}

std::vector<double> finite_diff_gradient(const std::function<double(std::span<const double>)>& f,
                                         std::span<const double> x, double h) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> g(x.size());
  auto eval = [&]() {
    double v;
    try {
      v = f(probe);
    } catch (const DomainError& e) {
      throw DomainError(std::string("finite difference left the domain: ") + e.what());
    }
    if (!std::isfinite(v)) throw DomainError("finite difference produced a non-finite value");
    return v;
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = eval();
    probe[i] = x[i] - h;
    const double down = eval();
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gamma_cdf(double x, double shape, double rate) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(shape, rate * x);
}

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

ChiSquareResult chi_square_gof(std::span<const long long> observed, std::span<const double> probs) {
  if (observed.size() != probs.size() || observed.size() < 2) throw DomainError("chi_square_gof: bin mismatch");
  long long total = 0;
  for (long long o : observed) total += o;
  ChiSquareResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probs[i] * static_cast<double>(total);
    if (e <= 0.0) throw DomainError("chi_square_gof: empty expected bin");
    r.statistic += (static_cast<double>(observed[i]) - e) * (static_cast<double>(observed[i]) - e) / e;
  }
  r.dof = static_cast<double>(observed.size() - 1);
  r.p = chi_square_sf(r.statistic, r.dof);
  return r;
}

ChiSquareResult chi_square_two_sample(std::span<const long long> a, std::span<const long long> b) {
  if (a.size() != b.size()) throw DomainError("chi_square_two_sample: bin mismatch");
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]);
  }
  ChiSquareResult r;
  int bins = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double tot = static_cast<double>(a[i] + b[i]);
    if (tot == 0.0) continue;
    ++bins;
    const double ea = tot * na / (na + nb);
    const double eb = tot * nb / (na + nb);
    r.statistic += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
  }
  r.dof = std::max(1, bins - 1);
  r.p = chi_square_sf(r.statistic, r.dof);
  return r;
}

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw DomainError("gelman_rubin needs at least two chains");
  const std::size_t n = chains.front().size();
  if (n < 2) throw DomainError("gelman_rubin needs chains of length >= 2");
  std::vector<double> means(m);
  double within = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    if (chains[c].size() != n) throw DomainError("gelman_rubin: chains differ in length");
    means[c] = sample_mean(chains[c]);
    within += sample_variance(chains[c]);
  }
  within /= static_cast<double>(m);
  const double between = static_cast<double>(n) * sample_variance(means);
  const double nn = static_cast<double>(n);
  const double pooled = (nn - 1.0) / nn * within + between / nn;
  return std::sqrt(pooled / within);
}

}  // namespace wishlab
