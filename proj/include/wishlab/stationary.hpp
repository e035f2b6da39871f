#ifndef WISHLAB_STATIONARY_HPP
#define WISHLAB_STATIONARY_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wishlab/integrators.hpp"
#include "wishlab/model.hpp"
#include "wishlab/stats.hpp"

namespace wishlab {

/// Invariant law on the ordered cone; evaluable iff gamma > 0 and kappa > 0.
struct StationaryDensity {
  ModelParams params;
  std::optional<double> logZ;
  bool evaluable = false;
};

StationaryDensity stationary_density(const ModelParams& params);

/// log of
///   prod_i lambda_i^{(kappa - 2)/2} e^{-gamma lambda_i} prod_{i != j} |lambda_j - lambda_i|^{beta/2}
/// on 0 < lambda^1 < ... < lambda^n, and -inf elsewhere (boundary included).
/// Throws NotEvaluable unless gamma > 0 and kappa > 0.
double log_density_unnormalized(const ModelParams& params, std::span<const double> lambda);

/// Ordered points stored row-major, n per point.
struct SampleSet {
  int n = 0;
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return n == 0 ? 0 : points.size() / static_cast<std::size_t>(n); }
  std::span<const double> point(std::size_t k) const noexcept {
    return {points.data() + k * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
  /// Sorted values of coordinate i (0-based).
  std::vector<double> marginal(int i) const;
  /// Sorted values of lambda^1 + ... + lambda^n.
  std::vector<double> sums() const;
};

struct MhConfig {
  long long samples = 10000;
  long long burn_in = 5000;
  long long thin = 20;
  std::uint64_t seed = 1;
  std::uint32_t chain = 0;
  double initial_scale = 0.5;
  double target_acceptance = 0.3;
  /// Empty means lambda^i = 2 i m / (n + 1), m = alpha / (2 gamma).
  std::vector<double> initial;
};

struct MhResult {
  SampleSet samples;
  double acceptance = 0.0;
  double scale = 0.0;
};

/// Random-walk Metropolis: Gaussian perturbation of every coordinate then sort.
/// The scale adapts during burn-in toward the target acceptance and is frozen afterwards.
MhResult mh_sampler(const ModelParams& params, const MhConfig& config);

struct LongRunReport {
  /// Endpoint sum against Gamma(n alpha / 2, rate gamma).
  StatSummary sum_vs_gamma;
  /// Endpoint marginals against the Metropolis sample (two-sample KS), one per coordinate.
  std::vector<StatSummary> marginal_vs_mh;
  long long failed_paths = 0;
};

/// Endpoints of config.paths paths at config.horizon compared to the exact sum
/// law and, when `reference` is nonempty, to reference marginals.
/// Throws RegimeMismatch unless kappa >= 1 - beta.
LongRunReport compare_long_run(const ModelParams& params, const SimConfig& config, const SampleSet& reference = {});

struct LogZEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::string method;
};

/// log int over the ordered cone of exp(log_density_unnormalized): nested
/// exp-sinh quadrature for n <= 3.
LogZEstimate estimate_logZ_quadrature(const ModelParams& params, double shift = 0.0);

/// Importance sampling from sorted i.i.d. Gamma(kappa / 2, rate gamma kappa / alpha) draws.
LogZEstimate estimate_logZ_importance(const ModelParams& params, long long samples, std::uint64_t seed,
                                      double shift = 0.0);

/// Quadrature for n <= 3, importance sampling otherwise. `shift` is added to the log density.
LogZEstimate estimate_logZ(const ModelParams& params, long long samples = 200000, std::uint64_t seed = 1,
                           double shift = 0.0);

}  // namespace wishlab

#endif  // WISHLAB_STATIONARY_HPP
