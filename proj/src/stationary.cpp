#include "wishlab/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "wishlab/error.hpp"
#include "wishlab/rng.hpp"

namespace wishlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_evaluable(const ModelParams& params) {
  params.validate();
  if (!(params.gamma > 0.0) || !(params.kappa() > 0.0))
    throw NotEvaluable("stationary density needs gamma > 0 and kappa > 0 (gamma=" + std::to_string(params.gamma) +
                       ", kappa=" + std::to_string(params.kappa()) + ")");
}

}  // namespace

StationaryDensity stationary_density(const ModelParams& params) {
  params.validate();
  return {params, std::nullopt, params.gamma > 0.0 && params.kappa() > 0.0};
}

double log_density_unnormalized(const ModelParams& params, std::span<const double> lambda) {
  require_evaluable(params);
  if (static_cast<int>(lambda.size()) != params.n) throw DomainError("state size does not match n");
  const int n = params.n;
  for (int i = 0; i < n; ++i) {
    if (!(lambda[i] > 0.0) || !std::isfinite(lambda[i])) return kNegInf;
    if (i > 0 && !(lambda[i] > lambda[i - 1])) return kNegInf;
  }
  const double a = 0.5 * (params.alpha - 1.0 - (n - 1) * params.beta);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    s += (a - 0.5) * std::log(lambda[i]) - params.gamma * lambda[i];
    for (int j = i + 1; j < n; ++j) s += params.beta * std::log(lambda[j] - lambda[i]);
  }
  return s;
}

std::vector<double> SampleSet::marginal(int i) const {
  std::vector<double> v;
  v.reserve(size());
  for (std::size_t k = 0; k < size(); ++k) v.push_back(point(k)[i]);
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<double> SampleSet::sums() const {
  std::vector<double> v;
  v.reserve(size());
  for (std::size_t k = 0; k < size(); ++k) {
    double s = 0.0;
    for (double x : point(k)) s += x;
    v.push_back(s);
  }
  std::sort(v.begin(), v.end());
  return v;
}

MhResult mh_sampler(const ModelParams& params, const MhConfig& config) {
  require_evaluable(params);
  if (config.samples < 1 || config.thin < 1 || config.burn_in < 0) throw DomainError("bad Metropolis configuration");
  const int n = params.n;
  std::vector<double> cur = config.initial;
  if (cur.empty()) {
    const double m = params.alpha / (2.0 * params.gamma);
    for (int i = 0; i < n; ++i) cur.push_back(2.0 * (i + 1) * m / (n + 1));
  }
  if (static_cast<int>(cur.size()) != n) throw DomainError("Metropolis start has the wrong size");
  double logp = log_density_unnormalized(params, cur);
  if (!std::isfinite(logp)) throw DomainError("Metropolis start lies outside the open cone");

  RandomStream rng(config.seed, config.chain, 7);
  double scale = config.initial_scale;
  std::vector<double> prop(n);
  auto step = [&]() {
    for (int i = 0; i < n; ++i) prop[i] = cur[i] + scale * rng.normal();
    std::sort(prop.begin(), prop.end());
    const double lp = log_density_unnormalized(params, prop);
    const double u = rng.uniform();
    if (std::isfinite(lp) && std::log(u) < lp - logp) {
      cur.swap(prop);
      logp = lp;
      return true;
    }
    return false;
  };

  const long long window = 100;
  long long accepted = 0;
  for (long long s = 0; s < config.burn_in; ++s) {
    accepted += step();
    if ((s + 1) % window == 0) {
      const double rate = static_cast<double>(accepted) / window;
      scale *= std::exp(rate - config.target_acceptance);
      accepted = 0;
    }
  }

  MhResult out;
  out.samples.n = n;
  out.samples.points.reserve(static_cast<std::size_t>(config.samples * n));
  long long acc = 0;
  const long long total = config.samples * config.thin;
  for (long long s = 0; s < total; ++s) {
    acc += step();
    if ((s + 1) % config.thin == 0) out.samples.points.insert(out.samples.points.end(), cur.begin(), cur.end());
  }
  out.acceptance = static_cast<double>(acc) / static_cast<double>(total);
  out.scale = scale;
  return out;
}

LongRunReport compare_long_run(const ModelParams& params, const SimConfig& config, const SampleSet& reference) {
  require_evaluable(params);
  const RegimeReport regime = classify_regime(params);
  if (regime.global_solution != GlobalSolution::global)
    throw RegimeMismatch("long-run comparison needs the global regime kappa >= 1 - beta");
  if (!reference.points.empty() && reference.n != params.n) throw DomainError("reference sample has the wrong n");

  SimConfig cfg = config;
  cfg.record_stride = std::max<long long>(cfg.record_stride, cfg.steps());
  struct End {
    std::vector<double> state;
    bool failed = false;
  };
  const auto ends = run_paths<End>(cfg.paths, cfg.threads, [&](long long p) {
    PathResult r = simulate_path(params, cfg, p);
    const auto s = r.record.final_state();
    return End{{s.begin(), s.end()}, r.record.terminated == Termination::numerical_failure};
  });

  LongRunReport rep;
  SampleSet endpoints;
  endpoints.n = params.n;
  for (const End& e : ends) {
    if (e.failed) {
      ++rep.failed_paths;
      continue;
    }
    endpoints.points.insert(endpoints.points.end(), e.state.begin(), e.state.end());
  }
  const std::vector<double> sums = endpoints.sums();
  const double shape = 0.5 * params.n * params.alpha;
  const double rate = params.gamma;
  const KsResult ks = ks_test(sums, [&](double x) { return gamma_cdf(x, shape, rate); });
  rep.sum_vs_gamma = mean_summary("endpoint_sum", sums);
  rep.sum_vs_gamma.ks_D = ks.D;
  rep.sum_vs_gamma.ks_p = ks.p;
  if (!reference.points.empty()) {
    for (int i = 0; i < params.n; ++i) {
      const std::vector<double> a = endpoints.marginal(i);
      const std::vector<double> b = reference.marginal(i);
      const KsResult k2 = ks_two_sample(a, b);
      StatSummary s = mean_summary("marginal_" + std::to_string(i + 1), a);
      s.ks_D = k2.D;
      s.ks_p = k2.p;
      rep.marginal_vs_mh.push_back(std::move(s));
    }
  }
  return rep;
}

LogZEstimate estimate_logZ_quadrature(const ModelParams& params, double shift) {
  require_evaluable(params);
  const int n = params.n;
  if (n > 3) throw DomainError("quadrature branch supports n <= 3");
  boost::math::quadrature::exp_sinh<double> outer, middle, inner;
  const double tol = 1e-10;
  double err = 0.0;
  std::vector<double> l(n);
  double value = 0.0;
  if (n == 2) {
    value = outer.integrate(
        [&](double u) {
          return middle.integrate(
              [&](double v) {
                l[0] = u;
                l[1] = u + v;
                const double lp = log_density_unnormalized(params, l);
                return std::isfinite(lp) ? std::exp(lp + shift) : 0.0;
              },
              tol);
        },
        tol, &err);
  } else {
    value = outer.integrate(
        [&](double u) {
          return middle.integrate(
              [&](double v) {
                return inner.integrate(
                    [&](double w) {
                      l[0] = u;
                      l[1] = u + v;
                      l[2] = u + v + w;
                      const double lp = log_density_unnormalized(params, l);
                      return std::isfinite(lp) ? std::exp(lp + shift) : 0.0;
                    },
                    tol);
              },
              tol);
        },
        tol, &err);
  }
  if (!(value > 0.0) || !std::isfinite(value)) throw NumericalFailure("normalizing integral is not positive and finite");
  return {std::log(value), err / value, "quadrature"};
}

LogZEstimate estimate_logZ_importance(const ModelParams& params, long long samples, std::uint64_t seed, double shift) {
  require_evaluable(params);
  if (samples < 2) throw TooFewSamples("importance sampling needs at least 2 samples");
  const int n = params.n;
  const double shape = 0.5 * params.kappa();
  const double rate = params.gamma * params.kappa() / params.alpha;
  const double log_nfact = std::lgamma(n + 1.0);
  const double log_norm_q = shape * std::log(rate) - std::lgamma(shape);
  RandomStream rng(seed, 0, 11);
  std::vector<double> l(n);
  std::vector<double> logw(static_cast<std::size_t>(samples));
  for (long long s = 0; s < samples; ++s) {
    double logq = 0.0;
    for (int i = 0; i < n; ++i) {
      l[i] = rng.gamma(shape, rate);
      logq += log_norm_q + (shape - 1.0) * std::log(l[i]) - rate * l[i];
    }
    std::sort(l.begin(), l.end());
    logw[static_cast<std::size_t>(s)] = log_density_unnormalized(params, l) + shift - log_nfact - logq;
  }
  const double m = *std::max_element(logw.begin(), logw.end());
  double sum = 0.0, sum2 = 0.0;
  for (double lw : logw) {
    const double w = std::isfinite(lw) ? std::exp(lw - m) : 0.0;
    sum += w;
    sum2 += w * w;
  }
  const double N = static_cast<double>(samples);
  const double mean = sum / N;
  const double var = std::max(0.0, (sum2 / N - mean * mean) * N / (N - 1.0));
  return {m + std::log(mean), std::sqrt(var / N) / mean, "importance"};
}

LogZEstimate estimate_logZ(const ModelParams& params, long long samples, std::uint64_t seed, double shift) {
  if (params.n <= 3) return estimate_logZ_quadrature(params, shift);
  return estimate_logZ_importance(params, samples, seed, shift);
}

}  // namespace wishlab
