#include "wishlab/cir.hpp"

#include <cmath>
#include <limits>

#include "wishlab/error.hpp"

namespace wishlab {

void CirParams::validate() const {
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("CIR: a must be >= 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("CIR: sigma must be > 0");
  if (!std::isfinite(b)) throw DomainError("CIR: b must be finite");
}

CirParams sum_process(const ModelParams& params) noexcept {
  return {params.n * params.alpha, 2.0 * params.gamma, 2.0};
}

const char* to_string(CirBoundary v) noexcept {
  switch (v) {
    case CirBoundary::never_hits_zero: return "never_hits_zero";
    case CirBoundary::hits_zero_as: return "hits_zero_as";
    case CirBoundary::hits_zero_prob_in_0_1: return "hits_zero_prob_in_0_1";
  }
  return "?";
}

CirBoundary cir_boundary_classification(const CirParams& cir) {
  cir.validate();
  if (cir.a >= 0.5 * cir.sigma * cir.sigma) return CirBoundary::never_hits_zero;
  return cir.b >= 0.0 ? CirBoundary::hits_zero_as : CirBoundary::hits_zero_prob_in_0_1;
}

namespace {

// (1 - e^{-b dt}) / b, continuous through b = 0.
double decay_integral(double b, double dt) {
  if (b == 0.0) return dt;
  return -std::expm1(-b * dt) / b;
}

// Scale c of the transition r_{t+dt} = c chi'^2_d(nu).
double transition_scale(const CirParams& cir, double dt) {
  return 0.25 * cir.sigma * cir.sigma * decay_integral(cir.b, dt);
}

}  // namespace

double cir_conditional_mean(const CirParams& cir, double r, double dt) {
  if (!(dt >= 0.0)) throw DomainError("dt must be >= 0");
  if (std::isinf(dt)) {
    if (cir.b > 0.0) return cir.a / cir.b;
    throw DomainError("infinite horizon mean needs b > 0");
  }
  return r * std::exp(-cir.b * dt) + cir.a * decay_integral(cir.b, dt);
}

double cir_conditional_variance(const CirParams& cir, double r, double dt) {
  if (!(dt >= 0.0)) throw DomainError("dt must be >= 0");
  const double c = transition_scale(cir, dt);
  const double d = 4.0 * cir.a / (cir.sigma * cir.sigma);
  return 2.0 * c * c * d + 4.0 * c * r * std::exp(-cir.b * dt);
}

double cir_exact_step(const CirParams& cir, double r, double dt, RandomStream& rng) {
  if (!(dt > 0.0)) throw DomainError("cir_exact_step: dt must be > 0");
  if (!(r >= 0.0)) throw DomainError("cir_exact_step: r must be >= 0");
  const double c = transition_scale(cir, dt);
  const double d = 4.0 * cir.a / (cir.sigma * cir.sigma);
  const double nu = r * std::exp(-cir.b * dt) / c;
  // Below this noncentrality the Poisson draw is zero to double precision.
  const std::uint64_t k = nu > 1e-300 ? rng.poisson(0.5 * nu) : 0;
  const double shape = 0.5 * d + static_cast<double>(k);
  if (shape == 0.0) return 0.0;
  const double x = c * rng.gamma(shape, 0.5);
  if (!std::isfinite(x)) throw NumericalFailure("cir_exact_step produced a non-finite value");
  return x;
}

LaplaceQuery integrated_cir_laplace_with_constant(double constant, double gamma, double sum0, double mu, double t) {
  if (!(mu >= 0.0)) throw DomainError("mu must be >= 0");
  if (!(t > 0.0)) throw DomainError("t must be > 0");
  if (!(sum0 >= 0.0)) throw DomainError("sum0 must be >= 0");
  LaplaceQuery q;
  q.mu = mu;
  q.t = t;
  if (mu == 0.0) return q;

  const double s = std::sqrt(gamma * gamma + 2.0 * mu);
  // Both closed forms divided through by e^{2 s t}; past the cutoff the decaying
  // exponential is dropped and the large-t asymptote is used.
  const double exponent = 2.0 * s * t;
  const double decay = exponent > 700.0 ? 0.0 : std::exp(-exponent);
  const double denom = (s - gamma) * decay + (s + gamma);
  q.psi = mu * (1.0 - decay) / denom;
  if (std::isinf(t))
    q.phi = std::numeric_limits<double>::infinity();
  else
    q.phi = -0.5 * (std::log(2.0 * s) + (gamma - s) * t - std::log(denom));
  const double log_value = -constant * q.phi - sum0 * q.psi;
  q.value = std::exp(log_value);
  if (std::isnan(q.value) || std::isnan(q.psi)) throw NumericOverflow("integrated_cir_laplace: non-finite result");
  return q;
}

LaplaceQuery integrated_cir_laplace(const ModelParams& params, double sum0, double mu, double t) {
  return integrated_cir_laplace_with_constant(params.n * params.alpha, params.gamma, sum0, mu, t);
}

std::vector<double> integrated_cir_sample(const CirParams& cir, double r0, std::span<const double> times, double h,
                                          RandomStream& rng) {
  if (!(h > 0.0)) throw DomainError("integration step must be > 0");
  std::vector<double> out;
  out.reserve(times.size());
  double r = r0, t = 0.0, acc = 0.0;
  for (double target : times) {
    const auto steps = static_cast<long long>(std::llround((target - t) / h));
    for (long long s = 0; s < steps; ++s) {
      const double next = cir_exact_step(cir, r, h, rng);
      acc += 0.5 * (r + next) * h;
      r = next;
    }
    t += static_cast<double>(steps) * h;
    out.push_back(acc);
  }
  return out;
}

GammaLaw cir_invariant_gamma(const CirParams& cir) {
  cir.validate();
  if (!(cir.b > 0.0)) throw NoInvariantLaw("CIR with b <= 0 has no stationary law");
  const double s2 = cir.sigma * cir.sigma;
  return {2.0 * cir.a / s2, 2.0 * cir.b / s2};
}

}  // namespace wishlab
