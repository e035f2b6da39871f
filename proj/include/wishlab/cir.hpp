#ifndef WISHLAB_CIR_HPP
#define WISHLAB_CIR_HPP

#include <span>
#include <vector>

#include "wishlab/model.hpp"
#include "wishlab/rng.hpp"

namespace wishlab {

/// Scalar square-root diffusion dr = (a - b r) dt + sigma sqrt(r) dW.
struct CirParams {
  double a = 0.0;
  double b = 0.0;
  double sigma = 1.0;

  void validate() const;
};

struct CirState {
  double t = 0.0;
  double r = 0.0;
};

/// The CIR process followed by lambda^1 + ... + lambda^n: a = n alpha, b = 2 gamma, sigma = 2.
CirParams sum_process(const ModelParams& params) noexcept;

enum class CirBoundary { never_hits_zero, hits_zero_as, hits_zero_prob_in_0_1 };
const char* to_string(CirBoundary v) noexcept;

CirBoundary cir_boundary_classification(const CirParams& cir);

/// E[r_{t+dt} | r_t]; the b = 0 line uses the limit r + a dt. dt may be +inf when b > 0.
double cir_conditional_mean(const CirParams& cir, double r, double dt);

/// Var[r_{t+dt} | r_t] from the scaled noncentral chi-square law.
double cir_conditional_variance(const CirParams& cir, double r, double dt);

/// Exact draw from the transition law over dt > 0, via the Poisson mixture of
/// Gamma variates representing c * chi'^2_d(nu).
double cir_exact_step(const CirParams& cir, double r, double dt, RandomStream& rng);

/// E[exp(-mu int_0^t S ds)] for the sum process S with S_0 = sum0:
///   value = exp(-C phi_mu(t) - sum0 psi_mu(t)),  C = n alpha.
struct LaplaceQuery {
  double mu = 0.0;
  double t = 0.0;
  double phi = 0.0;
  double psi = 0.0;
  double value = 1.0;
};

LaplaceQuery integrated_cir_laplace(const ModelParams& params, double sum0, double mu, double t);

/// Same transform with an explicit constant in front of phi; used to compare
/// candidate prefactors against Monte Carlo.
LaplaceQuery integrated_cir_laplace_with_constant(double constant, double gamma, double sum0, double mu, double t);

/// Trapezoidal integrals of one exactly sampled path, evaluated at each of the
/// ascending `times` (multiples of h).
std::vector<double> integrated_cir_sample(const CirParams& cir, double r0, std::span<const double> times, double h,
                                          RandomStream& rng);

struct GammaLaw {
  double shape = 0.0;
  double rate = 0.0;
};

/// Stationary law Gamma(2a / sigma^2, 2b / sigma^2); throws NoInvariantLaw when b <= 0.
GammaLaw cir_invariant_gamma(const CirParams& cir);

}  // namespace wishlab

#endif  // WISHLAB_CIR_HPP
