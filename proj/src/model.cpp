#include "wishlab/model.hpp"

#include <cmath>
#include <sstream>

#include "wishlab/error.hpp"

namespace wishlab {

void ModelParams::validate() const {
  if (n < 2) throw DomainError("n must be >= 2");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be > 0");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be >= 0");
  if (!std::isfinite(gamma)) throw DomainError("gamma must be finite");
}

std::string to_string(const ModelParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "alpha=" << p.alpha << " beta=" << p.beta << " gamma=" << p.gamma << " n=" << p.n;
  return os.str();
}

bool is_valid_state(std::span<const double> lambda) noexcept {
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] >= 0.0) || !std::isfinite(lambda[i])) return false;
    if (i > 0 && lambda[i] < lambda[i - 1]) return false;
  }
  return true;
}

RootState to_root(const EigenState& state) {
  RootState r{state.t, {}};
  r.x.reserve(state.lambda.size());
  for (double l : state.lambda) r.x.push_back(std::sqrt(l));
  return r;
}

EigenState to_eigen(const RootState& state) {
  EigenState e{state.t, {}};
  e.lambda.reserve(state.x.size());
  for (double x : state.x) e.lambda.push_back(x * x);
  return e;
}

namespace {

void check_size(const ModelParams& params, std::span<const double> v) {
  if (static_cast<int>(v.size()) != params.n)
    throw DomainError("state has " + std::to_string(v.size()) + " entries, expected n=" +
                      std::to_string(params.n));
}

void check_distinct(std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (v[i] == v[j])
        throw CoincidentCoordinates("coordinates " + std::to_string(i + 1) + " and " +
                                    std::to_string(j + 1) + " coincide");
}

void check_open_cone(std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !std::isfinite(x[i]))
      throw DomainError("x must lie in the open ordered cone (entry " + std::to_string(i + 1) + ")");
    if (i > 0 && !(x[i] > x[i - 1]))
      throw DomainError("x must be strictly increasing (entry " + std::to_string(i + 1) + ")");
  }
}

}  // namespace

std::vector<double> drift_lambda(const ModelParams& params, std::span<const double> lambda) {
  check_size(params, lambda);
  check_distinct(lambda);
  const int n = params.n;
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) {
    double pair = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) pair += (lambda[i] + lambda[j]) / (lambda[i] - lambda[j]);
    b[i] = params.alpha - 2.0 * params.gamma * lambda[i] + params.beta * pair;
  }
  return b;
}

std::vector<double> drift_lambda_dual(const ModelParams& params, std::span<const double> lambda) {
  check_size(params, lambda);
  check_distinct(lambda);
  const int n = params.n;
  const double kappa = params.kappa();
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) {
    double inv = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) inv += 1.0 / (lambda[i] - lambda[j]);
    b[i] = kappa - 2.0 * params.gamma * lambda[i] + 2.0 * params.beta * lambda[i] * inv;
  }
  return b;
}

std::vector<double> drift_root(const ModelParams& params, std::span<const double> x) {
  check_size(params, x);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] == 0.0) throw ZeroCoordinate("x^" + std::to_string(i + 1) + " is zero");
  check_distinct(x);
  const int n = params.n;
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) {
    const double xi2 = x[i] * x[i];
    double pair = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double xj2 = x[j] * x[j];
      if (xi2 == xj2) throw CoincidentCoordinates("x^" + std::to_string(i + 1) + " = -x^" + std::to_string(j + 1));
      pair += (xi2 + xj2) / (xi2 - xj2);
    }
    b[i] = (params.alpha - 1.0) / (2.0 * x[i]) - params.gamma * x[i] + params.beta / (2.0 * x[i]) * pair;
  }
  return b;
}

double potential_V(const ModelParams& params, std::span<const double> x) {
  check_size(params, x);
  check_open_cone(x);
  const int n = params.n;
  const double c = 0.5 * (params.kappa() - 1.0);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double logs = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) logs += std::log(std::fabs(x[i] - x[j])) + std::log(std::fabs(x[i] + x[j]));
    sum += c * std::log(x[i]) - 0.5 * params.gamma * x[i] * x[i] + 0.25 * params.beta * logs;
  }
  return -sum;
}

std::vector<double> grad_V(const ModelParams& params, std::span<const double> x) {
  check_size(params, x);
  check_open_cone(x);
  const int n = params.n;
  const double c = 0.5 * (params.kappa() - 1.0);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    // Each unordered pair appears twice in V, hence beta/2 rather than beta/4.
    double pair = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) pair += 1.0 / (x[i] - x[j]) + 1.0 / (x[i] + x[j]);
    g[i] = -(c / x[i] - params.gamma * x[i] + 0.5 * params.beta * pair);
  }
  return g;
}

const char* to_string(GlobalSolution v) noexcept {
  switch (v) {
    case GlobalSolution::none: return "none";
    case GlobalSolution::until_joint_event: return "until_joint_event";
    case GlobalSolution::global: return "global";
  }
  return "?";
}

const char* to_string(PairCollisions v) noexcept {
  return v == PairCollisions::impossible ? "impossible" : "almost_sure";
}

const char* to_string(ZeroHit v) noexcept { return v == ZeroHit::never ? "never" : "possible"; }

const char* to_string(CollisionVerdict v) noexcept {
  switch (v) {
    case CollisionVerdict::almost_sure_zero_hit: return "almost_sure_zero_hit";
    case CollisionVerdict::never: return "never";
    case CollisionVerdict::prob_in_0_1: return "prob_in_0_1";
  }
  return "?";
}

ThresholdVerdict multiple_collision_threshold(const ModelParams& params, int k) {
  if (k < 1 || k > params.n)
    throw BadK("k=" + std::to_string(k) + " outside 1.." + std::to_string(params.n));
  ThresholdVerdict out;
  out.value = k * (params.alpha - (params.n - k) * params.beta);
  if (out.value >= 2.0)
    out.verdict = CollisionVerdict::never;
  else
    out.verdict = params.gamma >= 0.0 ? CollisionVerdict::almost_sure_zero_hit : CollisionVerdict::prob_in_0_1;
  return out;
}

RegimeReport classify_regime(const ModelParams& params) {
  params.validate();
  RegimeReport r;
  r.kappa = params.kappa();
  // kappa == 0 with beta < 1 sits below 1 - beta; treated as the local regime.
  if (r.kappa < 0.0)
    r.global_solution = GlobalSolution::none;
  else if (r.kappa < 1.0 - params.beta)
    r.global_solution = GlobalSolution::until_joint_event;
  else
    r.global_solution = GlobalSolution::global;
  r.pair_collisions = params.beta >= 1.0 ? PairCollisions::impossible : PairCollisions::almost_sure;
  for (int k = 1; k <= params.n; ++k) r.multiple_collision_k[k] = multiple_collision_threshold(params, k).verdict;
  r.zero_hit_lambda1 = r.multiple_collision_k[1] == CollisionVerdict::never ? ZeroHit::never : ZeroHit::possible;
  return r;
}

}  // namespace wishlab
