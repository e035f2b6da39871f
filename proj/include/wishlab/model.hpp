#ifndef WISHLAB_MODEL_HPP
#define WISHLAB_MODEL_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

namespace wishlab {

/// Coefficients of the particle system
///
///   d lambda^i = 2 sqrt(lambda^i) dB^i
///              + (alpha - 2 gamma lambda^i + beta sum_{j != i} (lambda^i + lambda^j) / (lambda^i - lambda^j)) dt
///
/// on the ordered cone 0 <= lambda^1 <= ... <= lambda^n.
struct ModelParams {
  double alpha = 2.0;
  double beta = 0.5;
  double gamma = 0.0;
  int n = 2;

  /// Effective inward drift at zero, alpha - (n - 1) beta. Never cached.
  double kappa() const noexcept { return alpha - (n - 1) * beta; }

  /// Throws DomainError unless n >= 2, beta > 0, alpha >= 0 and all finite.
  void validate() const;
};

std::string to_string(const ModelParams& params);

/// Ordered nonnegative eigenvalue coordinates at time t.
struct EigenState {
  double t = 0.0;
  std::vector<double> lambda;
};

/// Root coordinates x^i = sqrt(lambda^i).
struct RootState {
  double t = 0.0;
  std::vector<double> x;
};

bool is_valid_state(std::span<const double> lambda) noexcept;
RootState to_root(const EigenState& state);
EigenState to_eigen(const RootState& state);

// Drift of the lambda system in its two algebraic forms. Both require pairwise
// distinct entries and throw CoincidentCoordinates otherwise.
std::vector<double> drift_lambda(const ModelParams& params, std::span<const double> lambda);
std::vector<double> drift_lambda_dual(const ModelParams& params, std::span<const double> lambda);

/// Drift of the root system, written with (x_i^2 + x_j^2) / (x_i^2 - x_j^2) pair terms.
std::vector<double> drift_root(const ModelParams& params, std::span<const double> x);

/// Potential V with dx = dB - grad V dt. Defined on 0 < x^1 < ... < x^n only.
double potential_V(const ModelParams& params, std::span<const double> x);

/// Gradient of potential_V from its log-derivative form (independent of drift_root).
std::vector<double> grad_V(const ModelParams& params, std::span<const double> x);

enum class GlobalSolution { none, until_joint_event, global };
enum class PairCollisions { impossible, almost_sure };
enum class ZeroHit { never, possible };
enum class CollisionVerdict { almost_sure_zero_hit, never, prob_in_0_1 };

const char* to_string(GlobalSolution v) noexcept;
const char* to_string(PairCollisions v) noexcept;
const char* to_string(ZeroHit v) noexcept;
const char* to_string(CollisionVerdict v) noexcept;

struct ThresholdVerdict {
  double value = 0.0;
  CollisionVerdict verdict = CollisionVerdict::never;
};

/// k (alpha - (n - k) beta) compared to 2; the sign of gamma decides between
/// almost-sure and strictly-random zero hits of lambda^1 + ... + lambda^k.
ThresholdVerdict multiple_collision_threshold(const ModelParams& params, int k);

struct RegimeReport {
  double kappa = 0.0;
  GlobalSolution global_solution = GlobalSolution::none;
  PairCollisions pair_collisions = PairCollisions::almost_sure;
  ZeroHit zero_hit_lambda1 = ZeroHit::possible;
  std::map<int, CollisionVerdict> multiple_collision_k;
};

RegimeReport classify_regime(const ModelParams& params);

}  // namespace wishlab

#endif  // WISHLAB_MODEL_HPP
