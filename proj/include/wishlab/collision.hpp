#ifndef WISHLAB_COLLISION_HPP
#define WISHLAB_COLLISION_HPP

#include <utility>
#include <vector>

#include "wishlab/events.hpp"
#include "wishlab/integrators.hpp"
#include "wishlab/stats.hpp"

namespace wishlab {

/// Replays the recorded grid through an EventDetector at level delta.
EventLog detect_events(const PathRecord& path, double delta);

/// Hit fractions of lambda^1 + ... + lambda^k below each level of the ladder by the horizon.
struct FirstPassageReport {
  int k = 1;
  std::vector<double> levels;
  std::vector<StatSummary> hit;
  /// Same-step multiple collisions seen at the smallest level, summed over paths.
  long long multiple_observations = 0;
  long long paths = 0;
};

inline const std::vector<double> kDeltaLadder{1e-2, 1e-3, 1e-4};

/// Monte Carlo over config.paths paths; each path stops once the partial sum
/// is below the smallest level.
FirstPassageReport first_passage_partial_sum(const ModelParams& params, const SimConfig& config, int k,
                                             const std::vector<double>& levels = kDeltaLadder);

/// A(t) = 4 int_0^t (lambda^i + lambda^{i-1}) ds on the recorded grid (trapezoidal), i >= 2 (1-based).
struct TimeChange {
  int i = 2;
  std::vector<std::pair<double, double>> grid;

  /// Inverse C(a) = inf{t : A(t) >= a} by linear interpolation; +inf past the end.
  double inverse(double a) const noexcept;
};

TimeChange time_change_A(const PathRecord& path, int i);

struct BesselDimension {
  double dimension = 0.0;
  bool hits_zero = false;
};

/// The gap near a collision compares with a Bessel process of dimension beta + 1.
BesselDimension bessel_collision_dimension(double beta);

/// Cumulative trapezoidal integrals of lambda^{i+1} / (lambda^{i+1} - lambda^i)
/// for each adjacent pair, with the gap floored at the integrator's guard.
std::vector<double> integrability_diagnostic(const PathRecord& path);
std::vector<double> integrability_diagnostic(const PathRecord& path, double guard);

}  // namespace wishlab

#endif  // WISHLAB_COLLISION_HPP
