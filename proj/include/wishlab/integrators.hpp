#ifndef WISHLAB_INTEGRATORS_HPP
#define WISHLAB_INTEGRATORS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wishlab/cir.hpp"
#include "wishlab/events.hpp"
#include "wishlab/model.hpp"

namespace wishlab {

enum class Scheme { truncated_euler, regularized_switching, root_coordinates, c_epsilon };
const char* to_string(Scheme s) noexcept;
/// Throws ConfigError("scheme", ...) for unknown names.
Scheme parse_scheme(const std::string& name);

struct SimConfig {
  Scheme scheme = Scheme::truncated_euler;
  double dt = 1e-3;
  double horizon = 1.0;
  /// Regularization level; 0 selects 10 sqrt(dt).
  double epsilon = 0.0;
  double collision_tol = 1e-4;
  /// Interaction cap level g; 0 selects max(collision_tol^2, sqrt(dt)).
  double guard = 0.0;
  std::uint64_t seed = 1;
  long long paths = 1;
  long long record_stride = 1;
  /// Starting point; empty means lambda^i = i.
  std::vector<double> initial;
  /// Each increment is the sum of this many finer increments of the shared noise tree.
  int noise_substeps = 1;
  /// Worker threads for multi-path runs; 0 uses the hardware concurrency.
  int threads = 0;

  double eps() const noexcept;
  long long steps() const noexcept;
  std::vector<double> start(int n) const;
  void validate() const;
};

/// Gaussian increments for one step, variance dt each.
struct NoiseIncrement {
  std::vector<double> dW;
};

/// Increment of step `step` on the tree keyed by (seed, path_index); with m
/// substeps it is sqrt(dt/m) times the sum of m consecutive fine normals.
void noise_increment(std::uint64_t seed, std::uint64_t path_index, std::uint64_t step, double dt, int substeps,
                     std::span<double> out) noexcept;
NoiseIncrement noise_increment(std::uint64_t seed, std::uint64_t path_index, std::uint64_t step, double dt, int n,
                               int substeps = 1);

enum class Termination { horizon, stopped_at_S_eps, stopped_at_zeta_eps, numerical_failure, event_observed };
const char* to_string(Termination t) noexcept;

enum class Mode { A_eps, B_eps };
const char* to_string(Mode m) noexcept;

struct SwitchingMode {
  Mode mode = Mode::A_eps;
  std::vector<std::pair<double, Mode>> switch_times;
};

/// Sampled trajectory; states are stored row-major, n entries per time.
struct PathRecord {
  ModelParams params;
  SimConfig config;
  long long path_index = 0;
  std::vector<double> times;
  std::vector<double> states;
  Termination terminated = Termination::horizon;
  SwitchingMode switching;

  int n() const noexcept { return params.n; }
  std::size_t size() const noexcept { return times.size(); }
  std::span<const double> state(std::size_t k) const noexcept {
    return {states.data() + k * static_cast<std::size_t>(params.n), static_cast<std::size_t>(params.n)};
  }
  double final_time() const noexcept { return times.empty() ? 0.0 : times.back(); }
  std::span<const double> final_state() const noexcept { return state(size() - 1); }
};

// Exact transcriptions of the two regularized systems.
std::vector<double> drift_A_eps(const ModelParams& params, double epsilon, std::span<const double> lambda);
std::vector<double> drift_B_eps(const ModelParams& params, double epsilon, std::span<const double> lambda);

/// Interaction cap used by the steppers: pair terms with |gap| < g take their value at gap g.
double interaction_guard(const SimConfig& config) noexcept;

// Guarded drifts used inside the steppers; `out` has n entries.
void drift_lambda_guarded(const ModelParams& params, double g, std::span<const double> lambda, std::span<double> out);
void drift_A_eps_guarded(const ModelParams& params, double epsilon, double g, std::span<const double> lambda,
                         std::span<double> out);
void drift_B_eps_guarded(const ModelParams& params, double epsilon, double g, std::span<const double> lambda,
                         std::span<double> out);

/// Full-truncation Euler step, then clamp at 0 and sort.
EigenState step_truncated_euler(const ModelParams& params, const SimConfig& config, const EigenState& state,
                                double dt, const NoiseIncrement& noise);

/// Euler step on the drift of the current mode, then end-of-step mode switch.
std::pair<EigenState, SwitchingMode> step_switching(const ModelParams& params, const SimConfig& config,
                                                    const EigenState& state, SwitchingMode mode, double dt,
                                                    const NoiseIncrement& noise);

/// Euler step of the kappa < 0 root system with 1/(x v eps) at the origin, reflected and sorted.
RootState step_c_epsilon(const ModelParams& params, const SimConfig& config, const RootState& state, double dt,
                         const NoiseIncrement& noise);

/// Euler step of the root system with x floored at sqrt(g), reflected and sorted.
RootState step_root(const ModelParams& params, const SimConfig& config, const RootState& state, double dt,
                    const NoiseIncrement& noise);

struct PathResult {
  PathRecord record;
  EventLog events;
};

/// One path, fully determined by (params, config, path_index). Events are
/// detected online at level collision_tol; `observer` sees every step too.
PathResult simulate_path(const ModelParams& params, const SimConfig& config, long long path_index,
                         StepObserver* observer = nullptr);

/// Same path with a different starting point.
PathResult simulate_path_from(const ModelParams& params, const SimConfig& config, long long path_index,
                              std::span<const double> initial, StepObserver* observer = nullptr);

/// Two systems driven by the same noise. `initial_b` empty means config.start.
std::pair<PathRecord, PathRecord> simulate_coupled(const ModelParams& params_a, const ModelParams& params_b,
                                                   const SimConfig& config, long long path_index = 0,
                                                   std::span<const double> initial_b = {},
                                                   StepObserver* observer_a = nullptr,
                                                   StepObserver* observer_b = nullptr);

/// Scalar CIR path on the drift-implicit square-root scheme
///   y' (1 + b dt / 2) = y + sigma dW / 2 + (a - sigma^2 / 4) dt / (2 y'),  r = y^2,
/// which needs a >= sigma^2 / 4. Records r at every record_stride step.
std::vector<double> simulate_cir_path(const CirParams& cir, double r0, const SimConfig& config, long long path_index);

int worker_count(int requested) noexcept;
/// Calls fn(i) for i in [0, count) on a worker pool; the first exception is rethrown.
void parallel_for(long long count, int threads, const std::function<void(long long)>& fn);

/// Runs fn(path_index) for every path; results are indexed by path.
template <class T>
std::vector<T> run_paths(long long paths, int threads, const std::function<T(long long)>& fn) {
  std::vector<T> out(static_cast<std::size_t>(paths));
  parallel_for(paths, threads, [&](long long p) { out[static_cast<std::size_t>(p)] = fn(p); });
  return out;
}

}  // namespace wishlab

#endif  // WISHLAB_INTEGRATORS_HPP
