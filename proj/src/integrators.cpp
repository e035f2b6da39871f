#include "wishlab/integrators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "wishlab/error.hpp"
#include "wishlab/rng.hpp"

namespace wishlab {

const char* to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::truncated_euler: return "truncated_euler";
    case Scheme::regularized_switching: return "regularized_switching";
    case Scheme::root_coordinates: return "root_coordinates";
    case Scheme::c_epsilon: return "c_epsilon";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::truncated_euler, Scheme::regularized_switching, Scheme::root_coordinates,
                   Scheme::c_epsilon})
    if (name == to_string(s)) return s;
  throw ConfigError("scheme", "unknown scheme '" + name + "'");
}

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::horizon: return "horizon";
    case Termination::stopped_at_S_eps: return "stopped_at_S_eps";
    case Termination::stopped_at_zeta_eps: return "stopped_at_zeta_eps";
    case Termination::numerical_failure: return "numerical_failure";
    case Termination::event_observed: return "event_observed";
  }
  return "?";
}

const char* to_string(Mode m) noexcept { return m == Mode::A_eps ? "A_eps" : "B_eps"; }

double SimConfig::eps() const noexcept { return epsilon > 0.0 ? epsilon : 10.0 * std::sqrt(dt); }

long long SimConfig::steps() const noexcept {
  return std::max<long long>(1, static_cast<long long>(std::ceil(horizon / dt - 1e-9)));
}

std::vector<double> SimConfig::start(int n) const {
  if (initial.empty()) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = i + 1.0;
    return v;
  }
  if (static_cast<int>(initial.size()) != n)
    throw ConfigError("initial", "has " + std::to_string(initial.size()) + " entries, expected " + std::to_string(n));
  return initial;
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "must be > 0");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon", "must be > 0");
  if (!(dt < horizon)) throw ConfigError("dt", "must be smaller than horizon");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon", "must be > 0 (or 0 for the default)");
  if (!(collision_tol > 0.0)) throw ConfigError("collision_tol", "must be > 0");
  if (!(guard >= 0.0) || !std::isfinite(guard)) throw ConfigError("guard", "must be >= 0");
  if (paths < 1) throw ConfigError("paths", "must be >= 1");
  if (record_stride < 1) throw ConfigError("record_stride", "must be >= 1");
  if (noise_substeps < 1) throw ConfigError("noise_substeps", "must be >= 1");
  if (threads < 0) throw ConfigError("threads", "must be >= 0");
  for (std::size_t i = 0; i < initial.size(); ++i)
    if (!(initial[i] >= 0.0) || (i > 0 && initial[i] < initial[i - 1]))
      throw ConfigError("initial", "must be nonnegative and nondecreasing");
}

void noise_increment(std::uint64_t seed, std::uint64_t path_index, std::uint64_t step, double dt, int substeps,
                     std::span<double> out) noexcept {
  const PhiloxKey key = make_key(seed);
  const auto path = static_cast<std::uint32_t>(path_index);
  const std::size_t n = out.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (int s = 0; s < substeps; ++s) {
    const std::uint64_t fine = step * static_cast<std::uint64_t>(substeps) + static_cast<std::uint64_t>(s);
    for (std::size_t pair = 0; 2 * pair < n; ++pair) {
      const auto z = normal_pair(key, {static_cast<std::uint32_t>(fine), static_cast<std::uint32_t>(fine >> 32), path,
                                       0x80000000u | static_cast<std::uint32_t>(pair)});
      out[2 * pair] += z[0];
      if (2 * pair + 1 < n) out[2 * pair + 1] += z[1];
    }
  }
  const double scale = std::sqrt(dt / substeps);
  for (double& w : out) w *= scale;
}

NoiseIncrement noise_increment(std::uint64_t seed, std::uint64_t path_index, std::uint64_t step, double dt, int n,
                               int substeps) {
  NoiseIncrement inc{std::vector<double>(n)};
  noise_increment(seed, path_index, step, dt, substeps, inc.dW);
  return inc;
}

namespace {

double clamp01(double v) noexcept { return std::clamp(v, 0.0, 1.0); }

// Smooth cutoff of (A_eps): 0 below lambda = eps/8, 1 above lambda = eps/2.
double cutoff_A(double eps, double l) noexcept {
  const double se = std::sqrt(eps);
  return clamp01(2.0 * std::numbers::sqrt2 / se * (std::sqrt(std::max(l, 0.0)) - se / (2.0 * std::numbers::sqrt2)));
}

// Cutoff of (B_eps) for i >= 2: 0 below eps/4, 1 above eps.
double cutoff_B(double eps, double l) noexcept {
  const double se = std::sqrt(eps);
  return clamp01(2.0 / se * (std::sqrt(std::max(l, 0.0)) - se / 2.0));
}

// Gap with magnitude floored at g; i < j on a sorted state gives a negative gap.
inline double guarded_gap(double d, double g, bool lower) noexcept {
  if (std::fabs(d) >= g) return d;
  return lower ? -g : g;
}

void check_strict(std::span<const double> v, std::size_t from) {
  for (std::size_t i = from; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (v[i] == v[j])
        throw CoincidentCoordinates("coordinates " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                                    " coincide");
}

void check_n(const ModelParams& params, std::span<const double> v) {
  if (static_cast<int>(v.size()) != params.n) throw DomainError("state size does not match n");
}

// Shared body of the A_eps drift; `g` = 0 means no guard.
void fill_A(const ModelParams& p, double eps, double g, std::span<const double> l, std::span<double> out) {
  const int n = p.n;
  const double kappa = p.kappa();
  for (int i = 0; i < n; ++i) {
    double inv = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) inv += 1.0 / guarded_gap(l[i] - l[j], g, i < j);
    out[i] = kappa + 1.0 - cutoff_A(eps, l[i]) - 2.0 * p.gamma * l[i] + 2.0 * p.beta * l[i] * inv;
  }
}

void fill_B(const ModelParams& p, double eps, double g, std::span<const double> l, std::span<double> out) {
  const int n = p.n;
  const double kappa = p.kappa();
  const double m = std::min(l[0], eps);
  double s1 = 0.0;
  for (int j = 1; j < n; ++j) s1 += m / std::max(l[j] - m, eps);
  out[0] = kappa - 2.0 * p.gamma * l[0] - 2.0 * p.beta * s1;
  for (int i = 1; i < n; ++i) {
    double inv = 0.0;
    for (int j = 1; j < n; ++j)
      if (j != i) inv += 1.0 / guarded_gap(l[i] - l[j], g, i < j);
    out[i] = kappa + 1.0 - cutoff_B(eps, l[i]) - 2.0 * p.gamma * l[i] + 2.0 * p.beta * l[i] * inv +
             2.0 * p.beta * l[i] / std::max(l[i] - m, eps);
  }
}

void fill_lambda(const ModelParams& p, double g, std::span<const double> l, std::span<double> out) {
  const int n = p.n;
  for (int i = 0; i < n; ++i) out[i] = p.alpha - 2.0 * p.gamma * l[i];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double term = p.beta * (l[i] + l[j]) / guarded_gap(l[i] - l[j], g, true);
      out[i] += term;
      out[j] -= term;
    }
}

}  // namespace

std::vector<double> drift_A_eps(const ModelParams& params, double epsilon, std::span<const double> lambda) {
  check_n(params, lambda);
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  check_strict(lambda, 0);
  std::vector<double> out(params.n);
  fill_A(params, epsilon, 0.0, lambda, out);
  return out;
}

std::vector<double> drift_B_eps(const ModelParams& params, double epsilon, std::span<const double> lambda) {
  check_n(params, lambda);
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  check_strict(lambda, 1);
  std::vector<double> out(params.n);
  fill_B(params, epsilon, 0.0, lambda, out);
  return out;
}

double interaction_guard(const SimConfig& config) noexcept {
  if (config.guard > 0.0) return config.guard;
  return std::max(config.collision_tol * config.collision_tol, std::sqrt(config.dt));
}

void drift_lambda_guarded(const ModelParams& params, double g, std::span<const double> lambda, std::span<double> out) {
  fill_lambda(params, g, lambda, out);
}

void drift_A_eps_guarded(const ModelParams& params, double epsilon, double g, std::span<const double> lambda,
                         std::span<double> out) {
  fill_A(params, epsilon, g, lambda, out);
}

void drift_B_eps_guarded(const ModelParams& params, double epsilon, double g, std::span<const double> lambda,
                         std::span<double> out) {
  fill_B(params, epsilon, g, lambda, out);
}

namespace {

bool all_finite(std::span<const double> v) noexcept {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Per-path work buffers and the in-place kernels shared by the public steppers
// and simulate_path.
struct Kernel {
  const ModelParams& p;
  double g;
  double eps;
  std::vector<double> pos, drift;

  Kernel(const ModelParams& params, const SimConfig& config)
      : p(params), g(interaction_guard(config)), eps(config.eps()), pos(params.n), drift(params.n) {}

  // Full-truncation Euler with the given drift filler; returns false on non-finite output.
  template <class Fill>
  bool euler(std::span<double> l, double dt, std::span<const double> dW, Fill&& fill) {
    for (int i = 0; i < p.n; ++i) pos[i] = std::max(l[i], 0.0);
    fill(std::span<const double>(pos), std::span<double>(drift));
    for (int i = 0; i < p.n; ++i) l[i] = std::max(l[i] + drift[i] * dt + 2.0 * std::sqrt(pos[i]) * dW[i], 0.0);
    std::sort(l.begin(), l.end());
    return all_finite(l);
  }

  bool truncated(std::span<double> l, double dt, std::span<const double> dW) {
    return euler(l, dt, dW, [&](std::span<const double> s, std::span<double> o) { fill_lambda(p, g, s, o); });
  }

  bool switching(std::span<double> l, Mode mode, double dt, std::span<const double> dW) {
    if (mode == Mode::A_eps)
      return euler(l, dt, dW, [&](std::span<const double> s, std::span<double> o) { fill_A(p, eps, g, s, o); });
    return euler(l, dt, dW, [&](std::span<const double> s, std::span<double> o) { fill_B(p, eps, g, s, o); });
  }

  bool c_epsilon(std::span<double> x, double dt, std::span<const double> dW) {
    const double c = 0.5 * (p.kappa() - 1.0);
    for (int i = 0; i < p.n; ++i) {
      const double xi2 = x[i] * x[i];
      double inv = 0.0;
      for (int j = 0; j < p.n; ++j)
        if (j != i) inv += 1.0 / guarded_gap(xi2 - x[j] * x[j], g, i < j);
      drift[i] = c / std::max(x[i], eps) - p.gamma * x[i] + p.beta * x[i] * inv;
    }
    for (int i = 0; i < p.n; ++i) x[i] = std::fabs(x[i] + drift[i] * dt + dW[i]);
    std::sort(x.begin(), x.end());
    return all_finite(x);
  }

  bool root(std::span<double> x, double dt, std::span<const double> dW) {
    const double floor = std::sqrt(g);
    for (int i = 0; i < p.n; ++i) {
      const double xi = std::max(x[i], floor);
      const double xi2 = xi * xi;
      double pair = 0.0;
      for (int j = 0; j < p.n; ++j) {
        if (j == i) continue;
        const double xj = std::max(x[j], floor);
        const double xj2 = xj * xj;
        pair += (xi2 + xj2) / guarded_gap(xi2 - xj2, g, i < j);
      }
      drift[i] = (p.alpha - 1.0) / (2.0 * xi) - p.gamma * x[i] + p.beta / (2.0 * xi) * pair;
    }
    for (int i = 0; i < p.n; ++i) x[i] = std::fabs(x[i] + drift[i] * dt + dW[i]);
    std::sort(x.begin(), x.end());
    return all_finite(x);
  }
};

void check_noise(const ModelParams& params, const NoiseIncrement& noise) {
  if (static_cast<int>(noise.dW.size()) != params.n) throw DomainError("noise dimension does not match n");
}

}  // namespace

EigenState step_truncated_euler(const ModelParams& params, const SimConfig& config, const EigenState& state,
                                double dt, const NoiseIncrement& noise) {
  check_n(params, state.lambda);
  check_noise(params, noise);
  Kernel k(params, config);
  EigenState next{state.t + dt, state.lambda};
  if (!k.truncated(next.lambda, dt, noise.dW)) throw NumericalFailure("truncated Euler produced a non-finite value");
  return next;
}

std::pair<EigenState, SwitchingMode> step_switching(const ModelParams& params, const SimConfig& config,
                                                    const EigenState& state, SwitchingMode mode, double dt,
                                                    const NoiseIncrement& noise) {
  check_n(params, state.lambda);
  check_noise(params, noise);
  Kernel k(params, config);
  EigenState next{state.t + dt, state.lambda};
  if (!k.switching(next.lambda, mode.mode, dt, noise.dW))
    throw NumericalFailure("switching scheme produced a non-finite value");
  const double eps = config.eps();
  if (mode.mode == Mode::A_eps && next.lambda[0] <= 0.5 * eps) {
    mode.mode = Mode::B_eps;
    mode.switch_times.emplace_back(next.t, Mode::B_eps);
  } else if (mode.mode == Mode::B_eps && next.lambda[0] >= eps) {
    mode.mode = Mode::A_eps;
    mode.switch_times.emplace_back(next.t, Mode::A_eps);
  }
  return {std::move(next), std::move(mode)};
}

RootState step_c_epsilon(const ModelParams& params, const SimConfig& config, const RootState& state, double dt,
                         const NoiseIncrement& noise) {
  check_n(params, state.x);
  check_noise(params, noise);
  Kernel k(params, config);
  RootState next{state.t + dt, state.x};
  if (!k.c_epsilon(next.x, dt, noise.dW)) throw NumericalFailure("C_eps step produced a non-finite value");
  return next;
}

RootState step_root(const ModelParams& params, const SimConfig& config, const RootState& state, double dt,
                    const NoiseIncrement& noise) {
  check_n(params, state.x);
  check_noise(params, noise);
  Kernel k(params, config);
  RootState next{state.t + dt, state.x};
  if (!k.root(next.x, dt, noise.dW)) throw NumericalFailure("root step produced a non-finite value");
  return next;
}

PathResult simulate_path(const ModelParams& params, const SimConfig& config, long long path_index,
                         StepObserver* observer) {
  const std::vector<double> start = config.start(params.n);
  return simulate_path_from(params, config, path_index, start, observer);
}

PathResult simulate_path_from(const ModelParams& params, const SimConfig& config, long long path_index,
                              std::span<const double> initial, StepObserver* observer) {
  params.validate();
  config.validate();
  check_n(params, initial);
  if (!is_valid_state(initial)) throw DomainError("initial state must be nonnegative and nondecreasing");
  const bool root_space = config.scheme == Scheme::c_epsilon || config.scheme == Scheme::root_coordinates;
  if (config.scheme == Scheme::c_epsilon && !(params.kappa() < 0.0))
    throw RegimeMismatch("c_epsilon scheme needs kappa < 0, got kappa=" + std::to_string(params.kappa()));

  const int n = params.n;
  const double eps = config.eps();
  const long long steps = config.steps();

  PathResult out;
  PathRecord& rec = out.record;
  rec.params = params;
  rec.config = config;
  rec.path_index = path_index;
  const auto reserve = static_cast<std::size_t>(steps / config.record_stride + 2);
  rec.times.reserve(reserve);
  rec.states.reserve(reserve * n);

  EventDetector detector(n, config.collision_tol);
  Kernel kernel(params, config);
  std::vector<double> lambda(initial.begin(), initial.end());
  std::vector<double> x(n), dW(n);
  if (root_space)
    for (int i = 0; i < n; ++i) x[i] = std::sqrt(lambda[i]);

  auto record = [&](double t) {
    rec.times.push_back(t);
    rec.states.insert(rec.states.end(), lambda.begin(), lambda.end());
  };
  auto observe = [&](double t) {
    bool stop = detector.observe(t, lambda);
    if (observer) stop = observer->observe(t, lambda) || stop;
    return stop;
  };
  auto scheme_stop = [&]() {
    if (config.scheme == Scheme::c_epsilon && x[0] <= std::sqrt(eps)) {
      rec.terminated = Termination::stopped_at_S_eps;
      return true;
    }
    if (config.scheme == Scheme::regularized_switching && lambda[0] <= eps && lambda[1] - lambda[0] <= eps) {
      rec.terminated = Termination::stopped_at_zeta_eps;
      return true;
    }
    return false;
  };

  record(0.0);
  bool stopped = false;
  if (scheme_stop()) {
    stopped = true;
  } else if (observe(0.0)) {
    rec.terminated = Termination::event_observed;
    stopped = true;
  }
  out.events = detector.log();
  if (stopped) {
    if (rec.terminated == Termination::stopped_at_S_eps) out.events.events.push_back({0.0, EventKind::stop_S, 1, eps});
    if (rec.terminated == Termination::stopped_at_zeta_eps)
      out.events.events.push_back({0.0, EventKind::joint_event_zeta, 1, eps});
    return out;
  }

  SwitchingMode& mode = rec.switching;
  if (config.scheme == Scheme::regularized_switching && lambda[0] <= 0.5 * eps) mode.mode = Mode::B_eps;
  double t = 0.0;
  for (long long s = 0; s < steps; ++s) {
    const double h = s + 1 == steps ? config.horizon - static_cast<double>(s) * config.dt : config.dt;
    noise_increment(config.seed, static_cast<std::uint64_t>(path_index), static_cast<std::uint64_t>(s), h,
                    config.noise_substeps, dW);
    bool ok = true;
    switch (config.scheme) {
      case Scheme::truncated_euler: ok = kernel.truncated(lambda, h, dW); break;
      case Scheme::regularized_switching: ok = kernel.switching(lambda, mode.mode, h, dW); break;
      case Scheme::c_epsilon: ok = kernel.c_epsilon(x, h, dW); break;
      case Scheme::root_coordinates: ok = kernel.root(x, h, dW); break;
    }
    t = s + 1 == steps ? config.horizon : static_cast<double>(s + 1) * config.dt;
    if (!ok) {
      rec.terminated = Termination::numerical_failure;
      break;
    }
    if (root_space)
      for (int i = 0; i < n; ++i) lambda[i] = x[i] * x[i];
    if (config.scheme == Scheme::regularized_switching) {
      if (mode.mode == Mode::A_eps && lambda[0] <= 0.5 * eps) {
        mode.mode = Mode::B_eps;
        mode.switch_times.emplace_back(t, Mode::B_eps);
      } else if (mode.mode == Mode::B_eps && lambda[0] >= eps) {
        mode.mode = Mode::A_eps;
        mode.switch_times.emplace_back(t, Mode::A_eps);
      }
    }
    const bool at_stride = (s + 1) % config.record_stride == 0;
    if (scheme_stop()) {
      stopped = true;
    } else if (observe(t)) {
      rec.terminated = Termination::event_observed;
      stopped = true;
    }
    if (at_stride || stopped || s + 1 == steps) record(t);
    if (stopped) break;
  }
  if (rec.terminated == Termination::numerical_failure && rec.times.back() < t) {
    rec.times.push_back(t);
    for (int i = 0; i < n; ++i) rec.states.push_back(std::clamp(lambda[i], 0.0, 1e300));
  }
  out.events = detector.take();
  if (rec.terminated == Termination::stopped_at_S_eps) out.events.events.push_back({t, EventKind::stop_S, 1, eps});
  if (rec.terminated == Termination::stopped_at_zeta_eps)
    out.events.events.push_back({t, EventKind::joint_event_zeta, 1, eps});
  return out;
}

std::pair<PathRecord, PathRecord> simulate_coupled(const ModelParams& params_a, const ModelParams& params_b,
                                                   const SimConfig& config, long long path_index,
                                                   std::span<const double> initial_b, StepObserver* observer_a,
                                                   StepObserver* observer_b) {
  if (params_a.n != params_b.n) throw DomainError("coupled systems need the same n");
  PathRecord a = simulate_path(params_a, config, path_index, observer_a).record;
  PathRecord b = initial_b.empty() ? simulate_path(params_b, config, path_index, observer_b).record
                                   : simulate_path_from(params_b, config, path_index, initial_b, observer_b).record;
  return {std::move(a), std::move(b)};
}

std::vector<double> simulate_cir_path(const CirParams& cir, double r0, const SimConfig& config, long long path_index) {
  cir.validate();
  config.validate();
  if (!(r0 >= 0.0)) throw DomainError("r0 must be >= 0");
  const double s2 = cir.sigma * cir.sigma;
  if (cir.a < 0.25 * s2) throw DomainError("implicit square-root scheme needs a >= sigma^2 / 4");
  const long long steps = config.steps();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps / config.record_stride + 2));
  out.push_back(r0);
  double y = std::sqrt(r0);
  double dW = 0.0;
  for (long long s = 0; s < steps; ++s) {
    const double h = s + 1 == steps ? config.horizon - static_cast<double>(s) * config.dt : config.dt;
    noise_increment(config.seed, static_cast<std::uint64_t>(path_index), static_cast<std::uint64_t>(s), h,
                    config.noise_substeps, std::span<double>(&dW, 1));
    const double c = 1.0 + 0.5 * cir.b * h;
    if (!(c > 0.0)) throw DomainError("implicit square-root scheme needs 1 + b dt / 2 > 0");
    const double z = y + 0.5 * cir.sigma * dW;
    const double k = 0.5 * (cir.a - 0.25 * s2) * h;
    y = (z + std::sqrt(z * z + 4.0 * c * k)) / (2.0 * c);
    if (!std::isfinite(y)) throw NumericalFailure("CIR path produced a non-finite value");
    if ((s + 1) % config.record_stride == 0 || s + 1 == steps) out.push_back(y * y);
  }
  return out;
}

int worker_count(int requested) noexcept {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(long long count, int threads, const std::function<void(long long)>& fn) {
  const int workers = static_cast<int>(std::min<long long>(worker_count(threads), std::max<long long>(count, 1)));
  if (workers <= 1) {
    for (long long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (long long i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace wishlab
