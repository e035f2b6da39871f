#include "wishlab/collision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

#include "wishlab/error.hpp"

namespace wishlab {

EventLog detect_events(const PathRecord& path, double delta) {
  EventDetector det(path.n(), delta);
  for (std::size_t k = 0; k < path.size(); ++k) det.observe(path.times[k], path.state(k));
  return det.take();
}

FirstPassageReport first_passage_partial_sum(const ModelParams& params, const SimConfig& config, int k,
                                             const std::vector<double>& levels) {
  if (k < 1 || k > params.n) throw BadK("k=" + std::to_string(k) + " outside 1.." + std::to_string(params.n));
  if (levels.empty()) throw DomainError("empty level ladder");
  const double smallest = *std::min_element(levels.begin(), levels.end());

  struct PerPath {
    std::vector<char> hit;
    long long multiple = 0;
  };
  SimConfig cfg = config;
  cfg.record_stride = std::max<long long>(cfg.record_stride, cfg.steps());
  const auto results = run_paths<PerPath>(config.paths, config.threads, [&](long long p) {
    std::vector<std::unique_ptr<EventDetector>> dets;
    ObserverList list;
    for (double lv : levels) {
      dets.push_back(std::make_unique<EventDetector>(params.n, lv));
      if (lv == smallest) dets.back()->stop_on_partial_sum(k);
      list.add(dets.back().get());
    }
    simulate_path(params, cfg, p, &list);
    PerPath out;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      out.hit.push_back(dets[i]->log().has(EventKind::zero_hit_partial_sum, k) ? 1 : 0);
      if (levels[i] == smallest) out.multiple = dets[i]->log().multiple_observations;
    }
    return out;
  });

  FirstPassageReport rep;
  rep.k = k;
  rep.levels = levels;
  rep.paths = config.paths;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    long long hits = 0;
    for (const auto& r : results) hits += r.hit[i];
    char name[64];
    std::snprintf(name, sizeof name, "hit_sum_%d_delta_%g", k, levels[i]);
    rep.hit.push_back(proportion_summary(name, hits, config.paths));
  }
  for (const auto& r : results) rep.multiple_observations += r.multiple;
  return rep;
}

double TimeChange::inverse(double a) const noexcept {
  if (grid.empty()) return std::numeric_limits<double>::infinity();
  if (a <= grid.front().second) return grid.front().first;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (grid[k].second >= a) {
      const auto [t0, a0] = grid[k - 1];
      const auto [t1, a1] = grid[k];
      return a1 == a0 ? t1 : t0 + (a - a0) / (a1 - a0) * (t1 - t0);
    }
  }
  return std::numeric_limits<double>::infinity();
}

TimeChange time_change_A(const PathRecord& path, int i) {
  if (i < 2 || i > path.n()) throw BadK("time change index must lie in 2..n");
  TimeChange tc;
  tc.i = i;
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto s = path.state(k);
    const double f = 4.0 * (s[i - 1] + s[i - 2]);
    if (k > 0) acc += 0.5 * (f + prev) * (path.times[k] - path.times[k - 1]);
    prev = f;
    tc.grid.emplace_back(path.times[k], acc);
  }
  return tc;
}

BesselDimension bessel_collision_dimension(double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be > 0");
  return {beta + 1.0, beta <= 1.0};
}

std::vector<double> integrability_diagnostic(const PathRecord& path) {
  return integrability_diagnostic(path, interaction_guard(path.config));
}

std::vector<double> integrability_diagnostic(const PathRecord& path, double guard) {
  const int n = path.n();
  std::vector<double> out(n - 1, 0.0), prev(n - 1, 0.0);
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto s = path.state(k);
    for (int i = 0; i + 1 < n; ++i) {
      const double f = s[i + 1] / std::max(s[i + 1] - s[i], guard);
      if (k > 0) out[i] += 0.5 * (f + prev[i]) * (path.times[k] - path.times[k - 1]);
      prev[i] = f;
    }
  }
  return out;
}

}  // namespace wishlab
