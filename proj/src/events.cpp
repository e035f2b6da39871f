#include "wishlab/events.hpp"

#include <limits>

#include "wishlab/error.hpp"

namespace wishlab {

const char* to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::pair_collision: return "pair_collision";
    case EventKind::zero_hit_partial_sum: return "zero_hit_partial_sum";
    case EventKind::joint_event_zeta: return "joint_event_zeta";
    case EventKind::stop_S: return "stop_S";
    case EventKind::multiple_collision: return "multiple_collision";
  }
  return "?";
}

bool EventLog::has(EventKind kind, int index) const noexcept {
  for (const Event& e : events)
    if (e.kind == kind && (index == 0 || e.index == index)) return true;
  return false;
}

double EventLog::first_time(EventKind kind, int index) const noexcept {
  double t = std::numeric_limits<double>::infinity();
  for (const Event& e : events)
    if (e.kind == kind && (index == 0 || e.index == index) && e.time < t) t = e.time;
  return t;
}

EventDetector::EventDetector(int n, double delta)
    : n_(n), delta_(delta), pair_seen_(n > 1 ? n - 1 : 0, 0), sum_seen_(n, 0) {
  if (n < 1) throw DomainError("EventDetector needs n >= 1");
  if (!(delta > 0.0)) throw DomainError("EventDetector needs delta > 0");
}

bool EventDetector::observe(double t, std::span<const double> lambda) {
  bool stop = false;
  int close_gaps = 0;
  bool upper_gap = false;
  for (int i = 0; i + 1 < n_; ++i) {
    if (lambda[i + 1] - lambda[i] <= delta_) {
      ++close_gaps;
      if (i >= 1) upper_gap = true;
      if (!pair_seen_[i]) {
        pair_seen_[i] = 1;
        log_.events.push_back({t, EventKind::pair_collision, i + 1, delta_});
      }
      if (stop_pair_ == i + 1) stop = true;
    }
  }
  double partial = 0.0;
  for (int k = 0; k < n_; ++k) {
    partial += lambda[k];
    if (partial <= delta_) {
      if (!sum_seen_[k]) {
        sum_seen_[k] = 1;
        log_.events.push_back({t, EventKind::zero_hit_partial_sum, k + 1, delta_});
      }
      if (stop_k_ == k + 1) stop = true;
    }
  }
  const bool joint = n_ >= 2 && lambda[0] <= delta_ && lambda[1] - lambda[0] <= delta_;
  if (joint && !zeta_seen_) {
    zeta_seen_ = true;
    log_.events.push_back({t, EventKind::joint_event_zeta, 1, delta_});
  }
  if (close_gaps >= 2 || (joint && upper_gap)) {
    ++log_.multiple_observations;
    if (!multiple_seen_) {
      multiple_seen_ = true;
      log_.events.push_back({t, EventKind::multiple_collision, 0, delta_});
    }
  }
  return stop;
}

bool ObserverList::observe(double t, std::span<const double> lambda) {
  bool stop = false;
  for (StepObserver* o : observers_) stop = o->observe(t, lambda) || stop;
  return stop;
}

}  // namespace wishlab
