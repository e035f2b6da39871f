#ifndef WISHLAB_EVENTS_HPP
#define WISHLAB_EVENTS_HPP

#include <span>
#include <string>
#include <vector>

namespace wishlab {

enum class EventKind { pair_collision, zero_hit_partial_sum, joint_event_zeta, stop_S, multiple_collision };
const char* to_string(EventKind k) noexcept;

/// `index` is 1-based: the lower particle of a pair, or k for a partial sum.
struct Event {
  double time = 0.0;
  EventKind kind = EventKind::pair_collision;
  int index = 0;
  double level = 0.0;
};

struct EventLog {
  std::vector<Event> events;
  /// Steps at which a multiple collision was observed (only the first is logged as an event).
  long long multiple_observations = 0;

  bool has(EventKind kind, int index = 0) const noexcept;
  /// Time of the first event of this kind and index, or +inf.
  double first_time(EventKind kind, int index = 0) const noexcept;
};

/// Called after every accepted step with the sorted state; returning true stops the path.
class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual bool observe(double t, std::span<const double> lambda) = 0;
};

/// Online first-crossing detector at level delta:
///  - pair_collision(i): first time lambda^{i+1} - lambda^i <= delta;
///  - zero_hit_partial_sum(k): first time lambda^1 + ... + lambda^k <= delta;
///  - joint_event_zeta: first time lambda^1 <= delta and lambda^2 - lambda^1 <= delta;
///  - multiple_collision: two adjacent gaps <= delta at the same step, or a gap
///    at i >= 2 together with the joint condition.
class EventDetector : public StepObserver {
 public:
  EventDetector(int n, double delta);

  bool observe(double t, std::span<const double> lambda) override;

  /// Stop the path once this partial sum has crossed (k in 1..n), or never when 0.
  void stop_on_partial_sum(int k) noexcept { stop_k_ = k; }
  void stop_on_pair(int i) noexcept { stop_pair_ = i; }

  const EventLog& log() const noexcept { return log_; }
  EventLog take() noexcept { return std::move(log_); }
  double delta() const noexcept { return delta_; }

 private:
  int n_;
  double delta_;
  int stop_k_ = 0;
  int stop_pair_ = 0;
  std::vector<char> pair_seen_;
  std::vector<char> sum_seen_;
  bool zeta_seen_ = false;
  bool multiple_seen_ = false;
  EventLog log_;
};

/// Fans one step out to several observers; stops when any of them asks to.
class ObserverList : public StepObserver {
 public:
  void add(StepObserver* o) { observers_.push_back(o); }
  bool observe(double t, std::span<const double> lambda) override;

 private:
  std::vector<StepObserver*> observers_;
};

}  // namespace wishlab

#endif  // WISHLAB_EVENTS_HPP
