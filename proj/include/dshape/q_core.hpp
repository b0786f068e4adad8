#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "dshape/grid_env.hpp"

namespace dshape {

using Rng = std::mt19937_64;

/// Deterministic generator for (seed, stream); distinct streams are independent.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Table key: agent cell, plus the goal cell when the state is augmented.
/// The timestep is deliberately not part of the key.
struct QKey {
  int x = 0;
  int y = 0;
  int gx = -1;
  int gy = -1;

  bool augmented() const { return gx >= 0; }
  friend bool operator==(const QKey&, const QKey&) = default;
};

inline QKey make_key(Cell s, Cell goal, bool augmented) {
  return augmented ? QKey{s.x, s.y, goal.x, goal.y} : QKey{s.x, s.y};
}

/// Dense action-value table over every key of one grid, zero-initialised.
class QTable {
 public:
  QTable(int side, bool augmented);

  double value(const QKey& key, Action a) const { return values_[offset(key) + index(a)]; }
  double& at(const QKey& key, Action a) { return values_[offset(key) + index(a)]; }
  std::span<const double, kNumActions> row(const QKey& key) const {
    return std::span<const double, kNumActions>(values_.data() + offset(key), kNumActions);
  }
  double max_value(const QKey& key) const;

  int side() const { return side_; }
  bool augmented() const { return augmented_; }
  std::span<const double> raw() const { return values_; }

  /// "x y gx gy action value" rows for every nonzero entry; gx gy are -1 when
  /// the table is not augmented.
  void write(std::ostream& os) const;

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t offset(const QKey& key) const;

  int side_;
  bool augmented_;
  std::vector<double> values_;
};

/// One replay record. The raw fields keep everything needed to recompute a
/// goal-dependent reward for substituted goals.
struct Transition {
  QKey key;
  Action action = Action::Up;
  double reward = 0.0;
  QKey next_key;
  bool terminal = false;
  bool truncated = false;

  GridState s;
  GridState goal;
  GridState s_next;
  GridState goal_next;
  double r_task = 0.0;
};

/// Fixed-capacity FIFO of transitions; the oldest record is evicted first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& tr);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size_ == 0; }

  /// i = 0 is the oldest record still held.
  const Transition& operator[](std::size_t i) const { return records_[(head_ + i) % capacity_]; }
  /// Uniform draw with replacement. Requires a nonempty buffer.
  const Transition& sample(Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
  std::vector<Transition> records_;
};

struct LearnerParams {
  double alpha = 0.1;
  double epsilon = 0.2;
  double gamma = 1.0;
  int updates_per_step = 20;
  int buffer_capacity = 5000;
  long total_steps = 250000;

  void validate() const;
};

/// Epsilon-greedy with uniform tie-breaking among maximisers.
Action select_action(const QTable& q, const QKey& key, double epsilon, Rng& rng);
inline Action greedy_action(const QTable& q, const QKey& key, Rng& rng) { return select_action(q, key, 0.0, rng); }

/// Watkins update. Throws std::domain_error if the new value is not finite.
void q_update(QTable& q, const Transition& tr, double alpha, double gamma);

/// Method-specific hooks driven by Learner: which goal the agent is shown,
/// whether the goal enters the table key, how the stored reward is formed,
/// and which extra records an episode produces.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual bool augmented() const = 0;
  /// Behaviour goal shown at timestep t.
  virtual GridState goal_at(int t) const = 0;
  /// Stored reward for a record whose raw fields are filled in.
  virtual double reward(const Transition& tr) const = 0;
  /// Extra records for a finished episode, appended to out.
  virtual void relabel(std::span<const Transition> episode, Rng& rng, std::vector<Transition>& out) const {
    (void)episode, (void)rng, (void)out;
  }

  QKey key(const GridState& s, const GridState& goal) const { return make_key(s.pos(), goal.pos(), augmented()); }
};

/// Plain Q-learning on the task reward.
class QLearningAgent final : public Agent {
 public:
  explicit QLearningAgent(const GridSpec& spec) : goal_{spec.task_goal.x, spec.task_goal.y, 0} {}
  bool augmented() const override { return false; }
  GridState goal_at(int) const override { return goal_; }
  double reward(const Transition& tr) const override { return tr.r_task; }

 private:
  GridState goal_;
};

/// Executes action a from s under the agent's goals and fills every field of
/// the resulting record, including the agent's stored reward.
Transition rollout_step(const Agent& agent, const GridSpec& spec, const GridState& s, Action a);

struct StepLog {
  Transition transition;
  std::size_t relabelled = 0;  // records added at episode end
  bool episode_end = false;
};

/// Single-threaded replay-buffer Q-learner for one seed.
class Learner {
 public:
  Learner(const GridSpec& spec, const LearnerParams& params, std::shared_ptr<const Agent> agent,
          std::uint64_t seed);

  /// One environment step, buffer insertion (plus relabelled records when the
  /// episode ends), then updates_per_step replayed updates.
  StepLog train_step();

  /// Greedy rollout with exploration off, using its own generator so learner
  /// state is untouched. Returns the undiscounted task return; visit is called
  /// on every state of the rollout including the first and last.
  double greedy_episode(Rng& rng, const std::function<void(const GridState&)>& visit = {}) const;

  const GridSpec& spec() const { return spec_; }
  const LearnerParams& params() const { return params_; }
  const Agent& agent() const { return *agent_; }
  const QTable& q() const { return q_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  long env_steps() const { return env_steps_; }
  long episodes() const { return episodes_; }

 private:
  GridSpec spec_;
  LearnerParams params_;
  std::shared_ptr<const Agent> agent_;
  QTable q_;
  ReplayBuffer buffer_;
  Rng rng_;

  GridState state_;
  std::vector<Transition> episode_;
  std::vector<Transition> relabelled_;
  long env_steps_ = 0;
  long episodes_ = 0;
};

}  // namespace dshape
