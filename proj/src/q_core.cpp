#include "dshape/q_core.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace dshape {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  return Rng(seq);
}

QTable::QTable(int side, bool augmented) : side_(side), augmented_(augmented) {
  if (side < 1) throw std::invalid_argument("table side must be positive");
  std::size_t cells = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
  std::size_t keys = augmented ? cells * cells : cells;
  values_.assign(keys * kNumActions, 0.0);
}

std::size_t QTable::offset(const QKey& key) const {
  const auto side = static_cast<std::size_t>(side_);
  std::size_t k = static_cast<std::size_t>(key.y) * side + static_cast<std::size_t>(key.x);
  if (augmented_) k = k * side * side + static_cast<std::size_t>(key.gy) * side + static_cast<std::size_t>(key.gx);
  return k * kNumActions;
}

double QTable::max_value(const QKey& key) const {
  auto r = row(key);
  return *std::max_element(r.begin(), r.end());
}

void QTable::write(std::ostream& os) const {
  os << "x y gx gy action value\n";
  const std::size_t cells = static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_);
  const std::size_t goals = augmented_ ? cells : 1;
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t g = 0; g < goals; ++g) {
      QKey key{static_cast<int>(c) % side_, static_cast<int>(c) / side_};
      if (augmented_) {
        key.gx = static_cast<int>(g) % side_;
        key.gy = static_cast<int>(g) / side_;
      }
      for (Action a : kAllActions) {
        const double v = value(key, a);
        if (v != 0.0) os << fmt::format("{} {} {} {} {} {:.17g}\n", key.x, key.y, key.gx, key.gy, to_string(a), v);
      }
    }
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  records_.reserve(capacity);
}

void ReplayBuffer::push(const Transition& tr) {
  if (size_ < capacity_) {
    records_.push_back(tr);
    ++size_;
    return;
  }
  records_[head_] = tr;
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::sample(Rng& rng) const {
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  return (*this)[pick(rng)];
}

void LearnerParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument(fmt::format("alpha must lie in (0,1], got {}", alpha));
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument(fmt::format("epsilon must lie in [0,1], got {}", epsilon));
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument(fmt::format("gamma must lie in (0,1], got {}", gamma));
  if (updates_per_step < 0) throw std::invalid_argument("updates_per_step must be >= 0");
  if (buffer_capacity < 1) throw std::invalid_argument("buffer_capacity must be >= 1");
  if (total_steps < 0) throw std::invalid_argument("total_steps must be >= 0");
}

Action select_action(const QTable& q, const QKey& key, double epsilon, Rng& rng) {
  std::uniform_int_distribution<int> any(0, kNumActions - 1);
  if (epsilon > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) return action_from_index(any(rng));
  }
  auto r = q.row(key);
  const double best = *std::max_element(r.begin(), r.end());
  int ties[kNumActions];
  int n = 0;
  for (int a = 0; a < kNumActions; ++a)
    if (r[a] == best) ties[n++] = a;
  if (n == 1) return action_from_index(ties[0]);
  std::uniform_int_distribution<int> pick(0, n - 1);
  return action_from_index(ties[pick(rng)]);
}

void q_update(QTable& q, const Transition& tr, double alpha, double gamma) {
  const double bootstrap = tr.terminal ? 0.0 : gamma * q.max_value(tr.next_key);
  double& v = q.at(tr.key, tr.action);
  const double updated = v + alpha * (tr.reward + bootstrap - v);
  if (!std::isfinite(updated))
    throw std::domain_error(fmt::format("non-finite Q update at ({},{}) reward {}", tr.key.x, tr.key.y, tr.reward));
  v = updated;
}

Learner::Learner(const GridSpec& spec, const LearnerParams& params, std::shared_ptr<const Agent> agent,
                 std::uint64_t seed)
    : spec_(spec),
      params_(params),
      agent_(std::move(agent)),
      q_(spec.side, agent_ ? agent_->augmented() : false),
      buffer_(static_cast<std::size_t>(params.buffer_capacity > 0 ? params.buffer_capacity : 1)),
      rng_(make_rng(seed)),
      state_(reset(spec)) {
  spec_.validate();
  params_.validate();
  if (!agent_) throw std::invalid_argument("learner needs an agent");
  episode_.reserve(static_cast<std::size_t>(spec_.horizon));
}

Transition rollout_step(const Agent& agent, const GridSpec& spec, const GridState& s, Action a) {
  Transition tr;
  tr.s = s;
  tr.goal = agent.goal_at(s.t);
  tr.key = agent.key(tr.s, tr.goal);
  tr.action = a;

  const StepOutcome out = step(spec, s, a);
  tr.s_next = out.next_state;
  tr.goal_next = agent.goal_at(out.next_state.t);
  tr.next_key = agent.key(tr.s_next, tr.goal_next);
  tr.r_task = out.reward;
  tr.terminal = out.terminal;
  tr.truncated = out.truncated;
  tr.reward = agent.reward(tr);
  return tr;
}

StepLog Learner::train_step() {
  const Agent& agent = *agent_;
  const QKey key = agent.key(state_, agent.goal_at(state_.t));
  const Action a = select_action(q_, key, params_.epsilon, rng_);

  StepLog log;
  const Transition& tr = log.transition = rollout_step(agent, spec_, state_, a);

  buffer_.push(tr);
  episode_.push_back(tr);
  ++env_steps_;
  state_ = tr.s_next;

  if (tr.terminal || tr.truncated) {
    relabelled_.clear();
    agent.relabel(episode_, rng_, relabelled_);
    for (const Transition& r : relabelled_) buffer_.push(r);
    log.relabelled = relabelled_.size();
    log.episode_end = true;
    episode_.clear();
    state_ = reset(spec_);
    ++episodes_;
  }

  for (int i = 0; i < params_.updates_per_step && !buffer_.empty(); ++i)
    q_update(q_, buffer_.sample(rng_), params_.alpha, params_.gamma);
  return log;
}

double Learner::greedy_episode(Rng& rng, const std::function<void(const GridState&)>& visit) const {
  GridState s = reset(spec_);
  if (visit) visit(s);
  double ret = 0.0;
  for (;;) {
    const Action a = greedy_action(q_, agent_->key(s, agent_->goal_at(s.t)), rng);
    const StepOutcome out = step(spec_, s, a);
    ret += out.reward;
    s = out.next_state;
    if (visit) visit(s);
    if (out.terminal || out.truncated) break;
  }
  return ret;
}

}  // namespace dshape
