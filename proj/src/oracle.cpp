#include "dshape/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace dshape::oracle {

namespace {

constexpr std::size_t kMaxCounterexamples = 20;

std::size_t checked_size(std::size_t a, std::size_t b, std::size_t c, const char* what) {
  const std::size_t n = a * b * c;
  if (n > kStateBudget)
    throw std::length_error(fmt::format("{} needs {} (timestep, state) entries, budget is {}", what, n, kStateBudget));
  return n;
}

ActionSet argmax_set(const double* q) {
  const double best = *std::max_element(q, q + kNumActions);
  ActionSet set = 0;
  for (int a = 0; a < kNumActions; ++a)
    if (q[a] >= best - kArgmaxTolerance) set = static_cast<ActionSet>(set | (1u << a));
  return set;
}

bool expired(const GridSpec& spec, const StepOutcome& out) { return out.next_state.t >= spec.horizon; }

bool on_demo_path(const Demonstration& demo, const GridState& s) {
  return s.t < demo.last_index() && demo.states[static_cast<std::size_t>(s.t)].pos() == s.pos();
}

std::string describe(const GridState& s) { return fmt::format("t={} s=({},{})", s.t, s.x, s.y); }

}  // namespace

std::string format_actions(ActionSet set) {
  std::string out = "{";
  for (Action a : kAllActions) {
    if (!(set & (1u << index(a)))) continue;
    if (out.size() > 1) out += ",";
    out += to_string(a);
  }
  return out + "}";
}

double ExactSolution::value(const GridState& s) const {
  return v[static_cast<std::size_t>(s.t * spec.num_cells() + spec.cell_index(s.pos()))];
}

double ExactSolution::q_value(const GridState& s, Action a) const {
  return q[static_cast<std::size_t>((s.t * spec.num_cells() + spec.cell_index(s.pos())) * kNumActions + index(a))];
}

ActionSet ExactSolution::optimal_actions(const GridState& s) const {
  if (s.t >= spec.horizon) return 0;
  return optimal[static_cast<std::size_t>(s.t * spec.num_cells() + spec.cell_index(s.pos()))];
}

ExactSolution value_iteration(const GridSpec& spec) {
  return value_iteration(spec, [](const GridState&, Action, const StepOutcome& out) { return out.reward; });
}

ExactSolution value_iteration(const GridSpec& spec, const RewardFn& reward) {
  spec.validate();
  const auto cells = static_cast<std::size_t>(spec.num_cells());
  const auto horizon = static_cast<std::size_t>(spec.horizon);
  ExactSolution sol;
  sol.spec = spec;
  sol.v.assign(checked_size(horizon + 1, cells, 1, "value iteration"), 0.0);
  sol.q.assign(horizon * cells * kNumActions, 0.0);
  sol.optimal.assign(horizon * cells, 0);

  for (int t = spec.horizon - 1; t >= 0; --t) {
    for (std::size_t c = 0; c < cells; ++c) {
      const Cell cell = spec.cell_at(static_cast<int>(c));
      if (cell == spec.task_goal) continue;
      const GridState s{cell.x, cell.y, t};
      const std::size_t row = static_cast<std::size_t>(t) * cells + c;
      double* qrow = &sol.q[row * kNumActions];
      for (Action a : kAllActions) {
        const StepOutcome out = step(spec, s, a);
        const double next = out.terminal ? 0.0 : sol.value(out.next_state);
        qrow[index(a)] = reward(s, a, out) + spec.gamma * next;
      }
      sol.v[row] = *std::max_element(qrow, qrow + kNumActions);
      sol.optimal[row] = argmax_set(qrow);
    }
  }
  return sol;
}

GoalKernel demo_goal_kernel(const Demonstration& demo) {
  if (demo.states.empty()) throw std::invalid_argument("empty demonstration");
  GoalKernel kernel;
  kernel.name = "demo";
  kernel.initial = {{demo_goal_at(demo, 0).pos(), 1.0}};
  kernel.next = [demo](Cell g, const GridState&, Action, std::vector<std::pair<Cell, double>>& out) {
    Cell n = g;
    // Demo cells are distinct, so the cell pins down the demo index.
    for (int i = 0; i <= demo.last_index(); ++i) {
      if (demo.states[static_cast<std::size_t>(i)].pos() == g) {
        n = demo.states[static_cast<std::size_t>(std::min(i + 1, demo.last_index()))].pos();
        break;
      }
    }
    out.emplace_back(n, 1.0);
  };
  return kernel;
}

GoalKernel relabel_goal_kernel(const GridSpec& spec, const Demonstration& demo, double demo_weight) {
  if (!(demo_weight >= 0.0 && demo_weight <= 1.0)) throw std::invalid_argument("demo_weight must lie in [0,1]");
  GoalKernel demo_kernel = demo_goal_kernel(demo);
  GoalKernel kernel;
  kernel.name = "relabel";
  kernel.initial = demo_kernel.initial;
  kernel.next = [spec, demo_next = demo_kernel.next, demo_weight](Cell g, const GridState& s, Action a,
                                                                   std::vector<std::pair<Cell, double>>& out) {
    const std::size_t first = out.size();
    demo_next(g, s, a, out);
    for (std::size_t i = first; i < out.size(); ++i) out[i].second *= demo_weight;
    const double w = (1.0 - demo_weight) / kNumActions;
    for (Action b : kAllActions) out.emplace_back(move(spec, g, b), w);
  };
  return kernel;
}

namespace {

std::size_t aug_index(const GridSpec& spec, int t, Cell s, Cell g) {
  const auto cells = static_cast<std::size_t>(spec.num_cells());
  return (static_cast<std::size_t>(t) * cells + static_cast<std::size_t>(spec.cell_index(s))) * cells +
         static_cast<std::size_t>(spec.cell_index(g));
}

}  // namespace

double AugmentedExactSolution::value(const GridState& s, Cell g) const { return v[aug_index(spec, s.t, s.pos(), g)]; }

double AugmentedExactSolution::q_value(const GridState& s, Cell g, Action a) const {
  return q[aug_index(spec, s.t, s.pos(), g) * kNumActions + static_cast<std::size_t>(index(a))];
}

ActionSet AugmentedExactSolution::optimal_actions(const GridState& s, Cell g) const {
  if (s.t >= spec.horizon) return 0;
  return optimal[aug_index(spec, s.t, s.pos(), g)];
}

bool AugmentedExactSolution::is_reachable(const GridState& s, Cell g) const {
  return reachable[aug_index(spec, s.t, s.pos(), g)] != 0;
}

void AugmentedExactSolution::for_each_reachable(const std::function<void(const GridState&, Cell)>& f) const {
  const int cells = spec.num_cells();
  for (int t = 0; t < spec.horizon; ++t)
    for (int c = 0; c < cells; ++c) {
      const Cell s = spec.cell_at(c);
      if (s == spec.task_goal) continue;
      for (int gi = 0; gi < cells; ++gi) {
        const Cell g = spec.cell_at(gi);
        if (reachable[aug_index(spec, t, s, g)]) f({s.x, s.y, t}, g);
      }
    }
}

AugmentedExactSolution value_iteration_augmented(const GridSpec& spec, const GoalKernel& kernel,
                                                 const std::optional<PotentialFn>& shaping,
                                                 const AugmentedRewardFn& reward) {
  spec.validate();
  const auto cells = static_cast<std::size_t>(spec.num_cells());
  const auto horizon = static_cast<std::size_t>(spec.horizon);
  AugmentedExactSolution sol;
  sol.spec = spec;
  sol.kernel = kernel.name;
  sol.v.assign(checked_size(horizon + 1, cells, cells, "augmented value iteration"), 0.0);
  sol.q.assign(horizon * cells * cells * kNumActions, 0.0);
  sol.optimal.assign(horizon * cells * cells, 0);
  sol.reachable.assign(sol.v.size(), 0);

  std::vector<std::pair<Cell, double>> successors;
  for (int t = spec.horizon - 1; t >= 0; --t) {
    for (std::size_t c = 0; c < cells; ++c) {
      const Cell cell = spec.cell_at(static_cast<int>(c));
      if (cell == spec.task_goal) continue;
      const GridState s{cell.x, cell.y, t};
      for (std::size_t gi = 0; gi < cells; ++gi) {
        const Cell g = spec.cell_at(static_cast<int>(gi));
        const std::size_t row = aug_index(spec, t, cell, g);
        double* qrow = &sol.q[row * kNumActions];
        for (Action a : kAllActions) {
          const StepOutcome out = step(spec, s, a);
          successors.clear();
          kernel.next(g, s, a, successors);
          double total = 0.0;
          for (const auto& [g_next, p] : successors) {
            double r = reward ? reward(s, g, a, out, g_next) : out.reward;
            if (shaping) {
              const bool zero = shaping->terminal_zero && (out.terminal || expired(spec, out));
              const double phi_to = zero ? 0.0 : (*shaping)({out.next_state, {g_next.x, g_next.y, 0}});
              r += spec.gamma * phi_to - (*shaping)({s, {g.x, g.y, 0}});
            }
            const double next = out.terminal ? 0.0 : sol.v[aug_index(spec, t + 1, out.next_state.pos(), g_next)];
            total += p * (r + spec.gamma * next);
          }
          qrow[index(a)] = total;
        }
        sol.v[row] = *std::max_element(qrow, qrow + kNumActions);
        sol.optimal[row] = argmax_set(qrow);
      }
    }
  }

  // Forward closure from the start under every action and every goal successor.
  for (const auto& [g0, p] : kernel.initial)
    if (p > 0.0) sol.reachable[aug_index(spec, 0, spec.start, g0)] = 1;
  for (int t = 0; t < spec.horizon; ++t) {
    for (std::size_t c = 0; c < cells; ++c) {
      const Cell cell = spec.cell_at(static_cast<int>(c));
      if (cell == spec.task_goal) continue;
      const GridState s{cell.x, cell.y, t};
      for (std::size_t gi = 0; gi < cells; ++gi) {
        const Cell g = spec.cell_at(static_cast<int>(gi));
        if (!sol.reachable[aug_index(spec, t, cell, g)]) continue;
        for (Action a : kAllActions) {
          const StepOutcome out = step(spec, s, a);
          successors.clear();
          kernel.next(g, s, a, successors);
          for (const auto& [g_next, p] : successors)
            if (p > 0.0) sol.reachable[aug_index(spec, t + 1, out.next_state.pos(), g_next)] = 1;
        }
      }
    }
  }
  return sol;
}

void Certificate::add_violation(std::string description, bool on_path) {
  passed = false;
  ++violations;
  if (on_path) ++on_path_violations;
  if (counterexamples.size() < kMaxCounterexamples) counterexamples.push_back(std::move(description));
}

std::string Certificate::report() const {
  std::string out = fmt::format("{}: {}\n  states checked: {}\n  violations: {} ({} on the demo path)\n", name,
                                passed ? "PASS" : "FAIL", states_checked, violations, on_path_violations);
  for (const std::string& c : counterexamples) out += fmt::format("  counterexample: {}\n", c);
  if (violations > counterexamples.size())
    out += fmt::format("  ... {} more\n", violations - counterexamples.size());
  return out;
}

namespace {

void compare_theorem1(Certificate& cert, const ExactSolution& base, const AugmentedExactSolution& aug,
                      const Demonstration& demo) {
  aug.for_each_reachable([&](const GridState& s, Cell g) {
    ++cert.states_checked;
    const ActionSet expected = base.optimal_actions(s);
    const ActionSet got = aug.optimal_actions(s, g);
    if (expected != got)
      cert.add_violation(fmt::format("kernel={} {} g=({},{}): M argmax {} vs augmented argmax {}", aug.kernel,
                                     describe(s), g.x, g.y, format_actions(expected), format_actions(got)),
                         on_demo_path(demo, s) && demo_goal_at(demo, s.t).pos() == g);
  });
}

Certificate theorem1(const GridSpec& spec, const Demonstration& demo, const AugmentedRewardFn& reward,
                     std::string name) {
  Certificate cert;
  cert.name = std::move(name);
  const ExactSolution base = value_iteration(spec);
  for (const GoalKernel& kernel : {demo_goal_kernel(demo), relabel_goal_kernel(spec, demo)})
    compare_theorem1(cert, base, value_iteration_augmented(spec, kernel, std::nullopt, reward), demo);
  return cert;
}

}  // namespace

Certificate check_theorem1(const GridSpec& spec, const Demonstration& demo) {
  return theorem1(spec, demo, {}, "Theorem 1");
}

Certificate check_theorem1(const GridSpec& spec, const Demonstration& demo, const AugmentedRewardFn& reward,
                           std::string label) {
  return theorem1(spec, demo, reward, fmt::format("Theorem 1 ({})", label));
}

Certificate check_policy_invariance(const GridSpec& spec, const Demonstration& demo, const PotentialFn& potential) {
  Certificate cert;
  cert.name = fmt::format("Policy invariance (goal potential, {} demo)", to_string(demo.quality));
  for (const GoalKernel& kernel : {demo_goal_kernel(demo), relabel_goal_kernel(spec, demo)}) {
    const AugmentedExactSolution plain = value_iteration_augmented(spec, kernel);
    const AugmentedExactSolution shaped = value_iteration_augmented(spec, kernel, potential);
    plain.for_each_reachable([&](const GridState& s, Cell g) {
      ++cert.states_checked;
      const bool on_path = on_demo_path(demo, s) && demo_goal_at(demo, s.t).pos() == g;
      const ActionSet a = plain.optimal_actions(s, g);
      const ActionSet b = shaped.optimal_actions(s, g);
      if (a != b) {
        cert.add_violation(fmt::format("kernel={} {} g=({},{}): unshaped argmax {} vs shaped argmax {}", kernel.name,
                                       describe(s), g.x, g.y, format_actions(a), format_actions(b)),
                           on_path);
        return;
      }
      if (spec.gamma != 1.0) return;
      const double offset = potential({s, {g.x, g.y, 0}});
      for (Action act : kAllActions) {
        const double expected = plain.q_value(s, g, act) - offset;
        if (std::abs(shaped.q_value(s, g, act) - expected) > kArgmaxTolerance) {
          cert.add_violation(fmt::format("kernel={} {} g=({},{}) a={}: shaped Q {} != Q - phi = {}", kernel.name,
                                         describe(s), g.x, g.y, to_string(act), shaped.q_value(s, g, act), expected),
                             on_path);
          return;
        }
      }
    });
  }
  return cert;
}

Certificate check_reward_invariance(const GridSpec& spec, const Demonstration& demo, const RewardFn& reward,
                                    std::string name) {
  Certificate cert;
  cert.name = std::move(name);
  const ExactSolution base = value_iteration(spec);
  const ExactSolution modified = value_iteration(spec, reward);

  const int cells = spec.num_cells();
  std::vector<std::uint8_t> reach(static_cast<std::size_t>((spec.horizon + 1) * cells), 0);
  reach[static_cast<std::size_t>(spec.cell_index(spec.start))] = 1;
  for (int t = 0; t < spec.horizon; ++t) {
    for (int c = 0; c < cells; ++c) {
      if (!reach[static_cast<std::size_t>(t * cells + c)]) continue;
      const Cell cell = spec.cell_at(c);
      if (cell == spec.task_goal) continue;
      const GridState s{cell.x, cell.y, t};
      ++cert.states_checked;
      const ActionSet a = base.optimal_actions(s);
      const ActionSet b = modified.optimal_actions(s);
      if (a != b)
        cert.add_violation(fmt::format("{}: task argmax {} vs modified argmax {}", describe(s), format_actions(a),
                                       format_actions(b)),
                           on_demo_path(demo, s));
      for (Action act : kAllActions) {
        const GridState n = step(spec, s, act).next_state;
        reach[static_cast<std::size_t>(n.t * cells + spec.cell_index(n.pos()))] = 1;
      }
    }
  }
  return cert;
}

Certificate check_sbs_invariance(const GridSpec& spec, const Demonstration& demo, const SBSParams& params,
                                 bool terminal_zero) {
  const SbsAgent sbs(spec, demo, params, spec.gamma);
  auto reward = [&spec, &sbs, &params, terminal_zero](const GridState& s, Action, const StepOutcome& out) {
    const bool zero = terminal_zero && (out.terminal || expired(spec, out));
    return sbs_reward(out.reward, sbs.potential(s.pos()), sbs.potential(out.next_state.pos()), spec.gamma, params.c,
                      zero);
  };
  return check_reward_invariance(
      spec, demo, reward,
      fmt::format("Policy invariance (SBS potential, sigma={}, c={}, {} demo)", params.sigma, params.c,
                  to_string(demo.quality)));
}

Certificate check_manhattan_invariance(const GridSpec& spec, const Demonstration& demo, double c) {
  auto reward = [&demo, c](const GridState& s, Action, const StepOutcome& out) {
    return manhattan_reward(out.reward, s, demo, c);
  };
  return check_reward_invariance(spec, demo, reward,
                                 fmt::format("Policy invariance (Manhattan reward, c={}, {} demo)", c,
                                             to_string(demo.quality)));
}

}  // namespace dshape::oracle
