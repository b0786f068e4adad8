#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dshape/agent.hpp"
#include "dshape/baselines.hpp"
#include "dshape/oracle.hpp"

using namespace dshape;

namespace {

AugmentedState aug(Cell s, Cell g) { return {{s.x, s.y, 0}, {g.x, g.y, 0}}; }

double recomputed_shaping(const Transition& tr) {
  return shaping_term(PotentialFn{}, {tr.s, tr.goal}, {tr.s_next, tr.goal_next}, 1.0, tr.terminal);
}

std::vector<Transition> random_episode(const GridSpec& spec, const Agent& agent, Rng& rng) {
  std::vector<Transition> ep;
  GridState s = reset(spec);
  std::uniform_int_distribution<int> pick(0, 3);
  while (true) {
    ep.push_back(rollout_step(agent, spec, s, action_from_index(pick(rng))));
    if (ep.back().terminal || ep.back().truncated) return ep;
    s = ep.back().s_next;
  }
}

}  // namespace

TEST_CASE("shaping term examples") {
  const PotentialFn phi;
  CHECK(shaping_term(phi, aug({0, 0}, {1, 0}), aug({1, 0}, {2, 0}), 1.0, false) == 0.0);
  CHECK(shaping_term(phi, aug({2, 3}, {2, 3}), aug({3, 3}, {3, 3}), 1.0, false) == 0.0);
  CHECK(shaping_term(phi, aug({4, 3}, {2, 2}), aug({4, 4}, {2, 2}), 1.0, true) == 3.0);
  PotentialFn raw;
  raw.terminal_zero = false;
  CHECK(shaping_term(raw, aug({4, 3}, {2, 2}), aug({4, 4}, {2, 2}), 1.0, true) == -1.0);
  CHECK(shaping_term(phi, aug({0, 0}, {3, 0}), aug({1, 0}, {3, 0}), 0.5, false) == doctest::Approx(2.0));
}

TEST_CASE("shaped reward examples") {
  CHECK(shaped_reward(-1.0, 0.0) == -1.0);
  CHECK(shaped_reward(-1.0, 1.0) == 0.0);
  CHECK(shaped_reward(0.0, 3.0) == 3.0);
}

TEST_CASE("rollout_step stores demo-aligned goals and shaped rewards") {
  const GridSpec spec = GridSpec::make(5);
  const Demonstration demo = make_demo(spec, DemoQuality::Optimal);
  const DShapeAgent agent(demo, DShapeParams{});

  const Transition tr = rollout_step(agent, spec, reset(spec), Action::Right);
  CHECK(tr.goal.pos() == Cell{1, 0});
  CHECK(tr.goal_next.pos() == Cell{2, 0});
  CHECK(tr.key == QKey{0, 0, 1, 0});
  CHECK(tr.next_key == QKey{1, 0, 2, 0});
  CHECK(tr.r_task == -1.0);
  CHECK(tr.reward == -1.0);

  const Transition stuck = rollout_step(agent, spec, reset(spec), Action::Down);
  CHECK(stuck.s_next.pos() == Cell{0, 0});
  CHECK(stuck.reward == -2.0);

  GridState s = demo.states[7];
  const Transition last = rollout_step(agent, spec, s, Action::Up);
  CHECK(last.terminal);
  CHECK(last.r_task == 0.0);
  CHECK(last.reward == 1.0);
}

TEST_CASE("ablation flags") {
  CHECK_NOTHROW(AblationFlags{}.validate());
  CHECK_NOTHROW((AblationFlags{false, false, false}.validate()));
  CHECK_THROWS_AS((AblationFlags{true, false, true}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((AblationFlags{true, true, false}.validate()), std::invalid_argument);

  const GridSpec spec = GridSpec::make(5);
  const Demonstration demo = make_demo(spec, DemoQuality::Optimal);
  DShapeParams p;
  p.flags = {false, false, false};
  const DShapeAgent plain(demo, p);
  const Transition tr = rollout_step(plain, spec, reset(spec), Action::Down);
  CHECK_FALSE(plain.augmented());
  CHECK(tr.key == QKey{0, 0});
  CHECK(tr.reward == tr.r_task);
  std::vector<Transition> out;
  Rng rng = make_rng(0);
  plain.relabel(std::vector<Transition>{tr}, rng, out);
  CHECK(out.empty());
}

TEST_CASE("relabel emits n_goals records per transition") {
  const GridSpec spec = GridSpec::make(5, 2);
  const Demonstration demo = make_demo(spec, DemoQuality::Optimal);
  const DShapeAgent agent(demo, DShapeParams{});
  Rng rng = make_rng(8);
  std::vector<Transition> ep = random_episode(spec, agent, rng);
  REQUIRE(ep.size() == 2);
  const auto out = relabel(ep, 3, rng, PotentialFn{}, 1.0);
  CHECK(out.size() == 6);
  std::set<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Transition& orig = ep[i / 3];
    const Transition& r = out[i];
    CHECK(r.s == orig.s);
    CHECK(r.s_next == orig.s_next);
    CHECK(r.action == orig.action);
    CHECK(r.r_task == orig.r_task);
    CHECK(r.terminal == orig.terminal);
    bool from_episode = false;
    for (std::size_t k = 0; k < ep.size(); ++k)
      if (ep[k].s == r.goal && ep[k].s_next == r.goal_next) {
        from_episode = true;
        pairs.insert({static_cast<int>(i / 3), static_cast<int>(k)});
      }
    CHECK(from_episode);
    CHECK(r.key == make_key(r.s.pos(), r.goal.pos(), true));
    CHECK(r.next_key == make_key(r.s_next.pos(), r.goal_next.pos(), true));
  }
  CHECK(relabel(ep, 0, rng, PotentialFn{}, 1.0).empty());
  CHECK_THROWS_AS(relabel(ep, -1, rng, PotentialFn{}, 1.0), std::invalid_argument);
}

TEST_CASE("the final pair is not sampled when earlier pairs exist") {
  const GridSpec spec = GridSpec::make(5, 4);
  const Demonstration demo = make_demo(spec, DemoQuality::Optimal);
  const DShapeAgent agent(demo, DShapeParams{});
  Rng rng = make_rng(6);
  std::vector<Transition> ep;
  GridState s = reset(spec);
  for (Action a : {Action::Right, Action::Right, Action::Up, Action::Up}) {
    ep.push_back(rollout_step(agent, spec, s, a));
    s = ep.back().s_next;
  }
  std::set<int> used;
  for (const Transition& r : relabel(ep, 50, rng, PotentialFn{}, 1.0))
    for (std::size_t k = 0; k < ep.size(); ++k)
      if (ep[k].s == r.goal) used.insert(static_cast<int>(k));
  CHECK(used == std::set<int>{0, 1, 2});
}

TEST_CASE("a single-step episode relabels with its own pair") {
  const GridSpec spec = GridSpec::make(5);
  const Demonstration demo = make_demo(spec, DemoQuality::Optimal);
  const DShapeAgent agent(demo, DShapeParams{});
  const Transition tr = rollout_step(agent, spec, reset(spec), Action::Up);
  Rng rng = make_rng(1);
  const auto out = relabel(std::vector<Transition>{tr}, 3, rng, PotentialFn{}, 1.0);
  REQUIRE(out.size() == 3);
  for (const Transition& r : out) {
    CHECK(r.goal == tr.s);
    CHECK(r.goal_next == tr.s_next);
    CHECK(r.reward == tr.r_task);
  }
}

TEST_CASE("stored rewards minus task rewards equal the shaping term of the stored goals") {
  const GridSpec spec = GridSpec::make(6, 40);
  const Demonstration demo = make_demo(spec, DemoQuality::Medium);
  const DShapeAgent agent(demo, DShapeParams{});
  Rng rng = make_rng(12);
  for (int e = 0; e < 50; ++e) {
    const auto ep = random_episode(spec, agent, rng);
    for (const Transition& tr : ep) CHECK(tr.reward - tr.r_task == recomputed_shaping(tr));
    std::vector<Transition> out;
    agent.relabel(ep, rng, out);
    CHECK(out.size() == 3 * ep.size());
    for (const Transition& r : out) CHECK(r.reward - r.r_task == recomputed_shaping(r));
  }
}

TEST_CASE("shaping telescopes over a completed episode") {
  const GridSpec spec = GridSpec::make(5, 500);
  for (DemoQuality q : {DemoQuality::Optimal, DemoQuality::Worst}) {
    const Demonstration demo = make_demo(spec, q);
    const DShapeAgent agent(demo, DShapeParams{});
    Rng rng = make_rng(31);
    for (int e = 0; e < 100; ++e) {
      const auto ep = random_episode(spec, agent, rng);
      if (!ep.back().terminal) continue;
      double sum = 0;
      for (const Transition& tr : ep) sum += tr.reward - tr.r_task;
      CHECK(sum == doctest::Approx(manhattan(ep.front().s.pos(), ep.front().goal.pos())).epsilon(1e-12));
    }
  }
}

TEST_CASE("inference acts on the time-aligned demo goal") {
  const GridSpec spec = GridSpec::make(5);
  const Demonstration demo = make_demo(spec, DemoQuality::Optimal);
  QTable q(5, true);
  q.at(QKey{0, 0, 1, 0}, Action::Right) = 1.0;
  q.at(QKey{0, 0, 4, 4}, Action::Up) = 1.0;
  Rng rng = make_rng(0);
  CHECK(inference_action(q, {0, 0, 0}, demo, rng) == Action::Right);
  CHECK(inference_action(q, {0, 0, 30}, demo, rng) == Action::Up);
}

TEST_CASE("trained D-Shape on 5x5 picks optimal actions and reaches the goal optimally") {
  const GridSpec spec = GridSpec::make(5);
  const Demonstration demo = make_demo(spec, DemoQuality::Optimal);
  const oracle::ExactSolution exact = oracle::value_iteration(spec);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Learner learner(spec, LearnerParams{}, std::make_shared<DShapeAgent>(demo, DShapeParams{}), seed);
    for (int i = 0; i < 60000; ++i) learner.train_step();
    Rng rng = make_rng(seed, 99);
    const Action a = inference_action(learner.q(), reset(spec), demo, rng);
    CHECK((exact.optimal_actions(reset(spec)) >> index(a) & 1) == 1);
    CHECK(learner.greedy_episode(rng) == -7.0);
  }
}

TEST_CASE("untrained augmented table acts uniformly") {
  const QTable q(5, true);
  const Demonstration demo = make_demo(GridSpec::make(5), DemoQuality::Optimal);
  Rng rng = make_rng(4);
  std::array<int, 4> counts{};
  for (int i = 0; i < 4000; ++i) ++counts[static_cast<std::size_t>(index(inference_action(q, {2, 2, 3}, demo, rng)))];
  for (int c : counts) CHECK(c > 850);
}
