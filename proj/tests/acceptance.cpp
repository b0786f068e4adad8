// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion holds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "dshape/agent.hpp"
#include "dshape/baselines.hpp"
#include "dshape/experiment.hpp"
#include "dshape/oracle.hpp"
#include "dshape/output.hpp"
#include "dshape/stats.hpp"

using namespace dshape;

namespace {

constexpr double kOracleSeconds = 1.0;
constexpr double kCertificateSeconds = 10.0;
constexpr double kTelescopeTolerance = 1e-9;
constexpr int kTelescopeEpisodes = 1000;
constexpr int kRelabelRecords = 10000;
constexpr double kConvergenceBand = 1.0;
constexpr int kConvergedRunsRequired = 28;
constexpr double kSignificance = 0.05;
constexpr double kDivergenceMargin = 10.0;
constexpr double kEdgeShareRequired = 0.80;
constexpr int kSide = 10;
constexpr int kRuns = 30;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Outcome {
  bool passed;
  std::string detail;
};

ExperimentConfig base_config(Method method, DemoQuality q) {
  ExperimentConfig cfg;
  cfg.grid_sides = {kSide};
  cfg.method = method;
  cfg.demo_quality = q;
  cfg.n_runs = kRuns;
  return cfg;
}

// Experiments shared between criteria are run once.
const ExperimentResult& experiment(const ExperimentConfig& cfg) {
  static std::map<std::string, ExperimentResult> cache;
  std::ostringstream key;
  write_config(key, cfg);
  auto it = cache.find(key.str());
  if (it == cache.end()) it = cache.emplace(key.str(), run_experiment(cfg, kSide, jobs())).first;
  return it->second;
}

const ExperimentResult& dshape_run(DemoQuality q) { return experiment(base_config(Method::DShape, q)); }

double brute_force(const GridSpec& spec, const GridState& s) {
  if (s.pos() == spec.task_goal || s.t >= spec.horizon) return 0.0;
  double best = -1e300;
  for (Action a : kAllActions) {
    const StepOutcome out = step(spec, s, a);
    best = std::max(best, out.reward + brute_force(spec, out.next_state));
  }
  return best;
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

const std::vector<DemoQuality> kTiers{DemoQuality::Optimal, DemoQuality::Good, DemoQuality::Medium,
                                      DemoQuality::Worst};

Outcome oracle_correctness() {
  const GridSpec small = GridSpec::make(3, 10);
  const auto t0 = Clock::now();
  const oracle::ExactSolution s3 = oracle::value_iteration(small);
  const double v5 = oracle::value_iteration(GridSpec::make(5, 20)).value({0, 0, 0});
  const double v10 = oracle::value_iteration(GridSpec::make(10)).value({0, 0, 0});
  const double elapsed = seconds_since(t0);

  std::size_t mismatches = 0;
  for (int t = 0; t < small.horizon; ++t)
    for (int i = 0; i < small.num_cells(); ++i) {
      const Cell c = small.cell_at(i);
      if (c == small.task_goal) continue;
      const GridState s{c.x, c.y, t};
      double best = -1e300;
      oracle::ActionSet set = 0;
      for (Action a : kAllActions) {
        const StepOutcome out = step(small, s, a);
        const double q = out.reward + brute_force(small, out.next_state);
        mismatches += s3.q_value(s, a) != q;
        if (q > best) best = q, set = 0;
        if (q == best) set |= static_cast<oracle::ActionSet>(1 << index(a));
      }
      mismatches += s3.value(s) != best;
      mismatches += s3.optimal_actions(s) != set;
    }
  const bool ok = mismatches == 0 && v5 == -7.0 && v10 == -17.0 && elapsed < kOracleSeconds;
  return {ok, fmt::format("3x3 enumeration mismatches {}, V5={} V10={}, {:.3f} s", mismatches, v5, v10, elapsed)};
}

Outcome theorem1() {
  const GridSpec spec = GridSpec::make(5, 20);
  const auto t0 = Clock::now();
  bool all = true;
  std::size_t states = 0;
  for (DemoQuality q : kTiers) {
    const oracle::Certificate c = oracle::check_theorem1(spec, make_demo(spec, q));
    all = all && c.passed;
    states += c.states_checked;
  }
  const oracle::Certificate mutant = oracle::check_theorem1(
      spec, make_demo(spec, DemoQuality::Worst),
      [](const GridState&, Cell g, Action, const StepOutcome& out, Cell) {
        return out.reward - 3.0 * manhattan(out.next_state.pos(), g);
      },
      "goal-dependent reward");
  const double elapsed = seconds_since(t0);
  const bool mutant_caught = !mutant.passed && !mutant.counterexamples.empty();
  return {all && mutant_caught && elapsed < kCertificateSeconds,
          fmt::format("4 tiers {} over {} states, mutation {} ({} violations), {:.2f} s", all ? "pass" : "FAIL", states,
                      mutant_caught ? "caught" : "NOT caught", mutant.violations, elapsed)};
}

Outcome pbrs_invariance() {
  const GridSpec spec = GridSpec::make(5, 20);
  const auto t0 = Clock::now();
  bool dshape_ok = true, sbs_ok = true;
  for (DemoQuality q : kTiers) {
    const Demonstration demo = make_demo(spec, q);
    dshape_ok = dshape_ok && oracle::check_policy_invariance(spec, demo, PotentialFn{}).passed;
    sbs_ok = sbs_ok && oracle::check_sbs_invariance(spec, demo, SBSParams{}).passed;
  }
  const oracle::Certificate man = oracle::check_manhattan_invariance(spec, make_demo(spec, DemoQuality::Worst), 25.0);
  const double elapsed = seconds_since(t0);
  const bool ok = dshape_ok && sbs_ok && man.on_path_violations >= 1 && elapsed < kCertificateSeconds;
  return {ok, fmt::format("goal potential {}, SBS {}, Manhattan c=25 on-path argmax changes {}, {:.2f} s",
                          dshape_ok ? "pass" : "FAIL", sbs_ok ? "pass" : "FAIL", man.on_path_violations, elapsed)};
}

Outcome telescoping() {
  const GridSpec spec = GridSpec::make(5, 500);
  Rng rng = make_rng(2024);
  int episodes = 0;
  double worst = 0.0;
  while (episodes < kTelescopeEpisodes) {
    const Demonstration demo = make_demo(spec, kTiers[static_cast<std::size_t>(episodes) % kTiers.size()]);
    const DShapeAgent agent(demo, DShapeParams{});
    const auto ep = random_episode(spec, agent, rng);
    if (!ep.back().terminal) continue;
    double sum = 0.0;
    for (const Transition& tr : ep) sum += tr.reward - tr.r_task;
    worst = std::max(worst, std::abs(sum - manhattan(ep.front().s.pos(), ep.front().goal.pos())));
    ++episodes;
  }
  return {worst <= kTelescopeTolerance,
          fmt::format("{} completed episodes, max |sum F - d(s0,g0)| = {:.3g}", episodes, worst)};
}

Outcome recomputability() {
  const GridSpec spec = GridSpec::make(8, 60);
  Rng rng = make_rng(77);
  std::size_t records = 0, mismatches = 0;
  while (records < kRelabelRecords) {
    const Demonstration demo = make_demo(spec, kTiers[records % kTiers.size()]);
    const DShapeAgent agent(demo, DShapeParams{});
    std::vector<Transition> out;
    agent.relabel(random_episode(spec, agent, rng), rng, out);
    for (const Transition& r : out) {
      if (records == static_cast<std::size_t>(kRelabelRecords)) break;
      const double f = shaping_term(PotentialFn{}, {r.s, r.goal}, {r.s_next, r.goal_next}, 1.0, r.terminal);
      mismatches += (r.reward - r.r_task) != f;
      ++records;
    }
  }
  return {mismatches == 0, fmt::format("{} relabelled records, {} mismatches", records, mismatches)};
}

int converged_runs(const ExperimentResult& r, double optimal) {
  int n = 0;
  for (double v : final_returns(r.curve)) n += std::abs(v - optimal) <= kConvergenceBand;
  return n;
}

Outcome convergence() {
  const double optimal = *optimal_return(GridSpec::make(kSide));
  bool ok = true;
  std::string detail;
  for (DemoQuality q : kTiers) {
    const int n = converged_runs(dshape_run(q), optimal);
    ok = ok && n >= kConvergedRunsRequired;
    detail += fmt::format("{} {}/{}  ", to_string(q), n, kRuns);
  }
  return {ok, detail + fmt::format("(need >= {} within {} of {})", kConvergedRunsRequired, kConvergenceBand, optimal)};
}

Outcome sample_efficiency() {
  const auto d = per_run_auc(dshape_run(DemoQuality::Optimal).curve);
  const auto m = per_run_auc(experiment(base_config(Method::Manhattan, DemoQuality::Optimal)).curve);
  const auto q = per_run_auc(experiment(base_config(Method::QLearning, DemoQuality::Optimal)).curve);
  const double pdm = mann_whitney(d, m).p_value, pmq = mann_whitney(m, q).p_value;
  const bool ok = mean(d) > mean(m) && mean(m) > mean(q) && pdm < kSignificance && pmq < kSignificance;
  return {ok, fmt::format("AUC dshape {:.1f} > manhattan_c1 {:.1f} (p={:.3g}) > qlearning {:.1f} (p={:.3g})", mean(d),
                          mean(m), pdm, mean(q), pmq)};
}

Outcome divergence() {
  const double optimal = *optimal_return(GridSpec::make(kSide));
  ExperimentConfig cfg = base_config(Method::Manhattan, DemoQuality::Worst);
  cfg.c = 25.0;
  const double final_mean = experiment(cfg).curve.points.back().mean;
  const int dshape_converged = converged_runs(dshape_run(DemoQuality::Worst), optimal);
  const bool ok = final_mean <= optimal - kDivergenceMargin && dshape_converged >= kConvergedRunsRequired;
  return {ok, fmt::format("manhattan c=25 worst final mean {:.2f} (need <= {}), dshape worst converged {}/{}",
                          final_mean, optimal - kDivergenceMargin, dshape_converged, kRuns)};
}

Outcome ablations() {
  const auto ablation = [](AblationFlags flags) {
    ExperimentConfig cfg = base_config(Method::DShape, DemoQuality::Optimal);
    cfg.flags = flags;
    return cfg;
  };
  const ExperimentResult& none = experiment(ablation({false, false, false}));
  const ExperimentResult& aug = experiment(ablation({false, false, true}));
  const ExperimentResult& shaped = experiment(ablation({false, true, true}));
  const ExperimentResult& no_aug = experiment(ablation({false, true, false}));
  const ExperimentResult& q = experiment(base_config(Method::QLearning, DemoQuality::Optimal));
  const ExperimentResult& ridm = experiment(base_config(Method::Ridm, DemoQuality::Optimal));

  const auto same_curves = [](const ExperimentResult& a, const ExperimentResult& b) {
    if (a.curve.points.size() != b.curve.points.size() || a.visitation.counts != b.visitation.counts) return false;
    for (std::size_t i = 0; i < a.curve.points.size(); ++i)
      if (a.curve.points[i].returns != b.curve.points[i].returns) return false;
    return true;
  };

  // Q tables compared seed by seed after full training.
  const GridSpec spec = GridSpec::make(kSide);
  const Demonstration demo = make_demo(spec, DemoQuality::Optimal);
  const LearnerParams params;
  int identical_tables = 0;
  for (int run = 0; run < kRuns; ++run) {
    const std::uint64_t seed = run_seed(0, run);
    DShapeParams p0, p1;
    p0.flags = {false, false, false};
    p1.flags = {false, false, true};
    Learner a(spec, params, std::make_shared<DShapeAgent>(demo, p0), seed);
    Learner b(spec, params, std::make_shared<QLearningAgent>(spec), seed);
    Learner c(spec, params, std::make_shared<DShapeAgent>(demo, p1), seed);
    Learner d(spec, params, make_ridm_agent(demo), seed);
    for (long s = 0; s < params.total_steps; ++s) {
      a.train_step();
      b.train_step();
      c.train_step();
      d.train_step();
    }
    identical_tables += a.q() == b.q() && c.q() == d.q();
  }

  const double full = compute_auc(dshape_run(DemoQuality::Optimal).curve);
  const double best_ablation =
      std::max({compute_auc(none.curve), compute_auc(aug.curve), compute_auc(shaped.curve), compute_auc(no_aug.curve)});
  const bool ok = same_curves(none, q) && same_curves(aug, ridm) && identical_tables == kRuns && full > best_ablation;
  return {ok, fmt::format("(F,F,F)==qlearning {}, (F,F,T)==ridm {}, identical tables {}/{}, AUC full {:.1f} vs "
                          "-GR {:.1f}, -GR-shaping {:.1f}, -GR-augment {:.1f}, -GR-shaping-augment {:.1f}",
                          same_curves(none, q) ? "yes" : "NO", same_curves(aug, ridm) ? "yes" : "NO", identical_tables,
                          kRuns, full, compute_auc(shaped.curve), compute_auc(aug.curve), compute_auc(no_aug.curve),
                          compute_auc(none.curve))};
}

Outcome visitation() {
  const VisitationMap& v = dshape_run(DemoQuality::Optimal).visitation;
  long edge = 0;
  for (int i = 0; i < v.side; ++i) {
    edge += v.at({i, 0});
    if (i > 0) edge += v.at({v.side - 1, i});
  }
  const double share = static_cast<double>(edge) / static_cast<double>(v.total());
  return {share >= kEdgeShareRequired,
          fmt::format("{:.3f} of {} greedy visits on the bottom and right edges (need >= {:.2f})", share, v.total(),
                      kEdgeShareRequired)};
}

std::string emitted_bytes(const ExperimentConfig& cfg, int workers, const std::filesystem::path& dir) {
  std::filesystem::remove_all(dir);
  std::string bytes;
  for (const OutputFiles& f : emit_outputs(run_experiments(cfg, workers), dir))
    for (const auto& p : {f.curve_csv, f.visitation_csv}) {
      std::ifstream in(p, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      bytes += p.filename().string() + '\n' + ss.str();
    }
  std::filesystem::remove_all(dir);
  return bytes;
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "dshape_acceptance_determinism";
  bool ok = true;
  int configs = 0;
  for (Method m : {Method::DShape, Method::Manhattan, Method::Sbs}) {
    ExperimentConfig cfg = base_config(m, DemoQuality::Medium);
    cfg.grid_sides = {5, kSide};
    cfg.n_runs = 6;
    cfg.learner.total_steps = 20000;
    cfg.base_seed = 99;
    const std::string serial = emitted_bytes(cfg, 1, dir);
    ok = ok && !serial.empty() && serial == emitted_bytes(cfg, 1, dir) && serial == emitted_bytes(cfg, 4, dir) &&
         serial == emitted_bytes(cfg, 6, dir);
    ++configs;
  }
  return {ok, fmt::format("{} configs x 2 sides, reruns with 1, 4 and 6 workers {}", configs,
                          ok ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle correctness", oracle_correctness},
      {"Theorem 1 certificate", theorem1},
      {"PBRS invariance certificate", pbrs_invariance},
      {"telescoping", telescoping},
      {"relabel recomputability", recomputability},
      {"convergence robustness", convergence},
      {"sample-efficiency ordering", sample_efficiency},
      {"divergence reproduction", divergence},
      {"ablation identities", ablations},
      {"visitation shape", visitation},
      {"determinism", determinism},
  };
  int passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    passed += o.passed;
    std::cout << fmt::format("criterion {:>2} {} {}: {} [{:.1f} s]", i + 1, o.passed ? "PASS" : "FAIL",
                             criteria[i].first, o.detail, seconds_since(t0))
              << std::endl;
  }
  std::cout << fmt::format("{}/{} criteria passed\n", passed, criteria.size());
  return passed == static_cast<int>(criteria.size()) ? EXIT_SUCCESS : EXIT_FAILURE;
}
