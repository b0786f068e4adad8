#include "dshape/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dshape/agent.hpp"
#include "dshape/baselines.hpp"
#include "dshape/stats.hpp"

namespace dshape {

long VisitationMap::total() const { return std::accumulate(counts.begin(), counts.end(), 0L); }

GridSpec make_spec(const ExperimentConfig& config, int side) {
  return GridSpec::make(side, config.horizon, config.learner.gamma);
}

std::shared_ptr<const Agent> make_agent(const ExperimentConfig& config, const GridSpec& spec,
                                        const Demonstration& demo) {
  const double gamma = config.learner.gamma;
  switch (config.method) {
    case Method::QLearning: return std::make_shared<QLearningAgent>(spec);
    case Method::DShape: {
      DShapeParams params;
      params.flags = config.flags;
      params.n_goals = config.n_goals;
      params.gamma = gamma;
      return std::make_shared<DShapeAgent>(demo, params);
    }
    case Method::Ridm: return make_ridm_agent(demo, gamma);
    case Method::Sbs: return std::make_shared<SbsAgent>(spec, demo, SBSParams{config.sigma, config.c}, gamma);
    case Method::Manhattan: return std::make_shared<ManhattanAgent>(demo, ManhattanParams{config.c});
  }
  throw std::invalid_argument("unknown method");
}

std::uint64_t run_seed(std::uint64_t base_seed, int run) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(run), 0x72756eu};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::vector<long> eval_schedule(const ExperimentConfig& config) {
  std::vector<long> steps;
  for (long s = 0; s <= config.learner.total_steps; s += config.eval_interval) steps.push_back(s);
  return steps;
}

double evaluate(const Learner& learner, int episodes, Rng& rng) {
  double sum = 0.0;
  for (int e = 0; e < episodes; ++e) sum += learner.greedy_episode(rng);
  return sum / episodes;
}

bool converged(const std::vector<double>& returns, int patience, int horizon) {
  if (patience < 1 || returns.size() < static_cast<std::size_t>(patience)) return false;
  const auto tail = returns.end() - patience;
  if (*tail <= -static_cast<double>(horizon)) return false;
  return std::all_of(tail, returns.end(), [&](double v) { return v == *tail; });
}

RunResult run_single(const ExperimentConfig& config, int side, int run) {
  const GridSpec spec = make_spec(config, side);
  const Demonstration demo = make_demo(spec, config.demo_quality);
  const std::uint64_t seed = run_seed(config.base_seed, run);
  Learner learner(spec, config.learner, make_agent(config, spec, demo), seed);

  RunResult result;
  const std::vector<long> schedule = eval_schedule(config);
  result.eval_returns.reserve(schedule.size());
  bool frozen = false;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    while (!frozen && learner.env_steps() < schedule[i]) learner.train_step();
    Rng eval_rng = make_rng(seed, 1 + i);
    result.eval_returns.push_back(evaluate(learner, config.eval_episodes, eval_rng));
    frozen = frozen || converged(result.eval_returns, config.early_stop_patience, spec.horizon);
  }
  result.trained_steps = learner.env_steps();

  result.visitation.side = side;
  result.visitation.rollouts = config.visitation_rollouts;
  result.visitation.counts.assign(static_cast<std::size_t>(spec.num_cells()), 0);
  Rng visit_rng = make_rng(seed, 0x7615u << 20);
  for (int r = 0; r < config.visitation_rollouts; ++r)
    learner.greedy_episode(visit_rng, [&](const GridState& s) { ++result.visitation.counts[spec.cell_index(s.pos())]; });
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int side, int jobs) {
  config.validate();
  const GridSpec spec = make_spec(config, side);
  (void)make_demo(spec, config.demo_quality);  // reject infeasible tiers before spawning workers

  std::vector<RunResult> runs(static_cast<std::size_t>(config.n_runs));
  std::vector<std::exception_ptr> errors(runs.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < config.n_runs; i = next++) {
      try {
        runs[static_cast<std::size_t>(i)] = run_single(config, side, i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min(jobs, config.n_runs));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentResult out;
  out.config = config;
  out.side = side;
  out.curve.label = config.label();
  out.curve.side = side;
  out.curve.optimal_return = optimal_return(spec);
  std::ostringstream fp;
  write_config(fp, config);
  out.curve.fingerprint = fp.str();

  const std::vector<long> schedule = eval_schedule(config);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    CurvePoint p;
    p.env_step = schedule[i];
    for (const RunResult& r : runs) p.returns.push_back(r.eval_returns[i]);
    p.mean = mean(p.returns);
    p.std = population_std(p.returns);
    out.curve.points.push_back(std::move(p));
  }

  out.visitation.side = side;
  out.visitation.rollouts = config.visitation_rollouts * config.n_runs;
  out.visitation.counts.assign(static_cast<std::size_t>(spec.num_cells()), 0);
  for (const RunResult& r : runs)
    for (std::size_t c = 0; c < r.visitation.counts.size(); ++c) out.visitation.counts[c] += r.visitation.counts[c];
  return out;
}

std::vector<ExperimentResult> run_experiments(const ExperimentConfig& config, int jobs) {
  std::vector<ExperimentResult> out;
  for (int side : config.grid_sides) out.push_back(run_experiment(config, side, jobs));
  return out;
}

double compute_auc(const LearningCurve& curve) {
  if (curve.points.empty()) throw std::invalid_argument("empty learning curve");
  double sum = 0.0;
  for (const CurvePoint& p : curve.points) sum += p.mean;
  return sum;
}

std::vector<double> per_run_auc(const LearningCurve& curve) {
  if (curve.points.empty()) throw std::invalid_argument("empty learning curve");
  std::vector<double> auc(curve.points.front().returns.size(), 0.0);
  for (const CurvePoint& p : curve.points)
    for (std::size_t r = 0; r < auc.size(); ++r) auc[r] += p.returns[r];
  return auc;
}

std::vector<double> final_returns(const LearningCurve& curve) {
  if (curve.points.empty()) throw std::invalid_argument("empty learning curve");
  return curve.points.back().returns;
}

}  // namespace dshape
