#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dshape/config.hpp"
#include "dshape/demo.hpp"
#include "dshape/grid_env.hpp"
#include "dshape/q_core.hpp"

namespace dshape {

struct CurvePoint {
  long env_step = 0;
  std::vector<double> returns;  // one mean evaluation return per run
  double mean = 0.0;
  double std = 0.0;  // population std across runs
};

struct LearningCurve {
  std::string label;
  int side = 0;
  std::optional<double> optimal_return;
  std::string fingerprint;  // the config that produced the curve
  std::vector<CurvePoint> points;
};

/// Visit counts per cell, row-major with index y * side + x.
struct VisitationMap {
  int side = 0;
  int rollouts = 0;
  std::vector<long> counts;

  long total() const;
  long at(Cell c) const { return counts[static_cast<std::size_t>(c.y * side + c.x)]; }
};

/// Everything one seed produces.
struct RunResult {
  std::vector<double> eval_returns;  // mean greedy return at each evaluation point
  long trained_steps = 0;            // less than total_steps when training stopped early
  VisitationMap visitation;
};

struct ExperimentResult {
  ExperimentConfig config;
  int side = 0;
  LearningCurve curve;
  VisitationMap visitation;  // summed over runs
};

GridSpec make_spec(const ExperimentConfig& config, int side);
std::shared_ptr<const Agent> make_agent(const ExperimentConfig& config, const GridSpec& spec,
                                        const Demonstration& demo);

/// Independent per-run seed derived from (base_seed, run).
std::uint64_t run_seed(std::uint64_t base_seed, int run);

/// Environment steps at which the policy is evaluated: 0, interval, ..., total.
std::vector<long> eval_schedule(const ExperimentConfig& config);

/// Mean task return of `episodes` greedy rollouts; never touches learner state.
double evaluate(const Learner& learner, int episodes, Rng& rng);

/// True when the last `patience` evaluation returns are all equal and above
/// -horizon (a policy that never reaches the goal is not converged).
bool converged(const std::vector<double>& returns, int patience, int horizon);

/// Trains and evaluates one seed. With early_stop_patience > 0, training
/// stops once converged() holds; the frozen policy is still evaluated at
/// every remaining point of the schedule.
RunResult run_single(const ExperimentConfig& config, int side, int run);

/// All seeds on one grid side. Runs are spread over `jobs` worker threads;
/// results are reduced in run order, so output does not depend on jobs.
ExperimentResult run_experiment(const ExperimentConfig& config, int side, int jobs = 1);
/// One result per entry of config.grid_sides.
std::vector<ExperimentResult> run_experiments(const ExperimentConfig& config, int jobs = 1);

/// Sum of the mean returns over all evaluation points.
double compute_auc(const LearningCurve& curve);
/// AUC of a single run (its own returns summed over evaluation points).
std::vector<double> per_run_auc(const LearningCurve& curve);
/// Each run's return at the last evaluation point.
std::vector<double> final_returns(const LearningCurve& curve);

}  // namespace dshape
