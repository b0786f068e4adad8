#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dshape/agent.hpp"
#include "dshape/demo.hpp"
#include "dshape/q_core.hpp"

namespace dshape {

enum class Method { QLearning, DShape, Sbs, Ridm, Manhattan };

std::string_view to_string(Method m);
/// Accepts qlearning, dshape, dshape_ablation, sbs, ridm and manhattan.
/// dshape_ablation maps to DShape; the flags carry the ablation.
Method parse_method(std::string_view name);

/// One experiment: a method on one or more grid sizes, n_runs seeds each.
///
/// Stored as a flat "key = value" text file; keys match the field names
/// (learner fields are top-level keys: alpha, epsilon, gamma, ...). Lines
/// starting with '#' are comments.
struct ExperimentConfig {
  std::vector<int> grid_sides{10};
  Method method = Method::DShape;
  AblationFlags flags;  // only read for the dshape method
  DemoQuality demo_quality = DemoQuality::Optimal;
  LearnerParams learner;
  int horizon = 500;
  double sigma = 10.0;  // SBS similarity scale
  double c = 1.0;       // SBS shaping scale or Manhattan coefficient
  int n_goals = 3;
  int n_runs = 30;
  long eval_interval = 2500;
  int eval_episodes = 10;
  int visitation_rollouts = 100;
  // Freeze training once this many consecutive evaluations agree; 0 = never.
  int early_stop_patience = 0;
  std::uint64_t base_seed = 0;

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;

  /// Short name used for file names and plot legends, e.g. "manhattan_c25"
  /// or "dshape-GR-shaping".
  std::string label() const;
};

ExperimentConfig parse_config(std::istream& is);
/// Throws std::runtime_error when the file cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);
/// Writes every key; parse_config(write_config(c)) reproduces c.
void write_config(std::ostream& os, const ExperimentConfig& config);

}  // namespace dshape
