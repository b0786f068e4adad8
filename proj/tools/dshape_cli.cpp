// Command-line front end: experiments, sweeps, ablations, exact oracle
// certificates, plotting and demonstration printing.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dshape/config.hpp"
#include "dshape/demo.hpp"
#include "dshape/experiment.hpp"
#include "dshape/oracle.hpp"
#include "dshape/output.hpp"

namespace {

using namespace dshape;

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::string out = "results";
  int jobs = 1;
  std::optional<long> steps;
  std::optional<long> eval_interval;
  std::optional<int> runs;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "Base seed");
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--jobs", f.jobs, "Parallel runs")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--steps", f.steps, "Training steps per run")->check(CLI::NonNegativeNumber);
  cmd->add_option("--eval-interval", f.eval_interval, "Steps between evaluations")->check(CLI::PositiveNumber);
  cmd->add_option("--runs", f.runs, "Independent runs (seeds)")->check(CLI::PositiveNumber);
}

void apply_common(ExperimentConfig& cfg, const CommonFlags& f) {
  if (f.seed) cfg.base_seed = *f.seed;
  if (f.steps) cfg.learner.total_steps = *f.steps;
  if (f.eval_interval) cfg.eval_interval = *f.eval_interval;
  if (f.runs) cfg.n_runs = *f.runs;
  cfg.validate();
}

void print_summary(const ExperimentResult& r) {
  const auto finals = final_returns(r.curve);
  std::cout << fmt::format("{:<28} {:>3}x{:<3} final mean {:>9.3f}  std {:>8.3f}  AUC {:>12.3f}", r.curve.label, r.side,
                           r.side, r.curve.points.back().mean, r.curve.points.back().std, compute_auc(r.curve));
  if (r.curve.optimal_return) std::cout << fmt::format("  (optimal {:.0f})", *r.curve.optimal_return);
  std::cout << '\n';
}

void run_and_emit(const std::vector<ExperimentConfig>& configs, const CommonFlags& f, const std::string& plot_name,
                  const std::string& plot_title) {
  std::vector<ExperimentResult> all;
  for (const ExperimentConfig& cfg : configs) {
    for (ExperimentResult& r : run_experiments(cfg, f.jobs)) {
      print_summary(r);
      all.push_back(std::move(r));
    }
  }
  for (const OutputFiles& files : emit_outputs(all, f.out)) std::cout << "wrote " << files.curve_csv.string() << '\n';
  if (!plot_name.empty() && all.size() > 1)
    std::cout << "wrote " << emit_comparison_plot(all, f.out, plot_name, plot_title).string() << '\n';
}

int oracle_check(int side, int horizon, DemoQuality quality, double manhattan_c) {
  const GridSpec spec = GridSpec::make(side, horizon > 0 ? horizon : 4 * side);
  const Demonstration demo = make_demo(spec, quality);

  const oracle::Certificate theorem = oracle::check_theorem1(spec, demo);
  const oracle::Certificate invariance = oracle::check_policy_invariance(spec, demo, PotentialFn{});
  const oracle::Certificate sbs = oracle::check_sbs_invariance(spec, demo, SBSParams{});
  const oracle::Certificate manhattan = oracle::check_manhattan_invariance(spec, demo, manhattan_c);

  std::cout << fmt::format("grid {}x{}, horizon {}, {} demonstration\n", side, side, spec.horizon, to_string(quality));
  std::cout << theorem.report() << invariance.report() << sbs.report() << manhattan.report();
  if (!manhattan.passed)
    std::cout << "note: the Manhattan reward is not potential-based; a FAIL above is the expected outcome\n";
  return theorem.passed && invariance.passed && sbs.passed ? EXIT_SUCCESS : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Demonstration-goal reward shaping on gridworlds"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file (key = value)")->required();
  add_common(run, run_flags);

  CommonFlags sweep_flags;
  int sweep_side = 10;
  std::string sweep_demo = "worst";
  std::string sweep_method = "manhattan";
  std::vector<double> sweep_c{1, 20, 25};
  bool sweep_reference = true;
  auto* sweep = app.add_subcommand("sweep", "Sweep the reward coefficient c of a baseline");
  sweep->add_option("--side", sweep_side, "Grid side")->capture_default_str();
  sweep->add_option("--demo", sweep_demo, "Demo quality")->capture_default_str();
  sweep->add_option("--method", sweep_method, "manhattan or sbs")->capture_default_str();
  sweep->add_option("--c", sweep_c, "Coefficient values")->capture_default_str();
  sweep->add_flag("!--no-reference", sweep_reference, "Skip the D-Shape reference curve");
  add_common(sweep, sweep_flags);

  CommonFlags ablate_flags;
  int ablate_side = 10;
  std::string ablate_demo = "optimal";
  auto* ablate = app.add_subcommand("ablate", "Full D-Shape against its three ablations");
  ablate->add_option("--side", ablate_side, "Grid side")->capture_default_str();
  ablate->add_option("--demo", ablate_demo, "Demo quality")->capture_default_str();
  add_common(ablate, ablate_flags);

  int oracle_side = 5;
  int oracle_horizon = 0;
  std::string oracle_demo = "optimal";
  double oracle_c = 25;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Exact certificates for optimal-action invariance");
  oracle_cmd->add_option("--side", oracle_side, "Grid side")->capture_default_str();
  oracle_cmd->add_option("--horizon", oracle_horizon, "Horizon (default 4 * side)");
  oracle_cmd->add_option("--demo", oracle_demo, "Demo quality")->capture_default_str();
  oracle_cmd->add_option("--c", oracle_c, "Manhattan coefficient")->capture_default_str();

  std::vector<std::string> plot_inputs;
  std::string plot_out = "plot.svg";
  std::string plot_title = "Learning curves";
  std::optional<double> plot_optimal;
  auto* plot = app.add_subcommand("plot", "Plot curve CSV files into one SVG");
  plot->add_option("csv", plot_inputs, "Curve CSV files")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "Output SVG")->capture_default_str();
  plot->add_option("--title", plot_title, "Plot title");
  plot->add_option("--optimal", plot_optimal, "Optimal return line");

  int demo_side = 0;
  std::string demo_tier;
  auto* demo_cmd = app.add_subcommand("demo", "Print a demonstration as a t x y table");
  demo_cmd->add_option("side", demo_side, "Grid side")->required();
  demo_cmd->add_option("tier", demo_tier, "optimal, good, medium or worst")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? EXIT_SUCCESS : kExitUsage;
  }

  try {
    if (*run) {
      ExperimentConfig cfg = load_config(config_path);
      apply_common(cfg, run_flags);
      run_and_emit({cfg}, run_flags, "", "");
    } else if (*sweep) {
      std::vector<ExperimentConfig> configs;
      for (double c : sweep_c) {
        ExperimentConfig cfg;
        cfg.grid_sides = {sweep_side};
        cfg.method = parse_method(sweep_method);
        if (cfg.method != Method::Manhattan && cfg.method != Method::Sbs)
          throw std::invalid_argument("sweep supports --method manhattan or sbs");
        cfg.demo_quality = parse_demo_quality(sweep_demo);
        cfg.c = c;
        apply_common(cfg, sweep_flags);
        configs.push_back(cfg);
      }
      if (sweep_reference) {
        ExperimentConfig ref = configs.front();
        ref.method = Method::DShape;
        configs.push_back(ref);
      }
      run_and_emit(configs, sweep_flags, fmt::format("sweep_{}_{}_{}x{}", sweep_method, sweep_demo, sweep_side, sweep_side),
                   fmt::format("{} coefficient sweep, {} demo", sweep_method, sweep_demo));
    } else if (*ablate) {
      std::vector<ExperimentConfig> configs;
      for (AblationFlags flags : {AblationFlags{true, true, true}, AblationFlags{false, true, true},
                                  AblationFlags{false, false, true}, AblationFlags{false, true, false}}) {
        ExperimentConfig cfg;
        cfg.grid_sides = {ablate_side};
        cfg.method = Method::DShape;
        cfg.flags = flags;
        cfg.demo_quality = parse_demo_quality(ablate_demo);
        apply_common(cfg, ablate_flags);
        configs.push_back(cfg);
      }
      run_and_emit(configs, ablate_flags, fmt::format("ablation_{}_{}x{}", ablate_demo, ablate_side, ablate_side),
                   fmt::format("D-Shape ablations, {} demo", ablate_demo));
    } else if (*oracle_cmd) {
      return oracle_check(oracle_side, oracle_horizon, parse_demo_quality(oracle_demo), oracle_c);
    } else if (*plot) {
      std::vector<LearningCurve> curves;
      for (const std::string& path : plot_inputs) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
        curves.push_back(read_curve_csv(in, std::filesystem::path(path).stem().string()));
      }
      std::ofstream out(plot_out);
      if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", plot_out));
      write_svg_plot(out, curves, plot_title, plot_optimal);
      std::cout << "wrote " << plot_out << '\n';
    } else if (*demo_cmd) {
      const GridSpec spec = GridSpec::make(demo_side);
      write_demo(std::cout, make_demo(spec, parse_demo_quality(demo_tier)));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return EXIT_SUCCESS;
}
