#include "dshape/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace dshape {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::QLearning: return "qlearning";
    case Method::DShape: return "dshape";
    case Method::Sbs: return "sbs";
    case Method::Ridm: return "ridm";
    case Method::Manhattan: return "manhattan";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (auto m : {Method::QLearning, Method::DShape, Method::Sbs, Method::Ridm, Method::Manhattan})
    if (name == to_string(m)) return m;
  if (name == "dshape_ablation") return Method::DShape;
  throw std::invalid_argument(fmt::format("unknown method '{}'", name));
}

void ExperimentConfig::validate() const {
  if (grid_sides.empty()) throw std::invalid_argument("grid_sides must list at least one side");
  for (int side : grid_sides)
    if (side < 2) throw std::invalid_argument(fmt::format("grid_sides: side {} is too small", side));
  learner.validate();
  if (method == Method::DShape) flags.validate();
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (method == Method::Manhattan && c < 0.0) throw std::invalid_argument("c must be >= 0 for manhattan");
  if (n_goals < 0) throw std::invalid_argument("n_goals must be >= 0");
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  if (eval_interval < 1) throw std::invalid_argument("eval_interval must be >= 1");
  if (learner.total_steps % eval_interval != 0)
    throw std::invalid_argument(
        fmt::format("eval_interval {} does not divide total_steps {}", eval_interval, learner.total_steps));
  if (eval_episodes < 1) throw std::invalid_argument("eval_episodes must be >= 1");
  if (visitation_rollouts < 0) throw std::invalid_argument("visitation_rollouts must be >= 0");
  if (early_stop_patience < 0) throw std::invalid_argument("early_stop_patience must be >= 0");
}

std::string ExperimentConfig::label() const {
  switch (method) {
    case Method::DShape: {
      if (flags == AblationFlags{}) return "dshape";
      std::string s = "dshape";
      if (!flags.relabel) s += "-GR";
      if (!flags.shaping) s += "-shaping";
      if (!flags.augment) s += "-augment";
      return s;
    }
    case Method::Sbs: return fmt::format("sbs_sigma{}_c{}", sigma, c);
    case Method::Manhattan: return fmt::format("manhattan_c{}", c);
    default: return std::string(to_string(method));
  }
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw std::invalid_argument(fmt::format("config key '{}': cannot parse '{}'", key, value));
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument(fmt::format("config key '{}': expected true/false, got '{}'", key, value));
}

}  // namespace

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  bool saw_ablation_method = false;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(fmt::format("config line {}: expected key = value", lineno));
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));

    if (key == "grid_sides") {
      cfg.grid_sides.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) cfg.grid_sides.push_back(parse_number<int>(key, trim(item)));
    } else if (key == "method") {
      cfg.method = parse_method(value);
      saw_ablation_method = value == "dshape_ablation";
    } else if (key == "demo_quality") {
      cfg.demo_quality = parse_demo_quality(value);
    } else if (key == "relabel") {
      cfg.flags.relabel = parse_bool(key, value);
    } else if (key == "shaping") {
      cfg.flags.shaping = parse_bool(key, value);
    } else if (key == "augment") {
      cfg.flags.augment = parse_bool(key, value);
    } else if (key == "alpha") {
      cfg.learner.alpha = parse_number<double>(key, value);
    } else if (key == "epsilon") {
      cfg.learner.epsilon = parse_number<double>(key, value);
    } else if (key == "gamma") {
      cfg.learner.gamma = parse_number<double>(key, value);
    } else if (key == "updates_per_step") {
      cfg.learner.updates_per_step = parse_number<int>(key, value);
    } else if (key == "buffer_capacity") {
      cfg.learner.buffer_capacity = parse_number<int>(key, value);
    } else if (key == "total_steps") {
      cfg.learner.total_steps = parse_number<long>(key, value);
    } else if (key == "horizon") {
      cfg.horizon = parse_number<int>(key, value);
    } else if (key == "sigma") {
      cfg.sigma = parse_number<double>(key, value);
    } else if (key == "c") {
      cfg.c = parse_number<double>(key, value);
    } else if (key == "n_goals") {
      cfg.n_goals = parse_number<int>(key, value);
    } else if (key == "n_runs") {
      cfg.n_runs = parse_number<int>(key, value);
    } else if (key == "eval_interval") {
      cfg.eval_interval = parse_number<long>(key, value);
    } else if (key == "eval_episodes") {
      cfg.eval_episodes = parse_number<int>(key, value);
    } else if (key == "visitation_rollouts") {
      cfg.visitation_rollouts = parse_number<int>(key, value);
    } else if (key == "early_stop_patience") {
      cfg.early_stop_patience = parse_number<int>(key, value);
    } else if (key == "base_seed") {
      cfg.base_seed = parse_number<std::uint64_t>(key, value);
    } else {
      throw std::invalid_argument(fmt::format("config line {}: unknown key '{}'", lineno, key));
    }
  }
  if (saw_ablation_method && cfg.flags == AblationFlags{})
    throw std::invalid_argument("method dshape_ablation needs at least one of relabel/shaping/augment set to false");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open config file '{}'", path.string()));
  return parse_config(in);
}

void write_config(std::ostream& os, const ExperimentConfig& cfg) {
  os << fmt::format("grid_sides = {}\n", fmt::join(cfg.grid_sides, ","));
  os << fmt::format("method = {}\n", to_string(cfg.method));
  os << fmt::format("relabel = {}\nshaping = {}\naugment = {}\n", cfg.flags.relabel, cfg.flags.shaping,
                    cfg.flags.augment);
  os << fmt::format("demo_quality = {}\n", to_string(cfg.demo_quality));
  os << fmt::format("alpha = {}\nepsilon = {}\ngamma = {}\n", cfg.learner.alpha, cfg.learner.epsilon,
                    cfg.learner.gamma);
  os << fmt::format("updates_per_step = {}\nbuffer_capacity = {}\ntotal_steps = {}\n", cfg.learner.updates_per_step,
                    cfg.learner.buffer_capacity, cfg.learner.total_steps);
  os << fmt::format("horizon = {}\nsigma = {}\nc = {}\nn_goals = {}\n", cfg.horizon, cfg.sigma, cfg.c, cfg.n_goals);
  os << fmt::format("n_runs = {}\neval_interval = {}\neval_episodes = {}\nvisitation_rollouts = {}\n", cfg.n_runs,
                    cfg.eval_interval, cfg.eval_episodes, cfg.visitation_rollouts);
  os << fmt::format("early_stop_patience = {}\nbase_seed = {}\n", cfg.early_stop_patience, cfg.base_seed);
}

}  // namespace dshape
