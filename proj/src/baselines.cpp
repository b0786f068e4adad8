#include "dshape/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace dshape {

void SBSParams::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument(fmt::format("SBS sigma must be positive, got {}", sigma));
  if (!std::isfinite(c)) throw std::invalid_argument("SBS c must be finite");
}

void ManhattanParams::validate() const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument(fmt::format("Manhattan c must be >= 0, got {}", c));
}

double sbs_potential(const SBSParams& params, const GridState& s, const Demonstration& demo, int side) {
  if (demo.states.empty()) throw std::invalid_argument("empty demonstration");
  const double scale = side > 1 ? 1.0 / static_cast<double>(side - 1) : 1.0;
  int best = manhattan(s.pos(), demo.states.front().pos());
  for (const GridState& d : demo.states) best = std::min(best, manhattan(s.pos(), d.pos()));
  // exp is monotone, so the closest demo state gives the maximal similarity.
  return std::exp(-(static_cast<double>(best) * scale) / (2.0 * params.sigma));
}

double sbs_reward(double r_task, double phi, double phi_next, double gamma, double c, bool terminal) {
  const double next = terminal ? 0.0 : phi_next;
  return r_task + c * (gamma * next - phi);
}

double manhattan_reward(double r_task, const GridState& s, const Demonstration& demo, double c) {
  return r_task - c * static_cast<double>(manhattan(s.pos(), demo_goal_at(demo, s.t).pos()));
}

SbsAgent::SbsAgent(const GridSpec& spec, Demonstration demo, SBSParams params, double gamma)
    : demo_(std::move(demo)), params_(params), gamma_(gamma), side_(spec.side) {
  params_.validate();
  if (demo_.states.empty()) throw std::invalid_argument("empty demonstration");
  potential_.resize(static_cast<std::size_t>(spec.num_cells()));
  for (int i = 0; i < spec.num_cells(); ++i) {
    const Cell c = spec.cell_at(i);
    potential_[static_cast<std::size_t>(i)] = sbs_potential(params_, {c.x, c.y, 0}, demo_, side_);
  }
}

double SbsAgent::reward(const Transition& tr) const {
  return sbs_reward(tr.r_task, potential(tr.s.pos()), potential(tr.s_next.pos()), gamma_, params_.c, tr.terminal);
}

ManhattanAgent::ManhattanAgent(Demonstration demo, ManhattanParams params) : demo_(std::move(demo)), params_(params) {
  params_.validate();
  if (demo_.states.empty()) throw std::invalid_argument("empty demonstration");
}

std::shared_ptr<DShapeAgent> make_ridm_agent(Demonstration demo, double gamma) {
  DShapeParams params;
  params.flags = {.relabel = false, .shaping = false, .augment = true};
  params.gamma = gamma;
  return std::make_shared<DShapeAgent>(std::move(demo), params);
}

}  // namespace dshape
