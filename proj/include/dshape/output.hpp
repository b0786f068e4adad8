#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dshape/experiment.hpp"

namespace dshape {

/// env_step,mean_return,std_return,run_0,...,run_{n-1}
void write_curve_csv(std::ostream& os, const LearningCurve& curve);
/// Parses a curve CSV written by write_curve_csv. Throws std::runtime_error.
LearningCurve read_curve_csv(std::istream& is, std::string label);

/// Grid of counts, top row first (y = side-1), matching the on-screen layout.
void write_visitation_csv(std::ostream& os, const VisitationMap& map);

/// Mean curves with +-std bands and an optional dashed optimal-return line.
void write_svg_plot(std::ostream& os, const std::vector<LearningCurve>& curves, const std::string& title,
                    std::optional<double> optimal);

/// Files written for one result: curve CSV, visitation CSV, SVG plot.
struct OutputFiles {
  std::filesystem::path curve_csv;
  std::filesystem::path visitation_csv;
  std::filesystem::path plot_svg;
};

/// Writes <label>_<side>x<side>_{curve.csv,visitation.csv,curve.svg} into
/// out_dir, creating it if needed. Throws std::runtime_error naming the path
/// that could not be written.
std::vector<OutputFiles> emit_outputs(const std::vector<ExperimentResult>& results,
                                      const std::filesystem::path& out_dir);

/// One SVG comparing several results (same grid side), e.g. a sweep.
std::filesystem::path emit_comparison_plot(const std::vector<ExperimentResult>& results,
                                           const std::filesystem::path& out_dir, const std::string& name,
                                           const std::string& title);

}  // namespace dshape
