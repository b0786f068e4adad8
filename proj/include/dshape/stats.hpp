#pragma once

#include <span>

namespace dshape {

double mean(std::span<const double> xs);
/// Population standard deviation (divides by n).
double population_std(std::span<const double> xs);

struct MannWhitneyResult {
  double u = 0.0;        // U statistic of the first sample
  double z = 0.0;        // normal approximation, continuity corrected
  double p_value = 1.0;  // two-sided
};

/// Two-sided Mann-Whitney U test with average ranks for ties and the
/// tie-corrected normal approximation.
MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b);

}  // namespace dshape
