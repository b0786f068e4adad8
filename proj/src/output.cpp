#include "dshape/output.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "dshape/stats.hpp"

namespace dshape {

void write_curve_csv(std::ostream& os, const LearningCurve& curve) {
  const std::size_t runs = curve.points.empty() ? 0 : curve.points.front().returns.size();
  os << "env_step,mean_return,std_return";
  for (std::size_t r = 0; r < runs; ++r) os << ",run_" << r;
  os << '\n';
  for (const CurvePoint& p : curve.points) {
    os << fmt::format("{},{:.6f},{:.6f}", p.env_step, p.mean, p.std);
    for (double v : p.returns) os << fmt::format(",{:.6f}", v);
    os << '\n';
  }
}

LearningCurve read_curve_csv(std::istream& is, std::string label) {
  LearningCurve curve;
  curve.label = std::move(label);
  std::string line;
  if (!std::getline(is, line) || line.rfind("env_step,mean_return,std_return", 0) != 0)
    throw std::runtime_error("not a learning-curve CSV (bad header)");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> fields;
    while (std::getline(ss, cell, ',')) {
      try {
        fields.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(fmt::format("curve CSV line {}: bad number '{}'", lineno, cell));
      }
    }
    if (fields.size() < 3) throw std::runtime_error(fmt::format("curve CSV line {}: too few columns", lineno));
    CurvePoint p;
    p.env_step = static_cast<long>(fields[0]);
    p.mean = fields[1];
    p.std = fields[2];
    p.returns.assign(fields.begin() + 3, fields.end());
    curve.points.push_back(std::move(p));
  }
  return curve;
}

void write_visitation_csv(std::ostream& os, const VisitationMap& map) {
  os << "y\\x";
  for (int x = 0; x < map.side; ++x) os << ',' << x;
  os << '\n';
  for (int y = map.side - 1; y >= 0; --y) {
    os << y;
    for (int x = 0; x < map.side; ++x) os << ',' << map.at({x, y});
    os << '\n';
  }
}

void write_svg_plot(std::ostream& os, const std::vector<LearningCurve>& curves, const std::string& title,
                    std::optional<double> optimal) {
  constexpr double width = 720, height = 440, left = 70, right = 180, top = 40, bottom = 50;
  constexpr std::array<const char*, 8> palette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  double x_max = 1, y_min = 0, y_max = 0;
  bool first = true;
  for (const LearningCurve& c : curves)
    for (const CurvePoint& p : c.points) {
      x_max = std::max(x_max, static_cast<double>(p.env_step));
      const double lo = p.mean - p.std, hi = p.mean + p.std;
      y_min = first ? lo : std::min(y_min, lo);
      y_max = first ? hi : std::max(y_max, hi);
      first = false;
    }
  if (optimal) {
    y_min = std::min(y_min, *optimal);
    y_max = std::max(y_max, *optimal);
  }
  if (y_max - y_min < 1e-9) y_max = y_min + 1;
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto sx = [&](double x) { return left + plot_w * x / x_max; };
  auto sy = [&](double y) { return top + plot_h * (y_max - y) / (y_max - y_min); };

  os << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif">)",
                    width, height)
     << '\n';
  os << fmt::format(R"(<rect width="{}" height="{}" fill="white"/>)", width, height) << '\n';
  os << fmt::format(R"(<text x="{}" y="24" font-size="16" text-anchor="middle">{}</text>)", left + plot_w / 2, title)
     << '\n';
  os << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)", left, top, plot_w,
                    plot_h)
     << '\n';
  for (int i = 0; i <= 4; ++i) {
    const double yv = y_min + (y_max - y_min) * i / 4.0;
    const double xv = x_max * i / 4.0;
    os << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-size="11" text-anchor="end">{:.0f}</text>)", left - 6,
                      sy(yv) + 4, yv)
       << '\n';
    os << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-size="11" text-anchor="middle">{:.0f}</text>)", sx(xv),
                      top + plot_h + 16, xv)
       << '\n';
  }
  os << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-size="12" text-anchor="middle">environment steps</text>)",
                    left + plot_w / 2, height - 10)
     << '\n';
  os << fmt::format(
            R"svg(<text x="16" y="{:.1f}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1f})">return</text>)svg",
            top + plot_h / 2, top + plot_h / 2)
     << '\n';

  if (optimal) {
    os << fmt::format(
              R"(<line x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="black" stroke-dasharray="6,4"/>)",
              left, sy(*optimal), left + plot_w, sy(*optimal))
       << '\n';
  }

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const LearningCurve& c = curves[i];
    const char* color = palette[i % palette.size()];
    if (c.points.empty()) continue;
    std::string band, line;
    for (const CurvePoint& p : c.points) band += fmt::format("{:.1f},{:.1f} ", sx(p.env_step), sy(p.mean + p.std));
    for (auto it = c.points.rbegin(); it != c.points.rend(); ++it)
      band += fmt::format("{:.1f},{:.1f} ", sx(it->env_step), sy(it->mean - it->std));
    for (const CurvePoint& p : c.points) line += fmt::format("{:.1f},{:.1f} ", sx(p.env_step), sy(p.mean));
    os << fmt::format(R"(<polygon points="{}" fill="{}" fill-opacity="0.15" stroke="none"/>)", band, color) << '\n';
    os << fmt::format(R"(<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>)", line, color) << '\n';
    const double ly = top + 14 + 18.0 * static_cast<double>(i);
    os << fmt::format(R"(<line x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="{}" stroke-width="2"/>)",
                      left + plot_w + 10, ly, left + plot_w + 30, ly, color)
       << '\n';
    os << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" font-size="11">{}</text>)", left + plot_w + 36, ly + 4, c.label)
       << '\n';
  }
  os << "</svg>\n";
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error(fmt::format("cannot create output directory '{}'", dir.string()));
}

}  // namespace

std::vector<OutputFiles> emit_outputs(const std::vector<ExperimentResult>& results,
                                      const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  std::vector<OutputFiles> files;
  for (const ExperimentResult& r : results) {
    const std::string stem = fmt::format("{}_{}x{}", r.curve.label, r.side, r.side);
    OutputFiles f{out_dir / (stem + "_curve.csv"), out_dir / (stem + "_visitation.csv"),
                  out_dir / (stem + "_curve.svg")};
    {
      auto out = open_for_write(f.curve_csv);
      write_curve_csv(out, r.curve);
    }
    {
      auto out = open_for_write(f.visitation_csv);
      write_visitation_csv(out, r.visitation);
    }
    {
      auto out = open_for_write(f.plot_svg);
      write_svg_plot(out, {r.curve}, fmt::format("{} on {}x{}", r.curve.label, r.side, r.side),
                     r.curve.optimal_return);
    }
    files.push_back(std::move(f));
  }
  return files;
}

std::filesystem::path emit_comparison_plot(const std::vector<ExperimentResult>& results,
                                           const std::filesystem::path& out_dir, const std::string& name,
                                           const std::string& title) {
  ensure_dir(out_dir);
  std::vector<LearningCurve> curves;
  std::optional<double> optimal;
  for (const ExperimentResult& r : results) {
    curves.push_back(r.curve);
    if (!optimal) optimal = r.curve.optimal_return;
  }
  const auto path = out_dir / (name + ".svg");
  auto out = open_for_write(path);
  write_svg_plot(out, curves, title, optimal);
  return path;
}

}  // namespace dshape
