#include "flmcp/figure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "flmcp/errors.hpp"

namespace flmcp {

namespace {

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string fmt2(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", value);
  return buf;
}

constexpr const char* kSeriesColors[] = {"#1f6fb2", "#c4402a", "#3a8c3f",
                                         "#8a53a1", "#b58900", "#3aa198"};

}  // namespace

FigureFiles emit_figure_data(const std::vector<RejectionRow>& rows,
                             const std::string& prefix) {
  if (rows.empty()) throw ConfigError("no rejection rows to emit");
  for (const auto& row : rows)
    if (row.family != rows.front().family)
      throw ConfigError("rejection rows must share one error family");

  FigureFiles files{prefix + ".csv", prefix + ".svg"};

  {
    std::ofstream csv(files.csv_path);
    if (!csv) throw FormatError("cannot open file for writing: " + files.csv_path);
    csv << "family,delta,n,repetitions,level,reject_rate,mc_stderr,"
           "mean_theta_rejected,median_theta_rejected,failed_fits\n";
    for (const auto& r : rows) {
      csv << to_string(r.family) << ',' << fmt(r.delta) << ',' << r.n << ','
          << r.repetitions << ',' << fmt(r.level) << ',' << fmt(r.reject_rate)
          << ',' << fmt(r.mc_stderr) << ',' << fmt(r.mean_theta_rejected)
          << ',' << fmt(r.median_theta_rejected) << ',' << r.failed_fits
          << '\n';
    }
    if (!csv) throw FormatError("write failed: " + files.csv_path);
  }

  // Series keyed by sample size, points ordered by delta.
  std::map<int, std::vector<const RejectionRow*>> series;
  for (const auto& r : rows) series[r.n].push_back(&r);
  for (auto& [n, pts] : series)
    std::sort(pts.begin(), pts.end(), [](const RejectionRow* a,
                                         const RejectionRow* b) {
      return a->delta < b->delta;
    });

  double delta_max = 0.0;
  for (const auto& r : rows) delta_max = std::max(delta_max, r.delta);
  if (delta_max <= 0.0) delta_max = 1.0;

  const double width = 640, height = 480;
  const double left = 70, right = 30, top = 50, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto sx = [&](double delta) { return left + plot_w * delta / delta_max; };
  auto sy = [&](double rate) {
    const double clamped = std::min(1.0, std::max(0.0, rate));
    return top + plot_h * (1.0 - clamped);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">rejection probability, "
      << to_string(rows.front().family) << "</text>\n";

  // Axes.
  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\""
      << left + plot_w << "\" y2=\"" << top + plot_h
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double rate = 0.25 * i;
    svg << "<line x1=\"" << left - 4 << "\" y1=\"" << sy(rate) << "\" x2=\""
        << left << "\" y2=\"" << sy(rate) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << sy(rate) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"12\">" << fmt2(rate) << "</text>\n";
  }
  std::vector<double> deltas;
  for (const auto& r : rows) deltas.push_back(r.delta);
  std::sort(deltas.begin(), deltas.end());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
  for (double d : deltas) {
    svg << "<line x1=\"" << sx(d) << "\" y1=\"" << top + plot_h << "\" x2=\""
        << sx(d) << "\" y2=\"" << top + plot_h + 4 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << sx(d) << "\" y=\"" << top + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">" << fmt2(d) << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">delta</text>\n";

  // Dotted reference line at the nominal level.
  const double level = rows.front().level;
  svg << "<line x1=\"" << left << "\" y1=\"" << sy(level) << "\" x2=\""
      << left + plot_w << "\" y2=\"" << sy(level)
      << "\" stroke=\"gray\" stroke-dasharray=\"3,4\"/>\n";

  int series_idx = 0;
  for (const auto& [n, pts] : series) {
    const char* color =
        kSeriesColors[series_idx % (sizeof(kSeriesColors) /
                                    sizeof(kSeriesColors[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto* p : pts)
      svg << fmt2(sx(p->delta)) << ',' << fmt2(sy(p->reject_rate)) << ' ';
    svg << "\"/>\n";
    for (const auto* p : pts)
      svg << "<circle cx=\"" << fmt2(sx(p->delta)) << "\" cy=\""
          << fmt2(sy(p->reject_rate)) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    svg << "<text x=\"" << left + plot_w - 6 << "\" y=\""
        << top + 16 + 16 * series_idx
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"12\" fill=\"" << color << "\">n=" << n << "</text>\n";
    ++series_idx;
  }
  svg << "</svg>\n";

  std::ofstream out(files.svg_path);
  if (!out) throw FormatError("cannot open file for writing: " + files.svg_path);
  out << svg.str();
  if (!out) throw FormatError("write failed: " + files.svg_path);
  return files;
}

std::vector<RejectionRow> load_rejection_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path);
  std::vector<RejectionRow> rows;
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    std::istringstream cells(line);
    std::string cell;
    std::vector<std::string> parts;
    while (std::getline(cells, cell, ',')) parts.push_back(cell);
    if (parts.size() != 10)
      throw FormatError("bad rejection row at line " + std::to_string(line_no));
    try {
      RejectionRow r;
      r.family = error_family_from_string(parts[0]);
      r.delta = std::stod(parts[1]);
      r.n = std::stoi(parts[2]);
      r.repetitions = std::stoi(parts[3]);
      r.level = std::stod(parts[4]);
      r.reject_rate = std::stod(parts[5]);
      r.mc_stderr = std::stod(parts[6]);
      r.mean_theta_rejected = std::stod(parts[7]);
      r.median_theta_rejected = std::stod(parts[8]);
      r.failed_fits = std::stoi(parts[9]);
      rows.push_back(r);
    } catch (const std::invalid_argument&) {
      throw FormatError("non-numeric cell in rejection row at line " +
                        std::to_string(line_no));
    }
  }
  if (rows.empty()) throw FormatError("no rejection rows in " + path);
  return rows;
}

}  // namespace flmcp
