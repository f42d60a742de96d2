#pragma once

// Report serialization: JSON (full), CSV (tabular series) and a
// self-contained SVG bar chart.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfstop/monte_carlo.hpp"

namespace mfstop {

inline constexpr const char* kVersion = "0.3.0";

inline nlohmann::json to_json(const Estimate& e) {
  return {{"value", e.value}, {"std_error", e.std_error}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}, {"n", e.n}};
}

inline nlohmann::json to_json(const ExperimentReport& rep) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["kind"] = rep.kind;
  j["config"] = rep.config;
  j["estimates"] = nlohmann::json::object();
  for (const auto& [k, e] : rep.estimates) j["estimates"][k] = to_json(e);
  j["references"] = rep.references;
  auto hist = nlohmann::json::array();
  for (const auto& [x, c] : rep.histogram) hist.push_back({x, c});
  j["histogram"] = hist;
  j["tables"] = nlohmann::json::object();
  for (const auto& [name, t] : rep.tables) j["tables"][name] = {{"columns", t.columns}, {"rows", t.rows}};
  auto checks = nlohmann::json::array();
  for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  j["notes"] = rep.notes;
  return j;
}

inline std::string format_number(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string csv_table(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  return os.str();
}

inline std::string histogram_csv(const ExperimentReport& rep) {
  std::vector<std::vector<double>> rows;
  for (const auto& [x, c] : rep.histogram) rows.push_back({x, static_cast<double>(c)});
  return csv_table({"k_over_n", "count"}, rows);
}

namespace detail {

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Frame {
  double width = 640;
  double height = 400;
  double left = 70;
  double right = 20;
  double top = 30;
  double bottom = 55;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

inline void svg_axes(std::ostringstream& os, const Frame& f, double x0, double x1, double y_max,
                     const std::string& xlabel, const std::string& ylabel, const std::string& title) {
  const double bx = f.left;
  const double by = f.top + f.plot_h();
  os << "<line x1=\"" << bx << "\" y1=\"" << by << "\" x2=\"" << bx + f.plot_w() << "\" y2=\"" << by
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << bx << "\" y1=\"" << f.top << "\" x2=\"" << bx << "\" y2=\"" << by
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double px = bx + f.plot_w() * i / 4.0;
    os << "<line x1=\"" << px << "\" y1=\"" << by << "\" x2=\"" << px << "\" y2=\"" << by + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px << "\" y=\"" << by + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
       << format_number(std::round(xv * 1000.0) / 1000.0) << "</text>\n";
    const double yv = y_max * i / 4.0;
    const double py = by - f.plot_h() * i / 4.0;
    os << "<line x1=\"" << bx - 5 << "\" y1=\"" << py << "\" x2=\"" << bx << "\" y2=\"" << py
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << bx - 8 << "\" y=\"" << py + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
       << format_number(std::round(yv * 1000.0) / 1000.0) << "</text>\n";
  }
  os << "<text x=\"" << bx + f.plot_w() / 2 << "\" y=\"" << f.height - 12
     << "\" font-size=\"13\" text-anchor=\"middle\">" << svg_escape(xlabel) << "</text>\n";
  os << "<text x=\"16\" y=\"" << f.top + f.plot_h() / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
     << "transform=\"rotate(-90 16 " << f.top + f.plot_h() / 2 << ")\">" << svg_escape(ylabel) << "</text>\n";
  os << "<text x=\"" << f.width / 2 << "\" y=\"18\" font-size=\"14\" text-anchor=\"middle\">" << svg_escape(title)
     << "</text>\n";
}

}  // namespace detail

// Bars of sample counts over k/n in [0, 1].
inline std::string histogram_svg(const std::vector<std::pair<double, Count>>& hist, const std::string& title) {
  detail::Frame f;
  Count peak = 1;
  for (const auto& [x, c] : hist) peak = std::max(peak, c);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
     << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  detail::svg_axes(os, f, 0.0, 1.0, static_cast<double>(peak), "Locations k/n", "number of samples", title);
  const double bar = std::max(1.0, f.plot_w() / 200.0);
  for (const auto& [x, c] : hist) {
    const double h = f.plot_h() * static_cast<double>(c) / static_cast<double>(peak);
    const double px = f.left + f.plot_w() * std::clamp(x, 0.0, 1.0) - bar / 2;
    os << "<rect x=\"" << px << "\" y=\"" << f.top + f.plot_h() - h << "\" width=\"" << bar << "\" height=\"" << h
       << "\" fill=\"steelblue\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// Polylines of several series against a shared x column.
inline std::string curve_svg(const std::vector<double>& xs, const std::vector<std::pair<std::string, std::vector<double>>>& series,
                             const std::string& xlabel, const std::string& title) {
  detail::Frame f;
  f.right = 150;
  double x0 = xs.empty() ? 0.0 : xs.front();
  double x1 = xs.empty() ? 1.0 : xs.back();
  if (x1 <= x0) x1 = x0 + 1.0;
  double ymax = 0.0;
  for (const auto& [name, ys] : series)
    for (double y : ys)
      if (std::isfinite(y)) ymax = std::max(ymax, y);
  if (ymax <= 0.0) ymax = 1.0;
  static const char* colours[] = {"steelblue", "firebrick", "darkgreen", "darkorange", "purple"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
     << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  detail::svg_axes(os, f, x0, x1, ymax, xlabel, "value", title);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = colours[s % 5];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size() && i < series[s].second.size(); ++i) {
      const double y = series[s].second[i];
      if (!std::isfinite(y)) continue;
      os << f.left + f.plot_w() * (xs[i] - x0) / (x1 - x0) << ',' << f.top + f.plot_h() * (1.0 - y / ymax) << ' ';
    }
    os << "\"/>\n";
    const double ly = f.top + 16.0 * static_cast<double>(s + 1);
    os << "<text x=\"" << f.width - f.right + 10 << "\" y=\"" << ly << "\" font-size=\"12\" fill=\"" << colour << "\">"
       << detail::svg_escape(series[s].first) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

struct EmitFormats {
  bool json = true;
  bool csv = true;
  bool svg = false;
};

// Writes <stem>.json, <stem>.csv (histogram) or <stem>_<table>.csv, and
// optionally <stem>.svg. Returns the written paths.
inline std::vector<std::filesystem::path> emit_report(const ExperimentReport& rep, const std::filesystem::path& dir,
                                                      const std::string& stem, const EmitFormats& formats = {}) {
  std::vector<std::filesystem::path> written;
  if (formats.json) {
    auto p = dir / (stem + ".json");
    write_text(p, to_json(rep).dump(2) + "\n");
    written.push_back(p);
  }
  if (formats.csv) {
    if (!rep.histogram.empty()) {
      auto p = dir / (stem + ".csv");
      write_text(p, histogram_csv(rep));
      written.push_back(p);
    }
    for (const auto& [name, t] : rep.tables) {
      auto p = dir / (stem + "_" + name + ".csv");
      write_text(p, csv_table(t.columns, t.rows));
      written.push_back(p);
    }
  }
  if (formats.svg && !rep.histogram.empty()) {
    auto p = dir / (stem + ".svg");
    write_text(p, histogram_svg(rep.histogram, rep.config.value("model_id", std::string()) + " " + rep.kind));
    written.push_back(p);
  }
  return written;
}

struct SolveSummary {
  std::vector<MfSolution> roots;
  MfQuartet quartet;
  MfFlow minimal;
  MfFlow maximal;
};

inline SolveSummary solve_summary(const SignalModel& model, const GameParams& params, double t,
                                  const std::vector<double>& grid, const SolverConfig& cfg = {}) {
  SolveSummary s;
  s.roots = find_solutions(model, params, t, cfg);
  s.quartet = quartet_from(s.roots);
  s.minimal = flow(model, params, FlowKind::minimal, grid, cfg);
  s.maximal = flow(model, params, FlowKind::maximal, grid, cfg);
  return s;
}

inline nlohmann::json to_json(const MfSolution& s) {
  nlohmann::json j;
  j["u"] = s.u;
  j["class"] = to_string(s.clazz);
  j["left_transversal"] = s.left_transversal;
  j["right_transversal"] = s.right_transversal;
  // null for atoms and at density jumps
  j["alpha"] = s.alpha ? nlohmann::json(*s.alpha) : nlohmann::json(nullptr);
  if (s.segment) j["segment"] = {s.segment->lo, s.segment->hi};
  return j;
}

inline std::string flow_csv(const MfFlow& lo, const MfFlow& hi) {
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < lo.grid.size(); ++j) rows.push_back({lo.grid[j], lo.values[j], hi.values[j]});
  return csv_table({"t", "rho_min", "rho_max"}, rows);
}

inline nlohmann::json to_json(const SolveSummary& s, const ModelSpec& spec, double t, const SolverConfig& cfg) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["kind"] = "solve";
  j["config"] = {{"model_id", spec.id},     {"model", model_to_json(spec.model)}, {"r", spec.params.r},
                 {"c", spec.params.c},      {"t", t},                             {"scan_points", cfg.scan_points},
                 {"tol", cfg.tol},          {"grid", s.minimal.grid}};
  auto roots = nlohmann::json::array();
  for (const auto& r : s.roots) roots.push_back(to_json(r));
  j["roots"] = roots;
  j["quartet"] = {{"u_m", s.quartet.u_m}, {"u_mrt", s.quartet.u_mrt}, {"u_Mlt", s.quartet.u_Mlt}, {"u_M", s.quartet.u_M}};
  j["flow"] = {{"t", s.minimal.grid}, {"rho_min", s.minimal.values}, {"rho_max", s.maximal.values}};
  j["notes"] = {{"boundary_probes", "transversality at 0 and 1 is probed on the natural extension of the c.d.f."},
                {"rho_min", "right limit in time of the minimal root"}};
  return j;
}

inline nlohmann::json to_json(const AlphaStats& s) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"alpha", s.alpha},
          {"a0", s.a0},
          {"theta", opt(s.theta)},
          {"kstar_crossing_limit", opt(s.kstar_crossing_limit)},
          {"expected_count_limit", opt(s.expected_count_limit)},
          {"lower_bound_L", opt(s.lower_bound_L)}};
}

// Columns alpha, theta, kstar_limit, expected_count, lower_L; undefined
// entries (alpha <= 1 or alpha = 1) are left empty.
inline Table asymptotics_curve(double lo, double hi, double step) {
  if (!(step > 0.0) || !(lo > 0.0) || !(hi >= lo)) throw ConfigError("alpha grid must satisfy 0 < lo <= hi, step > 0");
  Table t{{"alpha", "theta", "kstar_limit", "expected_count", "lower_L"}, {}};
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= count; ++i) {
    const double a = lo + static_cast<double>(i) * step;
    const auto s = alpha_stats(a);
    const double nan = std::nan("");
    t.rows.push_back({a, s.theta.value_or(nan), s.kstar_crossing_limit.value_or(nan),
                      s.expected_count_limit.value_or(nan), s.lower_bound_L.value_or(nan)});
  }
  return t;
}

}  // namespace mfstop
