#pragma once

// Roots of g_t(u) = u + F_t(r - c u) - 1 on [0, 1], their classification,
// the extremal quartet and the minimal/maximal equilibrium flows.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mfstop/errors.hpp"
#include "mfstop/signal_model.hpp"

namespace mfstop {

enum class RootClass { increasing_transversal, decreasing_transversal, tangential_above, tangential_below, flat_segment };

inline std::string to_string(RootClass c) {
  switch (c) {
    case RootClass::increasing_transversal: return "increasing_transversal";
    case RootClass::decreasing_transversal: return "decreasing_transversal";
    case RootClass::tangential_above: return "tangential_above";
    case RootClass::tangential_below: return "tangential_below";
    case RootClass::flat_segment: return "flat_segment";
  }
  return "unknown";
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct MfSolution {
  double u = 0.0;
  // g < 0 arbitrarily close on the left / g > 0 arbitrarily close on the right
  bool left_transversal = false;
  bool right_transversal = false;
  // the same with the inequalities reversed
  bool left_reversed = false;
  bool right_reversed = false;
  RootClass clazz = RootClass::flat_segment;
  std::optional<double> alpha;
  std::optional<Interval> segment;

  double left_end() const { return segment ? segment->lo : u; }
  double right_end() const { return segment ? segment->hi : u; }
};

struct MfQuartet {
  double u_m = 0.0;
  double u_mrt = 0.0;
  double u_Mlt = 0.0;
  double u_M = 0.0;
};

enum class FlowKind { minimal, maximal, custom };

inline std::string to_string(FlowKind k) {
  switch (k) {
    case FlowKind::minimal: return "minimal";
    case FlowKind::maximal: return "maximal";
    case FlowKind::custom: return "custom";
  }
  return "unknown";
}

struct MfFlow {
  std::vector<double> grid;
  std::vector<double> values;
  FlowKind kind = FlowKind::custom;
};

struct SolverConfig {
  int scan_points = 4096;
  double tol = 1e-9;
};

struct FlowCheck {
  double max_residual = 0.0;
  bool monotone = true;
  bool ok = true;
};

// Offset used to evaluate right limits in time, e.g. rho^m(t+).
inline constexpr double kRightLimitOffset = 1e-9;

inline double residual(const SignalModel& model, const GameParams& params, double t, double u) {
  return u + model.cdf(t, params.r - params.c * u) - 1.0;
}

namespace detail {

// Probe values below this magnitude count as zero; keeps rounding noise in
// g away from the strict inequalities of the transversality conditions.
inline constexpr double kProbeNoise = 1e-14;

struct ProbeFlags {
  bool neg = false;
  bool pos = false;
};

inline ProbeFlags probe_side(const SignalModel& model, const GameParams& params, double t, double u, int side) {
  ProbeFlags f;
  for (int e = 3; e <= 9; ++e) {
    const double d = std::pow(10.0, -e);
    const double g = residual(model, params, t, u + side * d);
    if (g < -kProbeNoise) f.neg = true;
    if (g > kProbeNoise) f.pos = true;
  }
  return f;
}

inline RootClass class_from_flags(bool inc_l, bool inc_r, bool dec_l, bool dec_r) {
  if (inc_l && inc_r) return RootClass::increasing_transversal;
  if (dec_l && dec_r) return RootClass::decreasing_transversal;
  if (inc_l && dec_r) return RootClass::tangential_below;
  if (dec_l && inc_r) return RootClass::tangential_above;
  return RootClass::flat_segment;
}

inline std::optional<double> alpha_at(const SignalModel& model, const GameParams& params, double t, double u) {
  auto lim = model.density_limits(t, params.r - params.c * u);
  if (!lim) return std::nullopt;
  if (std::abs(lim->first - lim->second) > 1e-12) return std::nullopt;
  return params.c * lim->second;
}

inline std::vector<double> scan_grid(const SignalModel& model, const GameParams& params, double t, int points) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points) + 8);
  for (int i = 0; i < points; ++i) grid.push_back(static_cast<double>(i) / (points - 1));
  for (double y : model.breakpoints(t)) {
    const double u = (params.r - y) / params.c;
    if (u > 0.0 && u < 1.0) grid.push_back(u);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

inline int sign_of(double g) { return g > 0.0 ? 1 : (g < 0.0 ? -1 : 0); }

}  // namespace detail

inline MfSolution classify(const SignalModel& model, const GameParams& params, double t, double u, double tol = 1e-9) {
  const double g = residual(model, params, t, u);
  if (!(std::abs(g) <= tol)) throw NotARoot("g(" + std::to_string(u) + ") = " + std::to_string(g) + " is not a root");
  const auto left = detail::probe_side(model, params, t, u, -1);
  const auto right = detail::probe_side(model, params, t, u, +1);
  MfSolution s;
  s.u = u;
  s.left_transversal = left.neg;
  s.right_transversal = right.pos;
  s.left_reversed = left.pos;
  s.right_reversed = right.neg;
  s.clazz = detail::class_from_flags(left.neg, right.pos, left.pos, right.neg);
  s.alpha = detail::alpha_at(model, params, t, u);
  return s;
}

inline std::vector<MfSolution> find_solutions(const SignalModel& model, const GameParams& params, double t,
                                              const SolverConfig& cfg = {}) {
  if (cfg.scan_points < 2) throw ConfigError("scan_points must be >= 2");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be > 0");
  params.validate();

  const auto grid = detail::scan_grid(model, params, t, cfg.scan_points);
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) g[i] = residual(model, params, t, grid[i]);
  auto is_zero = [&](std::size_t i) { return std::abs(g[i]) <= cfg.tol; };

  std::vector<MfSolution> out;

  auto emit_point = [&](double u) {
    out.push_back(classify(model, params, t, u, cfg.tol));
  };
  auto emit_segment = [&](double lo, double hi) {
    const auto left = detail::probe_side(model, params, t, lo, -1);
    const auto right = detail::probe_side(model, params, t, hi, +1);
    MfSolution s;
    s.u = lo;
    s.left_transversal = left.neg;
    s.right_transversal = right.pos;
    s.left_reversed = left.pos;
    s.right_reversed = right.neg;
    s.clazz = RootClass::flat_segment;
    s.segment = Interval{lo, hi};
    out.push_back(s);
  };

  std::size_t i = 0;
  while (i < grid.size()) {
    if (is_zero(i)) {
      std::size_t j = i;
      while (j + 1 < grid.size() && is_zero(j + 1)) ++j;
      if (j > i) {
        emit_segment(grid[i], grid[j]);
      } else {
        emit_point(grid[i]);
      }
      i = j + 1;
      continue;
    }
    if (i + 1 < grid.size() && !is_zero(i + 1)) {
      double lo = grid[i];
      double hi = grid[i + 1];
      // A cell must contain at most one crossing.
      int changes = 0;
      int prev = detail::sign_of(g[i]);
      for (int q = 1; q <= 4; ++q) {
        const double v = q < 4 ? residual(model, params, t, lo + (hi - lo) * q / 4.0) : g[i + 1];
        const int s = detail::sign_of(v);
        if (s != 0 && s != prev) {
          ++changes;
          prev = s;
        }
      }
      if (changes > 1)
        throw ScanTooCoarse("several sign changes in scan cell [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "]; increase scan_points");
      if (detail::sign_of(g[i]) == detail::sign_of(g[i + 1])) {
        ++i;
        continue;
      }
      const int slo = detail::sign_of(g[i]);
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = residual(model, params, t, mid);
        if (detail::sign_of(gm) == slo) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double glo = std::abs(residual(model, params, t, lo));
      const double ghi = std::abs(residual(model, params, t, hi));
      const double u = glo <= ghi ? lo : hi;
      // a jump of g across zero is not a root
      if (std::min(glo, ghi) <= cfg.tol) emit_point(u);
    }
    ++i;
  }
  return out;
}

inline MfQuartet quartet_from(const std::vector<MfSolution>& roots) {
  if (roots.empty()) throw NotARoot("no roots supplied");
  MfQuartet q;
  q.u_m = roots.front().left_end();
  q.u_M = roots.back().right_end();
  std::optional<double> mrt;
  std::optional<double> mlt;
  for (const auto& s : roots) {
    if (s.right_transversal && !mrt) mrt = s.right_end();
    if (s.left_transversal) mlt = s.left_end();
  }
  q.u_mrt = mrt.value_or(q.u_M);
  q.u_Mlt = mlt.value_or(q.u_m);
  return q;
}

inline MfQuartet quartet(const SignalModel& model, const GameParams& params, double t, const SolverConfig& cfg = {}) {
  return quartet_from(find_solutions(model, params, t, cfg));
}

// The minimal flow is the right-continuous version rho^m(t+): each grid value
// is the minimal root just after the grid time.
inline MfFlow flow(const SignalModel& model, const GameParams& params, FlowKind kind, const std::vector<double>& grid,
                   const SolverConfig& cfg = {}) {
  for (std::size_t j = 1; j < grid.size(); ++j)
    if (!(grid[j - 1] < grid[j])) throw ConfigError("flow grid must be strictly increasing");
  if (kind == FlowKind::custom) throw ConfigError("flow() builds minimal or maximal flows only");
  MfFlow f;
  f.grid = grid;
  f.kind = kind;
  for (double t : grid) {
    if (kind == FlowKind::minimal) {
      const double tr = t + kRightLimitOffset * std::max(1.0, std::abs(t));
      f.values.push_back(quartet(model, params, tr, cfg).u_m);
    } else {
      f.values.push_back(quartet(model, params, t, cfg).u_M);
    }
  }
  for (std::size_t j = 1; j < f.values.size(); ++j)
    if (f.values[j] < f.values[j - 1]) throw std::logic_error("extremal flow is not monotone");
  return f;
}

inline FlowCheck verify_flow(const SignalModel& model, const GameParams& params, const MfFlow& f, double tol = 1e-9) {
  FlowCheck out;
  for (std::size_t j = 0; j < f.grid.size(); ++j) {
    double t = f.grid[j];
    if (f.kind == FlowKind::minimal) t += kRightLimitOffset * std::max(1.0, std::abs(t));
    out.max_residual = std::max(out.max_residual, std::abs(residual(model, params, t, f.values[j])));
    if (j > 0 && f.values[j] < f.values[j - 1]) out.monotone = false;
  }
  out.ok = out.monotone && out.max_residual <= tol;
  return out;
}

}  // namespace mfstop
