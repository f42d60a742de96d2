#pragma once

// Equilibria of the n-player game in terms of stopped counts.
//
// G(k) = #{i : Y^i >= r - c k / n} is the number of agents willing to stop
// when k agents stop. A count k >= 1 is an equilibrium iff G(k-1) = G(k) = k;
// zero is an equilibrium iff G(0) = 0. The relaxed set K* only asks G(k) = k.
//
// Paths couple agents comonotonically (one sorted uniform per agent), so the
// agents stopped by any time are always the top-ranked ones and a path is a
// nondecreasing sequence of counts.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfstop/errors.hpp"
#include "mfstop/mean_field.hpp"
#include "mfstop/signal_model.hpp"

namespace mfstop {

struct SignalSample {
  std::vector<double> values;
  GameParams params;
  double t = 0.0;

  SignalSample() = default;
  SignalSample(std::vector<double> v, GameParams p, double time = 0.0)
      : values(std::move(v)), params(p), t(time) {
    if (!std::is_sorted(values.begin(), values.end())) std::sort(values.begin(), values.end());
    params.n = static_cast<Count>(values.size());
  }

  Count n() const { return static_cast<Count>(values.size()); }

  double threshold(Count k) const {
    return params.r - params.c * static_cast<double>(k) / static_cast<double>(n());
  }
};

struct EquilibriumSet {
  std::vector<Count> K;
  std::vector<Count> K_star;
  Count n = 0;
};

enum class PathKind { minimal, maximal, spliced, tracked };

inline std::string to_string(PathKind k) {
  switch (k) {
    case PathKind::minimal: return "minimal";
    case PathKind::maximal: return "maximal";
    case PathKind::spliced: return "spliced";
    case PathKind::tracked: return "tracked";
  }
  return "unknown";
}

struct EquilibriumPath {
  std::vector<double> grid;
  std::vector<Count> counts;
  PathKind provenance = PathKind::minimal;
  // per grid time: did the target-seeking step succeed (tracked paths only)
  std::vector<bool> success;

  bool all_succeeded() const { return std::all_of(success.begin(), success.end(), [](bool b) { return b; }); }
};

inline Count count_G(const SignalSample& s, Count k) {
  if (k < 0) k = 0;
  const double th = s.threshold(k);
  auto it = std::lower_bound(s.values.begin(), s.values.end(), th);
  return static_cast<Count>(s.values.end() - it);
}

// G(0..n) in one merge pass over the sorted sample.
inline std::vector<Count> G_table(const SignalSample& s) {
  const Count n = s.n();
  std::vector<Count> table(static_cast<std::size_t>(n) + 1);
  std::size_t idx = s.values.size();
  for (Count k = 0; k <= n; ++k) {
    const double th = s.threshold(k);
    while (idx > 0 && s.values[idx - 1] >= th) --idx;
    table[static_cast<std::size_t>(k)] = static_cast<Count>(s.values.size() - idx);
  }
  return table;
}

inline EquilibriumSet enumerate(const SignalSample& s) {
  const auto G = G_table(s);
  EquilibriumSet out;
  out.n = s.n();
  if (G[0] == 0) {
    out.K.push_back(0);
    out.K_star.push_back(0);
  }
  for (Count k = 1; k <= out.n; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    if (G[uk] != k) continue;
    out.K_star.push_back(k);
    if (G[uk - 1] == k) out.K.push_back(k);
  }
  return out;
}

// Equilibrium check at one time when k_prev agents have stopped before.
// Newly stopping agents need G(k-1) >= k; nobody else may want to stop.
inline bool conditional_equilibrium(const SignalSample& s, Count k, Count k_prev = 0) {
  if (k < k_prev || k < 0 || k > s.n()) return false;
  if (count_G(s, k) > k) return false;
  if (k > k_prev && count_G(s, k - 1) < k) return false;
  return true;
}

inline Count minimal_from(const SignalSample& s, Count k0) {
  if (k0 < 0 || k0 > s.n()) throw ConfigError("minimal_from: k0 outside [0, n]");
  Count k = k0;
  for (;;) {
    const Count next = std::max(k0, count_G(s, k));
    if (next == k) return k;
    k = next;
  }
}

// Largest group that can coordinate on stopping beyond k0: the largest
// j > k0 with G(j-1) >= j. A second pass never finds a larger group.
inline Count maximal_from(const SignalSample& s, Count k0) {
  if (k0 < 0 || k0 > s.n()) throw ConfigError("maximal_from: k0 outside [0, n]");
  for (Count j = s.n(); j > k0; --j)
    if (count_G(s, j - 1) >= j) return j;
  return k0;
}

// Smallest k in [lo, hi] with f(k - 1) = f(k) = k for a nondecreasing f,
// provided f maps the window into itself (f(lo - 1) >= lo, f(hi) <= hi).
template <class F>
std::optional<Count> double_fixed_point(F f, Count lo, Count hi) {
  if (lo > hi) return std::nullopt;
  if (f(lo - 1) < lo || f(hi) > hi) return std::nullopt;
  for (Count k = lo; k <= hi; ++k)
    if (f(k) <= k) return k;
  return std::nullopt;
}

// An equilibrium count within delta of n*u, or nullopt when the sample does
// not bracket one. floor is the number of agents already stopped.
inline std::optional<Count> find_near(const SignalSample& s, double u, double delta, Count floor = 0) {
  if (!(delta > 0.0)) throw ConfigError("find_near: delta must be > 0");
  const Count n = s.n();
  const double dn = static_cast<double>(n);
  Count a = static_cast<Count>(std::ceil(dn * (u - delta) - 1e-9));
  Count b = static_cast<Count>(std::floor(dn * (u + delta) + 1e-9));
  a = std::max<Count>({a, 0, floor});
  b = std::min<Count>(b, n);
  if (a > b) return std::nullopt;
  auto G = [&s](Count k) { return count_G(s, k); };
  auto k = double_fixed_point(G, a, b);
  if (k && std::abs(u - static_cast<double>(*k) / dn) > delta + 1e-12) return std::nullopt;
  return k;
}

namespace detail {

inline std::vector<double> sorted_copy(std::span<const double> uniforms) {
  std::vector<double> u(uniforms.begin(), uniforms.end());
  std::sort(u.begin(), u.end());
  return u;
}

inline SignalSample sample_from_sorted(const SignalModel& model, const GameParams& params, double t,
                                       const std::vector<double>& sorted_uniforms) {
  std::vector<double> v(sorted_uniforms.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = model.quantile(t, sorted_uniforms[i]);
  return SignalSample(std::move(v), params, t);
}

inline void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("time grid is empty");
  for (std::size_t j = 1; j < grid.size(); ++j)
    if (!(grid[j - 1] < grid[j])) throw ConfigError("time grid must be strictly increasing");
}

template <class Step>
EquilibriumPath build_path(const SignalModel& model, const GameParams& params, const std::vector<double>& grid,
                           std::span<const double> uniforms, PathKind kind, Step step) {
  check_grid(grid);
  const auto u = sorted_copy(uniforms);
  EquilibriumPath p;
  p.grid = grid;
  p.provenance = kind;
  Count prev = 0;
  for (double t : grid) {
    const auto s = sample_from_sorted(model, params, t, u);
    prev = step(s, prev);
    p.counts.push_back(prev);
    p.success.push_back(true);
  }
  return p;
}

}  // namespace detail

// Sample at time t built from one uniform per agent (comonotone coupling).
inline SignalSample sample_at(const SignalModel& model, const GameParams& params, double t,
                              std::span<const double> uniforms) {
  return detail::sample_from_sorted(model, params, t, detail::sorted_copy(uniforms));
}

inline EquilibriumPath minimal_path(const SignalModel& model, const GameParams& params,
                                    const std::vector<double>& grid, std::span<const double> uniforms) {
  return detail::build_path(model, params, grid, uniforms, PathKind::minimal,
                            [](const SignalSample& s, Count prev) { return minimal_from(s, prev); });
}

inline EquilibriumPath maximal_path(const SignalModel& model, const GameParams& params,
                                    const std::vector<double>& grid, std::span<const double> uniforms) {
  return detail::build_path(model, params, grid, uniforms, PathKind::maximal,
                            [](const SignalSample& s, Count prev) { return maximal_from(s, prev); });
}

// Re-validates every count of a path as an equilibrium given the count before it.
inline bool validate_path(const SignalModel& model, const GameParams& params, const EquilibriumPath& path,
                          std::span<const double> uniforms) {
  const auto u = detail::sorted_copy(uniforms);
  Count prev = 0;
  for (std::size_t j = 0; j < path.grid.size(); ++j) {
    const auto s = detail::sample_from_sorted(model, params, path.grid[j], u);
    if (!conditional_equilibrium(s, path.counts[j], prev)) return false;
    prev = path.counts[j];
  }
  return true;
}

// Follows a before t0, extends minimally on [t0, t1), then joins b from t1 on.
inline EquilibriumPath splice(const EquilibriumPath& a, const EquilibriumPath& b, double t0, double t1,
                              const SignalModel& model, const GameParams& params, std::span<const double> uniforms) {
  if (a.grid != b.grid) throw ConfigError("splice: paths must share a grid");
  auto index_of = [&](double t) {
    auto it = std::find(a.grid.begin(), a.grid.end(), t);
    if (it == a.grid.end()) throw ConfigError("splice: junction time is not a grid point");
    return static_cast<std::size_t>(it - a.grid.begin());
  };
  const std::size_t i0 = index_of(t0);
  const std::size_t i1 = index_of(t1);
  if (i0 > i1) throw ConfigError("splice: t0 must not exceed t1");
  if (a.counts[i0] > b.counts[i1]) throw OrderViolation("splice: first path is ahead of the second at the junction");

  const auto u = detail::sorted_copy(uniforms);
  EquilibriumPath out;
  out.grid = a.grid;
  out.provenance = PathKind::spliced;
  Count prev = 0;
  for (std::size_t j = 0; j < a.grid.size(); ++j) {
    Count k;
    if (j < i0) {
      k = a.counts[j];
    } else if (j < i1) {
      k = minimal_from(detail::sample_from_sorted(model, params, a.grid[j], u), prev);
    } else {
      k = b.counts[j];
    }
    if (k < prev) throw OrderViolation("splice: minimal extension overshoots the second path");
    out.counts.push_back(k);
    out.success.push_back(true);
    prev = k;
  }
  if (!validate_path(model, params, out, uniforms))
    throw OrderViolation("splice: junction count is not an equilibrium");
  return out;
}

// Tracks a mean field flow: at each grid time look for an equilibrium within
// delta of the flow value, never below what has already stopped. Failures
// fall back to the minimal extension and are flagged.
inline EquilibriumPath track_flow(const SignalModel& model, const GameParams& params, const MfFlow& target,
                                  double delta, std::span<const double> uniforms) {
  detail::check_grid(target.grid);
  if (target.values.size() != target.grid.size()) throw ConfigError("track_flow: flow values do not match its grid");
  const auto u = detail::sorted_copy(uniforms);
  EquilibriumPath p;
  p.grid = target.grid;
  p.provenance = PathKind::tracked;
  Count prev = 0;
  for (std::size_t j = 0; j < target.grid.size(); ++j) {
    const auto s = detail::sample_from_sorted(model, params, target.grid[j], u);
    auto k = find_near(s, target.values[j], delta, prev);
    p.success.push_back(k.has_value());
    prev = k ? *k : minimal_from(s, prev);
    p.counts.push_back(prev);
  }
  return p;
}

}  // namespace mfstop
