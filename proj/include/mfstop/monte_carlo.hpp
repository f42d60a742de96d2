#pragma once

// Seeded sampling experiments over n-player equilibria. Sample s of an
// experiment uses the uniforms SampleStream(seed, s), per-sample results are
// stored by index and reduced in index order, so reports do not depend on
// the number of worker threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mfstop/asymptotics.hpp"
#include "mfstop/config.hpp"
#include "mfstop/errors.hpp"
#include "mfstop/mean_field.hpp"
#include "mfstop/n_player.hpp"
#include "mfstop/parallel.hpp"
#include "mfstop/rng.hpp"
#include "mfstop/signal_model.hpp"

namespace mfstop {

enum class HistogramMode { all, minimal, maximal };

inline std::string to_string(HistogramMode m) {
  switch (m) {
    case HistogramMode::all: return "all";
    case HistogramMode::minimal: return "minimal";
    case HistogramMode::maximal: return "maximal";
  }
  return "unknown";
}

inline HistogramMode histogram_mode_from(const std::string& s) {
  if (s == "all") return HistogramMode::all;
  if (s == "minimal") return HistogramMode::minimal;
  if (s == "maximal") return HistogramMode::maximal;
  throw ConfigError("unknown histogram mode '" + s + "'");
}

inline SetSelector set_selector_from(const std::string& s) {
  if (s == "K") return SetSelector::K;
  if (s == "K_star" || s == "Kstar" || s == "K*") return SetSelector::K_star;
  throw ConfigError("unknown equilibrium set '" + s + "'");
}

struct ExperimentConfig {
  std::string model_id;
  SignalModel model;
  GameParams params;
  double t = 0.0;
  std::vector<double> grid;
  Count samples = 1000;
  std::uint64_t seed = 0;
  double eps = 0.02;
  double x = 0.5;
  SetSelector set = SetSelector::K;
  double delta = 0.02;
  HistogramMode mode = HistogramMode::all;
  std::vector<Count> n_ladder;
  std::vector<double> betas;
  double tol = 0.05;
  // not part of the echoed configuration: results do not depend on it
  unsigned threads = 0;

  explicit ExperimentConfig(const ModelSpec& spec)
      : model_id(spec.id), model(spec.model), params(spec.params), seed(spec.seed.value_or(0)) {}

  Count n() const { return params.players(); }

  void validate(bool allow_zero_samples = false) const {
    params.validate();
    if (!params.n) throw ConfigError("experiment needs a player count n");
    if (samples < (allow_zero_samples ? 0 : 1)) throw ConfigError("samples must be >= 1");
    if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
    if (!(delta > 0.0)) throw ConfigError("delta must be > 0");
    for (Count m : n_ladder)
      if (m < 1) throw ConfigError("n_ladder entries must be >= 1");
  }
};

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["model_id"] = cfg.model_id;
  j["model"] = model_to_json(cfg.model);
  j["r"] = cfg.params.r;
  j["c"] = cfg.params.c;
  j["n"] = cfg.params.n ? nlohmann::json(*cfg.params.n) : nlohmann::json(nullptr);
  j["t"] = cfg.t;
  j["grid"] = cfg.grid;
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  j["eps"] = cfg.eps;
  j["x"] = cfg.x;
  j["set"] = to_string(cfg.set);
  j["delta"] = cfg.delta;
  j["mode"] = to_string(cfg.mode);
  j["n_ladder"] = cfg.n_ladder;
  j["betas"] = cfg.betas;
  j["tol"] = cfg.tol;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ModelSpec spec{j.at("model_id").get<std::string>(), model_from_json(j.at("model")), GameParams{}, std::nullopt};
    spec.params.r = j.at("r").get<double>();
    spec.params.c = j.at("c").get<double>();
    if (!j.at("n").is_null()) spec.params.n = j.at("n").get<Count>();
    ExperimentConfig cfg(spec);
    cfg.t = j.at("t").get<double>();
    cfg.grid = j.at("grid").get<std::vector<double>>();
    cfg.samples = j.at("samples").get<Count>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.eps = j.at("eps").get<double>();
    cfg.x = j.at("x").get<double>();
    cfg.set = set_selector_from(j.at("set").get<std::string>());
    cfg.delta = j.at("delta").get<double>();
    cfg.mode = histogram_mode_from(j.at("mode").get<std::string>());
    cfg.n_ladder = j.at("n_ladder").get<std::vector<Count>>();
    cfg.betas = j.at("betas").get<std::vector<double>>();
    cfg.tol = j.at("tol").get<double>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
}

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  Count n = 0;
};

// Wilson 95% interval for a binomial proportion.
inline Estimate probability_estimate(Count successes, Count trials) {
  Estimate e;
  e.n = trials;
  if (trials <= 0) return e;
  const double nn = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nn;
  constexpr double z = 1.959963984540054;
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  e.value = p;
  e.std_error = std::sqrt(p * (1.0 - p) / nn);
  e.ci_low = std::min(p, std::max(0.0, centre - half));
  e.ci_high = std::max(p, std::min(1.0, centre + half));
  return e;
}

// Compensated (Neumaier) sum in the given order.
class StableSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Mean with a normal 95% interval from the sample standard deviation.
inline Estimate mean_estimate(const std::vector<double>& values) {
  Estimate e;
  e.n = static_cast<Count>(values.size());
  if (values.empty()) return e;
  StableSum s;
  for (double v : values) s.add(v);
  const double mean = s.value() / static_cast<double>(values.size());
  StableSum ss;
  for (double v : values) ss.add((v - mean) * (v - mean));
  const double var = values.size() > 1 ? ss.value() / static_cast<double>(values.size() - 1) : 0.0;
  e.value = mean;
  e.std_error = std::sqrt(var / static_cast<double>(values.size()));
  e.ci_low = mean - 1.959963984540054 * e.std_error;
  e.ci_high = mean + 1.959963984540054 * e.std_error;
  return e;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  std::string kind;
  nlohmann::json config;
  std::map<std::string, Estimate> estimates;
  std::map<std::string, double> references;
  // (k/n or bin centre, number of entries)
  std::vector<std::pair<double, Count>> histogram;
  std::map<std::string, Table> tables;
  std::vector<Check> checks;
  nlohmann::json notes = nlohmann::json::object();

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
};

// Uniforms of sample s, sorted (agent identities are irrelevant for counts).
inline std::vector<double> sorted_uniforms(std::uint64_t seed, std::uint64_t s, Count n) {
  std::vector<double> u;
  SampleStream(seed, s).fill(u, static_cast<std::uint64_t>(n));
  std::sort(u.begin(), u.end());
  return u;
}

inline SignalSample draw_sample(const SignalModel& model, const GameParams& params, double t, std::uint64_t seed,
                                std::uint64_t s, Count n) {
  GameParams p = params;
  p.n = n;
  return detail::sample_from_sorted(model, p, t, sorted_uniforms(seed, s, n));
}

namespace detail {

// Exact k/n bins up to this n, 1000 uniform bins above.
inline constexpr Count kExactBinLimit = 10000;
inline constexpr Count kCoarseBins = 1000;

class Histogram {
 public:
  explicit Histogram(Count n) : n_(n), exact_(n <= kExactBinLimit), counts_(exact_ ? n + 1 : kCoarseBins, 0) {}

  void add(Count k, Count weight = 1) { counts_[bin(k)] += weight; }

  std::vector<std::pair<double, Count>> nonzero() const {
    std::vector<std::pair<double, Count>> out;
    for (std::size_t b = 0; b < counts_.size(); ++b)
      if (counts_[b] != 0) out.emplace_back(location(b), counts_[b]);
    return out;
  }

  std::size_t bin(Count k) const {
    if (exact_) return static_cast<std::size_t>(k);
    const auto b = static_cast<Count>(std::floor(static_cast<double>(k) * kCoarseBins / static_cast<double>(n_)));
    return static_cast<std::size_t>(std::clamp<Count>(b, 0, kCoarseBins - 1));
  }

  double location(std::size_t b) const {
    if (exact_) return static_cast<double>(b) / static_cast<double>(n_);
    return (static_cast<double>(b) + 0.5) / kCoarseBins;
  }

  std::size_t size() const { return counts_.size(); }
  Count at(std::size_t b) const { return counts_[b]; }

 private:
  Count n_;
  bool exact_;
  std::vector<Count> counts_;
};

inline std::optional<double> alpha_near(const SignalModel& model, const GameParams& params, double t, double x) {
  return alpha_at(model, params, t, x);
}

inline void attach_limits(ExperimentReport& rep, std::optional<double> alpha) {
  if (!alpha) return;
  rep.references["alpha"] = *alpha;
  if (*alpha != 1.0 && *alpha >= 0.0) rep.references["expected_count_limit"] = expected_count_limit(*alpha);
  if (*alpha > 1.0) {
    rep.references["kstar_crossing_limit"] = kstar_crossing_limit(*alpha);
    rep.references["lower_bound_L"] = lower_bound_L(*alpha);
  }
}

inline nlohmann::json roots_json(const std::vector<MfSolution>& roots) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : roots) {
    nlohmann::json r;
    r["u"] = s.u;
    r["class"] = to_string(s.clazz);
    if (s.segment) r["segment"] = {s.segment->lo, s.segment->hi};
    arr.push_back(r);
  }
  return arr;
}

inline double distance_to_roots(double v, const std::vector<MfSolution>& roots) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& s : roots) {
    if (v < s.left_end()) {
      d = std::min(d, s.left_end() - v);
    } else if (v > s.right_end()) {
      d = std::min(d, v - s.right_end());
    } else {
      d = 0.0;
    }
  }
  return d;
}

inline ExperimentReport new_report(const std::string& kind, const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = kind;
  rep.config = config_to_json(cfg);
  rep.notes["k0_rule"] = "0 is an equilibrium count iff no agent is willing to stop when nobody has stopped";
  return rep;
}

}  // namespace detail

inline ExperimentReport run_histogram(const ExperimentConfig& cfg) {
  cfg.validate();
  const Count n = cfg.n();
  struct PerSample {
    std::vector<Count> counts;
    Count min = 0;
    Count max = 0;
    Count size = 0;
  };
  auto results = parallel_map(static_cast<std::size_t>(cfg.samples), cfg.threads, [&](std::size_t s) {
    const auto sample = draw_sample(cfg.model, cfg.params, cfg.t, cfg.seed, s, n);
    const auto eq = enumerate(sample);
    PerSample r;
    r.min = eq.K.front();
    r.max = eq.K.back();
    r.size = static_cast<Count>(eq.K.size());
    switch (cfg.mode) {
      case HistogramMode::all: r.counts = eq.K; break;
      case HistogramMode::minimal: r.counts = {r.min}; break;
      case HistogramMode::maximal: r.counts = {r.max}; break;
    }
    return r;
  });

  auto rep = detail::new_report("histogram", cfg);
  detail::Histogram h(n);
  std::vector<double> mins;
  std::vector<double> maxs;
  std::vector<double> sizes;
  Count entries = 0;
  for (const auto& r : results) {
    for (Count k : r.counts) h.add(k);
    entries += static_cast<Count>(r.counts.size());
    mins.push_back(static_cast<double>(r.min) / static_cast<double>(n));
    maxs.push_back(static_cast<double>(r.max) / static_cast<double>(n));
    sizes.push_back(static_cast<double>(r.size));
  }
  rep.histogram = h.nonzero();
  rep.estimates["min_over_n"] = mean_estimate(mins);
  rep.estimates["max_over_n"] = mean_estimate(maxs);
  rep.estimates["equilibria_per_sample"] = mean_estimate(sizes);
  rep.references["histogram_entries"] = static_cast<double>(entries);
  try {
    rep.notes["mean_field_roots"] = detail::roots_json(find_solutions(cfg.model, cfg.params, cfg.t));
  } catch (const ScanTooCoarse& e) {
    rep.notes["mean_field_roots"] = e.what();
  }
  return rep;
}

inline ExperimentReport estimate_near(const ExperimentConfig& cfg) {
  cfg.validate();
  const Count n = cfg.n();
  auto counts = parallel_map(static_cast<std::size_t>(cfg.samples), cfg.threads, [&](std::size_t s) {
    const auto sample = draw_sample(cfg.model, cfg.params, cfg.t, cfg.seed, s, n);
    const auto eq = enumerate(sample);
    const auto& set = cfg.set == SetSelector::K ? eq.K : eq.K_star;
    Count c = 0;
    for (Count k : set)
      if (in_window(k, n, cfg.x, cfg.eps)) ++c;
    return c;
  });

  auto rep = detail::new_report("near", cfg);
  Count nonempty = 0;
  std::vector<double> values;
  values.reserve(counts.size());
  for (Count c : counts) {
    if (c > 0) ++nonempty;
    values.push_back(static_cast<double>(c));
  }
  rep.estimates["prob_nonempty"] = probability_estimate(nonempty, cfg.samples);
  rep.estimates["mean_count"] = mean_estimate(values);

  const double exact = exact_expected_count(cfg.model, cfg.params, cfg.t, n, cfg.x, cfg.eps, cfg.set);
  rep.references["exact_expected_count"] = exact;
  detail::attach_limits(rep, detail::alpha_near(cfg.model, cfg.params, cfg.t, cfg.x));

  const auto& mc = rep.estimates["mean_count"];
  const double se = mc.std_error > 0.0 ? mc.std_error : std::sqrt(exact / static_cast<double>(cfg.samples));
  const double gap = std::abs(mc.value - exact);
  rep.checks.push_back({"mean_count_within_3se_of_exact", gap <= 3.0 * se,
                        "|mc - exact| = " + std::to_string(gap) + ", 3 se = " + std::to_string(3.0 * se)});
  rep.notes["window"] = "|x - k/n| < eps";
  return rep;
}

inline ExperimentReport extremal_law(const ExperimentConfig& cfg) {
  cfg.validate();
  const Count n = cfg.n();
  const double dn = static_cast<double>(n);
  auto results = parallel_map(static_cast<std::size_t>(cfg.samples), cfg.threads, [&](std::size_t s) {
    const auto sample = draw_sample(cfg.model, cfg.params, cfg.t, cfg.seed, s, n);
    const auto eq = enumerate(sample);
    return std::pair<Count, Count>{eq.K.front(), eq.K.back()};
  });

  auto rep = detail::new_report("extremal", cfg);
  std::vector<MfSolution> roots;
  try {
    roots = find_solutions(cfg.model, cfg.params, cfg.t);
    rep.notes["mean_field_roots"] = detail::roots_json(roots);
  } catch (const ScanTooCoarse& e) {
    rep.notes["mean_field_roots"] = e.what();
  }

  detail::Histogram hmin(n);
  detail::Histogram hmax(n);
  std::vector<double> mins;
  std::vector<double> maxs;
  Count min_full = 0, max_full = 0, min_zero = 0, max_zero = 0, min_near = 0, max_near = 0;
  Count min_out = 0, max_out = 0;
  for (const auto& [lo, hi] : results) {
    hmin.add(lo);
    hmax.add(hi);
    const double a = static_cast<double>(lo) / dn;
    const double b = static_cast<double>(hi) / dn;
    mins.push_back(a);
    maxs.push_back(b);
    min_full += lo == n;
    max_full += hi == n;
    min_zero += lo == 0;
    max_zero += hi == 0;
    min_near += std::abs(a - cfg.x) <= cfg.eps;
    max_near += std::abs(b - cfg.x) <= cfg.eps;
    if (!roots.empty()) {
      min_out += detail::distance_to_roots(a, roots) > cfg.eps;
      max_out += detail::distance_to_roots(b, roots) > cfg.eps;
    }
  }
  rep.estimates["min_over_n"] = mean_estimate(mins);
  rep.estimates["max_over_n"] = mean_estimate(maxs);
  rep.estimates["min_is_n"] = probability_estimate(min_full, cfg.samples);
  rep.estimates["max_is_n"] = probability_estimate(max_full, cfg.samples);
  rep.estimates["min_is_0"] = probability_estimate(min_zero, cfg.samples);
  rep.estimates["max_is_0"] = probability_estimate(max_zero, cfg.samples);
  rep.estimates["min_near_x"] = probability_estimate(min_near, cfg.samples);
  rep.estimates["max_near_x"] = probability_estimate(max_near, cfg.samples);
  if (!roots.empty()) {
    rep.estimates["min_outside_roots"] = probability_estimate(min_out, cfg.samples);
    rep.estimates["max_outside_roots"] = probability_estimate(max_out, cfg.samples);
  }

  Table t{{"k_over_n", "min_count", "max_count"}, {}};
  for (std::size_t b = 0; b < hmin.size(); ++b) {
    if (hmin.at(b) == 0 && hmax.at(b) == 0) continue;
    t.rows.push_back({hmin.location(b), static_cast<double>(hmin.at(b)), static_cast<double>(hmax.at(b))});
  }
  rep.tables["extremal"] = std::move(t);
  rep.histogram = hmin.nonzero();
  return rep;
}

inline ExperimentReport fatou_diagnostic(const ExperimentConfig& cfg, const MfFlow& target) {
  cfg.validate();
  detail::check_grid(target.grid);
  const std::vector<Count> ladder = cfg.n_ladder.empty() ? std::vector<Count>{cfg.n()} : cfg.n_ladder;
  const std::size_t T = target.grid.size();

  auto rep = detail::new_report("fatou", cfg);
  rep.notes["flow_kind"] = to_string(target.kind);
  rep.notes["flow_grid"] = target.grid;
  rep.notes["flow_values"] = target.values;
  Table table{{"n", "t", "p_exceed_minimal", "p_exceed_maximal"}, {}};
  std::vector<double> worst_min;
  std::vector<double> worst_max;

  for (Count n : ladder) {
    GameParams p = cfg.params;
    p.n = n;
    const double dn = static_cast<double>(n);
    auto results = parallel_map(static_cast<std::size_t>(cfg.samples), cfg.threads, [&](std::size_t s) {
      std::vector<double> u;
      SampleStream(cfg.seed, s).fill(u, static_cast<std::uint64_t>(n));
      const auto lo = minimal_path(cfg.model, p, target.grid, u);
      const auto hi = maximal_path(cfg.model, p, target.grid, u);
      std::vector<std::pair<char, char>> ex(T);
      for (std::size_t j = 0; j < T; ++j) {
        ex[j].first = std::abs(static_cast<double>(lo.counts[j]) / dn - target.values[j]) > cfg.tol;
        ex[j].second = std::abs(static_cast<double>(hi.counts[j]) / dn - target.values[j]) > cfg.tol;
      }
      return ex;
    });
    double wmin = 0.0;
    double wmax = 0.0;
    for (std::size_t j = 0; j < T; ++j) {
      Count a = 0;
      Count b = 0;
      for (const auto& r : results) {
        a += r[j].first;
        b += r[j].second;
      }
      const double pa = static_cast<double>(a) / static_cast<double>(cfg.samples);
      const double pb = static_cast<double>(b) / static_cast<double>(cfg.samples);
      wmin = std::max(wmin, pa);
      wmax = std::max(wmax, pb);
      table.rows.push_back({dn, target.grid[j], pa, pb});
    }
    worst_min.push_back(wmin);
    worst_max.push_back(wmax);
  }
  rep.tables["fatou"] = std::move(table);

  auto nonincreasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] > v[i - 1]) return false;
    return true;
  };
  rep.notes["worst_exceedance_minimal"] = worst_min;
  rep.notes["worst_exceedance_maximal"] = worst_max;
  rep.notes["minimal_trend_nonincreasing"] = nonincreasing(worst_min);
  rep.notes["maximal_trend_nonincreasing"] = nonincreasing(worst_max);
  rep.references["final_exceedance_minimal"] = worst_min.back();
  rep.references["final_exceedance_maximal"] = worst_max.back();
  return rep;
}

inline ExperimentReport scaling_experiment(const ExperimentConfig& cfg, const std::vector<double>& betas) {
  cfg.validate(true);
  const Count n = cfg.n();
  const double dn = static_cast<double>(n);
  const auto alpha = detail::alpha_near(cfg.model, cfg.params, cfg.t, cfg.x);
  if (!alpha || *alpha == 1.0) throw DomainError("scaling experiment needs a density with alpha != 1 at x");

  std::vector<double> half_widths;
  for (double b : betas) {
    if (!(b >= 0.0)) throw ConfigError("beta values must be >= 0");
    half_widths.push_back(b / std::sqrt(dn));
  }

  auto counts = parallel_map(static_cast<std::size_t>(cfg.samples), cfg.threads, [&](std::size_t s) {
    const auto sample = draw_sample(cfg.model, cfg.params, cfg.t, cfg.seed, s, n);
    const auto eq = enumerate(sample);
    std::vector<Count> c(half_widths.size(), 0);
    for (Count k : eq.K)
      for (std::size_t i = 0; i < half_widths.size(); ++i)
        if (in_window(k, n, cfg.x, half_widths[i])) ++c[i];
    return c;
  });

  auto rep = detail::new_report("scaling", cfg);
  detail::attach_limits(rep, alpha);
  Table table{{"beta", "half_width", "exact", "limit", "mc_mean", "mc_se"}, {}};
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double exact = half_widths[i] > 0.0
                             ? exact_expected_count(cfg.model, cfg.params, cfg.t, n, cfg.x, half_widths[i])
                             : 0.0;
    const double limit = window_expected_count(*alpha, cfg.x, betas[i]);
    double mc_mean = std::nan("");
    double mc_se = std::nan("");
    if (!counts.empty()) {
      std::vector<double> v;
      for (const auto& c : counts) v.push_back(static_cast<double>(c[i]));
      const auto e = mean_estimate(v);
      mc_mean = e.value;
      mc_se = e.std_error;
      rep.estimates["mean_count_beta_" + std::to_string(betas[i])] = e;
    }
    table.rows.push_back({betas[i], half_widths[i], exact, limit, mc_mean, mc_se});
    rep.checks.push_back({"exact_within_0.02_of_limit_beta_" + std::to_string(betas[i]), std::abs(exact - limit) <= 0.02,
                          "exact " + std::to_string(exact) + " vs limit " + std::to_string(limit)});
  }
  rep.tables["scaling"] = std::move(table);
  return rep;
}

// Success rate of the tracking construction for a mean field flow.
inline ExperimentReport track_experiment(const ExperimentConfig& cfg, const MfFlow& target) {
  cfg.validate();
  const Count n = cfg.n();
  const double dn = static_cast<double>(n);
  struct PerSample {
    char success = 0;
    char valid = 0;
  };
  auto results = parallel_map(static_cast<std::size_t>(cfg.samples), cfg.threads, [&](std::size_t s) {
    std::vector<double> u;
    SampleStream(cfg.seed, s).fill(u, static_cast<std::uint64_t>(n));
    const auto path = track_flow(cfg.model, cfg.params, target, cfg.delta, u);
    PerSample r;
    r.success = path.all_succeeded();
    bool ok = validate_path(cfg.model, cfg.params, path, u);
    for (std::size_t j = 0; j < path.grid.size(); ++j)
      if (path.success[j] && std::abs(static_cast<double>(path.counts[j]) / dn - target.values[j]) > cfg.delta + 1e-12)
        ok = false;
    r.valid = ok;
    return r;
  });
  auto rep = detail::new_report("track", cfg);
  rep.notes["flow_grid"] = target.grid;
  rep.notes["flow_values"] = target.values;
  Count succ = 0;
  Count valid = 0;
  for (const auto& r : results) {
    succ += r.success;
    valid += r.valid;
  }
  rep.estimates["all_times_success"] = probability_estimate(succ, cfg.samples);
  rep.checks.push_back({"every_path_is_an_equilibrium_within_delta", valid == cfg.samples,
                        std::to_string(cfg.samples - valid) + " invalid paths"});
  return rep;
}

}  // namespace mfstop
