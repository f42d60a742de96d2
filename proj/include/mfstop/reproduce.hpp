#pragma once

// Canonical experiment for each preset, with the checks it must pass.

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "mfstop/config.hpp"
#include "mfstop/mean_field.hpp"
#include "mfstop/monte_carlo.hpp"
#include "mfstop/report.hpp"

namespace mfstop {

struct ReproduceResult {
  std::string id;
  std::vector<Check> checks;
  std::vector<std::filesystem::path> files;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
};

namespace detail {

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline std::string fmt(double v) { return format_number(v); }

inline Check quartet_check(const MfQuartet& q, double m, double mrt, double mlt, double M) {
  const bool ok = near(q.u_m, m, 1e-9) && near(q.u_mrt, mrt, 1e-9) && near(q.u_Mlt, mlt, 1e-9) && near(q.u_M, M, 1e-9);
  return {"quartet", ok,
          "(" + fmt(q.u_m) + ", " + fmt(q.u_mrt) + ", " + fmt(q.u_Mlt) + ", " + fmt(q.u_M) + ") expected (" + fmt(m) +
              ", " + fmt(mrt) + ", " + fmt(mlt) + ", " + fmt(M) + ")"};
}

// Fraction of histogram entries whose location satisfies pred.
template <class Pred>
double histogram_mass(const ExperimentReport& rep, Pred pred) {
  double total = 0.0;
  double hit = 0.0;
  for (const auto& [x, c] : rep.histogram) {
    total += static_cast<double>(c);
    if (pred(x)) hit += static_cast<double>(c);
  }
  return total > 0.0 ? hit / total : 0.0;
}

}  // namespace detail

inline ReproduceResult reproduce(const std::string& id, const std::filesystem::path& out_dir, unsigned threads = 0) {
  const ModelSpec spec = preset(id);
  ReproduceResult res;
  res.id = spec.id;
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  const SolverConfig scfg;

  const auto solved = solve_summary(spec.model, spec.params, 0.0, grid, scfg);
  write_text(out_dir / (spec.id + "_solve.json"), to_json(solved, spec, 0.0, scfg).dump(2) + "\n");
  write_text(out_dir / (spec.id + "_flow.csv"), flow_csv(solved.minimal, solved.maximal));
  res.files.push_back(out_dir / (spec.id + "_solve.json"));
  res.files.push_back(out_dir / (spec.id + "_flow.csv"));

  auto emit = [&](const ExperimentReport& rep, const std::string& suffix) {
    auto files = emit_report(rep, out_dir, spec.id + "_" + suffix, EmitFormats{true, true, true});
    res.files.insert(res.files.end(), files.begin(), files.end());
    for (const auto& c : rep.checks) res.checks.push_back({suffix + ": " + c.name, c.passed, c.detail});
  };

  ExperimentConfig cfg(spec);
  cfg.threads = threads;

  if (spec.id == "example-5.1") {
    res.checks.push_back(detail::quartet_check(solved.quartet, 0.5, 1.0, 1.0, 1.0));
    cfg.samples = 4000;
    cfg.x = 0.5;
    cfg.eps = 0.05;
    const auto rep = extremal_law(cfg);
    emit(rep, "extremal");
    const double full = rep.estimates.at("min_is_n").value;
    const double half = rep.estimates.at("min_near_x").value;
    res.checks.push_back({"P(min = n) within 0.03 of 1/2", detail::near(full, 0.5, 0.03), detail::fmt(full)});
    res.checks.push_back({"remaining minimal mass within 0.05 of 1/2", detail::near(full + half, 1.0, 1e-12),
                          "near 1/2: " + detail::fmt(half)});
  } else if (spec.id == "example-5.6") {
    res.checks.push_back(detail::quartet_check(solved.quartet, 0.5, 1.0, 1.0, 1.0));
    cfg.samples = 1000;
    cfg.mode = HistogramMode::minimal;
    const auto rep = run_histogram(cfg);
    emit(rep, "histogram");
    const double low = detail::histogram_mass(rep, [](double x) { return std::abs(x - 0.5) <= 0.05; });
    const double high = detail::histogram_mass(rep, [](double x) { return x >= 0.95; });
    res.checks.push_back({"minimal mass near 1/2 about one half", detail::near(low, 0.5, 0.1), detail::fmt(low)});
    res.checks.push_back({"minimal mass near 1 about one half", detail::near(high, 0.5, 0.1), detail::fmt(high)});
  } else if (spec.id == "example-5.7") {
    const bool flat = !solved.roots.empty() && solved.roots.front().segment &&
                      detail::near(solved.roots.front().segment->lo, 0.5, 1e-9) &&
                      detail::near(solved.roots.front().segment->hi, 1.0, 1e-9);
    res.checks.push_back({"flat segment [1/2, 1]", flat, ""});
    cfg.samples = 1000;
    cfg.mode = HistogramMode::minimal;
    const auto rep = run_histogram(cfg);
    emit(rep, "histogram");
    const double outside = detail::histogram_mass(rep, [](double x) { return x < 0.45; });
    const double inner = detail::histogram_mass(rep, [](double x) { return x > 0.55 && x < 0.95; });
    res.checks.push_back({"no minimal mass below 0.45", outside == 0.0, detail::fmt(outside)});
    res.checks.push_back({"minimal mass spread inside (0.55, 0.95)", inner >= 0.05, detail::fmt(inner)});
  } else if (spec.id == "example-5.8") {
    res.checks.push_back(detail::quartet_check(solved.quartet, 0.0, 1.0, 1.0, 1.0));
    cfg.samples = 1000;
    const auto rep = extremal_law(cfg);
    emit(rep, "extremal");
    const double zero = rep.estimates.at("min_is_0").value;
    const double full = rep.estimates.at("max_is_n").value;
    res.checks.push_back({"min(K) = 0 in every sample", zero == 1.0, detail::fmt(zero)});
    res.checks.push_back({"max(K) = n in every sample", full == 1.0, detail::fmt(full)});
  } else if (spec.id == "example-6.2") {
    res.checks.push_back(detail::quartet_check(solved.quartet, 0.0, 0.0, 1.0, 1.0));
    cfg.samples = 4000;
    cfg.mode = HistogramMode::all;
    emit(run_histogram(cfg), "histogram");
    cfg.x = 0.5;
    cfg.eps = 0.02;
    const auto rep = estimate_near(cfg);
    emit(rep, "near");
    const double p = rep.estimates.at("prob_nonempty").value;
    res.checks.push_back({"P(equilibrium within 0.02 of 1/2) in [0.09, 0.145]", p >= 0.09 && p <= 0.145, detail::fmt(p)});
  } else if (spec.id == "uniform02") {
    res.checks.push_back(detail::quartet_check(solved.quartet, 0.5, 0.5, 0.5, 0.5));
    ExperimentConfig near_cfg = cfg;
    near_cfg.params.n = 100;
    near_cfg.samples = 20000;
    near_cfg.x = 0.5;
    near_cfg.eps = 0.1;
    emit(estimate_near(near_cfg), "near");
    ExperimentConfig track_cfg = cfg;
    track_cfg.samples = 500;
    track_cfg.delta = 0.02;
    MfFlow target{{0.0, 0.5}, {0.5, 0.5}, FlowKind::custom};
    const auto rep = track_experiment(track_cfg, target);
    emit(rep, "track");
    const double p = rep.estimates.at("all_times_success").value;
    res.checks.push_back({"tracking succeeds on at least 90% of runs", p >= 0.9, detail::fmt(p)});
  }
  return res;
}

}  // namespace mfstop
