// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mfstop/mfstop.hpp"

using namespace mfstop;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_seconds, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > limit_seconds) {
    out.ok = false;
    out.detail << " [took longer than " << limit_seconds << " s]";
  }
  if (!out.ok) ++failures;
  std::printf("%s %2d %s (%.2f s):%s\n", out.ok ? "PASS" : "FAIL", id, name.c_str(), secs, out.detail.str().c_str());
  std::fflush(stdout);
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::vector<Count> brute_K(const SignalSample& s) {
  auto G = [&](Count k) {
    const double th = s.params.r - s.params.c * static_cast<double>(k) / static_cast<double>(s.n());
    Count c = 0;
    for (double y : s.values) c += y >= th;
    return c;
  };
  std::vector<Count> K;
  for (Count k = 0; k <= s.n(); ++k)
    if (k == 0 ? G(0) == 0 : (G(k - 1) == k && G(k) == k)) K.push_back(k);
  return K;
}

ExperimentConfig experiment(const std::string& id, Count n, Count samples) {
  ExperimentConfig cfg(preset(id));
  cfg.params.n = n;
  cfg.samples = samples;
  return cfg;
}

}  // namespace

int main() {
  criterion(1, "mean field roots of the tent model", 1.0, [](Outcome& o) {
    const auto s = preset("example-6.2");
    const auto roots = find_solutions(s.model, s.params, 0.0);
    o.require(roots.size() == 3, "three roots");
    if (roots.size() != 3) return;
    const double want[] = {0.0, 0.5, 1.0};
    const RootClass cls[] = {RootClass::increasing_transversal, RootClass::decreasing_transversal,
                             RootClass::increasing_transversal};
    for (int i = 0; i < 3; ++i) {
      o.require(near(roots[i].u, want[i], 1e-9), "root " + std::to_string(i));
      o.require(roots[i].clazz == cls[i], "class of root " + std::to_string(i));
    }
    o.require(roots[1].alpha && near(*roots[1].alpha, 2.0, 1e-9), "alpha at 1/2");
    o.detail << " roots " << roots[0].u << ", " << roots[1].u << ", " << roots[2].u << "; alpha "
             << roots[1].alpha.value_or(NAN);
  });

  criterion(2, "quartets", 1.0, [](Outcome& o) {
    struct Case {
      const char* id;
      double q[4];
    };
    for (const Case& c : {Case{"example-6.2", {0, 0, 1, 1}}, Case{"example-5.6", {0.5, 1, 1, 1}},
                          Case{"example-5.8", {0, 1, 1, 1}}}) {
      const auto s = preset(c.id);
      const auto q = quartet(s.model, s.params, 0.0);
      const bool ok = near(q.u_m, c.q[0], 1e-9) && near(q.u_mrt, c.q[1], 1e-9) && near(q.u_Mlt, c.q[2], 1e-9) &&
                      near(q.u_M, c.q[3], 1e-9);
      o.require(ok, c.id);
      o.detail << " " << c.id << " (" << q.u_m << ", " << q.u_mrt << ", " << q.u_Mlt << ", " << q.u_M << ")";
    }
  });

  criterion(3, "theta solver", 1.0, [](Outcome& o) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> a(1.0, 10.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      double alpha = a(rng);
      if (alpha == 1.0) alpha = 10.0;
      const double th = theta_of(alpha);
      worst = std::max(worst, std::abs(th * std::exp(-th) - alpha * std::exp(-alpha)));
    }
    o.require(worst <= 1e-12, "residual");
    o.require(near(theta_of(2.0), 0.4064, 1e-3), "theta(2)");
    o.detail << " worst residual " << worst << "; theta(2) = " << theta_of(2.0);
  });

  criterion(4, "closed forms at alpha = 2", 1.0, [](Outcome& o) {
    const double e = expected_count_limit(2.0);
    const double k = kstar_crossing_limit(2.0);
    const double l = lower_bound_L(2.0);
    o.require(near(e, 0.13534, 1e-5), "expected count");
    o.require(near(k, 0.5936, 1e-3), "K* crossing");
    o.require(near(l, 0.0642, 5e-4), "lower bound");
    o.detail << " expected " << e << ", crossing " << k << ", lower " << l;
  });

  criterion(5, "enumeration against brute force", 60.0, [](Outcome& o) {
    std::mt19937_64 rng(5);
    const auto ids = preset_ids();
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    std::uniform_int_distribution<Count> size(1, 200);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int bad = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      const auto spec = preset(ids[pick(rng)]);
      std::vector<double> u(static_cast<std::size_t>(size(rng)));
      for (auto& v : u) v = unif(rng);
      const auto s = sample_at(spec.model, spec.params, 0.99 * unif(rng), u);
      const auto eq = enumerate(s);
      const auto K = brute_K(s);
      if (eq.K != K || K.empty() || K.front() != minimal_from(s, 0) || K.back() != maximal_from(s, 0)) ++bad;
    }
    o.require(bad == 0, "mismatches");
    o.detail << " 10000 samples, " << bad << " mismatches";
  });

  criterion(6, "double fixed point on random monotone maps", 10.0, [](Outcome& o) {
    std::mt19937_64 rng(6);
    int bad = 0;
    int found = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      std::uniform_int_distribution<Count> len(1, 60);
      const Count lo = len(rng);
      const Count hi = lo + len(rng);
      // nondecreasing map on {lo-1..hi} that sends the window into itself
      std::uniform_int_distribution<Count> val(lo, hi);
      std::vector<Count> vals(static_cast<std::size_t>(hi - lo + 2));
      for (auto& v : vals) v = val(rng);
      std::sort(vals.begin(), vals.end());
      auto f = [&](Count j) { return vals[static_cast<std::size_t>(j - lo + 1)]; };
      const auto k = double_fixed_point(f, lo, hi);
      if (!k) {
        ++bad;
        continue;
      }
      ++found;
      bool ok = f(*k - 1) == *k && f(*k) == *k;
      for (Count j = lo; j < *k; ++j) ok = ok && !(f(j - 1) == j && f(j) == j);
      bad += !ok;
    }
    o.require(bad == 0, "violations");
    o.detail << " " << found << " maps, " << bad << " violations";
  });

  criterion(7, "two-atom law of the minimal equilibrium", 60.0, [](Outcome& o) {
    auto cfg = experiment("example-5.1", 2000, 4000);
    cfg.x = 0.5;
    cfg.eps = 0.05;
    const auto rep = extremal_law(cfg);
    const double full = rep.estimates.at("min_is_n").value;
    const double half = rep.estimates.at("min_near_x").value;
    o.require(near(full, 0.5, 0.03), "P(min = n)");
    o.require(near(full + half, 1.0, 1e-12), "remaining mass near 1/2");
    o.detail << " P(min = n) = " << full << ", P(|min/n - 1/2| <= 0.05) = " << half;
  });

  criterion(8, "uniform on [1/2, 1]: min 0 and max n", 60.0, [](Outcome& o) {
    for (Count n : {Count{2}, Count{17}, Count{1000}, Count{10000}}) {
      const auto rep = extremal_law(experiment("example-5.8", n, 1000));
      const double z = rep.estimates.at("min_is_0").value;
      const double m = rep.estimates.at("max_is_n").value;
      o.require(z == 1.0 && m == 1.0, "n = " + std::to_string(n));
      o.detail << " n=" << n << ": " << z << "/" << m;
    }
  });

  criterion(9, "tent window at 1/2 is rarely occupied", 600.0, [](Outcome& o) {
    auto cfg = experiment("example-6.2", 10000, 4000);
    cfg.x = 0.5;
    cfg.eps = 0.02;
    const auto rep = estimate_near(cfg);
    const double p = rep.estimates.at("prob_nonempty").value;
    o.require(p >= 0.09 && p <= 0.145, "probability in [0.09, 0.145]");
    o.detail << " P = " << p << " (lower bound " << lower_bound_L(2.0) << ")";
  });

  criterion(10, "exact expected count against Monte Carlo", 60.0, [](Outcome& o) {
    auto cfg = experiment("uniform02", 100, 20000);
    cfg.x = 0.5;
    cfg.eps = 0.1;
    const auto rep = estimate_near(cfg);
    const auto& mc = rep.estimates.at("mean_count");
    const double exact = rep.references.at("exact_expected_count");
    o.require(std::abs(mc.value - exact) <= 3.0 * mc.std_error, "within 3 standard errors");
    const auto tent = preset("example-6.2");
    const double limit = exact_expected_count(tent.model, tent.params, 0.0, 100000, 0.5, 0.01);
    o.require(near(limit, 0.13534, 0.01), "tent exact sum near the limit");
    o.detail << " mc " << mc.value << " +- " << mc.std_error << " vs exact " << exact << "; tent exact " << limit;
  });

  criterion(11, "K* crossing probability for the tent", 600.0, [](Outcome& o) {
    auto cfg = experiment("example-6.2", 50000, 1000);
    cfg.x = 0.5;
    cfg.eps = 0.01;
    cfg.set = SetSelector::K_star;
    const auto rep = estimate_near(cfg);
    const double p = rep.estimates.at("prob_nonempty").value;
    o.require(near(p, 0.594, 0.08), "0.594 +- 0.08");
    o.detail << " P = " << p;
  });

  criterion(12, "tracking the uniform flow at 1/2", 300.0, [](Outcome& o) {
    auto cfg = experiment("uniform02", 10000, 500);
    cfg.delta = 0.02;
    const MfFlow target{{0.0, 0.5}, {0.5, 0.5}, FlowKind::custom};
    const auto rep = track_experiment(cfg, target);
    const double p = rep.estimates.at("all_times_success").value;
    o.require(p >= 0.9, "success rate");
    o.require(rep.all_passed(), "successes are equilibria within delta");
    o.detail << " success " << p;
  });

  criterion(13, "scaling windows", 120.0, [](Outcome& o) {
    auto cfg = experiment("example-6.2", 100000, 0);
    cfg.x = 0.5;
    const auto rep = scaling_experiment(cfg, {0.5, 1.0, 2.0});
    for (const auto& row : rep.tables.at("scaling").rows) {
      o.require(near(row[2], row[3], 0.02), "beta " + format_number(row[0]));
      o.detail << " beta " << row[0] << ": " << row[2] << " vs " << row[3] << ";";
    }
  });

  criterion(14, "reports do not depend on the thread count", 300.0, [](Outcome& o) {
    auto base = experiment("example-6.2", 2000, 200);
    const MfFlow flat{{0.0, 0.5}, {0.0, 0.0}, FlowKind::minimal};
    const MfFlow half{{0.0, 0.5}, {0.5, 0.5}, FlowKind::custom};
    auto run_all = [&](unsigned threads) {
      auto cfg = base;
      cfg.threads = threads;
      cfg.n_ladder = {100, 1000};
      std::string out;
      out += to_json(run_histogram(cfg)).dump();
      out += to_json(estimate_near(cfg)).dump();
      out += to_json(extremal_law(cfg)).dump();
      out += to_json(fatou_diagnostic(cfg, flat)).dump();
      out += to_json(scaling_experiment(cfg, {0.5, 1.0})).dump();
      out += to_json(track_experiment(cfg, half)).dump();
      return out;
    };
    const auto one = run_all(1);
    for (unsigned threads : {2u, 4u, 7u}) o.require(run_all(threads) == one, std::to_string(threads) + " threads");
    o.detail << " histogram, near, extremal, fatou, scaling and track at 1, 2, 4, 7 threads";
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
