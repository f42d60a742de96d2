#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mfstop/config.hpp"
#include "mfstop/mean_field.hpp"

using namespace mfstop;

namespace {

ModelSpec tent() { return preset("example-6.2"); }

// Piecewise constant density with random breakpoints and levels.
SignalModel random_piecewise(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pieces(1, 6);
  std::uniform_real_distribution<double> pos(-0.5, 2.5);
  std::uniform_real_distribution<double> level(0.0, 1.0);
  const int k = pieces(rng);
  std::vector<double> bp;
  while (static_cast<int>(bp.size()) < k + 1) {
    const double v = pos(rng);
    if (std::find(bp.begin(), bp.end(), v) == bp.end()) bp.push_back(v);
  }
  std::sort(bp.begin(), bp.end());
  std::vector<double> lv(static_cast<std::size_t>(k));
  double mass = 0.0;
  for (int j = 0; j < k; ++j) {
    lv[j] = level(rng) < 0.2 ? 0.0 : level(rng);
    mass += lv[j] * (bp[j + 1] - bp[j]);
  }
  if (mass == 0.0) {
    lv[0] = 1.0;
    mass = bp[1] - bp[0];
  }
  for (auto& v : lv) v /= mass;
  return SignalModel::with_default_post(PiecewiseDensity(bp, lv), 1.0, 1.0);
}

bool transversal(const MfSolution& s) {
  return s.clazz == RootClass::increasing_transversal || s.clazz == RootClass::decreasing_transversal;
}

}  // namespace

TEST(Residual, Examples) {
  const auto t = tent();
  EXPECT_DOUBLE_EQ(residual(t.model, t.params, 0.0, 0.25), 0.125);
  EXPECT_DOUBLE_EQ(residual(t.model, t.params, 0.0, 0.5), 0.0);
  for (const auto& id : preset_ids()) {
    const auto spec = preset(id);
    EXPECT_GE(residual(spec.model, spec.params, 0.0, 2.0), 1.0) << id;
  }
}

TEST(FindSolutions, TentRootsAndClasses) {
  const auto t = tent();
  const auto roots = find_solutions(t.model, t.params, 0.0);
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_NEAR(roots[0].u, 0.0, 1e-9);
  EXPECT_NEAR(roots[1].u, 0.5, 1e-9);
  EXPECT_NEAR(roots[2].u, 1.0, 1e-9);
  EXPECT_EQ(roots[0].clazz, RootClass::increasing_transversal);
  EXPECT_EQ(roots[1].clazz, RootClass::decreasing_transversal);
  EXPECT_EQ(roots[2].clazz, RootClass::increasing_transversal);
  ASSERT_TRUE(roots[1].alpha.has_value());
  EXPECT_NEAR(*roots[1].alpha, 2.0, 1e-9);
}

TEST(FindSolutions, FlatSegment) {
  const auto s = preset("example-5.7");
  const auto roots = find_solutions(s.model, s.params, 0.0);
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_EQ(roots[0].clazz, RootClass::flat_segment);
  ASSERT_TRUE(roots[0].segment.has_value());
  EXPECT_NEAR(roots[0].segment->lo, 0.5, 1e-9);
  EXPECT_NEAR(roots[0].segment->hi, 1.0, 1e-9);
}

TEST(FindSolutions, UniformOnHalfToOne) {
  const auto s = preset("example-5.8");
  const auto roots = find_solutions(s.model, s.params, 0.0);
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0].u, 0.0, 1e-9);
  EXPECT_NEAR(roots[1].u, 1.0, 1e-9);
}

TEST(FindSolutions, TwoSignChangesInOneCellIsReported) {
  auto t = tent();
  t.params.r = 1.0625;
  SolverConfig cfg;
  cfg.scan_points = 2;
  EXPECT_THROW(find_solutions(t.model, t.params, 0.0, cfg), ScanTooCoarse);
  cfg.scan_points = 4096;
  EXPECT_NO_THROW(find_solutions(t.model, t.params, 0.0, cfg));
}

TEST(FindSolutions, RejectsBadConfig) {
  const auto t = tent();
  EXPECT_THROW(find_solutions(t.model, t.params, 0.0, SolverConfig{1, 1e-9}), ConfigError);
  EXPECT_THROW(find_solutions(t.model, t.params, 0.0, SolverConfig{16, 0.0}), ConfigError);
}

TEST(FindSolutions, AtomicModelHasNoAlpha) {
  const auto s = preset("example-5.1");
  const auto roots = find_solutions(s.model, s.params, 0.0);
  ASSERT_FALSE(roots.empty());
  for (const auto& r : roots) EXPECT_FALSE(r.alpha.has_value());
}

TEST(Classify, Examples) {
  const auto s = preset("example-5.6");
  const auto mid = classify(s.model, s.params, 0.0, 0.5);
  EXPECT_TRUE(mid.left_transversal);
  EXPECT_FALSE(mid.right_transversal);
  EXPECT_EQ(mid.clazz, RootClass::tangential_below);

  const auto t = tent();
  const auto peak = classify(t.model, t.params, 0.0, 0.5);
  EXPECT_EQ(peak.clazz, RootClass::decreasing_transversal);
  EXPECT_NEAR(*peak.alpha, 2.0, 1e-12);
  EXPECT_EQ(classify(t.model, t.params, 0.0, 0.0).clazz, RootClass::increasing_transversal);
  EXPECT_THROW(classify(t.model, t.params, 0.0, 0.25), NotARoot);
}

TEST(Quartet, Examples) {
  const auto a = quartet(tent().model, tent().params, 0.0);
  EXPECT_NEAR(a.u_m, 0.0, 1e-9);
  EXPECT_NEAR(a.u_mrt, 0.0, 1e-9);
  EXPECT_NEAR(a.u_Mlt, 1.0, 1e-9);
  EXPECT_NEAR(a.u_M, 1.0, 1e-9);

  const auto s6 = preset("example-5.6");
  const auto b = quartet(s6.model, s6.params, 0.0);
  EXPECT_NEAR(b.u_m, 0.5, 1e-9);
  EXPECT_NEAR(b.u_mrt, 1.0, 1e-9);
  EXPECT_NEAR(b.u_Mlt, 1.0, 1e-9);
  EXPECT_NEAR(b.u_M, 1.0, 1e-9);

  const auto s8 = preset("example-5.8");
  const auto c = quartet(s8.model, s8.params, 0.0);
  EXPECT_NEAR(c.u_m, 0.0, 1e-9);
  EXPECT_NEAR(c.u_mrt, 1.0, 1e-9);
  EXPECT_NEAR(c.u_Mlt, 1.0, 1e-9);
  EXPECT_NEAR(c.u_M, 1.0, 1e-9);
}

TEST(Quartet, OrderingOnRandomPiecewiseModels) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> rr(0.2, 2.0);
  std::uniform_real_distribution<double> cc(0.2, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto m = random_piecewise(rng);
    const GameParams p{rr(rng), cc(rng), std::nullopt};
    const auto roots = find_solutions(m, p, 0.0);
    ASSERT_FALSE(roots.empty());
    const auto q = quartet_from(roots);
    ASSERT_LE(q.u_m, q.u_mrt) << trial;
    ASSERT_LE(q.u_Mlt, q.u_M) << trial;
    ASSERT_LE(q.u_m, q.u_M) << trial;
    ASSERT_TRUE(roots.front().left_transversal) << trial;
    ASSERT_TRUE(roots.back().right_transversal) << trial;
  }
}

TEST(Roots, ResidualWithinToleranceAndSandwiched) {
  std::mt19937_64 rng(43);
  const double tol = 1e-9;
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = random_piecewise(rng);
    const GameParams p{1.0, 1.0, std::nullopt};
    for (const auto& s : find_solutions(m, p, 0.0)) {
      ASSERT_LE(std::abs(residual(m, p, 0.0, s.u)), tol);
      if (s.segment) continue;
      // only roots where g crosses are bracketed; tangential ones touch zero
      if (!transversal(s)) continue;
      ASSERT_LE(residual(m, p, 0.0, s.u - tol) * residual(m, p, 0.0, s.u + tol), 0.0) << trial;
    }
  }
}

TEST(Roots, ClassMatchesFlags) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = random_piecewise(rng);
    const GameParams p{1.0, 1.0, std::nullopt};
    for (const auto& s : find_solutions(m, p, 0.0)) {
      if (s.clazz == RootClass::flat_segment) continue;
      ASSERT_EQ(s.clazz == RootClass::increasing_transversal, s.left_transversal && s.right_transversal);
      ASSERT_EQ(s.clazz == RootClass::decreasing_transversal, s.left_reversed && s.right_reversed);
      if (s.alpha && *s.alpha > 1.0) ASSERT_EQ(s.clazz, RootClass::decreasing_transversal);
    }
  }
}

TEST(Roots, UniqueRootIsIncreasing) {
  std::mt19937_64 rng(45);
  int unique = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = random_piecewise(rng);
    const GameParams p{1.0, 1.0, std::nullopt};
    const auto roots = find_solutions(m, p, 0.0);
    if (roots.size() != 1 || roots[0].segment) continue;
    ++unique;
    ASSERT_EQ(roots[0].clazz, RootClass::increasing_transversal) << trial;
  }
  EXPECT_GT(unique, 50);
  const auto u = preset("uniform02");
  const auto roots = find_solutions(u.model, u.params, 0.0);
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_EQ(roots[0].clazz, RootClass::increasing_transversal);
  EXPECT_NEAR(*roots[0].alpha, 0.5, 1e-12);
}

TEST(Roots, SmallShiftRemovesTangency) {
  const auto s = preset("example-5.6");
  bool found = false;
  for (int k = 1; k <= 100 && !found; ++k) {
    const auto roots = find_solutions(s.model.shifted(1e-3 * k), s.params, 0.0);
    found = std::all_of(roots.begin(), roots.end(), transversal);
  }
  EXPECT_TRUE(found);
}

TEST(Flow, TentMinimalJumpsAtHorizon) {
  const auto t = tent();
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.9, 1.0};
  const auto f = flow(t.model, t.params, FlowKind::minimal, grid);
  EXPECT_EQ(f.values.size(), grid.size());
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) EXPECT_NEAR(f.values[j], 0.0, 1e-9);
  EXPECT_NEAR(f.values.back(), 1.0, 1e-9);
  const auto chk = verify_flow(t.model, t.params, f);
  EXPECT_TRUE(chk.ok);
  EXPECT_LE(chk.max_residual, 1e-9);
}

TEST(Flow, SmoothTwoTypeMaximalIsOne) {
  const auto s = preset("example-5.6");
  const auto f = flow(s.model, s.params, FlowKind::maximal, {0.0, 0.3, 0.6, 0.9});
  for (double v : f.values) EXPECT_NEAR(v, 1.0, 1e-9);
}

TEST(Flow, SingletonGridAndErrors) {
  const auto t = tent();
  const auto f = flow(t.model, t.params, FlowKind::maximal, {0.5});
  ASSERT_EQ(f.values.size(), 1u);
  EXPECT_NEAR(f.values[0], 1.0, 1e-9);
  EXPECT_THROW(flow(t.model, t.params, FlowKind::minimal, {0.5, 0.5}), ConfigError);
  EXPECT_THROW(flow(t.model, t.params, FlowKind::custom, {0.5}), ConfigError);
}

TEST(Flow, MonotoneOnEveryPreset) {
  std::vector<double> grid;
  for (int j = 0; j <= 24; ++j) grid.push_back(j / 20.0);
  for (const auto& id : preset_ids()) {
    const auto s = preset(id);
    for (auto kind : {FlowKind::minimal, FlowKind::maximal}) {
      const auto f = flow(s.model, s.params, kind, grid);
      EXPECT_TRUE(verify_flow(s.model, s.params, f).monotone) << id;
    }
  }
}

TEST(VerifyFlow, PerturbedValueIsFlagged) {
  const auto t = tent();
  auto f = flow(t.model, t.params, FlowKind::minimal, {0.0, 0.5});
  f.values[0] += 0.1;
  const auto chk = verify_flow(t.model, t.params, f);
  EXPECT_NEAR(chk.max_residual, std::abs(residual(t.model, t.params, kRightLimitOffset, 0.1)), 1e-12);
  EXPECT_FALSE(chk.ok);
  const auto empty = verify_flow(t.model, t.params, MfFlow{});
  EXPECT_TRUE(empty.ok);
  EXPECT_EQ(empty.max_residual, 0.0);
}
