#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mfstop/config.hpp"
#include "mfstop/signal_model.hpp"

using namespace mfstop;

namespace {

SignalModel tent() { return preset("example-6.2").model; }
SignalModel two_atom() { return preset("example-5.1").model; }

std::vector<SignalModel> all_models() {
  std::vector<SignalModel> out;
  for (const auto& id : preset_ids()) out.push_back(preset(id).model);
  out.push_back(SignalModel::with_default_post(PiecewiseLinearCdf({-1.0, 0.0, 0.5, 3.0}, {0.0, 0.2, 0.2, 1.0}), 1.0, 1.0));
  return out;
}

// Midpoint rule on a dyadic grid, so breakpoints at multiples of 1/8 fall on cell edges.
double density_mass(const SignalModel& m, double lo, double hi) {
  const double h = 1.0 / 131072.0;
  const auto steps = static_cast<long>((hi - lo) / h);
  double s = 0.0;
  for (long i = 0; i < steps; ++i) s += *m.density(0.0, lo + (i + 0.5) * h);
  return s * h;
}

}  // namespace

TEST(SignalModel, TentCdfAtQuarter) { EXPECT_DOUBLE_EQ(cdf_at(tent(), 0.0, 0.25), 0.125); }

TEST(SignalModel, TentCdfBelowSupport) { EXPECT_EQ(cdf_at(tent(), 0.0, -1.0), 0.0); }

TEST(SignalModel, TwoAtomCdfBetweenAtoms) { EXPECT_EQ(cdf_at(two_atom(), 0.0, 1.0), 0.5); }

TEST(SignalModel, TentDensityPeak) { EXPECT_EQ(*density_at(tent(), 0.0, 0.5), 2.0); }

TEST(SignalModel, TentDensityOutsideSupport) { EXPECT_EQ(*density_at(tent(), 0.0, 1.5), 0.0); }

TEST(SignalModel, SmoothTwoTypeDensityOnFirstBlock) {
  EXPECT_EQ(*density_at(preset("example-5.6").model, 0.0, 0.4), 4.0);
}

TEST(SignalModel, AtomsHaveNoDensity) { EXPECT_FALSE(density_at(two_atom(), 0.0, 0.5).has_value()); }

TEST(SignalModel, QuantileOfStepCdf) { EXPECT_EQ(quantile_at(two_atom(), 0.0, 0.3), 0.5); }

TEST(SignalModel, TentMedian) { EXPECT_DOUBLE_EQ(quantile_at(tent(), 0.0, 0.5), 0.5); }

TEST(SignalModel, QuantileAtZeroIsLeftEndOfSupport) {
  EXPECT_EQ(quantile_at(tent(), 0.0, 0.0), 0.0);
  EXPECT_EQ(quantile_at(two_atom(), 0.0, 0.0), 0.5);
  EXPECT_EQ(quantile_at(preset("example-5.8").model, 0.0, 0.0), 0.5);
  EXPECT_EQ(quantile_at(preset("example-5.6").model, 0.0, 0.0), 0.375);
}

TEST(SignalModel, SampleSignalsTransformsElementwise) {
  const std::vector<double> u{0.1, 0.6, 0.4, 0.9};
  EXPECT_EQ(sample_signals(two_atom(), 0.0, u), (std::vector<double>{0.5, 2.0, 0.5, 2.0}));
  EXPECT_TRUE(sample_signals(two_atom(), 0.0, std::vector<double>{}).empty());
  EXPECT_EQ(sample_signals(tent(), 0.0, std::vector<double>{0.5}), std::vector<double>{0.5});
}

TEST(SignalModel, GeneralizedInverseLaw) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const auto& m : all_models()) {
    for (int i = 0; i < 10000; ++i) {
      const double p = unif(rng);
      ASSERT_GE(m.cdf(0.0, m.quantile(0.0, p)), p - 1e-15) << m.kind() << " p=" << p;
    }
  }
}

TEST(SignalModel, QuantileOfCdfDoesNotExceedPoint) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unif(-0.5, 2.5);
  for (const auto& m : all_models()) {
    for (int i = 0; i < 10000; ++i) {
      const double y = unif(rng);
      const double p = m.cdf(0.0, y);
      if (p <= 0.0 || p >= 1.0) continue;
      ASSERT_LE(m.quantile(0.0, p), y + 1e-12) << m.kind() << " y=" << y;
    }
  }
}

TEST(SignalModel, CdfIsMonotoneWithLimits) {
  for (const auto& m : all_models()) {
    double prev = 0.0;
    for (double y = -3.0; y <= 6.0; y += 1e-3) {
      const double v = m.cdf(0.0, y);
      ASSERT_GE(v, prev);
      prev = v;
    }
    EXPECT_EQ(m.cdf(0.0, -1e9), 0.0);
    EXPECT_EQ(m.cdf(0.0, 1e9), 1.0);
  }
}

TEST(SignalModel, CdfIsRightContinuousAtAtoms) {
  const auto m = two_atom();
  EXPECT_EQ(m.cdf(0.0, 0.5), 0.5);
  EXPECT_EQ(m.cdf_left(0.0, 0.5), 0.0);
  EXPECT_EQ(m.cdf(0.0, 2.0), 1.0);
  EXPECT_EQ(m.cdf_left(0.0, 2.0), 0.5);
}

TEST(SignalModel, QuantilePathsIncreaseInTime) {
  for (const auto& m : all_models()) {
    for (double p = 0.0; p <= 1.0; p += 0.01) {
      double prev = -1e300;
      for (double t : {0.0, 0.3, 0.99, 1.0, 2.0}) {
        const double q = m.quantile(t, p);
        ASSERT_GE(q, prev) << m.kind();
        prev = q;
      }
    }
  }
}

TEST(SignalModel, DensitiesIntegrateToOne) {
  EXPECT_NEAR(density_mass(tent(), -0.5, 1.5), 1.0, 1e-9);
  EXPECT_NEAR(density_mass(preset("example-5.6").model, 0.0, 2.5), 1.0, 1e-9);
  EXPECT_NEAR(density_mass(preset("example-5.7").model, -0.5, 2.5), 1.0, 1e-9);
  EXPECT_NEAR(density_mass(preset("example-5.8").model, 0.0, 1.5), 1.0, 1e-9);
  EXPECT_NEAR(density_mass(preset("uniform02").model, -0.5, 2.5), 1.0, 1e-9);
}

TEST(SignalModel, PiecewiseDensityRejectsBadMass) {
  EXPECT_THROW(PiecewiseDensity({0.0, 1.0}, {2.0}), ConfigError);
  EXPECT_THROW(PiecewiseDensity({0.0, 1.0, 0.5}, {1.0, 1.0}), ConfigError);
  EXPECT_THROW(AtomicLaw({0.5, 2.0}, {0.5, 0.6}), ConfigError);
  EXPECT_THROW(UniformInterval(1.0, 1.0), ConfigError);
}

TEST(SignalModel, ShiftTranslatesTheCdfExactly) {
  const double eps = 0.003;
  for (const auto& m : all_models()) {
    const auto shifted = m.shifted(eps);
    for (double y = -1.0; y <= 3.0; y += 0.0137) ASSERT_EQ(shifted.cdf(0.0, y), m.cdf(0.0, y - eps)) << m.kind();
  }
}

TEST(SignalModel, AfterHorizonEveryoneSitsAtPostValue) {
  for (const auto& m : all_models()) {
    const double v = m.post_value();
    for (double t : {1.0, 1.5, 10.0}) {
      EXPECT_EQ(m.cdf(t, v), 1.0);
      EXPECT_EQ(m.cdf(t, std::nextafter(v, -1e300)), 0.0);
      EXPECT_EQ(m.cdf(t, v - 1.0), 0.0);
    }
  }
}

TEST(SignalModel, DefaultPostValueLiesAboveThreshold) {
  for (const auto& id : preset_ids()) {
    const auto spec = preset(id);
    EXPECT_GT(spec.model.post_value(), spec.params.r) << id;
  }
}

TEST(SignalModel, EmpiricalCdfIsCloseInKolmogorovDistance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const auto& m : all_models()) {
    std::vector<double> u(100000);
    for (auto& v : u) v = unif(rng);
    auto y = sample_signals(m, 0.0, u);
    std::sort(y.begin(), y.end());
    double dist = 0.0;
    const double n = static_cast<double>(y.size());
    std::size_t i = 0;
    while (i < y.size()) {
      std::size_t j = i;
      while (j < y.size() && y[j] == y[i]) ++j;
      // empirical c.d.f. just below and at y[i] against the model
      dist = std::max({dist, std::abs(m.cdf_left(0.0, y[i]) - i / n), std::abs(m.cdf(0.0, y[i]) - j / n)});
      i = j;
    }
    EXPECT_LT(dist, 0.01) << m.kind();
  }
}

TEST(SignalModel, AtomicEmpiricalMassesMatchWeights) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto m = two_atom();
  int low = 0;
  const int total = 100000;
  for (int i = 0; i < total; ++i) low += m.quantile(0.0, unif(rng)) == 0.5;
  EXPECT_NEAR(static_cast<double>(low) / total, 0.5, 0.01);
}

TEST(GameParams, Validation) {
  EXPECT_THROW((GameParams{1.0, 0.0, std::nullopt}.validate()), ConfigError);
  EXPECT_THROW((GameParams{1.0, 1.0, Count{0}}.validate()), ConfigError);
  EXPECT_NO_THROW((GameParams{1.0, 1.0, Count{1}}.validate()));
}
