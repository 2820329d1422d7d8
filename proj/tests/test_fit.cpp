#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "jamming/fit.hpp"
#include "jamming/rng.hpp"
#include "jamming/simplex.hpp"
#include "support.hpp"

using namespace jamming;
using testing_support::synthetic;

namespace {

FitSpec rate_and_c(double amplitude) {
  FitSpec spec;
  spec.amplitude = ParameterSetting::fixed(amplitude);
  return spec;
}

}  // namespace

TEST(ModelMean, Examples) {
  EXPECT_EQ(model_mean(0, 14e3, 270, 3200), 0.0);
  EXPECT_NEAR(model_mean(INFINITY, 14e3, 270, 3200), 3200 * std::log(271.0) / 270, 1e-12);
  EXPECT_NEAR(model_mean(INFINITY, 14e3, 270, 3200), 66.40, 0.005);
  for (const double t : {1e-5, 1e-4, 1e-3}) EXPECT_NEAR(model_mean(t, 14e3, 1e-9, 10), 10 * (1 - std::exp(-14e3 * t)), 1e-7);
  EXPECT_THROW(model_mean(1, 0, 1, 1), std::invalid_argument);
  EXPECT_THROW(model_mean(1, 1, 0, 1), std::invalid_argument);
  EXPECT_THROW(model_mean(1, 1, 1, 0), std::invalid_argument);
  EXPECT_THROW(model_mean(-1, 1, 1, 1), std::invalid_argument);
}

TEST(Simplex, Rosenbrock) {
  const auto rosen = [](const std::vector<double>& x) {
    return 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1 - x[0]) * (1 - x[0]);
  };
  const auto r = nelder_mead(rosen, {-1.2, 1.0});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
}

TEST(Fit, NoiselessRecovery) {
  const auto series = synthetic(14e3, 270, 3200, 0.0, 1);
  const auto r = fit(series, rate_and_c(3200));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.rate / 14e3, 1.0, 0.01);
  EXPECT_NEAR(r.neighbors / 270, 1.0, 0.05);
  EXPECT_EQ(r.amplitude, 3200.0);
}

// With 2% noise on 30 points the rate estimate has a spread of a few
// percent, so recovery is a statement about most realizations.
TEST(Fit, NoisyRecovery) {
  const int seeds = 200;
  int rate_ok = 0;
  int c_ok = 0;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto series = synthetic(14e3, 270, 3200, 0.02, 1000 + seed);
    const auto r = fit(series, rate_and_c(3200));
    EXPECT_LE(r.sse, sum_squared_residuals(series, 14e3, 270, 3200));
    rate_ok += std::abs(r.rate / 14e3 - 1.0) <= 0.05;
    c_ok += std::abs(r.neighbors / 270 - 1.0) <= 0.25;
  }
  EXPECT_GE(rate_ok, 0.7 * seeds);
  EXPECT_GE(c_ok, 0.99 * seeds);
}

TEST(Fit, PureExponential) {
  TimeSeries s;
  for (int i = 0; i < 30; ++i) {
    const double t = 1e-5 * std::pow(100.0, i / 29.0);
    s.points.push_back({t, model_mean(t, 14e3, 1e-6, 3200)});
  }
  FitSpec spec;
  spec.neighbors = ParameterSetting::fixed(1e-6);
  spec.amplitude = ParameterSetting::fixed(3200);
  const auto r = fit(s, spec);
  EXPECT_NEAR(r.rate / 14e3, 1.0, 1e-3);
}

TEST(Fit, AllThreeFree) {
  const auto series = synthetic(5e3, 20, 500, 0.0, 6, 40);
  const auto r = fit(series, FitSpec{});
  EXPECT_LT(r.sse, 1e-6);
  EXPECT_NEAR(r.rate / 5e3, 1.0, 0.01);
}

TEST(Fit, ReportedSseNeverExceedsStarts) {
  const auto series = synthetic(14e3, 270, 3200, 0.02, 7);
  const auto r = fit(series, rate_and_c(3200));
  ASSERT_FALSE(r.start_sse.empty());
  for (const double s : r.start_sse) EXPECT_LE(r.sse, s);
  EXPECT_NEAR(r.sse, sum_squared_residuals(series, r.rate, r.neighbors, r.amplitude), 1e-9 * r.sse);
}

TEST(Fit, PerturbationDoesNotImprove) {
  const auto series = synthetic(14e3, 270, 3200, 0.02, 8);
  const auto r = fit(series, rate_and_c(3200));
  for (const double f : {0.99, 1.01}) {
    EXPECT_GE(sum_squared_residuals(series, r.rate * f, r.neighbors, r.amplitude), r.sse);
    EXPECT_GE(sum_squared_residuals(series, r.rate, r.neighbors * f, r.amplitude), r.sse);
  }
}

TEST(Fit, ScaleInvariance) {
  const auto series = synthetic(14e3, 270, 3200, 0.02, 9);
  const auto base = fit(series, rate_and_c(3200));
  const double k = 3.0;
  TimeSeries scaled = series;
  for (auto& p : scaled.points) p.y *= k;
  const auto r = fit(scaled, rate_and_c(3200 * k));
  EXPECT_NEAR(r.rate / base.rate, 1.0, 1e-4);
  EXPECT_NEAR(r.neighbors / base.neighbors, 1.0, 1e-3);
  EXPECT_NEAR(r.sse / (k * k * base.sse), 1.0, 1e-4);
}

TEST(Fit, Weighted) {
  auto series = synthetic(14e3, 270, 3200, 0.0, 10);
  series.weights.assign(series.points.size(), 2.0);
  FitSpec spec = rate_and_c(3200);
  spec.weighted = true;
  const auto r = fit(series, spec);
  EXPECT_NEAR(r.rate / 14e3, 1.0, 0.01);
  series.weights.clear();
  EXPECT_THROW(fit(series, spec), std::invalid_argument);
}

TEST(Fit, RejectsBadInput) {
  TimeSeries two;
  two.points = {{0.0, 0.0}, {1e-4, 1.0}};
  EXPECT_THROW(fit(two, FitSpec{}), std::invalid_argument);
  TimeSeries unsorted;
  unsorted.points = {{0.0, 0.0}, {2e-4, 1.0}, {1e-4, 2.0}};
  EXPECT_THROW(fit(unsorted, FitSpec{}), std::invalid_argument);
  TimeSeries constant;
  constant.points = {{1e-5, 4.0}, {1e-4, 4.0}, {1e-3, 4.0}};
  EXPECT_THROW(fit(constant, FitSpec{}), std::domain_error);
  FitSpec all_fixed;
  all_fixed.rate = ParameterSetting::fixed(1);
  all_fixed.neighbors = ParameterSetting::fixed(1);
  all_fixed.amplitude = ParameterSetting::fixed(1);
  EXPECT_THROW(fit(synthetic(1e4, 1, 1, 0, 1), all_fixed), std::invalid_argument);
  FitSpec missing;
  missing.rate.free = false;
  EXPECT_THROW(fit(synthetic(1e4, 1, 1, 0, 1), missing), std::invalid_argument);
}
