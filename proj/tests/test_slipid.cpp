#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>

#include "oracles.hpp"
#include "tracksim/slip_identification.hpp"
#include "tracksim/wheel_kinematics.hpp"

namespace tracksim {
namespace {

// Reduced sweep keeps the unit tests quick; the acceptance suite runs the
// full 0.65 rad/s protocol.
SweepSpec quick_sweep() {
  SweepSpec s;
  s.step = 2.0;
  return s;
}

FlatSimConfig flat_config(double mu) {
  FlatSimConfig cfg;
  cfg.tm.friction_mu = mu;
  return cfg;
}

TEST(SweepSpec, GridCountsMatchProtocol) {
  EXPECT_EQ(SweepSpec{}.grid().size(), 31u);  // floor(20/0.65) + 1
  EXPECT_EQ(quick_sweep().grid().size(), 11u);
}

TEST(CollectFlat, SymmetricPairsDriveStraight) {
  const SlipDataset ds = collect_dataset_flat(flat_config(0.1), quick_sweep(), 2);
  int straight = 0;
  for (const auto& r : ds.records) {
    if (r.wl == r.wr && r.alpha_valid) {
      EXPECT_LT(std::abs(r.alpha), 0.01);
      ++straight;
    }
  }
  EXPECT_GT(straight, 2);
}

TEST(CollectFlat, CandidateCountMinusSkips) {
  const SlipDataset ds = collect_dataset_flat(flat_config(0.1), quick_sweep(), 2);
  const size_t grid = quick_sweep().grid().size();
  EXPECT_EQ(ds.records.size(), grid * grid);
  EXPECT_GT(ds.skipped_alpha, 0);  // pivot rows have undefined alpha
  int valid = 0;
  for (const auto& r : ds.records) valid += r.alpha_valid ? 1 : 0;
  EXPECT_EQ(valid + ds.skipped_alpha, static_cast<int>(ds.records.size()));
}

TEST(CollectFlat, OuterTrackSlipsNegativeInTurns) {
  // In a forward left turn the outer (right) track generates traction and
  // therefore slides backward relative to the ground: beta_R < 0 < beta_L.
  const SlipDataset ds = collect_dataset_flat(flat_config(0.1), quick_sweep(), 2);
  int checked = 0;
  for (const auto& r : ds.records) {
    if (r.wl >= 2.0 && r.wr >= r.wl + 4.0) {
      EXPECT_LT(r.beta_r, 0.0) << r.wl << "," << r.wr;
      EXPECT_GT(r.beta_l, r.beta_r);
      ++checked;
    }
  }
  EXPECT_GE(checked, 3);
}

TEST(Dataset, JsonRoundTrip) {
  const SlipDataset ds = collect_dataset_flat(flat_config(0.1), quick_sweep(), 2);
  const std::string path = testing::TempDir() + "slip_dataset.json";
  ds.save(path);
  const SlipDataset back = SlipDataset::load(path);
  ASSERT_EQ(back.records.size(), ds.records.size());
  EXPECT_EQ(back.skipped_alpha, ds.skipped_alpha);
  EXPECT_EQ(back.records[5].beta_l, ds.records[5].beta_l);
  std::remove(path.c_str());
}

TEST(GridRegressor, ConstantDatasetReturnsConstant) {
  SlipDataset ds;
  for (double wl = -2; wl <= 2; wl += 1)
    for (double wr = -2; wr <= 2; wr += 1) {
      SlipRecord r;
      r.wl = wl;
      r.wr = wr;
      r.alpha = 0.123;
      r.alpha_valid = true;
      r.vx_sign = 1;
      ds.records.push_back(r);
    }
  const GridRegressor g = fit_grid_regressor(ds, SlipChannel::kAlpha,
                                             VxBranch::kForward);
  oracles::Uniform rnd(3);
  for (int i = 0; i < 50; ++i)
    EXPECT_NEAR(g.predict(rnd(-2, 2), rnd(-2, 2)), 0.123, 1e-6);
}

TEST(GridRegressor, OutsideHullClampsAndFlags) {
  SlipDataset ds;
  for (double wl = -2; wl <= 2; wl += 1)
    for (double wr = -2; wr <= 2; wr += 1) {
      SlipRecord r;
      r.wl = wl;
      r.wr = wr;
      r.beta_l = 0.05 * wl;
      ds.records.push_back(r);
    }
  const GridRegressor g =
      fit_grid_regressor(ds, SlipChannel::kBetaLeft, VxBranch::kBoth);
  bool extrapolated = false;
  const double inside = g.predict(2.0, 0.0, &extrapolated);
  EXPECT_FALSE(extrapolated);
  const double outside = g.predict(7.0, 0.0, &extrapolated);
  EXPECT_TRUE(extrapolated);
  EXPECT_EQ(inside, outside);
}

TEST(GridRegressor, InsufficientDataThrows) {
  SlipDataset ds;
  SlipRecord r;
  r.alpha_valid = true;
  r.vx_sign = 1;
  ds.records.assign(3, r);
  EXPECT_THROW(fit_grid_regressor(ds, SlipChannel::kAlpha, VxBranch::kForward),
               InsufficientDataError);
}

TEST(GridRegressor, BoundedByTrainingValues) {
  const SlipDataset ds = collect_dataset_flat(flat_config(0.1), quick_sweep(), 2);
  const GridRegressor g =
      fit_grid_regressor(ds, SlipChannel::kBetaLeft, VxBranch::kBoth);
  double lo = 1e9, hi = -1e9;
  for (const auto& r : ds.records) {
    lo = std::min(lo, r.beta_l);
    hi = std::max(hi, r.beta_l);
  }
  const double margin = 0.35 * (hi - lo);  // smoothing can overshoot mildly
  for (double v : g.values) {
    EXPECT_GT(v, lo - margin);
    EXPECT_LT(v, hi + margin);
  }
}

TEST(FitFlatModels, HeldOutRSquaredHigh) {
  const SlipDataset ds = collect_dataset_flat(flat_config(0.1), quick_sweep(), 2);
  const FitReport rep = evaluate_fit(ds);
  EXPECT_GT(rep.r2_beta_l, 0.98);
  EXPECT_GT(rep.r2_beta_r, 0.98);
  EXPECT_GT(rep.r2_alpha, 0.9);
}

TEST(PredictSlip, BranchSplitIsDisjoint) {
  const SlipDataset ds = collect_dataset_flat(flat_config(0.1), quick_sweep(), 2);
  int fwd = 0, bwd = 0;
  for (const auto& r : ds.records) {
    if (!r.alpha_valid) continue;
    (r.vx_sign > 0 ? fwd : bwd)++;
  }
  EXPECT_GT(fwd, 10);
  EXPECT_GT(bwd, 10);
  EXPECT_EQ(fwd + bwd + ds.skipped_alpha, static_cast<int>(ds.records.size()));
}

TEST(PredictSlip, SymmetricWheelsNearZeroAlpha) {
  const SlipDataset ds = collect_dataset_flat(flat_config(0.1), quick_sweep(), 2);
  const SlipModelSet models = fit_flat_models(ds);
  for (double w : {2.0, 4.0, 6.0}) {
    const SlipParams p = predict_slip(models, {w, w}, 1);
    EXPECT_LT(std::abs(p.alpha), 0.02);
    EXPECT_LT(std::abs(p.beta_l - p.beta_r),
              std::max(0.1 * std::abs(p.beta_l), 5e-3));
  }
}

TEST(PredictSlip, ArityMismatchThrows) {
  const SlipDataset ds = collect_dataset_flat(flat_config(0.1), quick_sweep(), 2);
  const SlipModelSet models = fit_flat_models(ds);
  EXPECT_THROW(predict_slip(models, {2.0, 3.0}, 1, Eigen::Vector3d(0, 0, -1)),
               ModelArityMismatchError);
}

TEST(ExpModel, RecoversSyntheticParameters) {
  SlipDataset ds;
  const VehicleParams vp;
  const double c1 = 0.04, c2 = 1.7;
  for (double wl = -8; wl <= 8; wl += 1.0)
    for (double wr = -8; wr <= 8; wr += 1.0) {
      if (wl == wr) continue;
      SlipRecord r;
      r.wl = wl;
      r.wr = wr;
      const double v = vp.sprocket_radius * (wl + wr) / 2;
      const double wz = vp.sprocket_radius * (wr - wl) / vp.track_gauge;
      const double radius = v / wz;
      const double s = radius > 0 ? 1.0 : (radius < 0 ? -1.0 : 0.0);
      r.beta_l = -c1 * s * std::exp(-c2 * std::abs(radius));
      ds.records.push_back(r);
    }
  const ExpSlipModel m = fit_exp_model(ds, SlipChannel::kBetaLeft, vp);
  EXPECT_NEAR(m.c1, c1, 1e-6);
  EXPECT_NEAR(m.c2, c2, 1e-6);
  EXPECT_LT(m.rms, 1e-9);
}

TEST(ExpModel, OddAndDecaying) {
  ExpSlipModel m;
  m.c1 = 0.05;
  m.c2 = 2.0;
  for (double radius : {0.1, 0.5, 1.0, 3.0}) {
    EXPECT_NEAR(m.eval(radius), -m.eval(-radius), 1e-15);
    EXPECT_GT(std::abs(m.eval(radius)), std::abs(m.eval(radius + 0.1)));
  }
  EXPECT_NEAR(m.eval(100.0), 0.0, 1e-10);
  EXPECT_EQ(m.eval(0.0), 0.0);
}

TEST(ExpModel, DegenerateFitThrows) {
  SlipDataset ds;
  for (int i = 0; i < 10; ++i) {
    SlipRecord r;
    r.wl = 2.0;
    r.wr = 4.0;  // single radius, one sign
    r.beta_l = -0.01;
    ds.records.push_back(r);
  }
  EXPECT_THROW(fit_exp_model(ds, SlipChannel::kBetaLeft), DegenerateFitError);
}

TEST(ExpModel, LessFaithfulThanGridOnRealSweep) {
  const SlipDataset ds = collect_dataset_flat(flat_config(0.4), quick_sweep(), 2);
  const SlipModelSet grid = fit_flat_models(ds);
  const SlipModelSet expo = fit_exponential_models(ds);
  double grid_ss = 0.0, exp_ss = 0.0;
  int n = 0;
  for (const auto& r : ds.records) {
    const SlipParams pg = grid.predict({r.wl, r.wr}, r.vx_sign);
    const SlipParams pe = expo.predict({r.wl, r.wr}, r.vx_sign);
    grid_ss += (pg.beta_l - r.beta_l) * (pg.beta_l - r.beta_l);
    exp_ss += (pe.beta_l - r.beta_l) * (pe.beta_l - r.beta_l);
    ++n;
  }
  EXPECT_GE(std::sqrt(exp_ss / n), std::sqrt(grid_ss / n));
}

TEST(Models, JsonRoundTripPreservesPredictions) {
  const SlipDataset ds = collect_dataset_flat(flat_config(0.1), quick_sweep(), 2);
  const SlipModelSet models = fit_flat_models(ds);
  const std::string path = testing::TempDir() + "slip_models.json";
  models.save(path);
  const SlipModelSet back = SlipModelSet::load(path);
  oracles::Uniform rnd(5);
  for (int i = 0; i < 100; ++i) {
    const WheelSpeeds w{rnd(-10, 10), rnd(-10, 10)};
    const SlipParams a = models.predict(w, 1);
    const SlipParams b = back.predict(w, 1);
    EXPECT_EQ(a.alpha, b.alpha);
    EXPECT_EQ(a.beta_l, b.beta_l);
    EXPECT_EQ(a.beta_r, b.beta_r);
  }
  std::remove(path.c_str());
}

TEST(Models, DeterministicFit) {
  const SlipDataset ds = collect_dataset_flat(flat_config(0.1), quick_sweep(), 2);
  const SlipModelSet a = fit_flat_models(ds);
  const SlipModelSet b = fit_flat_models(ds);
  oracles::Uniform rnd(7);
  for (int i = 0; i < 50; ++i) {
    const WheelSpeeds w{rnd(-10, 10), rnd(-10, 10)};
    EXPECT_EQ(a.predict(w, 1).alpha, b.predict(w, 1).alpha);
  }
}

TEST(SlopeIdentification, SmallSweepTrainsAndPredicts) {
  SlopeSimConfig cfg;
  cfg.mode = LoadMode::kUniform;
  cfg.tm.friction_mu = 0.6;
  SweepSpec sweep;
  sweep.step = 4.0;  // 6 x 6 wheel grid
  sweep.hold = 1.5;
  const SlipDataset ds =
      collect_dataset_slope(cfg, sweep, {0.0, -0.15, -0.3}, {0.0, M_PI}, 2);
  ASSERT_GT(ds.records.size(), 60u);
  EXPECT_TRUE(ds.records.front().has_g);

  const SlipModelSet models = fit_slope_models(ds);
  EXPECT_EQ(models.input_arity(), 5);
  const SlipParams p =
      models.predict({4.0, 6.0}, 1, Eigen::Vector3d(0.1, 0.0, -0.99).normalized());
  EXPECT_TRUE(std::isfinite(p.alpha));
  EXPECT_THROW(models.predict({4.0, 6.0}, 1), ModelArityMismatchError);
}

}  // namespace
}  // namespace tracksim
