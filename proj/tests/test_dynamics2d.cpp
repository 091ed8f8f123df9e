#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tracksim/dynamics2d.hpp"
#include "tracksim/wheel_kinematics.hpp"

namespace tracksim {
namespace {

FlatSimConfig base_config() {
  FlatSimConfig cfg;
  cfg.tm.friction_mu = 0.1;
  return cfg;
}

TEST(FlatRhs, PureRollingStraightLeavesOnlyRollingResistance) {
  const FlatSimConfig cfg = base_config();
  const double w = 4.0;
  State2D s;
  s.vx_b = w * cfg.vp.sprocket_radius;
  const auto d = flat_rhs(s, {w, w}, cfg);
  EXPECT_NEAR(d[4], 0.0, 1e-12);  // vy_dot
  EXPECT_NEAR(d[5], 0.0, 1e-12);  // wz_dot
  const double expected = -cfg.vp.mass * cfg.gravity * cfg.vp.rolling_coeff;
  EXPECT_NEAR(d[3], expected / cfg.vp.mass, 1e-9);
  EXPECT_LT(d[3], 0.0);
}

TEST(FlatRhs, MirrorSymmetry) {
  const FlatSimConfig cfg = base_config();
  State2D s;
  s.vx_b = 0.3;
  s.vy_b = 0.07;
  s.wz = 0.4;
  const auto d = flat_rhs(s, {2.0, 5.0}, cfg);
  State2D m;
  m.vx_b = 0.3;
  m.vy_b = -0.07;
  m.wz = -0.4;
  const auto dm = flat_rhs(m, {5.0, 2.0}, cfg);
  EXPECT_NEAR(d[3], dm[3], 1e-10);
  EXPECT_NEAR(d[4], -dm[4], 1e-10);
  EXPECT_NEAR(d[5], -dm[5], 1e-10);
}

TEST(FlatRhs, DegenerateSprocketPropagates) {
  const FlatSimConfig cfg = base_config();
  State2D moving;
  moving.vx_b = 0.3;  // sliding patches but a stationary sprocket
  EXPECT_THROW(flat_rhs(moving, {0.0, 1.0}, cfg), DegenerateSprocketError);
}

TEST(FlatRhs, FrictionlessCoastingConservesMomentum) {
  FlatSimConfig cfg = base_config();
  cfg.tm.friction_mu = 0.0;
  cfg.vp.rolling_coeff = 0.0;
  State2D s;
  s.vx_b = 0.5;
  s.vy_b = 0.1;
  s.wz = 0.3;
  const auto d = flat_rhs(s, {4.0, 4.0}, cfg);
  // Body-frame rates reduce to the pure rotation coupling terms.
  EXPECT_NEAR(d[3], s.wz * s.vy_b, 1e-12);
  EXPECT_NEAR(d[4], -s.wz * s.vx_b, 1e-12);
  EXPECT_NEAR(d[5], 0.0, 1e-12);
}

TEST(SimulateFlat, ZeroCommandFromRestStaysPut) {
  const FlatSimConfig cfg = base_config();
  const SimTrace trace =
      simulate_flat(State2D{}, [](double) { return WheelSpeeds{0.0, 0.0}; }, 2.0, cfg);
  const SimTraceRow& last = trace.rows.back();
  EXPECT_NEAR(last.x, 0.0, 1e-3);
  EXPECT_NEAR(last.y, 0.0, 1e-3);
  EXPECT_NEAR(last.phi, 0.0, 1e-3);
}

TEST(SimulateFlat, StraightCommandHasNoHeadingDrift) {
  const FlatSimConfig cfg = base_config();
  const SimTrace trace =
      simulate_flat(State2D{}, [](double) { return WheelSpeeds{4.0, 4.0}; }, 5.0, cfg);
  EXPECT_NEAR(trace.rows.back().phi, 0.0, 1e-9);
  EXPECT_NEAR(trace.rows.back().y, 0.0, 1e-9);
  EXPECT_GT(trace.rows.back().x, 0.5);
}

TEST(SimulateFlat, SteadyTurnReachedWithinTwoSeconds) {
  const FlatSimConfig cfg = base_config();
  FlatSimulator sim(cfg);
  sim.reset(State2D{});
  const WheelSpeeds cmd{2.0, 5.0};
  double t = 0.0;
  while (t < 2.0) {
    sim.tick(cmd);
    t = sim.time();
  }
  const auto d = flat_rhs(sim.state(), cmd, cfg);
  EXPECT_LT(std::abs(d[3]), 1e-3);
  EXPECT_LT(std::abs(d[4]), 1e-3);
  EXPECT_LT(std::abs(d[5]), 1e-3);
}

TEST(SimulateFlat, MirroredCommandsMirrorTrajectory) {
  const FlatSimConfig cfg = base_config();
  auto cmd = [](double t) {
    return t < 2.0 ? WheelSpeeds{3.0, 5.0} : WheelSpeeds{5.0, 2.0};
  };
  auto cmd_m = [](double t) {
    return t < 2.0 ? WheelSpeeds{5.0, 3.0} : WheelSpeeds{2.0, 5.0};
  };
  const SimTrace a = simulate_flat(State2D{}, cmd, 4.0, cfg);
  const SimTrace b = simulate_flat(State2D{}, cmd_m, 4.0, cfg);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (size_t i = 0; i < a.rows.size(); i += 50) {
    EXPECT_NEAR(a.rows[i].x, b.rows[i].x, 1e-9);
    EXPECT_NEAR(a.rows[i].y, -b.rows[i].y, 1e-9);
    EXPECT_NEAR(a.rows[i].phi, -b.rows[i].phi, 1e-9);
  }
}

TEST(SimulateFlat, CoastingDissipatesKineticEnergy) {
  const FlatSimConfig cfg = base_config();
  FlatSimulator sim(cfg);
  State2D s;
  s.vx_b = 0.6;
  s.vy_b = 0.1;
  s.wz = 0.5;
  sim.reset(s);
  auto energy = [&](const State2D& q) {
    return 0.5 * cfg.vp.mass * (q.vx_b * q.vx_b + q.vy_b * q.vy_b) +
           0.5 * cfg.vp.inertia_zz * q.wz * q.wz;
  };
  double prev = energy(sim.state());
  for (int k = 0; k < 200; ++k) {
    sim.tick({0.0, 0.0});
    const double cur = energy(sim.state());
    EXPECT_LE(cur, prev + 1e-9);
    prev = cur;
  }
}

TEST(SimulateFlat, StepHalvingConverges) {
  FlatSimConfig coarse = base_config();
  coarse.dt_sim = 1e-3;
  FlatSimConfig fine = base_config();
  fine.dt_sim = 5e-4;
  // Start near the steady turn so no rolling-resistance sign crossing (a
  // genuine rhs discontinuity) pollutes the convergence measurement.
  State2D s;
  s.vx_b = 0.3;
  s.wz = 0.2;
  auto cmd = [](double) { return WheelSpeeds{3.0, 5.0}; };
  const SimTrace a = simulate_flat(s, cmd, 2.0, coarse);
  const SimTrace b = simulate_flat(s, cmd, 2.0, fine);
  EXPECT_NEAR(a.rows.back().x, b.rows.back().x, 1e-6);
  EXPECT_NEAR(a.rows.back().y, b.rows.back().y, 1e-6);
  EXPECT_NEAR(a.rows.back().phi, b.rows.back().phi, 1e-6);
}

TEST(SimulateFlat, NoiseSeedReproducible) {
  FlatSimConfig cfg = base_config();
  cfg.actuator_noise_std = 0.02;
  cfg.rng_seed = 9;
  auto cmd = [](double) { return WheelSpeeds{3.0, 4.0}; };
  const SimTrace a = simulate_flat(State2D{}, cmd, 1.0, cfg);
  const SimTrace b = simulate_flat(State2D{}, cmd, 1.0, cfg);
  EXPECT_EQ(a.rows.back().x, b.rows.back().x);
  EXPECT_EQ(a.rows.back().y, b.rows.back().y);
}

TEST(SimulateFlat, Rk4GlobalOrderOnSmoothRun) {
  // dt-halving sweep against a dt/16 reference on a smooth turning run.
  auto final_state = [&](double dt) {
    FlatSimConfig cfg = base_config();
    cfg.dt_sim = dt;
    cfg.control_dt = 0.08;  // common multiple of all dt used
    FlatSimulator sim(cfg);
    State2D s;
    s.vx_b = 0.3;
    sim.reset(s);
    while (sim.time() < 1.99) sim.tick({3.0, 5.0});
    return sim.state().to_vector();
  };
  const auto ref = final_state(0.08 / 16);
  const double e1 = (final_state(0.08 / 2) - ref).norm();
  const double e2 = (final_state(0.08 / 4) - ref).norm();
  const double order = std::log2(e1 / e2);
  EXPECT_GT(order, 3.8);
}

}  // namespace
}  // namespace tracksim
