#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tracksim/dynamics3d.hpp"
#include "tracksim/experiments.hpp"
#include "tracksim/rotation.hpp"
#include "tracksim/wheel_kinematics.hpp"

namespace tracksim {
namespace {

SlopeSimConfig base_config(LoadMode mode) {
  SlopeSimConfig cfg;
  cfg.mode = mode;
  cfg.tm.friction_mu = 0.6;
  return cfg;
}

State3D settle(SlopeSimulator& sim, const HeightField& hf, double seconds,
               const Pose2D& at = Pose2D{}) {
  sim.reset(initial_pose_on_terrain(hf, at.x, at.y, at.phi, SlopeSimConfig{}.vp));
  while (sim.time() < seconds) sim.tick({0.0, 0.0});
  return sim.state();
}

TEST(NormalForceUniform, NoPenetrationNoForce) {
  const HeightField hf = make_flat(5.0, 0.5);
  const SlopeSimConfig cfg = base_config(LoadMode::kUniform);
  State3D s = initial_pose_on_terrain(hf, 0, 0, 0, cfg.vp);
  s.p_com.z() += 0.01;  // hovering
  const WorldWrench w = normal_force_uniform(s, hf, cfg.cp, cfg.vp);
  EXPECT_EQ(w.force.norm(), 0.0);
}

TEST(NormalForceUniform, AlignedRestingHasNoMoment) {
  const HeightField hf = make_flat(5.0, 0.5);
  const SlopeSimConfig cfg = base_config(LoadMode::kUniform);
  State3D s = initial_pose_on_terrain(hf, 0, 0, 0.3, cfg.vp);
  s.p_com.z() -= 0.002;  // slight penetration, orientation matched
  const WorldWrench w = normal_force_uniform(s, hf, cfg.cp, cfg.vp);
  EXPECT_GT(w.force.z(), 0.0);
  EXPECT_LT(w.moment.norm(), 1e-9);
}

TEST(NormalForceUniform, SettledWeightBalance) {
  const HeightField hf = make_flat(5.0, 0.5);
  const SlopeSimConfig cfg = base_config(LoadMode::kUniform);
  SlopeSimulator sim(cfg, hf);
  const State3D s = settle(sim, hf, 2.0);
  const WorldWrench w = normal_force_uniform(s, hf, cfg.cp, cfg.vp);
  const double weight = cfg.vp.mass * cfg.gravity;
  EXPECT_NEAR(w.force.z(), weight, 1e-3 * weight);
}

TEST(PatchContacts, SettledWeightAndNearUniformPressure) {
  const HeightField hf = make_flat(5.0, 0.5);
  const SlopeSimConfig cfg = base_config(LoadMode::kNonuniform);
  SlopeSimulator sim(cfg, hf);
  const State3D s = settle(sim, hf, 2.0);
  const auto contacts = sim.contacts();
  double total = 0.0;
  const double sigma_uniform = uniform_pressure(cfg.vp, cfg.gravity);
  for (const auto& c : contacts) {
    total += c.f_n.z();
    EXPECT_NEAR(c.sigma, sigma_uniform, 0.05 * sigma_uniform);
  }
  const double weight = cfg.vp.mass * cfg.gravity;
  EXPECT_NEAR(total, weight, 1e-3 * weight);
}

TEST(PatchContacts, ZeroSpeedKeepsNominalStiffness) {
  const HeightField hf = make_flat(5.0, 0.5);
  const SlopeSimConfig cfg = base_config(LoadMode::kNonuniform);
  const TrackFootprint left = TrackFootprint::build(TrackSide::kLeft, cfg.vp);
  const TrackFootprint right = TrackFootprint::build(TrackSide::kRight, cfg.vp);
  State3D s = initial_pose_on_terrain(hf, 0, 0, 0, cfg.vp);
  s.p_com.z() -= 0.003;
  const auto contacts = patch_contacts_nonuniform(s, hf, cfg.cp, left, right, cfg.vp);
  // vx = 0: every patch sees k_lin; force = k_lin * (A_p/A_t) * rho.
  const double frac = cfg.vp.patch_area() / cfg.vp.track_area;
  for (const auto& c : contacts) {
    ASSERT_GT(c.penetration, 0.0);
    EXPECT_NEAR(c.f_n.z(), cfg.cp.k_lin * frac * c.penetration, 1e-9);
  }
}

TEST(PatchContacts, SpeedStiffnessAffineLaw) {
  // Max patch stiffness is affine in vx with slope K_t K_tp 2l.
  const HeightField hf = make_flat(5.0, 0.5);
  const SlopeSimConfig cfg = base_config(LoadMode::kNonuniform);
  const TrackFootprint left = TrackFootprint::build(TrackSide::kLeft, cfg.vp);
  const TrackFootprint right = TrackFootprint::build(TrackSide::kRight, cfg.vp);
  State3D s = initial_pose_on_terrain(hf, 0, 0, 0, cfg.vp);
  s.p_com.z() -= 0.003;

  const double l = cfg.vp.track_semilength;
  const double x_front = left.patch_centers.back().x();  // closest to +l
  double x_max = -1e9;
  for (const auto& p : left.patch_centers) x_max = std::max(x_max, p.x());
  (void)x_front;

  for (double vx : {0.2, 0.7, 1.4}) {
    s.v_body = Eigen::Vector3d(vx, 0, 0);
    const auto contacts =
        patch_contacts_nonuniform(s, hf, cfg.cp, left, right, cfg.vp);
    // Reconstruct each patch's stiffness from force / (penetration * frac).
    const double frac = cfg.vp.patch_area() / cfg.vp.track_area;
    double k_max = 0.0;
    for (const auto& c : contacts)
      if (c.penetration > 0)
        k_max = std::max(k_max, c.f_n.z() / (c.penetration * frac));
    const double expected = cfg.cp.k_lin * (1.0 + cfg.cp.k_speed * vx * (x_max + l));
    EXPECT_NEAR(k_max, expected, 1e-6 * expected);
    // The exact front-edge affine law K_t (1 + K_tp vx 2l) brackets it.
    EXPECT_LT(k_max, cfg.cp.k_lin * (1.0 + cfg.cp.k_speed * vx * 2.0 * l));
  }
}

TEST(PatchContacts, DownhillLoadsTheFront) {
  const HeightField hf = make_ramp(-0.25, 15.0, 0.5);
  const SlopeSimConfig cfg = base_config(LoadMode::kNonuniform);
  SlopeSimulator sim(cfg, hf);
  sim.reset(initial_pose_on_terrain(hf, 0, 0, 0, cfg.vp));
  while (sim.time() < 1.5) sim.tick({0.0, 0.0});
  const auto contacts = sim.contacts();
  double front = 0.0, rear = 0.0;
  for (const auto& c : contacts) (c.x_body > 0 ? front : rear) += c.f_n.norm();
  EXPECT_GT(front, rear);
}

TEST(PatchContacts, Unilaterality) {
  const HeightField hf = make_random_slope(3, 1.0, 6, 10.0, 0.4);
  const SlopeSimConfig cfg = base_config(LoadMode::kNonuniform);
  SlopeSimulator sim(cfg, hf);
  sim.reset(initial_pose_on_terrain(hf, 0, 0, 0.4, cfg.vp));
  const Twist2D tw{0.5, 0.2};
  const WheelSpeeds cmd = twist_to_wheels(tw.v, tw.wz, cfg.vp);
  while (sim.time() < 2.0) {
    sim.tick(cmd);
    for (const auto& c : sim.contacts()) EXPECT_GE(c.f_n.z(), 0.0);
  }
}

TEST(RollingResistance, SpecCases) {
  const HeightField hf = make_flat(5.0, 0.5);
  const SlopeSimConfig cfg = base_config(LoadMode::kNonuniform);
  SlopeSimulator sim(cfg, hf);
  settle(sim, hf, 2.0);
  const auto contacts = sim.contacts();
  EXPECT_EQ(rolling_resistance(contacts, 0.0, cfg.vp.rolling_coeff), 0.0);
  const double weight = cfg.vp.mass * cfg.gravity;
  const double rt = rolling_resistance(contacts, 0.5, cfg.vp.rolling_coeff);
  EXPECT_NEAR(rt, weight * cfg.vp.rolling_coeff, 0.01 * weight * cfg.vp.rolling_coeff);
  // Linear in the contact loads.
  auto doubled = contacts;
  for (auto& c : doubled) c.f_n *= 2.0;
  EXPECT_NEAR(rolling_resistance(doubled, 0.5, cfg.vp.rolling_coeff), 2.0 * rt, 1e-9);
}

TEST(SlopeRhs, SettlesToRestOnFlatGround) {
  for (LoadMode mode : {LoadMode::kUniform, LoadMode::kNonuniform}) {
    const HeightField hf = make_flat(5.0, 0.5);
    const SlopeSimConfig cfg = base_config(mode);
    SlopeSimulator sim(cfg, hf);
    const State3D s = settle(sim, hf, 2.0);
    EXPECT_LT(s.v_body.norm(), 1e-3) << "mode " << static_cast<int>(mode);
    EXPECT_LT(s.w_body.norm(), 1e-2);
  }
}

TEST(SlopeRhs, HoldsPositionOnRampWithHighFriction) {
  const HeightField hf = make_ramp(-0.3, 15.0, 0.5);
  SlopeSimConfig cfg = base_config(LoadMode::kUniform);
  cfg.tm.friction_mu = 0.6;  // tan(0.3) = 0.31 < 0.6
  SlopeSimulator sim(cfg, hf);
  const State3D s0 = initial_pose_on_terrain(hf, 0, 0, 0, cfg.vp);
  sim.reset(s0);
  while (sim.time() < 5.0) sim.tick({0.0, 0.0});
  const double drift = (sim.state().p_com.head<2>() - s0.p_com.head<2>()).norm();
  EXPECT_LT(drift, 0.05);
}

TEST(SlopeRhs, FlatUniformMatchesPlanarModelOnChicane) {
  // Open-loop chicane at low speed: the 3D model on flat ground must track
  // the planar distributed model to centimeter level over 10 s.
  const ChicaneParams chicane{0.2, 0.3, 2.0, 12.0, 20.0};
  const VehicleParams vp;
  auto cmd = [&](double t) {
    const Twist2D tw = chicane_velocity(chicane, t);
    return twist_to_wheels(tw.v, tw.wz, vp);
  };

  FlatSimConfig flat_cfg;
  flat_cfg.tm.friction_mu = 0.6;
  const SimTrace planar = simulate_flat(State2D{}, cmd, 10.0, flat_cfg);

  SlopeSimConfig cfg = base_config(LoadMode::kUniform);
  cfg.tm.friction_mu = 0.6;
  const HeightField hf = make_flat(8.0, 0.5);
  const SlopeTrace slope =
      simulate_slope(initial_pose_on_terrain(hf, 0, 0, 0, cfg.vp), cmd, 10.0, cfg, hf);

  ASSERT_EQ(planar.rows.size(), slope.rows.size());
  for (size_t i = 0; i < planar.rows.size(); i += 100) {
    EXPECT_NEAR(planar.rows[i].x, slope.rows[i].x, 0.01);
    EXPECT_NEAR(planar.rows[i].y, slope.rows[i].y, 0.01);
    EXPECT_NEAR(planar.rows[i].phi, slope.rows[i].yaw, 0.01);
  }
}

TEST(SlopeSim, DampingStabilityWarning) {
  SlopeSimConfig cfg = base_config(LoadMode::kUniform);
  EXPECT_FALSE(cfg.damping_stability_warning());
  cfg.cp.d_lin = 1e4;
  EXPECT_TRUE(cfg.damping_stability_warning());
}

TEST(SlopeSim, OutOfTerrainThrows) {
  const HeightField hf = make_flat(2.0, 0.5);
  SlopeSimConfig cfg = base_config(LoadMode::kUniform);
  SlopeSimulator sim(cfg, hf);
  sim.reset(initial_pose_on_terrain(hf, 1.5, 0, 0, cfg.vp));
  EXPECT_THROW(
      {
        for (int i = 0; i < 4000; ++i) sim.tick(twist_to_wheels(0.8, 0.0, cfg.vp));
      },
      OutOfTerrainError);
}

}  // namespace
}  // namespace tracksim
