#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "tracksim/dynamics2d.hpp"
#include "tracksim/integrator.hpp"
#include "tracksim/terrain.hpp"
#include "tracksim/terramechanics.hpp"
#include "tracksim/types.hpp"

namespace tracksim {

enum class LoadMode { kUniform, kNonuniform };

struct SlopeSimConfig {
  VehicleParams vp;
  TerramechParams tm;
  ComplianceParams cp;
  LoadMode mode = LoadMode::kUniform;
  double dt_sim = 1e-3;
  double control_dt = 5e-3;
  double actuator_noise_std = 0.0;
  uint32_t rng_seed = 0;
  double gravity = kGravity;

  bool valid() const;
  // True when the explicit integration of the contact spring-damper is at
  // risk (d_lin dt / m beyond 0.1).
  bool damping_stability_warning() const { return cp.d_lin * dt_sim / vp.mass > 0.1; }
};

struct WorldWrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();
};

struct PatchContact {
  Eigen::Vector3d p_world = Eigen::Vector3d::Zero();
  Eigen::Vector3d p_dot_world = Eigen::Vector3d::Zero();
  double penetration = 0.0;  // m, positive inside the terrain
  double rho_dot = 0.0;      // m/s, penetration rate
  Eigen::Vector3d f_n = Eigen::Vector3d::Zero();  // N, world frame
  double sigma = 0.0;        // Pa, body-normal pressure fed to the soil model
  TrackSide side = TrackSide::kLeft;
  double x_body = 0.0;       // m, patch longitudinal coordinate
};

// Resultant normal force/moment of the uniform-load spring-damper contact.
// The force acts along the terrain normal and only under penetration; the
// moment is the tangent-plane projection of a torsional spring-damper on the
// body-vs-terrain orientation error.
WorldWrench normal_force_uniform(const State3D& s, const HeightField& hf,
                                 const ComplianceParams& cp, const VehicleParams& vp);

// Per-patch unilateral contact with world-z projection, speed-dependent
// stiffness and per-patch pressure.
std::vector<PatchContact> patch_contacts_nonuniform(
    const State3D& s, const HeightField& hf, const ComplianceParams& cp,
    const TrackFootprint& left, const TrackFootprint& right, const VehicleParams& vp);

// R_t = sum ||f_n|| c_r sign(vx_b).
double rolling_resistance(std::span<const PatchContact> contacts, double vx_b,
                          double c_r);

// Newton-Euler right-hand side of the sloped-terrain model; returns the
// derivative of the 12-component state vector.
Eigen::Matrix<double, 12, 1> slope_rhs(const State3D& s, const WheelSpeeds& w,
                                       const HeightField& hf,
                                       const SlopeSimConfig& cfg);

struct SlopeTraceRow {
  double t = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;
  double roll = 0.0, pitch = 0.0, yaw = 0.0;
  double vx_b = 0.0, vy_b = 0.0, wz = 0.0;
  double fn_left = 0.0, fn_right = 0.0;  // N, per-track resultant normal force
  double wl_cmd = 0.0, wr_cmd = 0.0;
};

struct SlopeTrace {
  std::vector<SlopeTraceRow> rows;
  void save_csv(const std::string& path) const;
};

struct PatchForceRow {
  double t = 0.0;
  int i = 0, j = 0;  // longitudinal / lateral cell, left track then right
  double f_n = 0.0;
};

class SlopeSimulator {
 public:
  SlopeSimulator(const SlopeSimConfig& cfg, HeightField hf);

  void reset(const State3D& s);
  const State3D& state() const { return state_; }
  double time() const { return t_; }
  const WheelSpeeds& applied_command() const { return applied_; }
  const HeightField& terrain() const { return hf_; }

  void tick(const WheelSpeeds& cmd);

  // Wall-clock seconds spent inside integration, and steps taken, since the
  // last reset. Used by the load-model timing comparison.
  double step_seconds() const { return step_seconds_; }
  long steps() const { return steps_; }

  // Per-track resultant normal force of the most recent contact evaluation.
  double last_fn_left() const { return fn_left_; }
  double last_fn_right() const { return fn_right_; }
  // Maximum patch stiffness of the most recent nonuniform contact pass.
  double last_max_stiffness() const { return max_stiffness_; }

  std::vector<PatchContact> contacts() const;

 private:
  Eigen::Matrix<double, 12, 1> rhs(const Eigen::Matrix<double, 12, 1>& x,
                                   const WheelSpeeds& w);

  SlopeSimConfig cfg_;
  HeightField hf_;
  TrackFootprint left_, right_;
  ButcherTableau tableau_ = ButcherTableau::rk4();
  std::mt19937 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
  State3D state_;
  WheelSpeeds applied_;
  double t_ = 0.0;
  int substeps_ = 5;
  double step_seconds_ = 0.0;
  long steps_ = 0;
  double fn_left_ = 0.0, fn_right_ = 0.0;
  double max_stiffness_ = 0.0;
};

SlopeTrace simulate_slope(const State3D& initial,
                          const std::function<WheelSpeeds(double)>& wheel_cmd,
                          double duration, const SlopeSimConfig& cfg,
                          const HeightField& hf,
                          std::vector<PatchForceRow>* patch_dump = nullptr);

}  // namespace tracksim
