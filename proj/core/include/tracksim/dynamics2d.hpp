#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "tracksim/integrator.hpp"
#include "tracksim/terramechanics.hpp"
#include "tracksim/types.hpp"

namespace tracksim {

struct FlatSimConfig {
  VehicleParams vp;
  TerramechParams tm;
  double dt_sim = 1e-3;             // s
  double control_dt = 5e-3;         // s, command/noise boundary (200 Hz)
  double actuator_noise_std = 0.0;  // rad/s, Gaussian on commanded wheels
  uint32_t rng_seed = 0;
  double gravity = kGravity;

  bool valid() const { return dt_sim > 0 && control_dt >= dt_sim && vp.valid() && tm.valid(); }
};

// Commanded wheel speeds are kept away from the contact-time singularity.
inline constexpr double kWheelClamp = 1e-6;  // rad/s
WheelSpeeds clamp_wheels(const WheelSpeeds& w);

struct RollingWrench {
  double fx = 0.0;  // N
  double mz = 0.0;  // N m
};

// Per-track rolling resistance load * c_r opposing each track's own ground
// speed, applied at the track centerline. Straight motion gives zero net
// moment; a pivot turn gives the (B/2)(R_L + R_R) turning resistance.
RollingWrench rolling_wrench(double load_left, double load_right, double vl, double vr,
                             const VehicleParams& vp);

// Body-frame equations of motion of the flat-terrain distributed model:
//   m (vdot_x - wz vy) = F_t - R_t
//   m (vdot_y + wz vx) = F_y
//   I_zz wdot_z        = M_t - M_r
// with track wrenches under uniform pressure and per-track rolling
// resistance (m g / 2) c_r opposing each track's ground speed.
Eigen::Matrix<double, 6, 1> flat_rhs(const State2D& state, const WheelSpeeds& w,
                                     const FlatSimConfig& cfg);

struct SimTraceRow {
  double t = 0.0;
  double x = 0.0, y = 0.0, phi = 0.0;
  double vx_b = 0.0, vy_b = 0.0, wz = 0.0;
  double wl_cmd = 0.0, wr_cmd = 0.0;
};

struct SimTrace {
  std::vector<SimTraceRow> rows;
  void save_csv(const std::string& path) const;
};

// Owns one episode of flat-terrain simulation; not shareable across threads.
class FlatSimulator {
 public:
  explicit FlatSimulator(const FlatSimConfig& cfg);

  void reset(const State2D& s);
  const State2D& state() const { return state_; }
  double time() const { return t_; }
  // Wheel speeds applied during the last control interval (noise included).
  const WheelSpeeds& applied_command() const { return applied_; }

  // Applies one command and advances one control interval.
  void tick(const WheelSpeeds& cmd);

 private:
  FlatSimConfig cfg_;
  TrackFootprint left_, right_;
  ButcherTableau tableau_ = ButcherTableau::rk4();
  std::mt19937 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
  State2D state_;
  WheelSpeeds applied_;
  double t_ = 0.0;
  int substeps_ = 5;
};

// Open-loop run; the command callback is sampled at the control rate.
SimTrace simulate_flat(const State2D& initial,
                       const std::function<WheelSpeeds(double)>& wheel_cmd,
                       double duration, const FlatSimConfig& cfg);

}  // namespace tracksim
