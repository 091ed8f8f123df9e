#pragma once

#include <optional>

#include "tracksim/slip_model.hpp"
#include "tracksim/types.hpp"

namespace tracksim {

struct ReferencePoint {
  double x = 0.0, y = 0.0;  // m
  double phi = 0.0;         // rad
  double v = 0.0;           // m/s
  double wz = 0.0;          // rad/s
};

struct Gains {
  double k_p = 10.0;    // 1/s
  double k_phi = 1.0;   // 1/s
  bool valid() const { return k_p > 0 && k_phi > 0; }
};

struct ControlOutput {
  double v_cmd = 0.0;
  double wz_cmd = 0.0;
  WheelSpeeds wheels;
  double e_xy = 0.0;
  double e_phi = 0.0;
  double lyapunov = 0.0;
  double alpha_used = 0.0;
};

struct ControllerConfig {
  Gains gains;
  double wheel_max = 18.0;        // rad/s, saturation bound
  double dt = 5e-3;               // s, control period
  double cos_guard = 0.05;        // floor on the guarded denominators
  double alpha_rate_cutoff = 10.0;  // Hz, low-pass on the alpha_d derivative
};

// Unicycle Lyapunov law: auxiliary inputs
//   dv = -k_p e_xy cos(psi - phi)
//   dw = -v_d e_xy sin(psi - beta/2)/cos(e_phi/2) - k_phi sin(e_phi)
// with beta = phi + phi_d; wheel speeds through the no-slip inverse mapping.
ControlOutput uc_step(const Pose2D& pose, const ReferencePoint& ref, const Gains& gains,
                      const ControllerConfig& cfg, const VehicleParams& vp);

// Slippage-aware law with feed-forward beta compensation; degenerates to
// uc_step bit-for-bit when alpha = alpha_d = alpha_d_rate = beta = 0.
ControlOutput slc_step(const Pose2D& pose, const ReferencePoint& ref,
                       const Gains& gains, const SlipParams& slip, double alpha_d,
                       double alpha_d_rate, const ControllerConfig& cfg,
                       const VehicleParams& vp);

// Backward difference of alpha_d through a one-pole low-pass. First sample
// returns zero.
class AlphaRateFilter {
 public:
  AlphaRateFilter(double dt, double cutoff_hz);
  double update(double alpha_d);
  void reset();

 private:
  double dt_;
  double gain_;
  double prev_ = 0.0;
  double state_ = 0.0;
  bool primed_ = false;
};

struct BodyError {
  Eigen::Vector2d e_xy = Eigen::Vector2d::Zero();
  double e_phi = 0.0;
};

// World tracking errors mapped into the body frame (slope extension): the
// planar components of R_b^T [e_x, e_y, 0] plus the z-extraction of the
// heading difference.
BodyError map_error_3d(const State3D& s, const ReferencePoint& ref);

// Stateful tracking controller driving either law over a reference stream.
// UC is the zero-model special case. Holds the alpha_d filter state, so one
// instance serves one episode.
class TrackingController {
 public:
  TrackingController(const ControllerConfig& cfg, const VehicleParams& vp,
                     SlipModelSet models);

  void reset();
  bool slippage_aware() const { return !models_.is_zero(); }

  // Planar step; measured wheel speeds (when available) sharpen the alpha
  // prediction, otherwise the desired wheels are used.
  ControlOutput step(const Pose2D& pose, const ReferencePoint& ref,
                     const std::optional<WheelSpeeds>& measured = std::nullopt);

  // Slope variant on body-frame errors; g_hat_body feeds slope-trained models.
  ControlOutput step3d(const State3D& state, const ReferencePoint& ref,
                       const std::optional<WheelSpeeds>& measured = std::nullopt);

 private:
  ControlOutput run(double ex, double ey, double phi, double phi_d,
                    const ReferencePoint& ref,
                    const std::optional<WheelSpeeds>& measured,
                    const std::optional<Eigen::Vector3d>& g_hat);

  ControllerConfig cfg_;
  VehicleParams vp_;
  SlipModelSet models_;
  AlphaRateFilter alpha_rate_;
};

}  // namespace tracksim
