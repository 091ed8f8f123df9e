#include "tracksim/control.hpp"

#include <cmath>

#include "tracksim/rotation.hpp"
#include "tracksim/wheel_kinematics.hpp"

namespace tracksim {

namespace {

double guarded_cos(double angle, double floor) {
  const double c = std::cos(angle);
  if (std::abs(c) >= floor) return c;
  return c >= 0.0 ? floor : -floor;
}

// Shared law. The unicycle controller is the alpha = beta = 0 instance, so
// both laws stay bit-identical in the degenerate case.
ControlOutput law_step(double ex, double ey, double phi, double phi_d, double v_d,
                       double wz_d, const Gains& gains, double alpha, double alpha_d,
                       double alpha_d_rate, double beta_l, double beta_r,
                       const ControllerConfig& cfg, const VehicleParams& vp) {
  if (std::abs(alpha) >= M_PI_2) throw AlphaOutOfRangeError(alpha);

  const double e_xy = std::sqrt(ex * ex + ey * ey);
  const double psi = std::atan2(ey, ex);
  // One wrap of the raw difference; beta then uses the reference-heading
  // representative consistent with it, so the half-angle terms pair up on
  // the same branch.
  const double e_phi = wrap_angle(phi - phi_d);
  const double beta = phi + (phi - e_phi);

  const double dv = -gains.k_p * e_xy * std::cos(psi - (phi + alpha));
  const double dw =
      -v_d * e_xy * std::sin(psi - (alpha + beta) / 2.0) /
          guarded_cos((alpha + e_phi) / 2.0, cfg.cos_guard) -
      gains.k_phi * std::sin(e_phi + alpha_d) - alpha_d_rate;

  double v = (v_d + dv) * std::cos(alpha);
  double wz = wz_d + dw;

  WheelSpeeds wheels =
      twist_to_wheels(v, wz, vp, SlipParams{alpha, beta_l, beta_r});
  const double peak = std::max(std::abs(wheels.left), std::abs(wheels.right));
  if (peak > cfg.wheel_max) {
    const double scale = cfg.wheel_max / peak;
    wheels.left *= scale;
    wheels.right *= scale;
    v *= scale;
    wz *= scale;
  }

  ControlOutput out;
  out.v_cmd = v;
  out.wz_cmd = wz;
  out.wheels = wheels;
  out.e_xy = e_xy;
  out.e_phi = e_phi;
  out.lyapunov = 0.5 * e_xy * e_xy + (1.0 - std::cos(e_phi + alpha_d));
  out.alpha_used = alpha;
  return out;
}

}  // namespace

ControlOutput uc_step(const Pose2D& pose, const ReferencePoint& ref, const Gains& gains,
                      const ControllerConfig& cfg, const VehicleParams& vp) {
  return law_step(pose.x - ref.x, pose.y - ref.y, pose.phi, ref.phi, ref.v, ref.wz,
                  gains, 0.0, 0.0, 0.0, 0.0, 0.0, cfg, vp);
}

ControlOutput slc_step(const Pose2D& pose, const ReferencePoint& ref,
                       const Gains& gains, const SlipParams& slip, double alpha_d,
                       double alpha_d_rate, const ControllerConfig& cfg,
                       const VehicleParams& vp) {
  return law_step(pose.x - ref.x, pose.y - ref.y, pose.phi, ref.phi, ref.v, ref.wz,
                  gains, slip.alpha, alpha_d, alpha_d_rate, slip.beta_l, slip.beta_r,
                  cfg, vp);
}

AlphaRateFilter::AlphaRateFilter(double dt, double cutoff_hz) : dt_(dt) {
  const double tau = 1.0 / (2.0 * M_PI * cutoff_hz);
  gain_ = dt / (tau + dt);
}

double AlphaRateFilter::update(double alpha_d) {
  if (!primed_) {
    prev_ = alpha_d;
    primed_ = true;
    return 0.0;
  }
  const double raw = (alpha_d - prev_) / dt_;
  prev_ = alpha_d;
  state_ += gain_ * (raw - state_);
  return state_;
}

void AlphaRateFilter::reset() {
  primed_ = false;
  state_ = 0.0;
  prev_ = 0.0;
}

BodyError map_error_3d(const State3D& s, const ReferencePoint& ref) {
  const Eigen::Matrix3d rb = rotation_zyx(s.euler);
  const Eigen::Vector3d e_world(s.p_com.x() - ref.x, s.p_com.y() - ref.y, 0.0);
  const Eigen::Vector3d e_body = rb.transpose() * e_world;
  BodyError e;
  e.e_xy = e_body.head<2>();
  e.e_phi = rb(2, 2) * wrap_angle(s.euler.yaw - ref.phi);
  return e;
}

TrackingController::TrackingController(const ControllerConfig& cfg,
                                       const VehicleParams& vp, SlipModelSet models)
    : cfg_(cfg),
      vp_(vp),
      models_(std::move(models)),
      alpha_rate_(cfg.dt, cfg.alpha_rate_cutoff) {}

void TrackingController::reset() { alpha_rate_.reset(); }

ControlOutput TrackingController::run(double ex, double ey, double phi, double phi_d,
                                      const ReferencePoint& ref,
                                      const std::optional<WheelSpeeds>& measured,
                                      const std::optional<Eigen::Vector3d>& g_hat) {
  SlipParams slip;
  double alpha_d = 0.0, alpha_d_rate = 0.0;
  if (!models_.is_zero()) {
    const int sign_d = ref.v >= 0.0 ? 1 : -1;
    const WheelSpeeds desired = twist_to_wheels(ref.v, ref.wz, vp_);
    alpha_d = models_.predict(desired, sign_d, g_hat).alpha;
    alpha_d_rate = alpha_rate_.update(alpha_d);

    const WheelSpeeds probe = measured ? *measured : desired;
    slip = models_.predict(probe, sign_d, g_hat);
  }
  return law_step(ex, ey, phi, phi_d, ref.v, ref.wz, cfg_.gains, slip.alpha, alpha_d,
                  alpha_d_rate, slip.beta_l, slip.beta_r, cfg_, vp_);
}

ControlOutput TrackingController::step(const Pose2D& pose, const ReferencePoint& ref,
                                       const std::optional<WheelSpeeds>& measured) {
  return run(pose.x - ref.x, pose.y - ref.y, pose.phi, ref.phi, ref, measured,
             std::nullopt);
}

ControlOutput TrackingController::step3d(const State3D& state,
                                         const ReferencePoint& ref,
                                         const std::optional<WheelSpeeds>& measured) {
  const BodyError e = map_error_3d(state, ref);
  std::optional<Eigen::Vector3d> g_hat;
  if (models_.input_arity() == 5) {
    const Eigen::Matrix3d rb = rotation_zyx(state.euler);
    g_hat = rb.transpose() * Eigen::Vector3d(0.0, 0.0, -1.0);
  }
  // Local-frame reduction: the law runs on body errors with phi = 0 and the
  // heading reference carrying -e_phi.
  return run(e.e_xy.x(), e.e_xy.y(), 0.0, -e.e_phi, ref, measured, g_hat);
}

}  // namespace tracksim
