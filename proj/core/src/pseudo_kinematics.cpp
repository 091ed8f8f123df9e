#include "tracksim/pseudo_kinematics.hpp"

#include <cmath>

namespace tracksim {

Eigen::Vector3d unicycle_rhs(const Pose2D& pose, double v, double wz) {
  return {v * std::cos(pose.phi), v * std::sin(pose.phi), wz};
}

Pose2D advance_unicycle(const Pose2D& pose, double v, double wz, double dt) {
  Pose2D out = pose;
  if (std::abs(wz) < 1e-12) {
    out.x += v * dt * std::cos(pose.phi);
    out.y += v * dt * std::sin(pose.phi);
  } else {
    const double phi1 = pose.phi + wz * dt;
    out.x += v / wz * (std::sin(phi1) - std::sin(pose.phi));
    out.y -= v / wz * (std::cos(phi1) - std::cos(pose.phi));
    out.phi = phi1;
  }
  out.phi = wrap_angle(out.phi);
  return out;
}

Eigen::Vector3d tracked_rhs(const Pose2D& pose, double vx_b, double wz, double alpha) {
  if (std::abs(alpha) >= M_PI_2) throw AlphaOutOfRangeError(alpha);
  const double speed = vx_b / std::cos(alpha);
  const double heading = pose.phi + alpha;
  return {speed * std::cos(heading), speed * std::sin(heading), wz};
}

TrackGroundSpeeds track_ground_speeds(double vx_b, double wz, double track_gauge) {
  TrackGroundSpeeds s;
  s.left = vx_b - wz * track_gauge / 2.0;
  s.right = vx_b + wz * track_gauge / 2.0;
  return s;
}

SlipParams estimate_slip(double vx_b, double vy_b, double wz, const WheelSpeeds& w,
                         const VehicleParams& vp) {
  if (std::abs(vx_b) <= kAlphaSpeedEps) throw AlphaUndefinedError(vx_b);
  SlipParams s;
  s.alpha = std::atan(vy_b / vx_b);
  const TrackGroundSpeeds t = track_ground_speeds(vx_b, wz, vp.track_gauge);
  s.beta_l = t.left - w.left * vp.sprocket_radius;
  s.beta_r = t.right - w.right * vp.sprocket_radius;
  return s;
}

}  // namespace tracksim
