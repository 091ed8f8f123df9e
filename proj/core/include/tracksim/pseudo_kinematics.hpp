#pragma once

#include <Eigen/Dense>

#include "tracksim/types.hpp"

namespace tracksim {

// Pure-rolling unicycle kinematics: (v cos phi, v sin phi, wz).
Eigen::Vector3d unicycle_rhs(const Pose2D& pose, double v, double wz);

// Exact flow of the unicycle under a held twist: a circular arc (straight
// line for |wz| below 1e-12). Used to build references consistent with the
// zero-order-hold control rate.
Pose2D advance_unicycle(const Pose2D& pose, double v, double wz, double dt);

// Pseudo-kinematic tracked model. The lateral slippage angle alpha rotates
// the velocity vector off the body x-axis and scales its magnitude by
// 1/cos(alpha). Throws AlphaOutOfRangeError for |alpha| >= pi/2.
Eigen::Vector3d tracked_rhs(const Pose2D& pose, double vx_b, double wz, double alpha);

struct TrackGroundSpeeds {
  double left = 0.0;   // m/s
  double right = 0.0;  // m/s
};

// Track centerline speeds over ground: vL = vx - wz B/2, vR = vx + wz B/2.
TrackGroundSpeeds track_ground_speeds(double vx_b, double wz, double track_gauge);

inline constexpr double kAlphaSpeedEps = 1e-4;  // m/s, atan branch guard

// Slippage parameters from measured body velocities and sprocket speeds.
// alpha is the principal branch value atan(vy/vx), reported per sign(vx)
// branch; throws AlphaUndefinedError when |vx_b| <= 1e-4 m/s.
SlipParams estimate_slip(double vx_b, double vy_b, double wz, const WheelSpeeds& w,
                         const VehicleParams& vp);

}  // namespace tracksim
