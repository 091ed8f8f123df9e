#pragma once

#include <Eigen/Dense>

#include "tracksim/types.hpp"

namespace tracksim {

Eigen::Matrix2d rot2(double angle);

// World-from-body rotation for the ZYX convention, R = Rz(yaw) Ry(pitch) Rx(roll).
Eigen::Matrix3d rotation_zyx(const EulerZyx& e);

// Inverse of rotation_zyx away from the pitch singularity.
EulerZyx euler_from_rotation(const Eigen::Matrix3d& r);

// T such that w_body = T(euler) * d/dt(roll, pitch, yaw).
// Throws GimbalLockError when pitch is within 1e-6 rad of +/-pi/2.
Eigen::Matrix3d euler_rate_map(const EulerZyx& e);

// Absolute acceleration expressed in the body frame: vdot + w x v.
Eigen::Vector3d body_accel_in_moving_frame(const Eigen::Vector3d& v_body,
                                           const Eigen::Vector3d& w_body,
                                           const Eigen::Vector3d& vdot_body);

Eigen::Matrix3d skew(const Eigen::Vector3d& v);

}  // namespace tracksim
