#include "tracksim/rotation.hpp"

#include <cmath>

namespace tracksim {

Eigen::Matrix2d rot2(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Eigen::Matrix3d rotation_zyx(const EulerZyx& e) {
  return (Eigen::AngleAxisd(e.yaw, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(e.pitch, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(e.roll, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

EulerZyx euler_from_rotation(const Eigen::Matrix3d& r) {
  EulerZyx e;
  e.pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  e.yaw = std::atan2(r(1, 0), r(0, 0));
  e.roll = std::atan2(r(2, 1), r(2, 2));
  return e;
}

Eigen::Matrix3d euler_rate_map(const EulerZyx& e) {
  if (M_PI_2 - std::abs(e.pitch) < 1e-6) throw GimbalLockError(e.pitch);
  const double cr = std::cos(e.roll), sr = std::sin(e.roll);
  const double cp = std::cos(e.pitch), sp = std::sin(e.pitch);
  // Body angular velocity from ZYX Euler rates ordered (roll, pitch, yaw).
  Eigen::Matrix3d t;
  t << 1.0, 0.0, -sp,
       0.0, cr, sr * cp,
       0.0, -sr, cr * cp;
  return t;
}

Eigen::Vector3d body_accel_in_moving_frame(const Eigen::Vector3d& v_body,
                                           const Eigen::Vector3d& w_body,
                                           const Eigen::Vector3d& vdot_body) {
  return vdot_body + w_body.cross(v_body);
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

}  // namespace tracksim
