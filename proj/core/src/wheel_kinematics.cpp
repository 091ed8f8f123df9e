#include "tracksim/wheel_kinematics.hpp"

namespace tracksim {

Twist2D wheels_to_twist(const WheelSpeeds& w, const VehicleParams& vp) {
  const double r = vp.sprocket_radius;
  Twist2D t;
  t.v = r * (w.left + w.right) / 2.0;
  t.wz = r * (w.right - w.left) / vp.track_gauge;
  return t;
}

WheelSpeeds twist_to_wheels(double v, double wz, const VehicleParams& vp,
                            const std::optional<SlipParams>& slip) {
  const double r = vp.sprocket_radius;
  const double half_gauge = vp.track_gauge / 2.0;
  WheelSpeeds w;
  w.left = (v - wz * half_gauge) / r;
  w.right = (v + wz * half_gauge) / r;
  if (slip) {
    w.left -= slip->beta_l / r;
    w.right -= slip->beta_r / r;
  }
  return w;
}

}  // namespace tracksim
