#pragma once

#include <optional>

#include "tracksim/types.hpp"

namespace tracksim {

// Linear mapping from sprocket speeds to the body twist:
//   v = r (wl + wr) / 2,  wz = r (wr - wl) / B.
Twist2D wheels_to_twist(const WheelSpeeds& w, const VehicleParams& vp);

// Inverse mapping. With slip, the longitudinal slippages beta_l/beta_r are
// compensated feed-forward: commanded wheels are shifted by -beta/r so that
// the slipping tracks still realize (v, wz).
WheelSpeeds twist_to_wheels(double v, double wz, const VehicleParams& vp,
                            const std::optional<SlipParams>& slip = std::nullopt);

}  // namespace tracksim
