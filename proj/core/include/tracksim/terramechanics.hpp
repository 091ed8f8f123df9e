#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "tracksim/types.hpp"

namespace tracksim {

enum class TrackSide { kLeft, kRight };

// Regular grid of patch centers over one track footprint, body frame.
// The left track centerline sits at y = +B/2 (x forward, y left, z up),
// consistent with the track ground speed vL = vx - wz B/2.
struct TrackFootprint {
  TrackSide side = TrackSide::kLeft;
  std::vector<Eigen::Vector2d> patch_centers;
  double patch_area = 0.0;  // m^2

  static TrackFootprint build(TrackSide side, const VehicleParams& vp);
};

// Planar body state seen by the soil model.
struct PlanarState {
  double vx_b = 0.0;
  double vy_b = 0.0;
  double wz = 0.0;
  double phi = 0.0;
};

struct ShearDisplacement {
  double jx = 0.0;     // m, world frame
  double jy = 0.0;     // m, world frame
  double j_mag = 0.0;  // m
};

// Angular-velocity threshold below which the closed form switches to its
// wz -> 0 series limit (the exact expression divides by wz).
inline constexpr double kShearOmegaEps = 1e-6;  // rad/s
inline constexpr double kSprocketEps = 1e-9;    // rad/s

// Slip speed below which the tangential force tapers linearly to zero. The
// slide direction is undefined at zero shear velocity; the taper makes the
// force vanish continuously and keeps the explicit integrator free of
// stick-slip chatter at rest. Operating slip speeds sit well above this.
inline constexpr double kShearSpeedTaper = 3e-3;  // m/s

// Shear displacement accumulated by the patch at (xp, yp) since ground
// contact, obtained as the analytic integral of the world-frame shear
// velocity over the contact time (l - xp)/(w r).
// Throws DegenerateSprocketError when |w_sprocket| < 1e-9.
ShearDisplacement shear_displacement(double xp, double yp, double vx_b, double vy_b,
                                     double wz, double w_sprocket, double phi,
                                     const VehicleParams& vp);

// tau = c + sigma mu (1 - exp(-j/K)).
double shear_stress(double j_mag, double sigma, const TerramechParams& tm);

struct PatchWrench {
  double dfx = 0.0;  // N, body frame
  double dfy = 0.0;  // N, body frame
  double dmz = 0.0;  // N m
};

// Force and moment contributed by a single patch. The tangential force
// opposes the local shear velocity; patches with shear speed below 1e-9
// contribute nothing (no defined slide direction).
PatchWrench patch_wrench(const Eigen::Vector2d& patch_center, double patch_area,
                         const PlanarState& state, double w_sprocket, double sigma,
                         const TerramechParams& tm, const VehicleParams& vp);

struct TrackWrench {
  double fx = 0.0;  // N, body frame
  double fy = 0.0;  // N, body frame
  double mz = 0.0;  // N m
};

// Row-major sum of patch wrenches with per-patch normal pressure.
TrackWrench track_wrench(const TrackFootprint& fp, const PlanarState& state,
                         double w_sprocket, std::span<const double> sigma_per_patch,
                         const TerramechParams& tm, const VehicleParams& vp);

// Same with a single uniform pressure.
TrackWrench track_wrench(const TrackFootprint& fp, const PlanarState& state,
                         double w_sprocket, double sigma_uniform,
                         const TerramechParams& tm, const VehicleParams& vp);

// Uniform normal pressure sigma = m g / (2 A_t).
double uniform_pressure(const VehicleParams& vp, double g = kGravity);

}  // namespace tracksim
