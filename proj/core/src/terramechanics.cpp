#include "tracksim/terramechanics.hpp"

#include <cmath>

namespace tracksim {

TrackFootprint TrackFootprint::build(TrackSide side, const VehicleParams& vp) {
  TrackFootprint fp;
  fp.side = side;
  fp.patch_area = vp.patch_area();
  const double l = vp.track_semilength;
  const double width = vp.track_width();
  const double yc = (side == TrackSide::kLeft ? 1.0 : -1.0) * vp.track_gauge / 2.0;
  const double dx = 2.0 * l / vp.patches_longitudinal;
  const double dy = width / vp.patches_lateral;
  fp.patch_centers.reserve(vp.patch_count());
  for (int i = 0; i < vp.patches_longitudinal; ++i) {
    const double xp = -l + (i + 0.5) * dx;
    for (int j = 0; j < vp.patches_lateral; ++j) {
      const double yp = yc - width / 2.0 + (j + 0.5) * dy;
      fp.patch_centers.emplace_back(xp, yp);
    }
  }
  return fp;
}

ShearDisplacement shear_displacement(double xp, double yp, double vx_b, double vy_b,
                                     double wz, double w_sprocket, double phi,
                                     const VehicleParams& vp) {
  if (std::abs(w_sprocket) < kSprocketEps) throw DegenerateSprocketError(w_sprocket);
  const double l = vp.track_semilength;
  const double wr = w_sprocket * vp.sprocket_radius;

  ShearDisplacement out;
  if (std::abs(wz) >= kShearOmegaEps) {
    // Analytic integral of the rotated shear velocity. With
    //   a = wz (l - xp)/(w r) + phi,  b = vx - wz yp,
    // the components in the world frame are
    //   jx = ( jvy cos a + b sin a - (vy + wz l) cos phi - b sin phi ) / wz
    //   jy = ( jvy sin a - b cos a - (vy + wz l) sin phi + b cos phi ) / wz
    // where jvy = vy + wz xp is the lateral shear velocity at the patch.
    const double a = wz * (l - xp) / wr + phi;
    const double b = vx_b - wz * yp;
    const double jvy = vy_b + wz * xp;
    const double front = vy_b + wz * l;
    const double sa = std::sin(a), ca = std::cos(a);
    const double sp = std::sin(phi), cp = std::cos(phi);
    out.jx = (jvy * ca + b * sa - front * cp - b * sp) / wz;
    out.jy = (jvy * sa - b * ca - front * sp + b * cp) / wz;
  } else {
    // Straight-motion limit, first order in wz: the exact form loses the
    // leading digits to the 1/wz division here.
    const double span = l - xp;  // contact length ahead of the patch
    const double c1 = vx_b - wz * yp - wr;
    const double c2 = vy_b + wz * l;
    const double half_sq = wz * span * span / 2.0;
    const double ux = c1 * span - half_sq * c2 / wr;
    const double uy = c2 * span - half_sq + half_sq * c1 / wr;
    const double sp = std::sin(phi), cp = std::cos(phi);
    out.jx = (cp * ux - sp * uy) / wr;
    out.jy = (sp * ux + cp * uy) / wr;
  }
  out.j_mag = std::hypot(out.jx, out.jy);
  return out;
}

double shear_stress(double j_mag, double sigma, const TerramechParams& tm) {
  return tm.cohesion + sigma * tm.friction_mu * (1.0 - std::exp(-j_mag / tm.shear_modulus));
}

PatchWrench patch_wrench(const Eigen::Vector2d& patch_center, double patch_area,
                         const PlanarState& state, double w_sprocket, double sigma,
                         const TerramechParams& tm, const VehicleParams& vp) {
  const double xp = patch_center.x(), yp = patch_center.y();
  const double wr = w_sprocket * vp.sprocket_radius;
  const double jv_x = state.vx_b - state.wz * yp - wr;
  const double jv_y = state.vy_b + state.wz * xp;
  const double jv_norm = std::hypot(jv_x, jv_y);
  PatchWrench w;
  if (jv_norm < 1e-9) return w;  // no slide direction, force vanishes continuously

  const ShearDisplacement j = shear_displacement(xp, yp, state.vx_b, state.vy_b,
                                                 state.wz, w_sprocket, state.phi, vp);
  const double tau = shear_stress(j.j_mag, sigma, tm) *
                     std::min(1.0, jv_norm / kShearSpeedTaper);
  const double cos_d = jv_x / jv_norm;
  const double sin_d = jv_y / jv_norm;
  w.dfx = -tau * cos_d * patch_area;
  w.dfy = -tau * sin_d * patch_area;
  w.dmz = -yp * w.dfx + xp * w.dfy;
  return w;
}

TrackWrench track_wrench(const TrackFootprint& fp, const PlanarState& state,
                         double w_sprocket, std::span<const double> sigma_per_patch,
                         const TerramechParams& tm, const VehicleParams& vp) {
  TrackWrench total;
  for (size_t i = 0; i < fp.patch_centers.size(); ++i) {
    const PatchWrench w = patch_wrench(fp.patch_centers[i], fp.patch_area, state,
                                       w_sprocket, sigma_per_patch[i], tm, vp);
    total.fx += w.dfx;
    total.fy += w.dfy;
    total.mz += w.dmz;
  }
  return total;
}

TrackWrench track_wrench(const TrackFootprint& fp, const PlanarState& state,
                         double w_sprocket, double sigma_uniform,
                         const TerramechParams& tm, const VehicleParams& vp) {
  TrackWrench total;
  for (const auto& p : fp.patch_centers) {
    const PatchWrench w =
        patch_wrench(p, fp.patch_area, state, w_sprocket, sigma_uniform, tm, vp);
    total.fx += w.dfx;
    total.fy += w.dfy;
    total.mz += w.dmz;
  }
  return total;
}

double uniform_pressure(const VehicleParams& vp, double g) {
  return vp.mass * g / (2.0 * vp.track_area);
}

}  // namespace tracksim
