#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "tracksim/types.hpp"

namespace tracksim {

// Regular-grid heightfield with implicit triangulation: each cell is split
// into two triangles along the lower-left to upper-right diagonal. Immutable
// after construction; concurrent reads are safe.
struct HeightField {
  double origin_x = 0.0;  // m, x of grid column 0
  double origin_y = 0.0;  // m, y of grid row 0
  double cell = 1.0;      // m, grid spacing
  int nx = 0;             // columns (>= 2)
  int ny = 0;             // rows (>= 2)
  std::vector<double> z;  // elevations, z[ix * ny + iy]

  double at(int ix, int iy) const { return z[static_cast<size_t>(ix) * ny + iy]; }
  double& at(int ix, int iy) { return z[static_cast<size_t>(ix) * ny + iy]; }
  double max_x() const { return origin_x + (nx - 1) * cell; }
  double max_y() const { return origin_y + (ny - 1) * cell; }
  bool contains(double x, double y) const {
    return x >= origin_x && x <= max_x() && y >= origin_y && y <= max_y();
  }
};

struct TerrainQuery {
  double elevation = 0.0;
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  bool hit = false;
};

// Vertical ray cast through (x, y): intersects the triangle of the cell
// containing the query point. The ray origin sits at z = -10 m to mirror the
// mesh-raycasting interface; for a heightfield the baseline is irrelevant.
inline constexpr double kRaycastBaseline = -10.0;
TerrainQuery raycast_elevation(const HeightField& hf, double x, double y);

// Right-handed frame with z = terrain normal and x the projection of the
// yaw-hint heading onto the tangent plane. Throws DegenerateNormalError when
// the heading projection degenerates.
Eigen::Matrix3d terrain_frame(const Eigen::Vector3d& normal, double yaw_hint);

HeightField make_flat(double extent, double cell, double z0 = 0.0);

// Plane z = tan(slope_rad) * x.
HeightField make_ramp(double slope_rad, double extent, double cell);

// Seeded value noise smoothed by repeated box filtering, scaled to the given
// height amplitude. Deterministic in all arguments.
HeightField make_random_slope(uint32_t seed, double amplitude, int smoothness,
                              double extent, double cell);

// Pose aligned with the terrain at (x, y): COM at elevation + com_height
// along the normal, roll/pitch from the terrain frame, zero twist. The pose
// is lifted until no track patch penetrates by more than 1e-6 m.
State3D initial_pose_on_terrain(const HeightField& hf, double x, double y, double yaw,
                                const VehicleParams& vp);

void save_heightfield_csv(const HeightField& hf, const std::string& path);
HeightField load_heightfield_csv(const std::string& path);

}  // namespace tracksim
