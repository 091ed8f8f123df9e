#include "tracksim/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "tracksim/errors.hpp"
#include "tracksim/rotation.hpp"
#include "tracksim/terramechanics.hpp"

namespace tracksim {

TerrainQuery raycast_elevation(const HeightField& hf, double x, double y) {
  TerrainQuery q;
  if (!hf.contains(x, y)) return q;

  double fx = (x - hf.origin_x) / hf.cell;
  double fy = (y - hf.origin_y) / hf.cell;
  int ix = std::min(static_cast<int>(fx), hf.nx - 2);
  int iy = std::min(static_cast<int>(fy), hf.ny - 2);
  fx -= ix;
  fy -= iy;

  const double z00 = hf.at(ix, iy);
  const double z10 = hf.at(ix + 1, iy);
  const double z01 = hf.at(ix, iy + 1);
  const double z11 = hf.at(ix + 1, iy + 1);
  const double c = hf.cell;

  // Cell split along the (0,0)-(1,1) diagonal. The vertical ray at (fx, fy)
  // hits the lower-right triangle when fy <= fx, the upper-left otherwise.
  Eigen::Vector3d e1, e2;
  double zq;
  if (fy <= fx) {
    // vertices (0,0), (1,0), (1,1)
    zq = z00 + fx * (z10 - z00) + fy * (z11 - z10);
    e1 = Eigen::Vector3d(c, 0.0, z10 - z00);
    e2 = Eigen::Vector3d(c, c, z11 - z00);
  } else {
    // vertices (0,0), (1,1), (0,1)
    zq = z00 + fx * (z11 - z01) + fy * (z01 - z00);
    e1 = Eigen::Vector3d(c, c, z11 - z00);
    e2 = Eigen::Vector3d(0.0, c, z01 - z00);
  }
  q.hit = true;
  q.elevation = zq;
  q.normal = e1.cross(e2).normalized();
  if (q.normal.z() < 0) q.normal = -q.normal;
  return q;
}

Eigen::Matrix3d terrain_frame(const Eigen::Vector3d& normal, double yaw_hint) {
  const Eigen::Vector3d n = normal.normalized();
  const Eigen::Vector3d heading(std::cos(yaw_hint), std::sin(yaw_hint), 0.0);
  Eigen::Vector3d tx = heading - n.dot(heading) * n;
  const double norm = tx.norm();
  if (norm < 1e-9) throw DegenerateNormalError();
  tx /= norm;
  const Eigen::Vector3d ty = n.cross(tx);
  Eigen::Matrix3d r;
  r.col(0) = tx;
  r.col(1) = ty;
  r.col(2) = n;
  return r;
}

namespace {

HeightField alloc_grid(double extent, double cell) {
  HeightField hf;
  hf.cell = cell;
  hf.nx = hf.ny = std::max(2, static_cast<int>(std::round(2.0 * extent / cell)) + 1);
  hf.origin_x = hf.origin_y = -extent;
  hf.z.assign(static_cast<size_t>(hf.nx) * hf.ny, 0.0);
  return hf;
}

}  // namespace

HeightField make_flat(double extent, double cell, double z0) {
  HeightField hf = alloc_grid(extent, cell);
  std::fill(hf.z.begin(), hf.z.end(), z0);
  return hf;
}

HeightField make_ramp(double slope_rad, double extent, double cell) {
  HeightField hf = alloc_grid(extent, cell);
  const double grad = std::tan(slope_rad);
  for (int ix = 0; ix < hf.nx; ++ix) {
    const double x = hf.origin_x + ix * hf.cell;
    for (int iy = 0; iy < hf.ny; ++iy) hf.at(ix, iy) = grad * x;
  }
  return hf;
}

HeightField make_random_slope(uint32_t seed, double amplitude, int smoothness,
                              double extent, double cell) {
  HeightField hf = alloc_grid(extent, cell);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (auto& v : hf.z) v = uni(rng);

  // Separable 3-tap box blur, repeated; edges clamp.
  std::vector<double> tmp(hf.z.size());
  auto idx = [&](int ix, int iy) { return static_cast<size_t>(ix) * hf.ny + iy; };
  for (int pass = 0; pass < smoothness; ++pass) {
    for (int ix = 0; ix < hf.nx; ++ix)
      for (int iy = 0; iy < hf.ny; ++iy) {
        const int xm = std::max(ix - 1, 0), xp = std::min(ix + 1, hf.nx - 1);
        tmp[idx(ix, iy)] =
            (hf.z[idx(xm, iy)] + hf.z[idx(ix, iy)] + hf.z[idx(xp, iy)]) / 3.0;
      }
    for (int ix = 0; ix < hf.nx; ++ix)
      for (int iy = 0; iy < hf.ny; ++iy) {
        const int ym = std::max(iy - 1, 0), yp = std::min(iy + 1, hf.ny - 1);
        hf.z[idx(ix, iy)] =
            (tmp[idx(ix, ym)] + tmp[idx(ix, iy)] + tmp[idx(ix, yp)]) / 3.0;
      }
  }

  const auto [lo, hi] = std::minmax_element(hf.z.begin(), hf.z.end());
  const double span = std::max(*hi - *lo, 1e-12);
  for (auto& v : hf.z) v = amplitude * (2.0 * (v - *lo) / span - 1.0);
  return hf;
}

State3D initial_pose_on_terrain(const HeightField& hf, double x, double y, double yaw,
                                const VehicleParams& vp) {
  const TerrainQuery q = raycast_elevation(hf, x, y);
  if (!q.hit) throw OutOfTerrainError(x, y);
  const Eigen::Matrix3d r = terrain_frame(q.normal, yaw);

  State3D s;
  s.euler = euler_from_rotation(r);
  s.p_com = Eigen::Vector3d(x, y, q.elevation) + vp.com_height * q.normal;

  // Lift along world z until every patch clears the surface.
  const TrackFootprint left = TrackFootprint::build(TrackSide::kLeft, vp);
  const TrackFootprint right = TrackFootprint::build(TrackSide::kRight, vp);
  double max_pen = 0.0;
  for (const TrackFootprint* fp : {&left, &right}) {
    for (const auto& pc : fp->patch_centers) {
      const Eigen::Vector3d p =
          s.p_com + r * Eigen::Vector3d(pc.x(), pc.y(), -vp.com_height);
      const TerrainQuery pq = raycast_elevation(hf, p.x(), p.y());
      if (!pq.hit) throw OutOfTerrainError(p.x(), p.y());
      max_pen = std::max(max_pen, pq.elevation - p.z());
    }
  }
  if (max_pen > 0.0) s.p_com.z() += max_pen;
  return s;
}

void save_heightfield_csv(const HeightField& hf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SimError("cannot open " + path + " for writing");
  out.precision(17);
  out << "origin_x,origin_y,cell_size,nx,ny\n";
  out << hf.origin_x << ',' << hf.origin_y << ',' << hf.cell << ',' << hf.nx << ','
      << hf.ny << '\n';
  for (int iy = 0; iy < hf.ny; ++iy) {
    for (int ix = 0; ix < hf.nx; ++ix) {
      out << hf.at(ix, iy);
      out << (ix + 1 == hf.nx ? '\n' : ',');
    }
  }
}

HeightField load_heightfield_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SimError("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::getline(in, line);
  HeightField hf;
  {
    std::istringstream ss(line);
    char comma;
    ss >> hf.origin_x >> comma >> hf.origin_y >> comma >> hf.cell >> comma >> hf.nx >>
        comma >> hf.ny;
  }
  if (hf.nx < 2 || hf.ny < 2 || hf.cell <= 0)
    throw SimError("malformed heightfield header in " + path);
  hf.z.assign(static_cast<size_t>(hf.nx) * hf.ny, 0.0);
  for (int iy = 0; iy < hf.ny; ++iy) {
    if (!std::getline(in, line)) throw SimError("truncated heightfield " + path);
    std::istringstream ss(line);
    std::string tok;
    for (int ix = 0; ix < hf.nx; ++ix) {
      if (!std::getline(ss, tok, ',')) throw SimError("short row in " + path);
      hf.at(ix, iy) = std::stod(tok);
    }
  }
  return hf;
}

}  // namespace tracksim
