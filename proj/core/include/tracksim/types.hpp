#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "tracksim/errors.hpp"

namespace tracksim {

inline constexpr double kGravity = 9.81;  // m/s^2

// Wraps an angle to [-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * M_PI);
  // remainder() returns exactly -pi for some inputs; fold onto +pi to keep
  // the closed interval convention stable.
  if (w == -M_PI) w = M_PI;
  return w;
}

// Mass, geometry and footprint discretization of the vehicle.
struct VehicleParams {
  double mass = 62.0;                                  // kg
  Eigen::Matrix3d inertia_body =
      Eigen::Vector3d(2.18, 2.81, 4.5).asDiagonal();   // kg m^2, body frame
  double inertia_zz = 4.5;                             // kg m^2, planar model
  double com_height = 0.25;                            // m above track bottom
  double track_gauge = 0.606;                          // m between centerlines (B)
  double track_semilength = 0.35;                      // m, track length = 2 l
  double track_area = 0.07;                            // m^2 per track (A_t)
  double sprocket_radius = 0.0856;                     // m
  double rolling_coeff = 0.025;                        // dimensionless (c_r)
  int patches_longitudinal = 10;
  int patches_lateral = 4;

  int patch_count() const { return patches_longitudinal * patches_lateral; }
  double patch_area() const { return track_area / patch_count(); }
  double track_width() const { return track_area / (2.0 * track_semilength); }

  bool valid() const {
    if (!(mass > 0 && com_height > 0 && track_gauge > 0 && track_semilength > 0 &&
          track_area > 0 && sprocket_radius > 0 && rolling_coeff >= 0 &&
          patches_longitudinal > 0 && patches_lateral > 0 && inertia_zz > 0)) {
      return false;
    }
    if (!inertia_body.isApprox(inertia_body.transpose(), 1e-12)) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(inertia_body);
    return es.eigenvalues().minCoeff() > 0;
  }
};

// Soil shear parameters of the brush-bristle contact model.
struct TerramechParams {
  double friction_mu = 0.1;   // dimensionless
  double cohesion = 0.0;      // Pa
  double shear_modulus = 1e-3;  // shear deformation modulus K (m of slip)

  bool valid() const { return friction_mu >= 0 && cohesion >= 0 && shear_modulus > 0; }
};

// Terrain spring-damper compliance (slope simulator).
struct ComplianceParams {
  double k_lin = 1e5;       // N/m
  double d_lin = 0.5e4;     // N s/m
  double k_tor = 1e4;       // N m/rad
  double d_tor = 5e2;       // N m s/rad
  double k_speed = 10.5;    // N s/m^2, stiffness increase rate with speed (K_tp)

  bool valid() const {
    return k_lin >= 0 && d_lin >= 0 && k_tor >= 0 && d_tor >= 0;
  }
};

struct Pose2D {
  double x = 0.0;    // m, world
  double y = 0.0;    // m, world
  double phi = 0.0;  // rad, wrapped to [-pi, pi] at state writes
};

// Planar pose plus body-frame twist.
struct State2D {
  Pose2D pose;
  double vx_b = 0.0;  // m/s, longitudinal body velocity
  double vy_b = 0.0;  // m/s, lateral body velocity
  double wz = 0.0;    // rad/s

  Eigen::Matrix<double, 6, 1> to_vector() const {
    Eigen::Matrix<double, 6, 1> v;
    v << pose.x, pose.y, pose.phi, vx_b, vy_b, wz;
    return v;
  }
  static State2D from_vector(const Eigen::Matrix<double, 6, 1>& v, bool wrap = true) {
    State2D s;
    s.pose.x = v[0];
    s.pose.y = v[1];
    s.pose.phi = wrap ? wrap_angle(v[2]) : v[2];
    s.vx_b = v[3];
    s.vy_b = v[4];
    s.wz = v[5];
    return s;
  }
};

// ZYX Euler triple (roll, pitch, yaw); R = Rz(yaw) Ry(pitch) Rx(roll).
struct EulerZyx {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

// Full rigid-body state for the slope simulator.
struct State3D {
  Eigen::Vector3d p_com = Eigen::Vector3d::Zero();   // m, world
  EulerZyx euler;                                    // rad, pitch in (-pi/2, pi/2)
  Eigen::Vector3d v_body = Eigen::Vector3d::Zero();  // m/s
  Eigen::Vector3d w_body = Eigen::Vector3d::Zero();  // rad/s

  Eigen::Matrix<double, 12, 1> to_vector() const {
    Eigen::Matrix<double, 12, 1> v;
    v << p_com, euler.roll, euler.pitch, euler.yaw, v_body, w_body;
    return v;
  }
  static State3D from_vector(const Eigen::Matrix<double, 12, 1>& v, bool wrap = true) {
    State3D s;
    s.p_com = v.segment<3>(0);
    s.euler.roll = wrap ? wrap_angle(v[3]) : v[3];
    s.euler.pitch = wrap ? wrap_angle(v[4]) : v[4];
    s.euler.yaw = wrap ? wrap_angle(v[5]) : v[5];
    s.v_body = v.segment<3>(6);
    s.w_body = v.segment<3>(9);
    return s;
  }
};

// Sprocket wheel speeds, rad/s.
struct WheelSpeeds {
  double left = 0.0;
  double right = 0.0;
};

// Lumped slippage parameters of the pseudo-kinematic model.
struct SlipParams {
  double alpha = 0.0;   // rad, lateral slip angle
  double beta_l = 0.0;  // m/s, left longitudinal slippage
  double beta_r = 0.0;  // m/s, right longitudinal slippage
};

struct Twist2D {
  double v = 0.0;   // m/s
  double wz = 0.0;  // rad/s
};

}  // namespace tracksim
