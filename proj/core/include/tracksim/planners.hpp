#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tracksim/clothoid.hpp"
#include "tracksim/control.hpp"
#include "tracksim/dubins.hpp"
#include "tracksim/slip_model.hpp"
#include "tracksim/types.hpp"

namespace tracksim {

struct PlanRequest {
  Pose2D c0;
  Pose2D cf;
  double v_des = 0.4;       // m/s
  double v_min = 0.4;       // m/s (planner lower bound)
  double v_max = 0.4;       // m/s
  double w_wheel_max = 18.0;  // rad/s
  double dt_plan = 0.01;    // s, output sampling

  bool valid() const {
    return v_min <= v_des && v_des <= v_max && w_wheel_max > 0 && dt_plan > 0;
  }
};

struct TrajSample {
  double t = 0.0;
  double x = 0.0, y = 0.0, phi = 0.0;
  double v = 0.0, wz = 0.0;
};

struct Trajectory {
  std::vector<TrajSample> samples;

  double duration() const { return samples.empty() ? 0.0 : samples.back().t; }
  void save_csv(const std::string& path) const;
  static Trajectory load_csv(const std::string& path);
};

// Largest curvature realizable at v_des under the wheel-speed bound:
// k = (2/B)(w_max r - v)/v, cross-checked against vertex enumeration of the
// wheel box. Throws InfeasibleError when v_des exceeds w_max r (or is
// nonpositive).
double max_curvature(double v_des, double w_wheel_max, const VehicleParams& vp);

Trajectory plan_dubins(const PlanRequest& req, const VehicleParams& vp);
Trajectory plan_clothoid(const PlanRequest& req, const VehicleParams& vp);

struct OcpOptions {
  int knots = 40;
  int substeps = 10;
  double w_time = 1.0;
  double w_smooth = 1.0;
  double slack = 0.02;
  double feas_tol = 1e-3;
  int max_iterations = 500;
  double fd_step_rel = 1e-6;
  double tf_min = 0.1;
};

struct OcpSolution {
  Eigen::MatrixX2d controls;  // wheel-speed knots
  double tf = 0.0;
  bool converged = false;
  int iterations = 0;
  double constraint_violation = 0.0;
  double cost = 0.0;
};

struct OcpResult {
  Trajectory traj;
  OcpSolution sol;
};

// Direct single-shooting transcription of the slippage-aware point-to-point
// problem: decision variables are the wheel-speed knots (zero-order hold)
// and the duration; states follow from RK4 integration of the
// pseudo-kinematic model. Solved by an augmented-Lagrangian outer loop over
// an L-BFGS inner minimizer with central finite-difference gradients.
OcpResult plan_ocp(const PlanRequest& req, const SlipModelSet& models,
                   const Trajectory& warm_start, const VehicleParams& vp,
                   const OcpOptions& opt = {});

// Evaluates the OCP objective and constraint violation of an arbitrary
// control sequence (used for the warm-start descent check).
struct OcpPointEval {
  double cost = 0.0;
  double violation = 0.0;
};
OcpPointEval evaluate_ocp_point(const PlanRequest& req, const SlipModelSet& models,
                                const Eigen::MatrixX2d& controls, double tf,
                                const VehicleParams& vp, const OcpOptions& opt = {});

// Resamples a trajectory onto the control grid: poses linearly interpolated
// (heading via shortest arc), feed-forward velocities zero-order held.
std::vector<ReferencePoint> time_series_reference(const Trajectory& traj,
                                                  double dt_ctrl);

}  // namespace tracksim
