#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "tracksim/control.hpp"
#include "tracksim/dynamics2d.hpp"
#include "tracksim/dynamics3d.hpp"
#include "tracksim/halton.hpp"
#include "tracksim/planners.hpp"
#include "tracksim/slip_identification.hpp"

namespace tracksim {

// Chicane velocity profile: ramp to v_max over [0, t1], then constant; yaw
// rate 0, +w_max on [t1, t2], -w_max afterwards (deliberate discontinuity).
struct ChicaneParams {
  double v_max = 0.2;   // m/s
  double w_max = 0.3;   // rad/s
  double t1 = 2.0;      // s
  double t2 = 12.0;     // s
  double t_end = 20.0;  // s
};

Twist2D chicane_velocity(const ChicaneParams& p, double t);

// Reference states by integrating the desired unicycle under the chicane
// profile, sampled at dt.
std::vector<ReferencePoint> chicane_reference(const ChicaneParams& p, double dt,
                                              const Pose2D& start = Pose2D{});

struct Metrics {
  double mean_exy = 0.0, max_exy = 0.0, final_exy = 0.0;
  double mean_ephi = 0.0, final_ephi = 0.0;
  double int_exy = 0.0, int_ephi = 0.0;  // time integrals
  double tf = 0.0;
  bool converged = true;  // false on numerical divergence / planner failure

  nlohmann::json to_json() const;
};

struct TrackingRow {
  double t = 0.0;
  double x_ref = 0.0, y_ref = 0.0, phi_ref = 0.0;
  double x = 0.0, y = 0.0, phi = 0.0;
  double e_xy = 0.0, e_phi = 0.0, lyapunov = 0.0, alpha_used = 0.0;
  double v_cmd = 0.0, wz_cmd = 0.0, wl = 0.0, wr = 0.0;
};

struct TrackingRun {
  Metrics metrics;
  std::vector<TrackingRow> rows;

  void save_csv(const std::string& path) const;
  Metrics recompute_metrics() const;  // from rows only (export fidelity)
};

Metrics metrics_from_rows(const std::vector<TrackingRow>& rows);

// Closed-loop tracking on the flat distributed model. The initial state is
// offset from the first reference point.
TrackingRun run_tracking_flat(const FlatSimConfig& sim_cfg,
                              const ControllerConfig& ctrl_cfg,
                              const SlipModelSet& models,
                              const std::vector<ReferencePoint>& refs,
                              const Pose2D& initial_offset);

// Same on the sloped-terrain model with body-frame errors.
TrackingRun run_tracking_slope(const SlopeSimConfig& sim_cfg, const HeightField& hf,
                               const ControllerConfig& ctrl_cfg,
                               const SlipModelSet& models,
                               const std::vector<ReferencePoint>& refs,
                               const Pose2D& initial_offset);

// Ideal pseudo-kinematic plant (model-matched): wheel commands map through
// the plant slip models, pose integrates the tracked kinematics by RK4.
TrackingRun run_tracking_pseudo(const SlipModelSet& plant_models,
                                const ControllerConfig& ctrl_cfg,
                                const SlipModelSet& ctrl_models,
                                const std::vector<ReferencePoint>& refs,
                                const Pose2D& initial_offset,
                                const VehicleParams& vp, int substeps = 10);

// ---------------------------------------------------------------------------
// Planner comparison over Halton targets.

enum class PlannerKind { kDubins, kClothoid, kShooting, kShootingVar, kNone };
PlannerKind planner_from_string(const std::string& s);
std::string to_string(PlannerKind k);

struct MatrixRunConfig {
  int n_targets = 100;
  double r_min = 2.0, r_max = 4.0;
  double v_des = 0.4;
  double mu = 0.4;
  double noise_std = 0.02;
  uint32_t seed = 0;
  int jobs = 1;
  std::vector<PlannerKind> planners = {PlannerKind::kDubins, PlannerKind::kClothoid,
                                       PlannerKind::kShooting};
  OcpOptions ocp;
  VehicleParams vp;
};

struct MatrixCellStats {
  std::string name;              // e.g. "SLC-DP"
  double mean_exy = 0.0, std_exy = 0.0;
  double mean_ephi = 0.0, std_ephi = 0.0;
  double mean_tf_ratio = 0.0;    // vs Dubins duration
  int failures = 0;              // tracking divergence / planner failure
  int nonconverged = 0;          // OCP only
  std::vector<Metrics> per_target;
};

struct MatrixReport {
  std::vector<Pose2D> targets;
  std::vector<MatrixCellStats> cells;
  int ocp_nonconverged = 0;
  int ocp_total = 0;

  const MatrixCellStats& cell(const std::string& name) const;
  nlohmann::json to_json() const;
};

MatrixReport run_planner_matrix(const MatrixRunConfig& cfg,
                                const SlipModelSet& models);

// Normalized-time (t/Tf on a fixed 1000-point grid) error trace used by the
// matrix metrics.
std::vector<double> normalized_error_trace(const std::vector<TrackingRow>& rows,
                                           int grid = 1000);

// ---------------------------------------------------------------------------
// Load-model comparison (uniform vs nonuniform) on flat and sloped terrain.

struct LoadComparisonConfig {
  ChicaneParams chicane{0.8, 0.6, 2.0, 12.0, 20.0};
  double mu = 0.6;
  uint32_t terrain_seed = 7;
  VehicleParams vp;
  ComplianceParams cp;
};

struct LoadComparisonReport {
  double divergence_flat = 0.0;   // fraction of path length
  double divergence_slope = 0.0;
  double uniform_step_us = 0.0;   // mean per integration step
  double nonuniform_step_us = 0.0;
  double step_cost_ratio = 0.0;
  double path_length = 0.0;

  nlohmann::json to_json() const;
};

LoadComparisonReport run_load_comparison(const LoadComparisonConfig& cfg);

// Speed-dependent stiffness demo: straight ramp of commanded speed on soft
// ground; reports max patch stiffness per speed sample.
struct StiffnessReport {
  std::vector<double> speed;      // m/s, measured body speed
  std::vector<double> k_max;      // N/m
  double analytic_slope = 0.0;    // K_t K_tp 2l
  nlohmann::json to_json() const;
};

StiffnessReport run_stiffness_test(double k_lin = 5000.0, double k_speed = 10.5,
                                   double v_top = 1.4);

}  // namespace tracksim
