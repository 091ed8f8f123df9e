#include "tracksim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "tracksim/integrator.hpp"
#include "tracksim/pseudo_kinematics.hpp"
#include "tracksim/rotation.hpp"
#include "tracksim/wheel_kinematics.hpp"

namespace tracksim {

Twist2D chicane_velocity(const ChicaneParams& p, double t) {
  Twist2D tw;
  tw.v = t <= p.t1 ? p.v_max * t / p.t1 : p.v_max;
  if (t <= p.t1)
    tw.wz = 0.0;
  else if (t <= p.t2)
    tw.wz = p.w_max;
  else
    tw.wz = -p.w_max;
  return tw;
}

std::vector<ReferencePoint> chicane_reference(const ChicaneParams& p, double dt,
                                              const Pose2D& start) {
  // Velocities are sampled and held over each control interval and the pose
  // advanced by the exact held-twist flow, so the reference is exactly
  // realizable by the discrete feed-forward (arcs stay true circles).
  std::vector<ReferencePoint> refs;
  const int n = static_cast<int>(std::round(p.t_end / dt)) + 1;
  refs.reserve(n);
  Pose2D pose = start;
  for (int k = 0; k < n; ++k) {
    const Twist2D tw = chicane_velocity(p, k * dt);
    refs.push_back({pose.x, pose.y, pose.phi, tw.v, tw.wz});
    pose = advance_unicycle(pose, tw.v, tw.wz, dt);
  }
  return refs;
}

nlohmann::json Metrics::to_json() const {
  return {{"mean_exy", mean_exy},   {"max_exy", max_exy},
          {"final_exy", final_exy}, {"mean_ephi", mean_ephi},
          {"final_ephi", final_ephi}, {"int_exy", int_exy},
          {"int_ephi", int_ephi},   {"tf", tf},
          {"converged", converged}};
}

Metrics metrics_from_rows(const std::vector<TrackingRow>& rows) {
  Metrics m;
  if (rows.empty()) {
    m.converged = false;
    return m;
  }
  m.tf = rows.back().t;
  double sum_e = 0.0, sum_p = 0.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    const double e = rows[i].e_xy;
    const double p = std::abs(rows[i].e_phi);
    sum_e += e;
    sum_p += p;
    m.max_exy = std::max(m.max_exy, e);
    if (i + 1 < rows.size()) {
      const double dt = rows[i + 1].t - rows[i].t;
      m.int_exy += e * dt;
      m.int_ephi += p * dt;
    }
  }
  m.mean_exy = sum_e / rows.size();
  m.mean_ephi = sum_p / rows.size();
  m.final_exy = rows.back().e_xy;
  m.final_ephi = std::abs(rows.back().e_phi);
  return m;
}

Metrics TrackingRun::recompute_metrics() const { return metrics_from_rows(rows); }

void TrackingRun::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw SimError("cannot open " + path + " for writing");
  out.precision(17);
  out << "t,x_ref,y_ref,phi_ref,x,y,phi,e_xy,e_phi,V,alpha_used,v_cmd,wz_cmd,wL,wR\n";
  for (const auto& r : rows) {
    out << r.t << ',' << r.x_ref << ',' << r.y_ref << ',' << r.phi_ref << ',' << r.x
        << ',' << r.y << ',' << r.phi << ',' << r.e_xy << ',' << r.e_phi << ','
        << r.lyapunov << ',' << r.alpha_used << ',' << r.v_cmd << ',' << r.wz_cmd
        << ',' << r.wl << ',' << r.wr << '\n';
  }
}

namespace {

TrackingRow make_row(double t, const ReferencePoint& ref, const Pose2D& pose,
                     const ControlOutput& out) {
  TrackingRow row;
  row.t = t;
  row.x_ref = ref.x;
  row.y_ref = ref.y;
  row.phi_ref = ref.phi;
  row.x = pose.x;
  row.y = pose.y;
  row.phi = pose.phi;
  row.e_xy = out.e_xy;
  row.e_phi = out.e_phi;
  row.lyapunov = out.lyapunov;
  row.alpha_used = out.alpha_used;
  row.v_cmd = out.v_cmd;
  row.wz_cmd = out.wz_cmd;
  row.wl = out.wheels.left;
  row.wr = out.wheels.right;
  return row;
}

}  // namespace

TrackingRun run_tracking_flat(const FlatSimConfig& sim_cfg,
                              const ControllerConfig& ctrl_cfg,
                              const SlipModelSet& models,
                              const std::vector<ReferencePoint>& refs,
                              const Pose2D& initial_offset) {
  TrackingRun run;
  if (refs.empty()) return run;
  FlatSimulator sim(sim_cfg);
  State2D init;
  init.pose = {refs[0].x + initial_offset.x, refs[0].y + initial_offset.y,
               wrap_angle(refs[0].phi + initial_offset.phi)};
  sim.reset(init);
  TrackingController ctrl(ctrl_cfg, sim_cfg.vp, models);

  try {
    for (size_t k = 0; k < refs.size(); ++k) {
      const std::optional<WheelSpeeds> measured =
          k > 0 ? std::optional<WheelSpeeds>(sim.applied_command()) : std::nullopt;
      const ControlOutput out = ctrl.step(sim.state().pose, refs[k], measured);
      run.rows.push_back(make_row(sim.time(), refs[k], sim.state().pose, out));
      if (k + 1 < refs.size()) sim.tick(out.wheels);
    }
  } catch (const NumericalDivergenceError&) {
    run.metrics = metrics_from_rows(run.rows);
    run.metrics.converged = false;
    return run;
  }
  run.metrics = metrics_from_rows(run.rows);
  return run;
}

TrackingRun run_tracking_slope(const SlopeSimConfig& sim_cfg, const HeightField& hf,
                               const ControllerConfig& ctrl_cfg,
                               const SlipModelSet& models,
                               const std::vector<ReferencePoint>& refs,
                               const Pose2D& initial_offset) {
  TrackingRun run;
  if (refs.empty()) return run;
  SlopeSimulator sim(sim_cfg, hf);
  State3D init = initial_pose_on_terrain(
      hf, refs[0].x + initial_offset.x, refs[0].y + initial_offset.y,
      wrap_angle(refs[0].phi + initial_offset.phi), sim_cfg.vp);
  sim.reset(init);
  TrackingController ctrl(ctrl_cfg, sim_cfg.vp, models);

  try {
    for (size_t k = 0; k < refs.size(); ++k) {
      const std::optional<WheelSpeeds> measured =
          k > 0 ? std::optional<WheelSpeeds>(sim.applied_command()) : std::nullopt;
      const ControlOutput out = ctrl.step3d(sim.state(), refs[k], measured);
      Pose2D planar{sim.state().p_com.x(), sim.state().p_com.y(),
                    sim.state().euler.yaw};
      run.rows.push_back(make_row(sim.time(), refs[k], planar, out));
      if (k + 1 < refs.size()) sim.tick(out.wheels);
    }
  } catch (const SimError&) {
    run.metrics = metrics_from_rows(run.rows);
    run.metrics.converged = false;
    return run;
  }
  run.metrics = metrics_from_rows(run.rows);
  return run;
}

TrackingRun run_tracking_pseudo(const SlipModelSet& plant_models,
                                const ControllerConfig& ctrl_cfg,
                                const SlipModelSet& ctrl_models,
                                const std::vector<ReferencePoint>& refs,
                                const Pose2D& initial_offset,
                                const VehicleParams& vp, int substeps) {
  TrackingRun run;
  if (refs.empty()) return run;
  Pose2D pose{refs[0].x + initial_offset.x, refs[0].y + initial_offset.y,
              wrap_angle(refs[0].phi + initial_offset.phi)};
  TrackingController ctrl(ctrl_cfg, vp, ctrl_models);
  std::optional<WheelSpeeds> applied;

  for (size_t k = 0; k < refs.size(); ++k) {
    const ControlOutput out = ctrl.step(pose, refs[k], applied);
    run.rows.push_back(make_row(k * ctrl_cfg.dt, refs[k], pose, out));
    if (k + 1 == refs.size()) break;

    // Plant: commanded wheels through the true slippage maps, RK4 on the
    // tracked kinematics with the twist held over the tick.
    const int sign = out.v_cmd >= 0 ? 1 : -1;
    const SlipParams slip = plant_models.predict(out.wheels, sign);
    const double r = vp.sprocket_radius;
    const double ul = out.wheels.left + slip.beta_l / r;
    const double ur = out.wheels.right + slip.beta_r / r;
    const Twist2D tw = wheels_to_twist({ul, ur}, vp);
    const double h = ctrl_cfg.dt / substeps;
    Eigen::Vector3d x(pose.x, pose.y, pose.phi);
    auto f = [&](const Eigen::Vector3d& q) -> Eigen::Vector3d {
      const double speed = tw.v / std::cos(slip.alpha);
      const double heading = q[2] + slip.alpha;
      return {speed * std::cos(heading), speed * std::sin(heading), tw.wz};
    };
    for (int i = 0; i < substeps; ++i) {
      const Eigen::Vector3d k1 = f(x);
      const Eigen::Vector3d k2 = f(x + 0.5 * h * k1);
      const Eigen::Vector3d k3 = f(x + 0.5 * h * k2);
      const Eigen::Vector3d k4 = f(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    pose = {x[0], x[1], wrap_angle(x[2])};
    applied = out.wheels;
  }
  run.metrics = metrics_from_rows(run.rows);
  return run;
}

PlannerKind planner_from_string(const std::string& s) {
  if (s == "DP") return PlannerKind::kDubins;
  if (s == "CP") return PlannerKind::kClothoid;
  if (s == "SLP") return PlannerKind::kShooting;
  if (s == "SLP_var") return PlannerKind::kShootingVar;
  if (s == "none") return PlannerKind::kNone;
  throw ConfigError("unknown planner '" + s + "'");
}

std::string to_string(PlannerKind k) {
  switch (k) {
    case PlannerKind::kDubins:
      return "DP";
    case PlannerKind::kClothoid:
      return "CP";
    case PlannerKind::kShooting:
      return "SLP";
    case PlannerKind::kShootingVar:
      return "SLP_var";
    case PlannerKind::kNone:
    default:
      return "none";
  }
}

std::vector<double> normalized_error_trace(const std::vector<TrackingRow>& rows,
                                           int grid) {
  std::vector<double> out(grid, 0.0);
  if (rows.size() < 2) return out;
  const double tf = rows.back().t;
  size_t idx = 0;
  for (int i = 0; i < grid; ++i) {
    const double t = tf * i / (grid - 1);
    while (idx + 1 < rows.size() && rows[idx + 1].t <= t) ++idx;
    if (idx + 1 >= rows.size()) {
      out[i] = rows.back().e_xy;
      continue;
    }
    const double span = rows[idx + 1].t - rows[idx].t;
    const double u = span > 0 ? (t - rows[idx].t) / span : 0.0;
    out[i] = rows[idx].e_xy + u * (rows[idx + 1].e_xy - rows[idx].e_xy);
  }
  return out;
}

namespace {

struct TargetOutcome {
  Metrics uc, slc;
  double tf = 0.0;
  bool planner_failed = false;
  bool ocp_nonconverged = false;
};

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

}  // namespace

const MatrixCellStats& MatrixReport::cell(const std::string& name) const {
  for (const auto& c : cells)
    if (c.name == name) return c;
  throw SimError("no matrix cell named " + name);
}

nlohmann::json MatrixReport::to_json() const {
  nlohmann::json j;
  j["ocp_nonconverged"] = ocp_nonconverged;
  j["ocp_total"] = ocp_total;
  nlohmann::json cj = nlohmann::json::array();
  for (const auto& c : cells) {
    cj.push_back({{"name", c.name},
                  {"mean_exy", c.mean_exy},
                  {"std_exy", c.std_exy},
                  {"mean_ephi", c.mean_ephi},
                  {"std_ephi", c.std_ephi},
                  {"mean_tf_ratio", c.mean_tf_ratio},
                  {"failures", c.failures},
                  {"nonconverged", c.nonconverged}});
  }
  j["cells"] = std::move(cj);
  nlohmann::json tj = nlohmann::json::array();
  for (const auto& t : targets) tj.push_back({t.x, t.y, t.phi});
  j["targets"] = std::move(tj);
  return j;
}

MatrixReport run_planner_matrix(const MatrixRunConfig& cfg,
                                const SlipModelSet& models) {
  MatrixReport report;
  report.targets = halton_targets(cfg.n_targets, cfg.r_min, cfg.r_max);

  FlatSimConfig sim_cfg;
  sim_cfg.vp = cfg.vp;
  sim_cfg.tm.friction_mu = cfg.mu;
  sim_cfg.actuator_noise_std = cfg.noise_std;

  ControllerConfig ctrl_cfg;
  ctrl_cfg.wheel_max = 18.0;

  struct CellAccum {
    PlannerKind planner;
    bool slc;
    std::vector<Metrics> metrics;
    std::vector<double> tf;
  };

  // planner x {UC, SLC} outcomes per target, evaluated in a worker pool.
  struct PerTarget {
    std::vector<Metrics> by_cell;  // 2 * planners
    std::vector<double> tf_by_planner;
    std::vector<int> planner_fail;
    std::vector<int> ocp_noconv;
  };
  std::vector<PerTarget> outcomes(report.targets.size());
  std::atomic<size_t> next{0};

  const int n_planners = static_cast<int>(cfg.planners.size());
  auto worker = [&]() {
    for (size_t ti = next.fetch_add(1); ti < report.targets.size();
         ti = next.fetch_add(1)) {
      PerTarget& res = outcomes[ti];
      res.by_cell.assign(2 * n_planners, Metrics{});
      res.tf_by_planner.assign(n_planners, 0.0);
      res.planner_fail.assign(n_planners, 0);
      res.ocp_noconv.assign(n_planners, 0);

      PlanRequest req;
      req.c0 = Pose2D{};
      req.cf = report.targets[ti];
      req.v_des = cfg.v_des;
      req.v_min = cfg.v_des;
      req.v_max = cfg.v_des;
      req.w_wheel_max = ctrl_cfg.wheel_max;

      Trajectory dubins;
      try {
        dubins = plan_dubins(req, cfg.vp);
      } catch (const SimError&) {
        for (int p = 0; p < n_planners; ++p) res.planner_fail[p] = 1;
        continue;
      }

      for (int p = 0; p < n_planners; ++p) {
        Trajectory traj;
        bool failed = false;
        switch (cfg.planners[p]) {
          case PlannerKind::kDubins:
            traj = dubins;
            break;
          case PlannerKind::kClothoid:
            try {
              traj = plan_clothoid(req, cfg.vp);
            } catch (const SimError&) {
              traj = dubins;  // documented fallback
              failed = true;
            }
            break;
          case PlannerKind::kShooting:
          case PlannerKind::kShootingVar: {
            PlanRequest r2 = req;
            if (cfg.planners[p] == PlannerKind::kShootingVar) r2.v_min = 0.0;
            const OcpResult ocp = plan_ocp(r2, models, dubins, cfg.vp, cfg.ocp);
            traj = ocp.traj;
            if (!ocp.sol.converged) res.ocp_noconv[p] = 1;
            break;
          }
          case PlannerKind::kNone:
            traj = dubins;
            break;
        }
        res.planner_fail[p] = failed ? 1 : 0;
        res.tf_by_planner[p] = traj.duration();

        const std::vector<ReferencePoint> refs = time_series_reference(traj, 5e-3);
        for (int c = 0; c < 2; ++c) {
          const bool slc = c == 1;
          FlatSimConfig run_cfg = sim_cfg;
          run_cfg.rng_seed = cfg.seed + static_cast<uint32_t>(ti) * 17u +
                             static_cast<uint32_t>(p) * 3u + c;
          const TrackingRun run = run_tracking_flat(
              run_cfg, ctrl_cfg, slc ? models : SlipModelSet::zero(), refs,
              Pose2D{});
          Metrics m = run.metrics;
          // Matrix metrics use the normalized-time error trace.
          const std::vector<double> trace = normalized_error_trace(run.rows);
          m.mean_exy = mean_of(trace);
          res.by_cell[2 * p + c] = m;
        }
      }
    }
  };

  std::vector<std::thread> pool;
  const int n_threads = std::max(1, cfg.jobs);
  for (int t = 0; t < n_threads - 1; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // Aggregate.
  std::vector<double> dubins_tf(report.targets.size(), 1.0);
  int dubins_idx = -1;
  for (int p = 0; p < n_planners; ++p)
    if (cfg.planners[p] == PlannerKind::kDubins) dubins_idx = p;
  if (dubins_idx >= 0)
    for (size_t ti = 0; ti < outcomes.size(); ++ti)
      dubins_tf[ti] = std::max(1e-9, outcomes[ti].tf_by_planner[dubins_idx]);

  for (int p = 0; p < n_planners; ++p) {
    for (int c = 0; c < 2; ++c) {
      MatrixCellStats cell;
      cell.name = (c == 1 ? std::string("SLC-") : std::string("UC-")) +
                  to_string(cfg.planners[p]);
      std::vector<double> exy, ephi, ratio;
      for (size_t ti = 0; ti < outcomes.size(); ++ti) {
        const Metrics& m = outcomes[ti].by_cell[2 * p + c];
        cell.per_target.push_back(m);
        if (!m.converged) {
          ++cell.failures;
          continue;
        }
        exy.push_back(m.mean_exy);
        ephi.push_back(m.mean_ephi);
        ratio.push_back(outcomes[ti].tf_by_planner[p] / dubins_tf[ti]);
        cell.nonconverged += outcomes[ti].ocp_noconv[p];
      }
      cell.mean_exy = mean_of(exy);
      cell.std_exy = std_of(exy);
      cell.mean_ephi = mean_of(ephi);
      cell.std_ephi = std_of(ephi);
      cell.mean_tf_ratio = mean_of(ratio);
      report.cells.push_back(std::move(cell));
    }
    if (cfg.planners[p] == PlannerKind::kShooting ||
        cfg.planners[p] == PlannerKind::kShootingVar) {
      for (size_t ti = 0; ti < outcomes.size(); ++ti) {
        report.ocp_total += 1;
        report.ocp_nonconverged += outcomes[ti].ocp_noconv[p];
      }
    }
  }
  return report;
}

nlohmann::json LoadComparisonReport::to_json() const {
  return {{"divergence_flat", divergence_flat},
          {"divergence_slope", divergence_slope},
          {"uniform_step_us", uniform_step_us},
          {"nonuniform_step_us", nonuniform_step_us},
          {"step_cost_ratio", step_cost_ratio},
          {"path_length", path_length}};
}

namespace {

struct OpenLoopResult {
  SlopeTrace trace;
  double step_us = 0.0;
  double path_length = 0.0;
};

OpenLoopResult open_loop_slope(const SlopeSimConfig& cfg, const HeightField& hf,
                               const ChicaneParams& chicane, const Pose2D& start) {
  SlopeSimulator sim(cfg, hf);
  sim.reset(initial_pose_on_terrain(hf, start.x, start.y, start.phi, cfg.vp));
  OpenLoopResult out;
  const int ticks = static_cast<int>(std::round(chicane.t_end / cfg.control_dt));
  Eigen::Vector2d prev(sim.state().p_com.x(), sim.state().p_com.y());
  for (int k = 0; k < ticks; ++k) {
    const Twist2D tw = chicane_velocity(chicane, sim.time());
    const WheelSpeeds cmd = twist_to_wheels(tw.v, tw.wz, cfg.vp);
    const State3D& s = sim.state();
    out.trace.rows.push_back({sim.time(), s.p_com.x(), s.p_com.y(), s.p_com.z(),
                              s.euler.roll, s.euler.pitch, s.euler.yaw, s.v_body.x(),
                              s.v_body.y(), s.w_body.z(), sim.last_fn_left(),
                              sim.last_fn_right(), cmd.left, cmd.right});
    sim.tick(cmd);
    const Eigen::Vector2d cur(sim.state().p_com.x(), sim.state().p_com.y());
    out.path_length += (cur - prev).norm();
    prev = cur;
  }
  const State3D& s = sim.state();
  out.trace.rows.push_back({sim.time(), s.p_com.x(), s.p_com.y(), s.p_com.z(),
                            s.euler.roll, s.euler.pitch, s.euler.yaw, s.v_body.x(),
                            s.v_body.y(), s.w_body.z(), sim.last_fn_left(),
                            sim.last_fn_right(), 0.0, 0.0});
  out.step_us = 1e6 * sim.step_seconds() / std::max(1L, sim.steps());
  return out;
}

double trace_divergence(const SlopeTrace& a, const SlopeTrace& b, double path_length) {
  const size_t n = std::min(a.rows.size(), b.rows.size());
  double max_d = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = a.rows[i].x - b.rows[i].x;
    const double dy = a.rows[i].y - b.rows[i].y;
    const double dz = a.rows[i].z - b.rows[i].z;
    max_d = std::max(max_d, std::sqrt(dx * dx + dy * dy + dz * dz));
  }
  return max_d / std::max(path_length, 1e-9);
}

}  // namespace

LoadComparisonReport run_load_comparison(const LoadComparisonConfig& cfg) {
  LoadComparisonReport rep;

  SlopeSimConfig base;
  base.vp = cfg.vp;
  base.cp = cfg.cp;
  base.tm.friction_mu = cfg.mu;

  // Flat cross-check: both modes must agree.
  {
    const HeightField flat = make_flat(25.0, 0.5);
    SlopeSimConfig uni = base;
    uni.mode = LoadMode::kUniform;
    SlopeSimConfig non = base;
    non.mode = LoadMode::kNonuniform;
    const Pose2D start{-1.0, -6.0, 0.3};
    const OpenLoopResult a = open_loop_slope(uni, flat, cfg.chicane, start);
    const OpenLoopResult b = open_loop_slope(non, flat, cfg.chicane, start);
    rep.divergence_flat = trace_divergence(a.trace, b.trace, b.path_length);
  }

  // Sloped terrain: same commands, both load models, timed.
  {
    const HeightField hilly =
        make_random_slope(cfg.terrain_seed, 2.5, 12, 30.0, 0.5);
    SlopeSimConfig uni = base;
    uni.mode = LoadMode::kUniform;
    SlopeSimConfig non = base;
    non.mode = LoadMode::kNonuniform;
    const Pose2D start{-4.0, -6.0, 0.4};
    const OpenLoopResult a = open_loop_slope(uni, hilly, cfg.chicane, start);
    const OpenLoopResult b = open_loop_slope(non, hilly, cfg.chicane, start);
    rep.divergence_slope = trace_divergence(a.trace, b.trace, b.path_length);
    rep.uniform_step_us = a.step_us;
    rep.nonuniform_step_us = b.step_us;
    rep.step_cost_ratio = b.step_us / std::max(1e-9, a.step_us);
    rep.path_length = b.path_length;
  }
  return rep;
}

nlohmann::json StiffnessReport::to_json() const {
  nlohmann::json j;
  j["speed"] = speed;
  j["k_max"] = k_max;
  j["analytic_slope"] = analytic_slope;
  return j;
}

StiffnessReport run_stiffness_test(double k_lin, double k_speed, double v_top) {
  SlopeSimConfig cfg;
  cfg.mode = LoadMode::kNonuniform;
  cfg.cp.k_lin = k_lin;
  cfg.cp.k_speed = k_speed;
  cfg.cp.d_lin = 0.1 * k_lin;
  const HeightField flat = make_flat(40.0, 0.5);
  SlopeSimulator sim(cfg, flat);
  sim.reset(initial_pose_on_terrain(flat, -30.0, 0.0, 0.0, cfg.vp));

  StiffnessReport rep;
  rep.analytic_slope = k_lin * k_speed * 2.0 * cfg.vp.track_semilength;
  const double duration = 20.0;
  const int ticks = static_cast<int>(duration / cfg.control_dt);
  for (int k = 0; k < ticks; ++k) {
    const double v_cmd = v_top * sim.time() / duration;
    sim.tick(twist_to_wheels(v_cmd, 0.0, cfg.vp));
    if (k % 40 == 0) {
      rep.speed.push_back(sim.state().v_body.x());
      rep.k_max.push_back(sim.last_max_stiffness());
    }
  }
  return rep;
}

}  // namespace tracksim
