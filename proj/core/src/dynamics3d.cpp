#include "tracksim/dynamics3d.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "tracksim/pseudo_kinematics.hpp"
#include "tracksim/rotation.hpp"

namespace tracksim {

bool SlopeSimConfig::valid() const {
  return dt_sim > 0 && control_dt >= dt_sim && vp.valid() && tm.valid() && cp.valid();
}

WorldWrench normal_force_uniform(const State3D& s, const HeightField& hf,
                                 const ComplianceParams& cp, const VehicleParams& vp) {
  const Eigen::Matrix3d rb = rotation_zyx(s.euler);
  const TerrainQuery q = raycast_elevation(hf, s.p_com.x(), s.p_com.y());
  if (!q.hit) throw OutOfTerrainError(s.p_com.x(), s.p_com.y());

  WorldWrench w;
  const Eigen::Vector3d& n = q.normal;
  const Eigen::Vector3d p_t(s.p_com.x(), s.p_com.y(), q.elevation);
  const Eigen::Vector3d track_level = s.p_com - vp.com_height * rb.col(2);
  const double penetration = n.dot(p_t - track_level);
  if (penetration > 0.0) {
    const Eigen::Vector3d pc_dot = rb * s.v_body;
    double fn = n.dot(cp.k_lin * (p_t - track_level) - cp.d_lin * pc_dot);
    if (fn < 0.0) fn = 0.0;  // unilateral
    w.force = n * fn;
  }

  // Torsional spring on the body-vs-terrain orientation error, damped by the
  // tangential angular velocity; the projector removes the spin-about-normal
  // component.
  const Eigen::Matrix3d rt = terrain_frame(n, s.euler.yaw);
  const EulerZyx err = euler_from_rotation(rt.transpose() * rb);
  const Eigen::Vector3d e_world = -rt * Eigen::Vector3d(err.roll, err.pitch, err.yaw);
  const Eigen::Vector3d omega_world = rb * s.w_body;
  const Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - n * n.transpose();
  w.moment = proj * (cp.k_tor * e_world - cp.d_tor * omega_world);
  return w;
}

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void append_patch_contacts(const State3D& s, const Eigen::Matrix3d& rb,
                           const HeightField& hf, const ComplianceParams& cp,
                           const TrackFootprint& fp, const VehicleParams& vp,
                           std::vector<PatchContact>& out, double* max_stiffness) {
  const double vx = s.v_body.x();
  const double l = vp.track_semilength;
  const double ap = fp.patch_area;
  // Stiffness/damping are per unit track area; each patch carries A_p / A_t.
  const double area_frac = ap / vp.track_area;
  const Eigen::Vector3d body_z_world = rb.col(2);

  for (const auto& pc : fp.patch_centers) {
    PatchContact c;
    c.side = fp.side;
    c.x_body = pc.x();
    const Eigen::Vector3d r_body(pc.x(), pc.y(), -vp.com_height);
    c.p_world = s.p_com + rb * r_body;
    c.p_dot_world = rb * (s.v_body + s.w_body.cross(r_body));

    const TerrainQuery q = raycast_elevation(hf, c.p_world.x(), c.p_world.y());
    if (!q.hit) throw OutOfTerrainError(c.p_world.x(), c.p_world.y());
    c.penetration = q.elevation - c.p_world.z();
    c.rho_dot = -c.p_dot_world.z();

    const double k_ij =
        cp.k_lin * (1.0 + cp.k_speed * vx * (pc.x() + sgn(vx) * l));
    if (max_stiffness) *max_stiffness = std::max(*max_stiffness, k_ij);
    double fz = 0.0;
    if (c.penetration > 0.0) {
      fz = k_ij * c.penetration * area_frac;
      if (c.p_dot_world.z() < 0.0) fz -= cp.d_lin * c.p_dot_world.z() * area_frac;
    }
    c.f_n = Eigen::Vector3d(0.0, 0.0, fz);
    c.sigma = std::max(0.0, body_z_world.dot(c.f_n)) / ap;
    out.push_back(c);
  }
}

}  // namespace

std::vector<PatchContact> patch_contacts_nonuniform(
    const State3D& s, const HeightField& hf, const ComplianceParams& cp,
    const TrackFootprint& left, const TrackFootprint& right, const VehicleParams& vp) {
  std::vector<PatchContact> out;
  out.reserve(left.patch_centers.size() + right.patch_centers.size());
  const Eigen::Matrix3d rb = rotation_zyx(s.euler);
  append_patch_contacts(s, rb, hf, cp, left, vp, out, nullptr);
  append_patch_contacts(s, rb, hf, cp, right, vp, out, nullptr);
  return out;
}

double rolling_resistance(std::span<const PatchContact> contacts, double vx_b,
                          double c_r) {
  double load = 0.0;
  for (const auto& c : contacts) load += c.f_n.norm();
  return load * c_r * sgn(vx_b);
}

namespace {

struct SlopeForces {
  WorldWrench normal;                 // world frame
  double fn_left = 0.0, fn_right = 0.0;
  double load_left = 0.0, load_right = 0.0;
  std::vector<double> sigma_left, sigma_right;
  bool uniform = false;
  double sigma_uniform = 0.0;
};

}  // namespace

// Core evaluation shared between the free function and the simulator.
// Exposed via slope_rhs below.
namespace detail {

Eigen::Matrix<double, 12, 1> slope_rhs_eval(const State3D& s, const WheelSpeeds& w,
                                            const HeightField& hf,
                                            const SlopeSimConfig& cfg,
                                            const TrackFootprint& left,
                                            const TrackFootprint& right,
                                            std::vector<PatchContact>* scratch,
                                            double* fn_left_out, double* fn_right_out,
                                            double* max_stiffness_out) {
  const VehicleParams& vp = cfg.vp;
  const Eigen::Matrix3d rb = rotation_zyx(s.euler);
  const Eigen::Matrix3d t_map = euler_rate_map(s.euler);  // throws on gimbal lock

  SlopeForces f;
  if (cfg.mode == LoadMode::kUniform) {
    f.uniform = true;
    f.normal = normal_force_uniform(s, hf, cfg.cp, vp);
    f.sigma_uniform = uniform_pressure(vp, cfg.gravity);
    f.fn_left = f.fn_right = f.normal.force.norm() / 2.0;
    f.load_left = f.load_right = f.fn_left;
  } else {
    std::vector<PatchContact> local;
    std::vector<PatchContact>& contacts = scratch ? *scratch : local;
    contacts.clear();
    double max_k = 0.0;
    append_patch_contacts(s, rb, hf, cfg.cp, left, vp, contacts, &max_k);
    append_patch_contacts(s, rb, hf, cfg.cp, right, vp, contacts, &max_k);
    if (max_stiffness_out) *max_stiffness_out = max_k;

    const size_t n_left = left.patch_centers.size();
    f.sigma_left.resize(n_left);
    f.sigma_right.resize(right.patch_centers.size());
    for (size_t i = 0; i < contacts.size(); ++i) {
      const PatchContact& c = contacts[i];
      f.normal.force += c.f_n;
      f.normal.moment += (c.p_world - s.p_com).cross(c.f_n);
      const double fmag = c.f_n.norm();
      if (i < n_left) {
        f.sigma_left[i] = c.sigma;
        f.fn_left += c.f_n.z();
        f.load_left += fmag;
      } else {
        f.sigma_right[i - n_left] = c.sigma;
        f.fn_right += c.f_n.z();
        f.load_right += fmag;
      }
    }
  }
  if (fn_left_out) *fn_left_out = f.fn_left;
  if (fn_right_out) *fn_right_out = f.fn_right;

  // Tangential soil interactions reuse the planar model on body-frame
  // quantities; only the shear magnitude and body direction matter here.
  const PlanarState ps{s.v_body.x(), s.v_body.y(), s.w_body.z(), s.euler.yaw};
  const TrackWrench twl =
      f.uniform ? track_wrench(left, ps, w.left, f.sigma_uniform, cfg.tm, vp)
                : track_wrench(left, ps, w.left, std::span<const double>(f.sigma_left),
                               cfg.tm, vp);
  const TrackWrench twr =
      f.uniform
          ? track_wrench(right, ps, w.right, f.sigma_uniform, cfg.tm, vp)
          : track_wrench(right, ps, w.right, std::span<const double>(f.sigma_right),
                         cfg.tm, vp);

  const TrackGroundSpeeds ts =
      track_ground_speeds(s.v_body.x(), s.w_body.z(), vp.track_gauge);
  const RollingWrench rr =
      rolling_wrench(f.load_left, f.load_right, ts.left, ts.right, vp);

  const Eigen::Vector3d gravity_b =
      rb.transpose() * Eigen::Vector3d(0.0, 0.0, -vp.mass * cfg.gravity);
  const Eigen::Vector3d force_b =
      gravity_b + rb.transpose() * f.normal.force +
      Eigen::Vector3d(twl.fx + twr.fx + rr.fx, twl.fy + twr.fy, 0.0);
  const Eigen::Vector3d moment_b =
      rb.transpose() * f.normal.moment +
      Eigen::Vector3d(0.0, 0.0, twl.mz + twr.mz + rr.mz);

  const Eigen::Vector3d vdot =
      force_b / vp.mass - s.w_body.cross(s.v_body);
  const Eigen::Vector3d wdot = vp.inertia_body.ldlt().solve(
      moment_b - s.w_body.cross(vp.inertia_body * s.w_body));

  Eigen::Matrix<double, 12, 1> d;
  d.segment<3>(0) = rb * s.v_body;
  d.segment<3>(3) = t_map.inverse() * s.w_body;
  d.segment<3>(6) = vdot;
  d.segment<3>(9) = wdot;
  return d;
}

}  // namespace detail

Eigen::Matrix<double, 12, 1> slope_rhs(const State3D& s, const WheelSpeeds& w,
                                       const HeightField& hf,
                                       const SlopeSimConfig& cfg) {
  const TrackFootprint left = TrackFootprint::build(TrackSide::kLeft, cfg.vp);
  const TrackFootprint right = TrackFootprint::build(TrackSide::kRight, cfg.vp);
  return detail::slope_rhs_eval(s, w, hf, cfg, left, right, nullptr, nullptr, nullptr,
                                nullptr);
}

SlopeSimulator::SlopeSimulator(const SlopeSimConfig& cfg, HeightField hf)
    : cfg_(cfg),
      hf_(std::move(hf)),
      left_(TrackFootprint::build(TrackSide::kLeft, cfg.vp)),
      right_(TrackFootprint::build(TrackSide::kRight, cfg.vp)),
      rng_(cfg.rng_seed) {
  substeps_ = std::max(1, static_cast<int>(std::round(cfg.control_dt / cfg.dt_sim)));
}

void SlopeSimulator::reset(const State3D& s) {
  state_ = s;
  t_ = 0.0;
  rng_.seed(cfg_.rng_seed);
  applied_ = WheelSpeeds{};
  step_seconds_ = 0.0;
  steps_ = 0;
  max_stiffness_ = 0.0;
}

Eigen::Matrix<double, 12, 1> SlopeSimulator::rhs(const Eigen::Matrix<double, 12, 1>& x,
                                                 const WheelSpeeds& w) {
  static thread_local std::vector<PatchContact> scratch;
  const State3D s = State3D::from_vector(x, /*wrap=*/false);
  return detail::slope_rhs_eval(s, w, hf_, cfg_, left_, right_, &scratch, &fn_left_,
                                &fn_right_, &max_stiffness_);
}

void SlopeSimulator::tick(const WheelSpeeds& cmd) {
  WheelSpeeds w = cmd;
  if (cfg_.actuator_noise_std > 0.0) {
    w.left += cfg_.actuator_noise_std * noise_(rng_);
    w.right += cfg_.actuator_noise_std * noise_(rng_);
  }
  w = clamp_wheels(w);
  applied_ = w;

  auto f = [&](const Eigen::VectorXd& x, double) -> Eigen::VectorXd {
    return rhs(x, w);
  };
  Eigen::VectorXd x = state_.to_vector();
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < substeps_; ++i) {
    x = rk_step(tableau_, f, x, t_, cfg_.dt_sim);
    t_ += cfg_.dt_sim;
  }
  step_seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                       .count();
  steps_ += substeps_;
  if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e6)
    throw NumericalDivergenceError("slope simulation state unbounded at t=" +
                                   std::to_string(t_));
  state_ = State3D::from_vector(Eigen::Matrix<double, 12, 1>(x));
}

std::vector<PatchContact> SlopeSimulator::contacts() const {
  return patch_contacts_nonuniform(state_, hf_, cfg_.cp, left_, right_, cfg_.vp);
}

SlopeTrace simulate_slope(const State3D& initial,
                          const std::function<WheelSpeeds(double)>& wheel_cmd,
                          double duration, const SlopeSimConfig& cfg,
                          const HeightField& hf,
                          std::vector<PatchForceRow>* patch_dump) {
  if (duration <= 0) throw SimError("duration must be positive");
  SlopeSimulator sim(cfg, hf);
  sim.reset(initial);
  SlopeTrace trace;
  const int ticks = static_cast<int>(std::round(duration / cfg.control_dt));
  trace.rows.reserve(ticks + 1);
  auto record = [&](double wl, double wr) {
    const State3D& s = sim.state();
    trace.rows.push_back({sim.time(), s.p_com.x(), s.p_com.y(), s.p_com.z(),
                          s.euler.roll, s.euler.pitch, s.euler.yaw, s.v_body.x(),
                          s.v_body.y(), s.w_body.z(), sim.last_fn_left(),
                          sim.last_fn_right(), wl, wr});
    if (patch_dump) {
      const auto cs = sim.contacts();
      const int lat = cfg.vp.patches_lateral;
      for (size_t i = 0; i < cs.size(); ++i) {
        const int within = static_cast<int>(i) % cfg.vp.patch_count();
        patch_dump->push_back({sim.time(), within / lat, within % lat,
                               cs[i].f_n.norm()});
      }
    }
  };
  for (int k = 0; k < ticks; ++k) {
    const WheelSpeeds cmd = wheel_cmd(sim.time());
    record(cmd.left, cmd.right);
    sim.tick(cmd);
  }
  record(0.0, 0.0);
  return trace;
}

void SlopeTrace::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw SimError("cannot open " + path + " for writing");
  out.precision(17);
  out << "t,x,y,z,roll,pitch,yaw,vx_b,vy_b,wz,fn_left,fn_right,wL_cmd,wR_cmd\n";
  for (const auto& r : rows) {
    out << r.t << ',' << r.x << ',' << r.y << ',' << r.z << ',' << r.roll << ','
        << r.pitch << ',' << r.yaw << ',' << r.vx_b << ',' << r.vy_b << ',' << r.wz
        << ',' << r.fn_left << ',' << r.fn_right << ',' << r.wl_cmd << ',' << r.wr_cmd
        << '\n';
  }
}

}  // namespace tracksim
