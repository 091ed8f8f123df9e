#include "tracksim/dynamics2d.hpp"

#include <cmath>
#include <fstream>

#include "tracksim/rotation.hpp"

namespace tracksim {

WheelSpeeds clamp_wheels(const WheelSpeeds& w) {
  auto clamp = [](double v) {
    if (std::abs(v) >= kWheelClamp) return v;
    return v >= 0.0 ? kWheelClamp : -kWheelClamp;
  };
  return {clamp(w.left), clamp(w.right)};
}

namespace {
double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }
}  // namespace

RollingWrench rolling_wrench(double load_left, double load_right, double vl, double vr,
                             const VehicleParams& vp) {
  RollingWrench rw;
  const double fl = -load_left * vp.rolling_coeff * sgn(vl);
  const double fr = -load_right * vp.rolling_coeff * sgn(vr);
  rw.fx = fl + fr;
  rw.mz = -(vp.track_gauge / 2.0) * fl + (vp.track_gauge / 2.0) * fr;
  return rw;
}

namespace {

Eigen::Matrix<double, 6, 1> flat_rhs_impl(const TrackFootprint& left,
                                          const TrackFootprint& right,
                                          const State2D& state, const WheelSpeeds& w,
                                          const FlatSimConfig& cfg) {
  const VehicleParams& vp = cfg.vp;
  const double sigma = uniform_pressure(vp, cfg.gravity);
  const PlanarState ps{state.vx_b, state.vy_b, state.wz, state.pose.phi};
  const TrackWrench wl = track_wrench(left, ps, w.left, sigma, cfg.tm, vp);
  const TrackWrench wr = track_wrench(right, ps, w.right, sigma, cfg.tm, vp);

  const double half_load = vp.mass * cfg.gravity / 2.0;
  const double vl = state.vx_b - state.wz * vp.track_gauge / 2.0;
  const double vr = state.vx_b + state.wz * vp.track_gauge / 2.0;
  const RollingWrench rr = rolling_wrench(half_load, half_load, vl, vr, vp);

  const double fx = wl.fx + wr.fx + rr.fx;
  const double fy = wl.fy + wr.fy;
  const double mz = wl.mz + wr.mz + rr.mz;

  Eigen::Matrix<double, 6, 1> d;
  const double c = std::cos(state.pose.phi), s = std::sin(state.pose.phi);
  d[0] = c * state.vx_b - s * state.vy_b;
  d[1] = s * state.vx_b + c * state.vy_b;
  d[2] = state.wz;
  d[3] = fx / vp.mass + state.wz * state.vy_b;
  d[4] = fy / vp.mass - state.wz * state.vx_b;
  d[5] = mz / vp.inertia_zz;
  return d;
}

}  // namespace

Eigen::Matrix<double, 6, 1> flat_rhs(const State2D& state, const WheelSpeeds& w,
                                     const FlatSimConfig& cfg) {
  const TrackFootprint left = TrackFootprint::build(TrackSide::kLeft, cfg.vp);
  const TrackFootprint right = TrackFootprint::build(TrackSide::kRight, cfg.vp);
  return flat_rhs_impl(left, right, state, w, cfg);
}

FlatSimulator::FlatSimulator(const FlatSimConfig& cfg)
    : cfg_(cfg),
      left_(TrackFootprint::build(TrackSide::kLeft, cfg.vp)),
      right_(TrackFootprint::build(TrackSide::kRight, cfg.vp)),
      rng_(cfg.rng_seed) {
  substeps_ = std::max(1, static_cast<int>(std::round(cfg.control_dt / cfg.dt_sim)));
}

void FlatSimulator::reset(const State2D& s) {
  state_ = s;
  t_ = 0.0;
  rng_.seed(cfg_.rng_seed);
  applied_ = WheelSpeeds{};
}

void FlatSimulator::tick(const WheelSpeeds& cmd) {
  WheelSpeeds w = cmd;
  if (cfg_.actuator_noise_std > 0.0) {
    w.left += cfg_.actuator_noise_std * noise_(rng_);
    w.right += cfg_.actuator_noise_std * noise_(rng_);
  }
  w = clamp_wheels(w);
  applied_ = w;

  auto rhs = [&](const Eigen::VectorXd& x, double) -> Eigen::VectorXd {
    return flat_rhs_impl(left_, right_, State2D::from_vector(x, /*wrap=*/false), w,
                         cfg_);
  };
  Eigen::VectorXd x = state_.to_vector();
  for (int i = 0; i < substeps_; ++i) {
    x = rk_step(tableau_, rhs, x, t_, cfg_.dt_sim);
    t_ += cfg_.dt_sim;
  }
  if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e6)
    throw NumericalDivergenceError("flat simulation state unbounded at t=" +
                                   std::to_string(t_));
  state_ = State2D::from_vector(Eigen::Matrix<double, 6, 1>(x));
}

SimTrace simulate_flat(const State2D& initial,
                       const std::function<WheelSpeeds(double)>& wheel_cmd,
                       double duration, const FlatSimConfig& cfg) {
  if (duration <= 0) throw SimError("duration must be positive");
  FlatSimulator sim(cfg);
  sim.reset(initial);
  SimTrace trace;
  const int ticks = static_cast<int>(std::round(duration / cfg.control_dt));
  trace.rows.reserve(ticks + 1);
  for (int k = 0; k < ticks; ++k) {
    const double t = sim.time();
    const WheelSpeeds cmd = wheel_cmd(t);
    const State2D& s = sim.state();
    trace.rows.push_back({t, s.pose.x, s.pose.y, s.pose.phi, s.vx_b, s.vy_b, s.wz,
                          cmd.left, cmd.right});
    sim.tick(cmd);
  }
  const State2D& s = sim.state();
  trace.rows.push_back({sim.time(), s.pose.x, s.pose.y, s.pose.phi, s.vx_b, s.vy_b,
                        s.wz, 0.0, 0.0});
  return trace;
}

void SimTrace::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw SimError("cannot open " + path + " for writing");
  out.precision(17);
  out << "t,x,y,phi,vx_b,vy_b,wz,wL_cmd,wR_cmd\n";
  for (const auto& r : rows) {
    out << r.t << ',' << r.x << ',' << r.y << ',' << r.phi << ',' << r.vx_b << ','
        << r.vy_b << ',' << r.wz << ',' << r.wl_cmd << ',' << r.wr_cmd << '\n';
  }
}

}  // namespace tracksim
