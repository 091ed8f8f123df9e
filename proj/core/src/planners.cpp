#include "tracksim/planners.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "tracksim/wheel_kinematics.hpp"

namespace tracksim {

double max_curvature(double v_des, double w_wheel_max, const VehicleParams& vp) {
  if (v_des <= 0) throw InfeasibleError("curvature bound needs v_des > 0");
  const double v_top = w_wheel_max * vp.sprocket_radius;
  if (v_des > v_top)
    throw InfeasibleError("desired speed exceeds wheel-speed authority");
  return (2.0 / vp.track_gauge) * (v_top - v_des) / v_des;
}

Trajectory plan_dubins(const PlanRequest& req, const VehicleParams& vp) {
  const double k = max_curvature(req.v_des, req.w_wheel_max, vp);
  if (k <= 0) throw InfeasibleError("no turning authority at the desired speed");
  const DubinsPath path = dubins_shortest(req.c0, req.cf, k);

  Trajectory traj;
  const double tf = path.length / req.v_des;
  const int n = std::max(2, static_cast<int>(std::ceil(tf / req.dt_plan)) + 1);
  traj.samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = std::min(tf, i * req.dt_plan);
    const double s = t * req.v_des;
    const Pose2D q = path.sample(s);
    TrajSample sample{t, q.x, q.y, q.phi, req.v_des,
                      path.turn_direction(s) * k * req.v_des};
    traj.samples.push_back(sample);
    if (t >= tf) break;
  }
  if (traj.samples.back().t < tf) {
    const Pose2D q = path.sample(path.length);
    traj.samples.push_back(
        {tf, q.x, q.y, q.phi, req.v_des, path.turn_direction(path.length) * k * req.v_des});
  }
  return traj;
}

Trajectory plan_clothoid(const PlanRequest& req, const VehicleParams& vp) {
  (void)vp;
  if (req.v_des <= 0) throw InfeasibleError("clothoid planner needs v_des > 0");
  const ClothoidSegment seg = fit_clothoid_g1(req.c0, req.cf);

  Trajectory traj;
  const double tf = seg.length / req.v_des;
  const int n = std::max(2, static_cast<int>(std::ceil(tf / req.dt_plan)) + 1);
  traj.samples.reserve(n + 1);
  for (int i = 0; i < n; ++i) {
    const double t = std::min(tf, i * req.dt_plan);
    const double s = t * req.v_des;
    const Pose2D q = seg.sample(s);
    traj.samples.push_back({t, q.x, q.y, q.phi, req.v_des,
                            seg.curvature_at(s) * req.v_des});
    if (t >= tf) break;
  }
  if (traj.samples.back().t < tf) {
    const Pose2D q = seg.sample(seg.length);
    traj.samples.push_back({tf, q.x, q.y, q.phi, req.v_des,
                            seg.curvature_at(seg.length) * req.v_des});
  }
  return traj;
}

std::vector<ReferencePoint> time_series_reference(const Trajectory& traj,
                                                  double dt_ctrl) {
  std::vector<ReferencePoint> out;
  if (traj.samples.empty()) return out;
  const double tf = traj.duration();
  const int n = static_cast<int>(std::floor(tf / dt_ctrl + 1e-9)) + 1;
  out.reserve(n + 1);
  size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    const double t = std::min(i * dt_ctrl, tf);
    while (idx + 1 < traj.samples.size() && traj.samples[idx + 1].t <= t) ++idx;
    const TrajSample& a = traj.samples[idx];
    ReferencePoint rp;
    if (idx + 1 < traj.samples.size()) {
      const TrajSample& b = traj.samples[idx + 1];
      const double span = b.t - a.t;
      const double u = span > 0 ? (t - a.t) / span : 0.0;
      rp.x = a.x + u * (b.x - a.x);
      rp.y = a.y + u * (b.y - a.y);
      rp.phi = wrap_angle(a.phi + u * wrap_angle(b.phi - a.phi));
      rp.v = a.v;   // zero-order hold
      rp.wz = a.wz;
    } else {
      rp.x = a.x;
      rp.y = a.y;
      rp.phi = a.phi;
      rp.v = a.v;
      rp.wz = a.wz;
    }
    out.push_back(rp);
  }
  // Endpoint preserved exactly.
  const TrajSample& last = traj.samples.back();
  out.back() = ReferencePoint{last.x, last.y, last.phi, last.v, last.wz};
  return out;
}

void Trajectory::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw SimError("cannot open " + path + " for writing");
  out.precision(17);
  out << "t,x,y,phi,v_d,wz_d\n";
  for (const auto& s : samples)
    out << s.t << ',' << s.x << ',' << s.y << ',' << s.phi << ',' << s.v << ','
        << s.wz << '\n';
}

Trajectory Trajectory::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SimError("cannot open " + path);
  Trajectory traj;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    TrajSample s;
    char comma;
    ss >> s.t >> comma >> s.x >> comma >> s.y >> comma >> s.phi >> comma >> s.v >>
        comma >> s.wz;
    traj.samples.push_back(s);
  }
  return traj;
}

}  // namespace tracksim
