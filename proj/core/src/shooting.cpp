#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "tracksim/planners.hpp"
#include "tracksim/wheel_kinematics.hpp"

namespace tracksim {

namespace {

struct KnotEval {
  double v = 0.0;      // effective longitudinal speed after slip
  double wz = 0.0;     // effective yaw rate after slip
  double alpha = 0.0;
};

struct Shooting {
  const PlanRequest& req;
  const SlipModelSet& models;
  const VehicleParams& vp;
  const OcpOptions& opt;
  int n;  // knots

  KnotEval eval_knot(double ul, double ur) const {
    const double r = vp.sprocket_radius;
    const double v_nominal = r * (ul + ur) / 2.0;
    const int sign = v_nominal >= 0.0 ? 1 : -1;
    const SlipParams slip = models.predict_smooth({ul, ur}, sign);
    KnotEval k;
    const double ul_eff = ul + slip.beta_l / r;
    const double ur_eff = ur + slip.beta_r / r;
    k.v = r * (ul_eff + ur_eff) / 2.0;
    k.wz = r * (ur_eff - ul_eff) / vp.track_gauge;
    k.alpha = std::clamp(slip.alpha, -M_PI_2 + 1e-3, M_PI_2 - 1e-3);
    return k;
  }

  // RK4 propagation of the pseudo-kinematic pose over one knot interval.
  Eigen::Vector3d propagate_knot(const Eigen::Vector3d& x0, const KnotEval& k,
                                 double dt_knot) const {
    auto f = [&](const Eigen::Vector3d& x) -> Eigen::Vector3d {
      const double speed = k.v / std::cos(k.alpha);
      const double heading = x[2] + k.alpha;
      return {speed * std::cos(heading), speed * std::sin(heading), k.wz};
    };
    Eigen::Vector3d x = x0;
    const double h = dt_knot / opt.substeps;
    for (int i = 0; i < opt.substeps; ++i) {
      const Eigen::Vector3d k1 = f(x);
      const Eigen::Vector3d k2 = f(x + 0.5 * h * k1);
      const Eigen::Vector3d k3 = f(x + 0.5 * h * k2);
      const Eigen::Vector3d k4 = f(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
  }

  void propagate_all(const std::vector<KnotEval>& knots, double tf,
                     std::vector<Eigen::Vector3d>& states, int from) const {
    const double dt_knot = tf / n;
    for (int k = from; k < n; ++k)
      states[k + 1] = propagate_knot(states[k], knots[k], dt_knot);
  }

  double cost_of(const std::vector<KnotEval>& knots, double tf) const {
    double smooth = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
      const double dv = knots[k + 1].v - knots[k].v;
      const double dw = knots[k + 1].wz - knots[k].wz;
      smooth += dv * dv + dw * dw;
    }
    return opt.w_time * tf + opt.w_smooth * smooth;
  }

  // Inequality constraints g <= 0.
  void constraints_of(const Eigen::VectorXd& z, const std::vector<KnotEval>& knots,
                      const std::vector<Eigen::Vector3d>& states,
                      Eigen::VectorXd& g) const {
    const int per_knot = 6;
    for (int k = 0; k < n; ++k) {
      const double ul = z[2 * k], ur = z[2 * k + 1];
      g[per_knot * k + 0] = ul - req.w_wheel_max;
      g[per_knot * k + 1] = -ul - req.w_wheel_max;
      g[per_knot * k + 2] = ur - req.w_wheel_max;
      g[per_knot * k + 3] = -ur - req.w_wheel_max;
      g[per_knot * k + 4] = req.v_min - knots[k].v;
      g[per_knot * k + 5] = knots[k].v - req.v_max;
    }
    const Eigen::Vector3d& xN = states[n];
    const double ex = xN[0] - req.cf.x;
    const double ey = xN[1] - req.cf.y;
    const double ep = wrap_angle(xN[2] - req.cf.phi);
    g[per_knot * n] = std::sqrt(ex * ex + ey * ey + ep * ep) - opt.slack;
    g[per_knot * n + 1] = opt.tf_min - z[2 * n];
  }
};

// PHR augmented-Lagrangian value of the inequality set.
double al_penalty(const Eigen::VectorXd& g, const Eigen::VectorXd& lambda, double rho) {
  double acc = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double t = std::max(0.0, lambda[i] + rho * g[i]);
    acc += (t * t - lambda[i] * lambda[i]) / (2.0 * rho);
  }
  return acc;
}

}  // namespace

OcpPointEval evaluate_ocp_point(const PlanRequest& req, const SlipModelSet& models,
                                const Eigen::MatrixX2d& controls, double tf,
                                const VehicleParams& vp, const OcpOptions& opt) {
  OcpOptions local = opt;
  local.knots = static_cast<int>(controls.rows());
  Shooting sh{req, models, vp, local, local.knots};
  std::vector<KnotEval> knots(sh.n);
  Eigen::VectorXd z(2 * sh.n + 1);
  for (int k = 0; k < sh.n; ++k) {
    z[2 * k] = controls(k, 0);
    z[2 * k + 1] = controls(k, 1);
    knots[k] = sh.eval_knot(controls(k, 0), controls(k, 1));
  }
  z[2 * sh.n] = tf;
  std::vector<Eigen::Vector3d> states(sh.n + 1);
  states[0] = {req.c0.x, req.c0.y, req.c0.phi};
  sh.propagate_all(knots, tf, states, 0);
  Eigen::VectorXd g(6 * sh.n + 2);
  sh.constraints_of(z, knots, states, g);
  OcpPointEval out;
  out.cost = sh.cost_of(knots, tf);
  out.violation = std::max(0.0, g.maxCoeff());
  return out;
}

OcpResult plan_ocp(const PlanRequest& req, const SlipModelSet& models,
                   const Trajectory& warm_start, const VehicleParams& vp,
                   const OcpOptions& opt) {
  if (!req.valid()) throw InfeasibleError("malformed plan request");
  Shooting sh{req, models, vp, opt, opt.knots};
  const int n = opt.knots;
  const int nz = 2 * n + 1;
  const int ng = 6 * n + 2;

  // Warm start: wheel knots from the reference twist through the no-slip
  // mapping; duration from the warm trajectory.
  Eigen::VectorXd z(nz);
  const double tf0 = std::max(opt.tf_min, warm_start.duration());
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) / n * tf0;
    double v = req.v_des, wz = 0.0;
    if (!warm_start.samples.empty()) {
      size_t i = 0;
      while (i + 1 < warm_start.samples.size() && warm_start.samples[i + 1].t <= t)
        ++i;
      v = warm_start.samples[i].v;
      wz = warm_start.samples[i].wz;
    }
    const WheelSpeeds w = twist_to_wheels(v, wz, vp);
    z[2 * k] = std::clamp(w.left, -req.w_wheel_max, req.w_wheel_max);
    z[2 * k + 1] = std::clamp(w.right, -req.w_wheel_max, req.w_wheel_max);
  }
  z[2 * n] = tf0;

  std::vector<KnotEval> knots(n);
  std::vector<Eigen::Vector3d> states(n + 1);
  states[0] = {req.c0.x, req.c0.y, req.c0.phi};

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(ng);
  double rho = 10.0;

  Eigen::VectorXd g(ng);
  auto eval_al = [&](const Eigen::VectorXd& zz) -> double {
    for (int k = 0; k < n; ++k) knots[k] = sh.eval_knot(zz[2 * k], zz[2 * k + 1]);
    sh.propagate_all(knots, zz[2 * n], states, 0);
    sh.constraints_of(zz, knots, states, g);
    return sh.cost_of(knots, zz[2 * n]) + al_penalty(g, lambda, rho);
  };

  // Central finite differences; the slip lookups depend on single knots and
  // the states only on downstream knots, so each perturbation reuses the
  // unperturbed prefix.
  std::vector<KnotEval> base_knots(n);
  std::vector<Eigen::Vector3d> base_states(n + 1);
  auto eval_perturbed = [&](const Eigen::VectorXd& zz, int changed) -> double {
    knots = base_knots;
    states = base_states;
    const double tf = zz[2 * n];
    if (changed >= 0 && changed < 2 * n) {
      const int k = changed / 2;
      knots[k] = sh.eval_knot(zz[2 * k], zz[2 * k + 1]);
      sh.propagate_all(knots, tf, states, k);
    } else {
      sh.propagate_all(knots, tf, states, 0);
    }
    sh.constraints_of(zz, knots, states, g);
    return sh.cost_of(knots, tf) + al_penalty(g, lambda, rho);
  };

  auto gradient = [&](const Eigen::VectorXd& zz, Eigen::VectorXd& grad) {
    for (int k = 0; k < n; ++k)
      base_knots[k] = sh.eval_knot(zz[2 * k], zz[2 * k + 1]);
    base_states[0] = {req.c0.x, req.c0.y, req.c0.phi};
    {
      std::swap(knots, base_knots);
      std::swap(states, base_states);
      sh.propagate_all(knots, zz[2 * n], states, 0);
      std::swap(knots, base_knots);
      std::swap(states, base_states);
    }
    Eigen::VectorXd zp = zz;
    for (int i = 0; i < nz; ++i) {
      const double h = opt.fd_step_rel * std::max(1.0, std::abs(zz[i]));
      zp[i] = zz[i] + h;
      const double fp = eval_perturbed(zp, i);
      zp[i] = zz[i] - h;
      const double fm = eval_perturbed(zp, i);
      zp[i] = zz[i];
      grad[i] = (fp - fm) / (2.0 * h);
    }
  };

  // L-BFGS with Armijo backtracking.
  const int memory = 10;
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  int iterations = 0;
  double violation = std::numeric_limits<double>::infinity();
  double f_cur = eval_al(z);
  Eigen::VectorXd grad(nz), grad_new(nz);
  gradient(z, grad);

  const int max_outer = 30;
  for (int outer = 0; outer < max_outer && iterations < opt.max_iterations; ++outer) {
    s_hist.clear();
    y_hist.clear();
    int stalls = 0;
    for (int inner = 0; inner < 60 && iterations < opt.max_iterations; ++inner) {
      // Two-loop recursion.
      Eigen::VectorXd q = grad;
      std::vector<double> alpha_hist(s_hist.size());
      for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
        const double rho_i = 1.0 / y_hist[i].dot(s_hist[i]);
        alpha_hist[i] = rho_i * s_hist[i].dot(q);
        q -= alpha_hist[i] * y_hist[i];
      }
      if (!s_hist.empty()) {
        const double gamma =
            s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        q *= gamma;
      }
      for (size_t i = 0; i < s_hist.size(); ++i) {
        const double rho_i = 1.0 / y_hist[i].dot(s_hist[i]);
        const double beta = rho_i * y_hist[i].dot(q);
        q += (alpha_hist[i] - beta) * s_hist[i];
      }
      Eigen::VectorXd dir = -q;
      if (dir.dot(grad) > -1e-14 * dir.norm() * grad.norm()) dir = -grad;

      double step = 1.0;
      double f_new = f_cur;
      bool accepted = false;
      const double slope = grad.dot(dir);
      for (int ls = 0; ls < 30; ++ls) {
        const Eigen::VectorXd z_try = z + step * dir;
        f_new = eval_al(z_try);
        if (f_new <= f_cur + 1e-4 * step * slope) {
          gradient(z_try, grad_new);
          const Eigen::VectorXd s_vec = z_try - z;
          const Eigen::VectorXd y_vec = grad_new - grad;
          if (y_vec.dot(s_vec) > 1e-12) {
            s_hist.push_back(s_vec);
            y_hist.push_back(y_vec);
            if (static_cast<int>(s_hist.size()) > memory) {
              s_hist.pop_front();
              y_hist.pop_front();
            }
          }
          z = z_try;
          f_cur = f_new;
          grad = grad_new;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      ++iterations;
      if (!accepted) {
        ++stalls;
        s_hist.clear();
        y_hist.clear();
        if (stalls >= 2) break;
        continue;
      }
      if (grad.norm() < 1e-6 * std::max(1.0, std::abs(f_cur))) break;
    }

    // Multiplier update on the fresh iterate.
    eval_al(z);
    violation = std::max(0.0, g.maxCoeff());
    for (int i = 0; i < ng; ++i) lambda[i] = std::max(0.0, lambda[i] + rho * g[i]);
    if (violation <= opt.feas_tol) {
      if (outer > 0) break;  // one extra pass tightens the multipliers
    } else {
      rho = std::min(rho * 4.0, 1e7);
    }
    f_cur = eval_al(z);
    gradient(z, grad);
  }

  // Final rollout and packaging.
  for (int k = 0; k < n; ++k) knots[k] = sh.eval_knot(z[2 * k], z[2 * k + 1]);
  const double tf = z[2 * n];
  states[0] = {req.c0.x, req.c0.y, req.c0.phi};
  sh.propagate_all(knots, tf, states, 0);
  sh.constraints_of(z, knots, states, g);
  violation = std::max(0.0, g.maxCoeff());

  OcpResult out;
  out.sol.controls.resize(n, 2);
  for (int k = 0; k < n; ++k) {
    out.sol.controls(k, 0) = z[2 * k];
    out.sol.controls(k, 1) = z[2 * k + 1];
  }
  out.sol.tf = tf;
  out.sol.iterations = iterations;
  out.sol.constraint_violation = violation;
  out.sol.cost = sh.cost_of(knots, tf);
  out.sol.converged = violation <= opt.feas_tol && iterations < opt.max_iterations;

  const double dt_knot = tf / n;
  out.traj.samples.reserve(n * opt.substeps + 1);
  Eigen::Vector3d x = states[0];
  out.traj.samples.push_back({0.0, x[0], x[1], x[2], knots[0].v, knots[0].wz});
  for (int k = 0; k < n; ++k) {
    const double h = dt_knot / opt.substeps;
    for (int i = 0; i < opt.substeps; ++i) {
      // One RK4 substep (matches propagate_knot).
      auto f = [&](const Eigen::Vector3d& xx) -> Eigen::Vector3d {
        const double speed = knots[k].v / std::cos(knots[k].alpha);
        const double heading = xx[2] + knots[k].alpha;
        return {speed * std::cos(heading), speed * std::sin(heading), knots[k].wz};
      };
      const Eigen::Vector3d k1 = f(x);
      const Eigen::Vector3d k2 = f(x + 0.5 * h * k1);
      const Eigen::Vector3d k3 = f(x + 0.5 * h * k2);
      const Eigen::Vector3d k4 = f(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double t = dt_knot * k + h * (i + 1);
      const int k_next = (i + 1 == opt.substeps && k + 1 < n) ? k + 1 : k;
      out.traj.samples.push_back(
          {t, x[0], x[1], x[2], knots[k_next].v, knots[k_next].wz});
    }
  }
  return out;
}

}  // namespace tracksim
