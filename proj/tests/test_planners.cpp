#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tracksim/fresnel.hpp"
#include "tracksim/integrator.hpp"
#include "tracksim/planners.hpp"
#include "tracksim/pseudo_kinematics.hpp"
#include "tracksim/wheel_kinematics.hpp"

namespace tracksim {
namespace {

const VehicleParams kVp;

PlanRequest request(const Pose2D& cf, double v = 0.4) {
  PlanRequest req;
  req.cf = cf;
  req.v_des = req.v_min = req.v_max = v;
  return req;
}

TEST(MaxCurvature, BoundaryAndFormula) {
  EXPECT_NEAR(max_curvature(18.0 * kVp.sprocket_radius, 18.0, kVp), 0.0, 1e-12);
  EXPECT_THROW(max_curvature(2.0, 18.0, kVp), InfeasibleError);
  EXPECT_THROW(max_curvature(0.0, 18.0, kVp), InfeasibleError);

  // Vertex enumeration oracle: scan the wheel box for the max |wz| / v ratio
  // consistent with v_des.
  const double v = 0.4, w_max = 18.0;
  double best = 0.0;
  const int n = 4000;
  for (int i = 0; i <= n; ++i) {
    const double wl = -w_max + 2.0 * w_max * i / n;
    // For fixed v, wr is determined: wr = 2 v / r - wl.
    const double wr = 2.0 * v / kVp.sprocket_radius - wl;
    if (std::abs(wr) > w_max + 1e-12) continue;
    const Twist2D t = wheels_to_twist({wl, wr}, kVp);
    best = std::max(best, std::abs(t.wz) / v);
  }
  EXPECT_NEAR(max_curvature(v, w_max, kVp), best, 1e-6);
}

TEST(Fresnel, MatchesAdaptiveQuadrature) {
  for (double s = 0.0; s <= 5.0; s += 0.1) {
    const FresnelPair f = fresnel(s);
    const double c_ref = oracles::adaptive_simpson(
        [](double t) { return std::cos(M_PI_2 * t * t); }, 0.0, s, 1e-14);
    const double s_ref = oracles::adaptive_simpson(
        [](double t) { return std::sin(M_PI_2 * t * t); }, 0.0, s, 1e-14);
    EXPECT_NEAR(f.c, c_ref, 1e-10);
    EXPECT_NEAR(f.s, s_ref, 1e-10);
  }
}

TEST(Fresnel, MomentsMatchQuadrature) {
  oracles::Uniform rnd(3);
  for (int i = 0; i < 200; ++i) {
    const double a = rnd(-40, 40), b = rnd(-10, 10), c = rnd(-M_PI, M_PI);
    const FresnelMoment m = fresnel_moment(a, b, c);
    const double x_ref = oracles::adaptive_simpson(
        [&](double t) { return std::cos(a * t * t / 2 + b * t + c); }, 0.0, 1.0,
        1e-14);
    EXPECT_NEAR(m.x, x_ref, 1e-11);
  }
}

TEST(Dubins, StraightTargetIsSingleSegment) {
  const Trajectory traj = plan_dubins(request({3.0, 0.0, 0.0}), kVp);
  EXPECT_NEAR(traj.duration(), 3.0 / 0.4, 1e-6);
  for (const auto& s : traj.samples) {
    EXPECT_NEAR(s.y, 0.0, 1e-9);
    EXPECT_NEAR(s.phi, 0.0, 1e-9);
  }
}

TEST(Dubins, EndpointsMatchRequest) {
  oracles::Uniform rnd(7);
  for (int i = 0; i < 200; ++i) {
    const Pose2D cf{rnd(-4, 4), rnd(-4, 4), rnd(-M_PI, M_PI)};
    if (std::hypot(cf.x, cf.y) < 0.3) continue;
    const Trajectory traj = plan_dubins(request(cf), kVp);
    const TrajSample& last = traj.samples.back();
    EXPECT_NEAR(last.x, cf.x, 1e-8);
    EXPECT_NEAR(last.y, cf.y, 1e-8);
    EXPECT_NEAR(std::abs(wrap_angle(last.phi - cf.phi)), 0.0, 1e-8);
  }
}

TEST(Dubins, ShortestAmongAllWords) {
  const double k = max_curvature(0.4, 18.0, kVp);
  oracles::Uniform rnd(11);
  for (int i = 0; i < 300; ++i) {
    const Pose2D cf{rnd(-4, 4), rnd(-4, 4), rnd(-M_PI, M_PI)};
    const DubinsPath best = dubins_shortest({0, 0, 0}, cf, k);
    for (DubinsWord w : kAllDubinsWords) {
      const auto p = dubins_word_path({0, 0, 0}, cf, k, w);
      if (p) EXPECT_LE(best.length, p->length + 1e-9);
    }
  }
}

TEST(Dubins, CccWordsHandleNearTargets) {
  // Targets closer than 2x the turning radius require RLR/LRL.
  const double k = max_curvature(0.4, 18.0, kVp);
  const double rho = 1.0 / k;
  const DubinsPath path = dubins_shortest({0, 0, 0}, {0.5 * rho, 0.2 * rho, 2.5}, k);
  const Pose2D end = path.sample(path.length);
  EXPECT_NEAR(end.x, 0.5 * rho, 1e-9);
  EXPECT_NEAR(end.y, 0.2 * rho, 1e-9);
}

TEST(Dubins, SegmentsRespectCurvatureBound) {
  const double k = max_curvature(0.4, 18.0, kVp);
  const Trajectory traj = plan_dubins(request({2.0, 2.5, -0.4}), kVp);
  for (const auto& s : traj.samples) {
    EXPECT_LE(std::abs(s.wz), k * 0.4 + 1e-9);
    const WheelSpeeds w = twist_to_wheels(s.v, s.wz, kVp);
    EXPECT_LE(std::abs(w.left), 18.0 + 1e-6);
    EXPECT_LE(std::abs(w.right), 18.0 + 1e-6);
  }
}

TEST(Dubins, PaperBenchmarkDuration) {
  const Trajectory traj = plan_dubins(request({2.0, 2.5, -0.4}), kVp);
  EXPECT_NEAR(traj.duration(), 8.12, 0.02 * 8.12);
}

TEST(Clothoid, CollinearIsStraightLine) {
  const Trajectory traj = plan_clothoid(request({2.0, 0.0, 0.0}), kVp);
  for (const auto& s : traj.samples) {
    EXPECT_NEAR(s.y, 0.0, 1e-9);
    EXPECT_NEAR(s.wz, 0.0, 1e-9);
  }
  EXPECT_NEAR(traj.duration(), 2.0 / 0.4, 1e-9);
}

TEST(Clothoid, EndpointsMatchRequest) {
  oracles::Uniform rnd(13);
  for (int i = 0; i < 200; ++i) {
    const Pose2D cf{rnd(-4, 4), rnd(-4, 4), rnd(-2.8, 2.8)};
    if (std::hypot(cf.x, cf.y) < 0.3) continue;
    const ClothoidSegment seg = fit_clothoid_g1({0, 0, 0}, cf);
    const Pose2D end = seg.sample(seg.length);
    EXPECT_NEAR(end.x, cf.x, 1e-8);
    EXPECT_NEAR(end.y, cf.y, 1e-8);
    EXPECT_NEAR(std::abs(wrap_angle(end.phi - cf.phi)), 0.0, 1e-8);
  }
}

TEST(Clothoid, CurvatureAffineInArclength) {
  const ClothoidSegment seg = fit_clothoid_g1({0, 0, 0}, {2.0, 2.5, -0.4});
  // Heading equals the curvature integral; sampled three-point collinearity.
  for (double s = 0.1; s < seg.length - 0.1; s += 0.2) {
    const double k0 = seg.curvature_at(s - 0.1);
    const double k1 = seg.curvature_at(s);
    const double k2 = seg.curvature_at(s + 0.1);
    EXPECT_NEAR(k1, 0.5 * (k0 + k2), 1e-12);
  }
  const Pose2D mid = seg.sample(seg.length / 2);
  const double heading_int =
      seg.start.phi + seg.kappa0 * seg.length / 2 +
      0.5 * seg.dkappa * (seg.length / 2) * (seg.length / 2);
  EXPECT_NEAR(wrap_angle(mid.phi - heading_int), 0.0, 1e-8);
}

TEST(Clothoid, SymmetricQuarterTurnCurvatureProfile) {
  // Symmetric headings give an antisymmetric curvature ramp: equal magnitude
  // and opposite sign at the endpoints.
  const ClothoidSegment seg = fit_clothoid_g1({0, 0, 0.6}, {2.0, 0.0, -0.6});
  EXPECT_NEAR(seg.curvature_at(0.0), -seg.curvature_at(seg.length), 1e-8);
}

TEST(TimeSeriesReference, NativeResamplingReturnsSamples) {
  const Trajectory traj = plan_dubins(request({2.0, 2.5, -0.4}), kVp);
  const auto refs = time_series_reference(traj, traj.samples[1].t);
  EXPECT_NEAR(refs[3].x, traj.samples[3].x, 1e-12);
  EXPECT_NEAR(refs.back().x, traj.samples.back().x, 1e-12);
  EXPECT_NEAR(refs.back().y, traj.samples.back().y, 1e-12);
}

TEST(TimeSeriesReference, InterpolationCloseToDenseResampling) {
  PlanRequest req = request({2.0, 2.5, -0.4});
  const Trajectory coarse = plan_dubins(req, kVp);
  req.dt_plan = 1e-4;
  const Trajectory dense = plan_dubins(req, kVp);
  const auto refs = time_series_reference(coarse, 5e-3);
  for (size_t i = 0; i < refs.size(); i += 37) {
    const double t = std::min(i * 5e-3, dense.duration());
    const size_t j = static_cast<size_t>(std::round(t / 1e-4));
    if (j >= dense.samples.size()) continue;
    EXPECT_NEAR(refs[i].x, dense.samples[j].x, 1e-4);
    EXPECT_NEAR(refs[i].y, dense.samples[j].y, 1e-4);
  }
}

TEST(TrajectoryCsv, RoundTrips) {
  const Trajectory traj = plan_dubins(request({2.0, 2.5, -0.4}), kVp);
  const std::string path = testing::TempDir() + "traj.csv";
  traj.save_csv(path);
  const Trajectory back = Trajectory::load_csv(path);
  ASSERT_EQ(back.samples.size(), traj.samples.size());
  EXPECT_EQ(back.samples[17].x, traj.samples[17].x);
  std::remove(path.c_str());
}

class OcpTest : public ::testing::Test {
 protected:
  static OcpOptions fast_options() {
    OcpOptions opt;
    opt.max_iterations = 400;
    return opt;
  }
};

TEST_F(OcpTest, StraightTargetZeroSlipDegenerates) {
  PlanRequest req = request({2.0, 0.0, 0.0});
  req.v_min = 0.0;
  const Trajectory warm = plan_dubins(request({2.0, 0.0, 0.0}), kVp);
  const OcpResult res =
      plan_ocp(req, SlipModelSet::zero(), warm, kVp, fast_options());
  EXPECT_TRUE(res.sol.converged);
  EXPECT_LE(res.sol.constraint_violation, 1e-3);
  // Near-constant top-speed straight run.
  EXPECT_NEAR(res.sol.tf, 2.0 / req.v_max, 0.05 * 2.0 / req.v_max + 0.3);
  const TrajSample& last = res.traj.samples.back();
  EXPECT_NEAR(last.x, 2.0, 0.03);
  EXPECT_NEAR(last.y, 0.0, 0.03);
}

TEST_F(OcpTest, BenchmarkTargetFeasible) {
  const PlanRequest req = request({2.0, 2.5, -0.4});
  const Trajectory warm = plan_dubins(req, kVp);
  const SlipModelSet models = SlipModelSet::constant(0.03, 0.01, -0.01);
  const OcpResult res = plan_ocp(req, models, warm, kVp, fast_options());
  EXPECT_TRUE(res.sol.converged);
  EXPECT_LE(res.sol.constraint_violation, 1e-3);
  const TrajSample& last = res.traj.samples.back();
  const double miss = std::hypot(last.x - 2.0, last.y - 2.5);
  EXPECT_LE(miss, 0.03);
  for (int k = 0; k < res.sol.controls.rows(); ++k) {
    EXPECT_LE(std::abs(res.sol.controls(k, 0)), 18.0 + 1e-2);
    EXPECT_LE(std::abs(res.sol.controls(k, 1)), 18.0 + 1e-2);
  }
}

TEST_F(OcpTest, ResimulationReproducesTerminalState) {
  // Single-shooting self-consistency: independent RK4 on the same controls
  // must land on the reported terminal state.
  const PlanRequest req = request({2.0, 2.5, -0.4});
  const Trajectory warm = plan_dubins(req, kVp);
  const SlipModelSet models = SlipModelSet::constant(0.03, 0.01, -0.01);
  const OcpResult res = plan_ocp(req, models, warm, kVp, fast_options());

  const ButcherTableau rk = ButcherTableau::rk4();
  Eigen::VectorXd x(3);
  x << req.c0.x, req.c0.y, req.c0.phi;
  const int n = static_cast<int>(res.sol.controls.rows());
  const double dt_knot = res.sol.tf / n;
  for (int k = 0; k < n; ++k) {
    const WheelSpeeds u{res.sol.controls(k, 0), res.sol.controls(k, 1)};
    const double r = kVp.sprocket_radius;
    const double v_nom = r * (u.left + u.right) / 2;
    const SlipParams slip = models.predict_smooth(u, v_nom >= 0 ? 1 : -1);
    const Twist2D tw =
        wheels_to_twist({u.left + slip.beta_l / r, u.right + slip.beta_r / r}, kVp);
    auto rhs = [&](const Eigen::VectorXd& q, double) -> Eigen::VectorXd {
      Eigen::VectorXd d(3);
      const double speed = tw.v / std::cos(slip.alpha);
      d << speed * std::cos(q[2] + slip.alpha), speed * std::sin(q[2] + slip.alpha),
          tw.wz;
      return d;
    };
    for (int i = 0; i < 10; ++i)
      x = rk_step(rk, rhs, x, 0.0, dt_knot / 10.0);
  }
  const TrajSample& last = res.traj.samples.back();
  EXPECT_NEAR(x[0], last.x, 1e-6);
  EXPECT_NEAR(x[1], last.y, 1e-6);
  EXPECT_NEAR(x[2], last.phi, 1e-6);
}

TEST_F(OcpTest, ImprovesOnWarmStartMerit) {
  // Exact-penalty comparison: the solved point must beat the warm start.
  const PlanRequest req = request({2.0, 2.5, -0.4});
  const Trajectory warm = plan_dubins(req, kVp);
  const SlipModelSet models = SlipModelSet::constant(0.05, 0.02, -0.02);
  const OcpResult res = plan_ocp(req, models, warm, kVp, fast_options());

  // Warm-start controls evaluated under the slip model.
  const OcpOptions opt = fast_options();
  Eigen::MatrixX2d warm_controls(opt.knots, 2);
  for (int k = 0; k < opt.knots; ++k) {
    const double t = (k + 0.5) / opt.knots * warm.duration();
    size_t i = 0;
    while (i + 1 < warm.samples.size() && warm.samples[i + 1].t <= t) ++i;
    const WheelSpeeds w = twist_to_wheels(warm.samples[i].v, warm.samples[i].wz, kVp);
    warm_controls(k, 0) = w.left;
    warm_controls(k, 1) = w.right;
  }
  const OcpPointEval warm_eval =
      evaluate_ocp_point(req, models, warm_controls, warm.duration(), kVp, opt);
  const OcpPointEval sol_eval =
      evaluate_ocp_point(req, models, res.sol.controls, res.sol.tf, kVp, opt);
  const double kPenalty = 1e3;
  EXPECT_LE(sol_eval.cost + kPenalty * sol_eval.violation,
            warm_eval.cost + kPenalty * warm_eval.violation + 1e-6);
}

}  // namespace
}  // namespace tracksim
