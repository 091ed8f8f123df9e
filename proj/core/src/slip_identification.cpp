#include "tracksim/slip_identification.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "tracksim/pseudo_kinematics.hpp"
#include "tracksim/rotation.hpp"
#include "tracksim/wheel_kinematics.hpp"

namespace tracksim {

std::vector<double> SweepSpec::grid() const {
  std::vector<double> g;
  for (double w = -speed_abs_max; w <= speed_abs_max + 1e-12; w += step) g.push_back(w);
  return g;
}

namespace {

struct WindowAverage {
  double vx = 0, vy = 0, wz = 0, wl = 0, wr = 0;
  Eigen::Vector3d g_hat = Eigen::Vector3d::Zero();
  int n = 0;

  void add(double vx_, double vy_, double wz_, const WheelSpeeds& w,
           const Eigen::Vector3d& g) {
    vx += vx_;
    vy += vy_;
    wz += wz_;
    wl += w.left;
    wr += w.right;
    g_hat += g;
    ++n;
  }
};

// Builds one record from window-averaged steady-state quantities.
std::optional<SlipRecord> finish_record(const WindowAverage& acc, double wl_cmd,
                                        double wr_cmd, bool has_g, int group,
                                        const VehicleParams& vp, int* skipped) {
  if (acc.n == 0) return std::nullopt;
  const double inv = 1.0 / acc.n;
  SlipRecord rec;
  rec.wl = wl_cmd;
  rec.wr = wr_cmd;
  rec.group = group;
  rec.has_g = has_g;
  if (has_g) rec.g_hat = (acc.g_hat * inv).normalized();

  const double vx = acc.vx * inv, vy = acc.vy * inv, wz = acc.wz * inv;
  const WheelSpeeds applied{acc.wl * inv, acc.wr * inv};
  const TrackGroundSpeeds ts = track_ground_speeds(vx, wz, vp.track_gauge);
  rec.beta_l = ts.left - applied.left * vp.sprocket_radius;
  rec.beta_r = ts.right - applied.right * vp.sprocket_radius;
  rec.vx_sign = vx > 0 ? 1 : (vx < 0 ? -1 : 0);
  if (std::abs(vx) > kAlphaSpeedEps) {
    rec.alpha = std::atan(vy / vx);
    rec.alpha_valid = true;
  } else {
    rec.alpha_valid = false;
    if (skipped) ++(*skipped);
  }
  return rec;
}

}  // namespace

SlipDataset collect_dataset_flat(const FlatSimConfig& cfg, const SweepSpec& sweep,
                                 int jobs) {
  const std::vector<double> grid = sweep.grid();
  std::vector<std::pair<double, double>> pairs;
  for (double wl : grid)
    for (double wr : grid) pairs.emplace_back(wl, wr);

  std::vector<std::optional<SlipRecord>> results(pairs.size());
  std::atomic<size_t> next{0};
  std::atomic<int> skipped{0};

  auto worker = [&]() {
    FlatSimulator sim(cfg);
    const int ticks = static_cast<int>(std::round(sweep.hold / cfg.control_dt));
    const int window_start = static_cast<int>(ticks * (1.0 - sweep.window_frac));
    for (size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) {
      const WheelSpeeds cmd{pairs[i].first, pairs[i].second};
      sim.reset(State2D{});
      WindowAverage acc;
      for (int k = 0; k < ticks; ++k) {
        sim.tick(cmd);
        if (k >= window_start) {
          const State2D& s = sim.state();
          acc.add(s.vx_b, s.vy_b, s.wz, sim.applied_command(),
                  Eigen::Vector3d(0, 0, -1));
        }
      }
      int local_skip = 0;
      results[i] = finish_record(acc, cmd.left, cmd.right, false, 0, cfg.vp,
                                 &local_skip);
      skipped += local_skip;
    }
  };

  std::vector<std::thread> pool;
  const int n_threads = std::max(1, jobs);
  for (int t = 0; t < n_threads - 1; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SlipDataset ds;
  ds.skipped_alpha = skipped;
  for (auto& r : results)
    if (r) ds.records.push_back(*r);
  return ds;
}

SlipDataset collect_dataset_slope(const SlopeSimConfig& cfg, const SweepSpec& sweep,
                                  const std::vector<double>& inclines,
                                  const std::vector<double>& start_yaws, int jobs) {
  const std::vector<double> grid = sweep.grid();
  struct Job {
    double wl, wr, incline, yaw;
    int group;
  };
  std::vector<Job> jobs_list;
  int group = 0;
  for (double incline : inclines) {
    for (double yaw : start_yaws) {
      for (double wl : grid)
        for (double wr : grid) jobs_list.push_back({wl, wr, incline, yaw, group});
      ++group;
    }
  }

  // One shared terrain per incline; big enough that a 2 s hold stays inside.
  std::vector<HeightField> terrains;
  terrains.reserve(inclines.size());
  for (double incline : inclines)
    terrains.push_back(make_ramp(incline, 40.0, 0.5));

  std::vector<std::optional<SlipRecord>> results(jobs_list.size());
  std::atomic<size_t> next{0};
  std::atomic<int> skipped{0};

  auto worker = [&]() {
    const int ticks = static_cast<int>(std::round(sweep.hold / cfg.control_dt));
    const int window_start = static_cast<int>(ticks * (1.0 - sweep.window_frac));
    for (size_t i = next.fetch_add(1); i < jobs_list.size(); i = next.fetch_add(1)) {
      const Job& job = jobs_list[i];
      const size_t terrain_idx =
          static_cast<size_t>(job.group) / start_yaws.size();
      SlopeSimulator sim(cfg, terrains[terrain_idx]);
      const State3D init =
          initial_pose_on_terrain(terrains[terrain_idx], 0.0, 0.0, job.yaw, cfg.vp);
      sim.reset(init);
      const WheelSpeeds cmd{job.wl, job.wr};
      WindowAverage acc;
      bool diverged = false;
      try {
        for (int k = 0; k < ticks; ++k) {
          sim.tick(cmd);
          if (k >= window_start) {
            const State3D& s = sim.state();
            const Eigen::Matrix3d rb = rotation_zyx(s.euler);
            acc.add(s.v_body.x(), s.v_body.y(), s.w_body.z(), sim.applied_command(),
                    rb.transpose() * Eigen::Vector3d(0, 0, -1));
          }
        }
      } catch (const SimError&) {
        diverged = true;  // ran off the ramp or diverged; drop the pair
      }
      if (!diverged) {
        int local_skip = 0;
        results[i] = finish_record(acc, cmd.left, cmd.right, true, job.group, cfg.vp,
                                   &local_skip);
        skipped += local_skip;
      }
    }
  };

  std::vector<std::thread> pool;
  const int n_threads = std::max(1, jobs);
  for (int t = 0; t < n_threads - 1; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SlipDataset ds;
  ds.skipped_alpha = skipped;
  for (auto& r : results)
    if (r) ds.records.push_back(*r);
  return ds;
}

namespace {

bool in_branch(const SlipRecord& r, VxBranch branch) {
  switch (branch) {
    case VxBranch::kForward:
      return r.vx_sign > 0;
    case VxBranch::kBackward:
      return r.vx_sign < 0;
    case VxBranch::kBoth:
    default:
      return true;
  }
}

double channel_of(const SlipRecord& r, SlipChannel ch) {
  switch (ch) {
    case SlipChannel::kAlpha:
      return r.alpha;
    case SlipChannel::kBetaLeft:
      return r.beta_l;
    case SlipChannel::kBetaRight:
    default:
      return r.beta_r;
  }
}

std::vector<const SlipRecord*> select(const SlipDataset& ds, SlipChannel ch,
                                      VxBranch branch) {
  std::vector<const SlipRecord*> out;
  for (const auto& r : ds.records) {
    if (ch == SlipChannel::kAlpha && !r.alpha_valid) continue;
    if (!in_branch(r, branch)) continue;
    out.push_back(&r);
  }
  return out;
}

}  // namespace

GridRegressor fit_grid_regressor(const SlipDataset& ds, SlipChannel channel,
                                 VxBranch branch, double smoothing, double grid_step) {
  const auto recs = select(ds, channel, branch);
  if (recs.size() < 4)
    throw InsufficientDataError("grid regressor needs >= 4 records, got " +
                                std::to_string(recs.size()));

  Eigen::MatrixXd pts(recs.size(), 2);
  Eigen::VectorXd vals(recs.size());
  double wl_min = recs[0]->wl, wl_max = recs[0]->wl;
  double wr_min = recs[0]->wr, wr_max = recs[0]->wr;
  for (size_t i = 0; i < recs.size(); ++i) {
    pts(i, 0) = recs[i]->wl;
    pts(i, 1) = recs[i]->wr;
    vals[i] = channel_of(*recs[i], channel);
    wl_min = std::min(wl_min, recs[i]->wl);
    wl_max = std::max(wl_max, recs[i]->wl);
    wr_min = std::min(wr_min, recs[i]->wr);
    wr_max = std::max(wr_max, recs[i]->wr);
  }

  GridRegressor g;
  g.rbf = ThinPlateSpline(pts, vals, smoothing);
  g.step = grid_step;
  g.wl0 = wl_min;
  g.wr0 = wr_min;
  g.nl = static_cast<int>(std::floor((wl_max - wl_min) / grid_step + 1e-9)) + 1;
  g.nr = static_cast<int>(std::floor((wr_max - wr_min) / grid_step + 1e-9)) + 1;
  g.values.resize(static_cast<size_t>(g.nl) * g.nr);
  for (int il = 0; il < g.nl; ++il) {
    const double wl = g.wl0 + il * grid_step;
    for (int ir = 0; ir < g.nr; ++ir) {
      const double wr = g.wr0 + ir * grid_step;
      g.values[static_cast<size_t>(il) * g.nr + ir] = g.rbf.eval2(wl, wr);
    }
  }
  return g;
}

ScatteredRegressor fit_scattered_regressor(const SlipDataset& ds, SlipChannel channel,
                                           VxBranch branch, double smoothing) {
  const auto recs = select(ds, channel, branch);
  if (recs.size() < 8)
    throw InsufficientDataError("scattered regressor needs >= 8 records, got " +
                                std::to_string(recs.size()));

  // Smooth each (incline, yaw) batch over its own 2D wheel grid, then pool
  // the smoothed samples in the full 5D input space.
  int max_group = 0;
  for (const auto* r : recs) max_group = std::max(max_group, r->group);

  ScatteredRegressor s;
  s.sites.resize(recs.size(), 5);
  s.values.resize(recs.size());
  size_t row = 0;
  for (int grp = 0; grp <= max_group; ++grp) {
    std::vector<const SlipRecord*> batch;
    for (const auto* r : recs)
      if (r->group == grp) batch.push_back(r);
    if (batch.empty()) continue;
    Eigen::MatrixXd pts(batch.size(), 2);
    Eigen::VectorXd vals(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) {
      pts(i, 0) = batch[i]->wl;
      pts(i, 1) = batch[i]->wr;
      vals[i] = channel_of(*batch[i], channel);
    }
    std::optional<ThinPlateSpline> spline;
    if (batch.size() >= 4) spline.emplace(pts, vals, smoothing);
    for (size_t i = 0; i < batch.size(); ++i) {
      s.sites(row, 0) = batch[i]->wl;
      s.sites(row, 1) = batch[i]->wr;
      s.sites.row(row).segment<3>(2) = batch[i]->g_hat.transpose();
      s.values[row] = spline ? spline->eval2(batch[i]->wl, batch[i]->wr) : vals[i];
      ++row;
    }
  }

  // Standardize dimensions so wheel speeds do not dominate the metric.
  for (int c = 0; c < 5; ++c) {
    s.mean[c] = s.sites.col(c).mean();
    const double sd = std::sqrt(
        (s.sites.col(c).array() - s.mean[c]).square().sum() / s.sites.rows());
    s.inv_scale[c] = sd > 1e-9 ? 1.0 / sd : 1.0;
  }
  for (int i = 0; i < s.sites.rows(); ++i)
    s.sites.row(i) =
        ((s.sites.row(i).transpose() - s.mean).cwiseProduct(s.inv_scale)).transpose();
  s.build_index();
  return s;
}

ExpSlipModel fit_exp_model(const SlipDataset& ds, SlipChannel channel,
                           const VehicleParams& vp) {
  // Turning radius from the commanded wheels through the no-slip mapping.
  std::vector<double> radii, ys;
  bool pos = false, neg = false;
  double abs_min = 1e300, abs_max = 0.0;
  for (const auto& r : ds.records) {
    if (channel == SlipChannel::kAlpha && !r.alpha_valid) continue;
    const double v = vp.sprocket_radius * (r.wl + r.wr) / 2.0;
    const double wz = vp.sprocket_radius * (r.wr - r.wl) / vp.track_gauge;
    if (std::abs(wz) <= 1e-3) continue;
    const double radius = v / wz;
    radii.push_back(radius);
    ys.push_back(channel_of(r, channel));
    (radius >= 0 ? pos : neg) = true;
    abs_min = std::min(abs_min, std::abs(radius));
    abs_max = std::max(abs_max, std::abs(radius));
  }
  if (radii.size() < 3)
    throw DegenerateFitError("too few turning records for exponential fit");
  if (!(pos && neg) && abs_max - abs_min < 0.1)
    throw DegenerateFitError("turning radii span too narrow for exponential fit");

  // Log-linear seed on the sign-folded data, then Gauss-Newton on the true
  // residual y - f(R), f(R) = -c1 sign(R) exp(-c2 |R|).
  double sign_acc = 0.0;
  for (size_t i = 0; i < radii.size(); ++i)
    sign_acc += -ys[i] * (radii[i] > 0 ? 1.0 : -1.0);
  const double c1_sign = sign_acc >= 0 ? 1.0 : -1.0;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n_log = 0;
  for (size_t i = 0; i < radii.size(); ++i) {
    const double u = -ys[i] * (radii[i] > 0 ? 1.0 : -1.0) * c1_sign;
    if (u <= 1e-12) continue;
    const double x = std::abs(radii[i]);
    const double ly = std::log(u);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
    ++n_log;
  }
  double c1 = 0.01 * c1_sign, c2 = 1.0;
  if (n_log >= 2 && (n_log * sxx - sx * sx) > 1e-12) {
    const double slope = (n_log * sxy - sx * sy) / (n_log * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n_log;
    c2 = std::max(1e-6, -slope);
    c1 = c1_sign * std::exp(intercept);
  }

  for (int it = 0; it < 60; ++it) {
    double h11 = 0, h12 = 0, h22 = 0, g1 = 0, g2 = 0;
    for (size_t i = 0; i < radii.size(); ++i) {
      const double s = radii[i] > 0 ? 1.0 : (radii[i] < 0 ? -1.0 : 0.0);
      const double e = std::exp(-c2 * std::abs(radii[i]));
      const double f = -c1 * s * e;
      const double res = ys[i] - f;
      const double d1 = -s * e;                          // df/dc1
      const double d2 = c1 * s * std::abs(radii[i]) * e;  // df/dc2
      g1 += res * d1;
      g2 += res * d2;
      h11 += d1 * d1;
      h12 += d1 * d2;
      h22 += d2 * d2;
    }
    const double det = h11 * h22 - h12 * h12;
    if (std::abs(det) < 1e-18) break;
    const double dc1 = (h22 * g1 - h12 * g2) / det;
    const double dc2 = (-h12 * g1 + h11 * g2) / det;
    c1 += dc1;
    c2 = std::max(1e-8, c2 + dc2);
    if (std::abs(dc1) + std::abs(dc2) < 1e-14) break;
  }

  ExpSlipModel m;
  m.c1 = c1;
  m.c2 = c2;
  double ss = 0.0;
  for (size_t i = 0; i < radii.size(); ++i) {
    const double res = ys[i] - m.eval(radii[i]);
    ss += res * res;
  }
  m.rms = std::sqrt(ss / radii.size());
  return m;
}

SlipModelSet fit_flat_models(const SlipDataset& ds) {
  return SlipModelSet::grid(
      fit_grid_regressor(ds, SlipChannel::kAlpha, VxBranch::kForward),
      fit_grid_regressor(ds, SlipChannel::kAlpha, VxBranch::kBackward),
      fit_grid_regressor(ds, SlipChannel::kBetaLeft, VxBranch::kBoth),
      fit_grid_regressor(ds, SlipChannel::kBetaRight, VxBranch::kBoth));
}

SlipModelSet fit_slope_models(const SlipDataset& ds) {
  return SlipModelSet::scattered(
      fit_scattered_regressor(ds, SlipChannel::kAlpha, VxBranch::kForward),
      fit_scattered_regressor(ds, SlipChannel::kAlpha, VxBranch::kBackward),
      fit_scattered_regressor(ds, SlipChannel::kBetaLeft, VxBranch::kBoth),
      fit_scattered_regressor(ds, SlipChannel::kBetaRight, VxBranch::kBoth));
}

SlipModelSet fit_exponential_models(const SlipDataset& ds, const VehicleParams& vp) {
  return SlipModelSet::exponential(fit_exp_model(ds, SlipChannel::kAlpha, vp),
                                   fit_exp_model(ds, SlipChannel::kBetaLeft, vp),
                                   fit_exp_model(ds, SlipChannel::kBetaRight, vp),
                                   vp.track_gauge);
}

double r_squared(const std::vector<double>& truth, const std::vector<double>& pred) {
  const size_t n = truth.size();
  if (n == 0) return 0.0;
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (ss_tot < 1e-300) return ss_res < 1e-300 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

FitReport evaluate_fit(const SlipDataset& ds, int holdout_every) {
  SlipDataset train;
  std::vector<SlipRecord> test;
  for (size_t i = 0; i < ds.records.size(); ++i) {
    if (static_cast<int>(i % holdout_every) == holdout_every / 2)
      test.push_back(ds.records[i]);
    else
      train.records.push_back(ds.records[i]);
  }

  const bool slope = !ds.records.empty() && ds.records.front().has_g;
  const SlipModelSet models = slope ? fit_slope_models(train) : fit_flat_models(train);

  FitReport rep;
  rep.train_count = static_cast<int>(train.records.size());
  rep.test_count = static_cast<int>(test.size());
  std::vector<double> ta, pa, tl, pl, tr, pr;
  for (const auto& r : test) {
    const std::optional<Eigen::Vector3d> g =
        slope ? std::optional<Eigen::Vector3d>(r.g_hat) : std::nullopt;
    const SlipParams p = models.predict({r.wl, r.wr}, r.vx_sign, g);
    if (r.alpha_valid && r.vx_sign > 0) {
      ta.push_back(r.alpha);
      pa.push_back(p.alpha);
    }
    tl.push_back(r.beta_l);
    pl.push_back(p.beta_l);
    tr.push_back(r.beta_r);
    pr.push_back(p.beta_r);
  }
  rep.r2_alpha = r_squared(ta, pa);
  rep.r2_beta_l = r_squared(tl, pl);
  rep.r2_beta_r = r_squared(tr, pr);
  return rep;
}

nlohmann::json FitReport::to_json() const {
  return {{"r2_alpha", r2_alpha},
          {"r2_beta_l", r2_beta_l},
          {"r2_beta_r", r2_beta_r},
          {"train_count", train_count},
          {"test_count", test_count}};
}

nlohmann::json SlipDataset::to_json() const {
  nlohmann::json j;
  j["schema"] = "tracksim-slip-dataset";
  j["version"] = 1;
  j["skipped_alpha"] = skipped_alpha;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    arr.push_back({{"wl", r.wl},
                   {"wr", r.wr},
                   {"alpha", r.alpha},
                   {"alpha_valid", r.alpha_valid},
                   {"beta_l", r.beta_l},
                   {"beta_r", r.beta_r},
                   {"vx_sign", r.vx_sign},
                   {"has_g", r.has_g},
                   {"g_hat", {r.g_hat.x(), r.g_hat.y(), r.g_hat.z()}},
                   {"group", r.group}});
  }
  j["records"] = std::move(arr);
  return j;
}

SlipDataset SlipDataset::from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "tracksim-slip-dataset" || j.value("version", 0) != 1)
    throw ConfigError("unrecognized slip dataset schema");
  SlipDataset ds;
  ds.skipped_alpha = j.value("skipped_alpha", 0);
  for (const auto& rj : j.at("records")) {
    SlipRecord r;
    r.wl = rj.at("wl");
    r.wr = rj.at("wr");
    r.alpha = rj.at("alpha");
    r.alpha_valid = rj.at("alpha_valid");
    r.beta_l = rj.at("beta_l");
    r.beta_r = rj.at("beta_r");
    r.vx_sign = rj.at("vx_sign");
    r.has_g = rj.at("has_g");
    const auto g = rj.at("g_hat");
    r.g_hat = Eigen::Vector3d(g[0], g[1], g[2]);
    r.group = rj.at("group");
    ds.records.push_back(r);
  }
  return ds;
}

void SlipDataset::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw SimError("cannot open " + path + " for writing");
  out << to_json().dump() << '\n';
}

SlipDataset SlipDataset::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SimError("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

}  // namespace tracksim
