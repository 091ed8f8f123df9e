#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "tracksim/dynamics2d.hpp"
#include "tracksim/dynamics3d.hpp"
#include "tracksim/slip_model.hpp"

namespace tracksim {

// Open-loop wheel-speed sweep protocol: hold each (wl, wr) pair constant and
// average the slippage estimates over the tail of the hold window.
struct SweepSpec {
  double speed_abs_max = 10.0;  // rad/s
  double step = 0.65;           // rad/s
  double hold = 2.0;            // s per pair
  double window_frac = 0.25;    // averaged tail fraction of the hold

  std::vector<double> grid() const;
};

struct SlipRecord {
  double wl = 0.0, wr = 0.0;
  double alpha = 0.0;
  bool alpha_valid = false;
  double beta_l = 0.0, beta_r = 0.0;
  int vx_sign = 0;
  bool has_g = false;
  Eigen::Vector3d g_hat = Eigen::Vector3d(0, 0, -1);
  int group = 0;  // one batch per (incline, start yaw); 0 on flat ground
};

struct SlipDataset {
  std::vector<SlipRecord> records;
  int skipped_alpha = 0;  // records whose slip angle was undefined

  nlohmann::json to_json() const;
  static SlipDataset from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static SlipDataset load(const std::string& path);
};

// Flat-ground sweep with the distributed-parameter planar model.
SlipDataset collect_dataset_flat(const FlatSimConfig& cfg, const SweepSpec& sweep,
                                 int jobs = 1);

// Ramp sweep with the sloped-terrain model: every (incline, start yaw) batch
// repeats the full wheel grid and stores the averaged body-frame gravity
// direction alongside.
SlipDataset collect_dataset_slope(const SlopeSimConfig& cfg, const SweepSpec& sweep,
                                  const std::vector<double>& inclines,
                                  const std::vector<double>& start_yaws, int jobs = 1);

enum class VxBranch { kForward, kBackward, kBoth };

// RBF-smoothed dense-grid regressor for one channel (thin-plate kernel,
// smoothing 0.1, 0.1 rad/s grid). Throws InsufficientDataError below 4
// records in the branch.
GridRegressor fit_grid_regressor(const SlipDataset& ds, SlipChannel channel,
                                 VxBranch branch, double smoothing = 0.1,
                                 double grid_step = 0.1);

ScatteredRegressor fit_scattered_regressor(const SlipDataset& ds, SlipChannel channel,
                                           VxBranch branch, double smoothing = 0.1);

// Least-squares fit of the exponential turning-radius law. Requires records
// with |wz| > 1e-3 rad/s; throws DegenerateFitError when the radii are all of
// one sign spanning less than 0.1 m.
ExpSlipModel fit_exp_model(const SlipDataset& ds, SlipChannel channel,
                           const VehicleParams& vp = VehicleParams{});

SlipModelSet fit_flat_models(const SlipDataset& ds);
SlipModelSet fit_slope_models(const SlipDataset& ds);
SlipModelSet fit_exponential_models(const SlipDataset& ds,
                                    const VehicleParams& vp = VehicleParams{});

struct FitReport {
  double r2_alpha = 0.0;   // forward branch
  double r2_beta_l = 0.0;
  double r2_beta_r = 0.0;
  int train_count = 0;
  int test_count = 0;
  nlohmann::json to_json() const;
};

// Deterministic held-out split (every k-th record) and R^2 of the trained
// model on the held-out part.
FitReport evaluate_fit(const SlipDataset& ds, int holdout_every = 7);

double r_squared(const std::vector<double>& truth, const std::vector<double>& pred);

}  // namespace tracksim
