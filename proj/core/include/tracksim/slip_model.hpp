#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracksim/rbf.hpp"
#include "tracksim/types.hpp"

namespace tracksim {

enum class SlipChannel { kAlpha, kBetaLeft, kBetaRight };

// Piecewise-constant lookup on a dense wheel-speed grid produced by RBF
// smoothing of the identification sweep. Queries outside the training hull
// clamp to the nearest cell (the regressor does not extrapolate).
struct GridRegressor {
  double wl0 = 0.0, wr0 = 0.0;
  double step = 0.1;  // rad/s
  int nl = 0, nr = 0;
  std::vector<double> values;  // values[il * nr + ir]
  ThinPlateSpline rbf;

  double predict(double wl, double wr, bool* extrapolated = nullptr) const;
  double predict_smooth(double wl, double wr) const;
  bool trained() const { return nl > 0; }
};

// Nearest-neighbor lookup over smoothed scattered samples in the
// (wl, wr, g_hat) input space, dimensions standardized by training spread.
struct ScatteredRegressor {
  Eigen::MatrixXd sites;  // n x 5, standardized
  Eigen::VectorXd values;
  Eigen::Matrix<double, 5, 1> mean = Eigen::Matrix<double, 5, 1>::Zero();
  Eigen::Matrix<double, 5, 1> inv_scale = Eigen::Matrix<double, 5, 1>::Ones();

  double predict(double wl, double wr, const Eigen::Vector3d& g_hat) const;
  bool trained() const { return sites.rows() > 0; }
  void build_index();

 private:
  struct KdTree;
  std::shared_ptr<const KdTree> tree_;
};

// Odd-in-R exponential slippage law f(R) = -c1 sign(R) exp(-c2 |R|).
// c1 carries the channel's sign (the inner-track beta branch is positive for
// positive turning radii); c2 > 0.
struct ExpSlipModel {
  double c1 = 0.0;
  double c2 = 1.0;
  double rms = 0.0;  // residual of the fit

  double eval(double radius) const;
};

// Trained slippage function approximators for (alpha, beta_L, beta_R).
// The alpha channel is split by sign of the longitudinal velocity.
class SlipModelSet {
 public:
  enum class Kind { kZero, kConstant, kGrid, kScattered, kExponential };

  SlipModelSet() = default;

  static SlipModelSet zero();
  static SlipModelSet constant(double alpha, double beta_l, double beta_r);
  static SlipModelSet grid(GridRegressor alpha_fwd, GridRegressor alpha_bwd,
                           GridRegressor beta_l, GridRegressor beta_r);
  static SlipModelSet scattered(ScatteredRegressor alpha_fwd,
                                ScatteredRegressor alpha_bwd,
                                ScatteredRegressor beta_l, ScatteredRegressor beta_r);
  static SlipModelSet exponential(ExpSlipModel alpha, ExpSlipModel beta_l,
                                  ExpSlipModel beta_r, double track_gauge);

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::kZero; }
  int input_arity() const { return kind_ == Kind::kScattered ? 5 : 2; }

  // Piecewise-constant prediction (what the controller consumes).
  SlipParams predict(const WheelSpeeds& w, int vx_sign,
                     const std::optional<Eigen::Vector3d>& g_hat = std::nullopt) const;
  // Continuous interpolant used by gradient-based planning.
  SlipParams predict_smooth(const WheelSpeeds& w, int vx_sign,
                            const std::optional<Eigen::Vector3d>& g_hat =
                                std::nullopt) const;

  const GridRegressor& grid_channel(SlipChannel ch, int vx_sign) const;

  nlohmann::json to_json() const;
  static SlipModelSet from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static SlipModelSet load(const std::string& path);

 private:
  double channel_value(SlipChannel ch, const WheelSpeeds& w, int vx_sign,
                       const std::optional<Eigen::Vector3d>& g_hat, bool smooth) const;

  Kind kind_ = Kind::kZero;
  SlipParams constant_;
  GridRegressor g_alpha_fwd_, g_alpha_bwd_, g_beta_l_, g_beta_r_;
  ScatteredRegressor s_alpha_fwd_, s_alpha_bwd_, s_beta_l_, s_beta_r_;
  ExpSlipModel e_alpha_, e_beta_l_, e_beta_r_;
  double track_gauge_ = 0.606;  // to recover R from wheel speeds
};

// Spec-level entry point: channel-wise prediction with the alpha branch
// selected by vx_sign. Throws ModelArityMismatchError when a slope-trained
// model is queried without gravity direction (or vice versa).
SlipParams predict_slip(const SlipModelSet& models, const WheelSpeeds& w, int vx_sign,
                        const std::optional<Eigen::Vector3d>& g_hat = std::nullopt);

}  // namespace tracksim
