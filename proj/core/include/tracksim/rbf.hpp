#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tracksim/errors.hpp"

namespace tracksim {

// Thin-plate-spline interpolator phi(r) = r^2 log r with a degree-1
// polynomial tail. A positive smoothing parameter relaxes exact
// interpolation by loading the kernel diagonal.
class ThinPlateSpline {
 public:
  ThinPlateSpline() = default;

  // points: n x d (d = 2 typical), values: n. Throws InsufficientDataError
  // for fewer than d + 2 points.
  ThinPlateSpline(const Eigen::MatrixXd& points, const Eigen::VectorXd& values,
                  double smoothing);

  double operator()(const Eigen::VectorXd& x) const;
  double eval2(double x, double y) const;

  int dims() const { return static_cast<int>(centers_.cols()); }
  bool trained() const { return centers_.rows() > 0; }

  const Eigen::MatrixXd& centers() const { return centers_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& poly() const { return poly_; }

  // Rebuild from serialized pieces.
  static ThinPlateSpline from_raw(Eigen::MatrixXd centers, Eigen::VectorXd weights,
                                  Eigen::VectorXd poly);

 private:
  Eigen::MatrixXd centers_;  // n x d
  Eigen::VectorXd weights_;  // n
  Eigen::VectorXd poly_;     // 1 + d
};

}  // namespace tracksim
