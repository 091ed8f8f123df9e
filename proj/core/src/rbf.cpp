#include "tracksim/rbf.hpp"

#include <cmath>

namespace tracksim {

namespace {
inline double tps_kernel(double r) { return r > 0.0 ? r * r * std::log(r) : 0.0; }
}  // namespace

ThinPlateSpline::ThinPlateSpline(const Eigen::MatrixXd& points,
                                 const Eigen::VectorXd& values, double smoothing) {
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  if (n < d + 2)
    throw InsufficientDataError("thin-plate fit needs at least " +
                                std::to_string(d + 2) + " points, got " +
                                std::to_string(n));

  const int m = 1 + d;
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n + m, n + m);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double k = tps_kernel((points.row(i) - points.row(j)).norm());
      sys(i, j) = k;
      sys(j, i) = k;
    }
    sys(i, i) = smoothing;
    sys(i, n) = 1.0;
    sys(n, i) = 1.0;
    for (int c = 0; c < d; ++c) {
      sys(i, n + 1 + c) = points(i, c);
      sys(n + 1 + c, i) = points(i, c);
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
  rhs.head(n) = values;

  const Eigen::VectorXd sol = sys.partialPivLu().solve(rhs);
  centers_ = points;
  weights_ = sol.head(n);
  poly_ = sol.tail(m);
}

double ThinPlateSpline::operator()(const Eigen::VectorXd& x) const {
  double acc = poly_[0];
  for (int c = 0; c < dims(); ++c) acc += poly_[1 + c] * x[c];
  for (int i = 0; i < centers_.rows(); ++i)
    acc += weights_[i] * tps_kernel((centers_.row(i).transpose() - x).norm());
  return acc;
}

double ThinPlateSpline::eval2(double x, double y) const {
  double acc = poly_[0] + poly_[1] * x + poly_[2] * y;
  for (int i = 0; i < centers_.rows(); ++i) {
    const double dx = centers_(i, 0) - x;
    const double dy = centers_(i, 1) - y;
    acc += weights_[i] * tps_kernel(std::sqrt(dx * dx + dy * dy));
  }
  return acc;
}

ThinPlateSpline ThinPlateSpline::from_raw(Eigen::MatrixXd centers,
                                          Eigen::VectorXd weights,
                                          Eigen::VectorXd poly) {
  ThinPlateSpline s;
  s.centers_ = std::move(centers);
  s.weights_ = std::move(weights);
  s.poly_ = std::move(poly);
  return s;
}

}  // namespace tracksim
