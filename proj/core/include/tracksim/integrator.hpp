#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "tracksim/errors.hpp"

namespace tracksim {

// Runge-Kutta coefficients. Explicit tableaus must be strictly lower
// triangular in a; weights must sum to 1.
struct ButcherTableau {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  bool is_explicit = true;
  std::string name;

  int stages() const { return static_cast<int>(b.size()); }
  bool valid() const;

  static ButcherTableau rk4();
  static ButcherTableau forward_euler();
  static ButcherTableau heun();
  static ButcherTableau backward_euler();
};

using OdeRhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;

// One fixed step x(t) -> x(t+h). Implicit stages are solved by fixed-point
// iteration to residual 1e-10 (max 50 iterations, ImplicitNonconvergenceError
// beyond that).
Eigen::VectorXd rk_step(const ButcherTableau& tab, const OdeRhs& rhs,
                        const Eigen::VectorXd& x, double t, double h);

}  // namespace tracksim
