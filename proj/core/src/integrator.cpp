#include "tracksim/integrator.hpp"

#include <cmath>

namespace tracksim {

bool ButcherTableau::valid() const {
  const int s = stages();
  if (a.rows() != s || a.cols() != s || c.size() != s) return false;
  if (std::abs(b.sum() - 1.0) > 1e-12) return false;
  if (is_explicit) {
    for (int i = 0; i < s; ++i)
      for (int j = i; j < s; ++j)
        if (a(i, j) != 0.0) return false;
  }
  return true;
}

ButcherTableau ButcherTableau::rk4() {
  ButcherTableau t;
  t.name = "rk4";
  t.a = Eigen::MatrixXd::Zero(4, 4);
  t.a(1, 0) = 0.5;
  t.a(2, 1) = 0.5;
  t.a(3, 2) = 1.0;
  t.b = (Eigen::VectorXd(4) << 1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6).finished();
  t.c = (Eigen::VectorXd(4) << 0.0, 0.5, 0.5, 1.0).finished();
  return t;
}

ButcherTableau ButcherTableau::forward_euler() {
  ButcherTableau t;
  t.name = "euler";
  t.a = Eigen::MatrixXd::Zero(1, 1);
  t.b = Eigen::VectorXd::Ones(1);
  t.c = Eigen::VectorXd::Zero(1);
  return t;
}

ButcherTableau ButcherTableau::heun() {
  ButcherTableau t;
  t.name = "heun";
  t.a = Eigen::MatrixXd::Zero(2, 2);
  t.a(1, 0) = 1.0;
  t.b = (Eigen::VectorXd(2) << 0.5, 0.5).finished();
  t.c = (Eigen::VectorXd(2) << 0.0, 1.0).finished();
  return t;
}

ButcherTableau ButcherTableau::backward_euler() {
  ButcherTableau t;
  t.name = "backward_euler";
  t.is_explicit = false;
  t.a = Eigen::MatrixXd::Ones(1, 1);
  t.b = Eigen::VectorXd::Ones(1);
  t.c = Eigen::VectorXd::Ones(1);
  return t;
}

Eigen::VectorXd rk_step(const ButcherTableau& tab, const OdeRhs& rhs,
                        const Eigen::VectorXd& x, double t, double h) {
  const int s = tab.stages();
  const auto n = x.size();
  Eigen::MatrixXd k(n, s);

  if (tab.is_explicit) {
    for (int i = 0; i < s; ++i) {
      Eigen::VectorXd xi = x;
      for (int j = 0; j < i; ++j)
        if (tab.a(i, j) != 0.0) xi += h * tab.a(i, j) * k.col(j);
      k.col(i) = rhs(xi, t + tab.c[i] * h);
    }
  } else {
    for (int i = 0; i < s; ++i) {
      // Fixed-point iteration on the implicit stage equation.
      Eigen::VectorXd ki = rhs(x, t);
      double residual = 0.0;
      bool converged = false;
      for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd xi = x;
        for (int j = 0; j < i; ++j) xi += h * tab.a(i, j) * k.col(j);
        xi += h * tab.a(i, i) * ki;
        const Eigen::VectorXd next = rhs(xi, t + tab.c[i] * h);
        residual = (next - ki).norm();
        ki = next;
        if (residual < 1e-10) {
          converged = true;
          break;
        }
      }
      if (!converged) throw ImplicitNonconvergenceError(residual);
      k.col(i) = ki;
    }
  }

  Eigen::VectorXd out = x;
  for (int i = 0; i < s; ++i) out += h * tab.b[i] * k.col(i);
  return out;
}

}  // namespace tracksim
