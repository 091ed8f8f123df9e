#include "tracksim/clothoid.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "tracksim/errors.hpp"
#include "tracksim/fresnel.hpp"

namespace tracksim {

Pose2D ClothoidSegment::sample(double s) const {
  s = std::clamp(s, 0.0, length);
  const FresnelMoment m = fresnel_moment(dkappa * s * s, kappa0 * s, start.phi);
  Pose2D q;
  q.x = start.x + s * m.x;
  q.y = start.y + s * m.y;
  q.phi = wrap_angle(start.phi + kappa0 * s + 0.5 * dkappa * s * s);
  return q;
}

ClothoidSegment fit_clothoid_g1(const Pose2D& from, const Pose2D& to) {
  const double dx = to.x - from.x, dy = to.y - from.y;
  const double r = std::hypot(dx, dy);
  if (r < 1e-12) throw FitNonconvergenceError("coincident endpoints");
  const double bearing = std::atan2(dy, dx);
  const double phi0 = wrap_angle(from.phi - bearing);
  const double phi1 = wrap_angle(to.phi - bearing);
  const double delta = phi1 - phi0;

  // Closure in the chord frame: find A with Y(2A, delta - A, phi0) = 0 and
  // positive X. Bracket by scanning, refine by Newton with bisection
  // safeguard.
  auto g = [&](double A) { return fresnel_moment(2.0 * A, delta - A, phi0).y; };
  auto gp = [&](double A) { return fresnel_moment_y_dA(2.0 * A, delta - A, phi0); };

  double A = 3.0 * (phi1 + phi0);  // coarse guess, refined below
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  {
    const double span = 8.0 * M_PI + std::abs(A);
    const int steps = 400;
    double prev_a = A - span, prev_g = g(prev_a);
    double best_a = prev_a;
    double best_abs = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= steps; ++i) {
      const double cur_a = A - span + 2.0 * span * i / steps;
      const double cur_g = g(cur_a);
      if (prev_g == 0.0 || prev_g * cur_g < 0.0) {
        // Prefer the root nearest A (smallest |segment sweep|).
        if (!bracketed || std::abs((prev_a + cur_a) / 2 - A) < std::abs((lo + hi) / 2 - A)) {
          lo = prev_a;
          hi = cur_a;
          bracketed = true;
        }
      }
      if (std::abs(cur_g) < best_abs) {
        best_abs = std::abs(cur_g);
        best_a = cur_a;
      }
      prev_a = cur_a;
      prev_g = cur_g;
    }
    A = bracketed ? (lo + hi) / 2.0 : best_a;
  }
  if (!bracketed) throw FitNonconvergenceError("no closure bracket found");

  double glo = g(lo);
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const double val = g(A);
    if (std::abs(val) < 1e-12) {
      converged = true;
      break;
    }
    const double der = gp(A);
    double next = (std::abs(der) > 1e-14) ? A - val / der : 0.5 * (lo + hi);
    if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (glo * val < 0)
      hi = A;
    else {
      lo = A;
      glo = val;
    }
    A = next;
  }
  if (!converged && std::abs(g(A)) > 1e-10)
    throw FitNonconvergenceError("closure iteration exceeded 100 steps");

  const double h = fresnel_moment(2.0 * A, delta - A, phi0).x;
  if (h <= 0) throw FitNonconvergenceError("negative-length closure root");

  ClothoidSegment seg;
  seg.start = from;
  seg.length = r / h;
  seg.kappa0 = (delta - A) / seg.length;
  seg.dkappa = 2.0 * A / (seg.length * seg.length);
  return seg;
}

}  // namespace tracksim
