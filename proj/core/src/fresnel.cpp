#include "tracksim/fresnel.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace tracksim {

namespace {

constexpr int kGaussOrder = 16;

struct GaussRule {
  std::array<double, kGaussOrder> node;
  std::array<double, kGaussOrder> weight;
};

// Legendre nodes/weights on [-1, 1] by Newton iteration from the Chebyshev
// initial guess.
GaussRule build_rule() {
  GaussRule r;
  const int n = kGaussOrder;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.node[n - 1 - i] = x;
    r.weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return r;
}

const GaussRule& rule() {
  static const GaussRule r = build_rule();
  return r;
}

// Integrates f over [0, 1] with panels sized by total phase variation.
template <typename F>
void panel_integrate(double phase_span, F&& accumulate) {
  const int panels =
      std::clamp(static_cast<int>(std::ceil(phase_span / 2.5)) + 1, 1, 4000);
  const GaussRule& g = rule();
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (int i = 0; i < kGaussOrder; ++i) {
      const double t = mid + 0.5 * h * g.node[i];
      accumulate(t, 0.5 * h * g.weight[i]);
    }
  }
}

}  // namespace

FresnelMoment fresnel_moment(double a, double b, double c) {
  FresnelMoment m;
  panel_integrate(std::abs(a) / 2.0 + std::abs(b), [&](double t, double w) {
    const double phase = 0.5 * a * t * t + b * t + c;
    m.x += w * std::cos(phase);
    m.y += w * std::sin(phase);
  });
  return m;
}

double fresnel_moment_y_dA(double a, double b, double c) {
  double acc = 0.0;
  panel_integrate(std::abs(a) / 2.0 + std::abs(b), [&](double t, double w) {
    const double phase = 0.5 * a * t * t + b * t + c;
    acc += w * (t * t - t) * std::cos(phase);
  });
  return acc;
}

FresnelPair fresnel(double x) {
  const double ax = std::abs(x);
  const FresnelMoment m = fresnel_moment(M_PI * ax * ax, 0.0, 0.0);
  FresnelPair out{ax * m.x, ax * m.y};
  if (x < 0) {
    out.c = -out.c;
    out.s = -out.s;
  }
  return out;
}

}  // namespace tracksim
