#pragma once

namespace tracksim {

struct FresnelPair {
  double c = 0.0;  // C(x) = int_0^x cos(pi/2 t^2) dt
  double s = 0.0;  // S(x) = int_0^x sin(pi/2 t^2) dt
};

// Classical Fresnel integrals, evaluated by phase-limited Gauss-Legendre
// panels (deterministic, ~1e-14 absolute).
FresnelPair fresnel(double x);

struct FresnelMoment {
  double x = 0.0;  // int_0^1 cos(a t^2/2 + b t + c) dt
  double y = 0.0;  // int_0^1 sin(a t^2/2 + b t + c) dt
};

// Generalized Fresnel moments; uniformly accurate in a (no small-a special
// casing needed).
FresnelMoment fresnel_moment(double a, double b, double c);

// d/dA of int_0^1 sin(2A t^2/2 + (delta - A) t + c) dt, used by the G1
// clothoid Newton iteration.
double fresnel_moment_y_dA(double a_of_A, double b_of_A, double c);

}  // namespace tracksim
