#pragma once

#include "tracksim/types.hpp"

namespace tracksim {

// Single clothoid segment: curvature affine in arclength,
// kappa(s) = kappa0 + dkappa s, s in [0, length].
struct ClothoidSegment {
  Pose2D start;
  double kappa0 = 0.0;
  double dkappa = 0.0;
  double length = 0.0;

  Pose2D sample(double s) const;
  double curvature_at(double s) const { return kappa0 + dkappa * s; }
};

// G1 Hermite interpolation: the unique well-posed clothoid joining two
// oriented endpoints. Solved by safeguarded Newton on the closure equation;
// throws FitNonconvergenceError past 100 iterations (or for coincident
// endpoints).
ClothoidSegment fit_clothoid_g1(const Pose2D& from, const Pose2D& to);

}  // namespace tracksim
