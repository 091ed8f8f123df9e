#pragma once

#include <vector>

#include "tracksim/types.hpp"

namespace tracksim {

// Radical-inverse Halton value for index >= 1 in the given base.
double halton(int index, int base);

// Deterministic target poses: Halton bases (2, 3, 5) in [0,1]^3, the first
// two dimensions scaled to the square [-r_max, r_max]^2 with rejection
// outside the [r_min, r_max] annulus, the third mapped to [0, 2pi) heading.
std::vector<Pose2D> halton_targets(int n, double r_min, double r_max);

}  // namespace tracksim
