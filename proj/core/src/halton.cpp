#include "tracksim/halton.hpp"

#include <cmath>

#include "tracksim/errors.hpp"

namespace tracksim {

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

std::vector<Pose2D> halton_targets(int n, double r_min, double r_max) {
  if (n <= 0 || r_min <= 0 || r_min >= r_max)
    throw ConfigError("halton_targets needs 0 < r_min < r_max and n > 0");
  std::vector<Pose2D> out;
  out.reserve(n);
  for (int idx = 1; static_cast<int>(out.size()) < n; ++idx) {
    const double x = (2.0 * halton(idx, 2) - 1.0) * r_max;
    const double y = (2.0 * halton(idx, 3) - 1.0) * r_max;
    const double rr = std::hypot(x, y);
    if (rr < r_min || rr > r_max) continue;
    const double phi = wrap_angle(2.0 * M_PI * halton(idx, 5));
    out.push_back({x, y, phi});
  }
  return out;
}

}  // namespace tracksim
