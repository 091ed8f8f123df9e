#include "tracksim/dubins.hpp"

#include <cmath>
#include <limits>

#include "tracksim/errors.hpp"

namespace tracksim {

namespace {

double mod2pi(double a) {
  double m = std::fmod(a, 2.0 * M_PI);
  if (m < 0) m += 2.0 * M_PI;
  return m;
}

struct Words {
  // segment types per word: 'L', 'S', 'R'
  static constexpr char types[6][3] = {{'L', 'S', 'L'}, {'R', 'S', 'R'},
                                       {'L', 'S', 'R'}, {'R', 'S', 'L'},
                                       {'R', 'L', 'R'}, {'L', 'R', 'L'}};
};
constexpr char Words::types[6][3];

// Normalized word solutions; inputs are alpha, beta and the normalized
// distance d (positions scaled by the curvature).
std::optional<std::array<double, 3>> solve_word(DubinsWord word, double alpha,
                                                double beta, double d) {
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  const double sb = std::sin(beta), cb = std::cos(beta);
  const double cab = std::cos(alpha - beta);
  switch (word) {
    case DubinsWord::kLSL: {
      const double p_sq = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sa - sb);
      if (p_sq < 0) return std::nullopt;
      const double tmp = std::atan2(cb - ca, d + sa - sb);
      return std::array<double, 3>{mod2pi(-alpha + tmp), std::sqrt(p_sq),
                                   mod2pi(beta - tmp)};
    }
    case DubinsWord::kRSR: {
      const double p_sq = 2.0 + d * d - 2.0 * cab + 2.0 * d * (sb - sa);
      if (p_sq < 0) return std::nullopt;
      const double tmp = std::atan2(ca - cb, d - sa + sb);
      return std::array<double, 3>{mod2pi(alpha - tmp), std::sqrt(p_sq),
                                   mod2pi(-beta + tmp)};
    }
    case DubinsWord::kLSR: {
      const double p_sq = -2.0 + d * d + 2.0 * cab + 2.0 * d * (sa + sb);
      if (p_sq < 0) return std::nullopt;
      const double p = std::sqrt(p_sq);
      const double tmp = std::atan2(-ca - cb, d + sa + sb) - std::atan2(-2.0, p);
      return std::array<double, 3>{mod2pi(-alpha + tmp), p,
                                   mod2pi(-mod2pi(beta) + tmp)};
    }
    case DubinsWord::kRSL: {
      const double p_sq = -2.0 + d * d + 2.0 * cab - 2.0 * d * (sa + sb);
      if (p_sq < 0) return std::nullopt;
      const double p = std::sqrt(p_sq);
      const double tmp = std::atan2(ca + cb, d - sa - sb) - std::atan2(2.0, p);
      return std::array<double, 3>{mod2pi(alpha - tmp), p, mod2pi(beta - tmp)};
    }
    case DubinsWord::kRLR: {
      const double tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sa - sb)) / 8.0;
      if (std::abs(tmp) > 1.0) return std::nullopt;
      const double p = mod2pi(2.0 * M_PI - std::acos(tmp));
      const double phi = std::atan2(ca - cb, d - sa + sb);
      const double t = mod2pi(alpha - phi + mod2pi(p / 2.0));
      return std::array<double, 3>{t, p, mod2pi(alpha - beta - t + mod2pi(p))};
    }
    case DubinsWord::kLRL:
    default: {
      const double tmp = (6.0 - d * d + 2.0 * cab + 2.0 * d * (sb - sa)) / 8.0;
      if (std::abs(tmp) > 1.0) return std::nullopt;
      const double p = mod2pi(2.0 * M_PI - std::acos(tmp));
      const double phi = std::atan2(-ca + cb, d + sa - sb);
      const double t = mod2pi(-alpha + phi + p / 2.0);
      return std::array<double, 3>{t, p,
                                   mod2pi(mod2pi(beta) - alpha - t + mod2pi(p))};
    }
  }
}

// Applies one normalized segment from a pose (unit turning radius).
Pose2D apply_segment(const Pose2D& q, char type, double param) {
  Pose2D out = q;
  switch (type) {
    case 'L':
      out.phi = q.phi + param;
      out.x = q.x + std::sin(out.phi) - std::sin(q.phi);
      out.y = q.y - std::cos(out.phi) + std::cos(q.phi);
      break;
    case 'R':
      out.phi = q.phi - param;
      out.x = q.x - std::sin(out.phi) + std::sin(q.phi);
      out.y = q.y + std::cos(out.phi) - std::cos(q.phi);
      break;
    case 'S':
    default:
      out.x = q.x + param * std::cos(q.phi);
      out.y = q.y + param * std::sin(q.phi);
      break;
  }
  return out;
}

}  // namespace

Pose2D DubinsPath::sample(double s) const {
  const double k = curvature;
  double remaining = std::clamp(s, 0.0, length) * k;  // normalized arclength
  Pose2D q{start.x * k, start.y * k, start.phi};
  const char* types = Words::types[static_cast<int>(word)];
  for (int i = 0; i < 3; ++i) {
    const double seg = std::min(remaining, param[i]);
    q = apply_segment(q, types[i], seg);
    remaining -= seg;
    if (remaining <= 0) break;
  }
  return {q.x / k, q.y / k, wrap_angle(q.phi)};
}

double DubinsPath::turn_direction(double s) const {
  double pos = std::clamp(s, 0.0, length) * curvature;
  const char* types = Words::types[static_cast<int>(word)];
  for (int i = 0; i < 3; ++i) {
    if (pos <= param[i] || i == 2) {
      if (types[i] == 'L') return 1.0;
      if (types[i] == 'R') return -1.0;
      return 0.0;
    }
    pos -= param[i];
  }
  return 0.0;
}

std::optional<DubinsPath> dubins_word_path(const Pose2D& from, const Pose2D& to,
                                           double curvature, DubinsWord word) {
  if (curvature <= 0) throw InfeasibleError("curvature bound must be positive");
  const double dx = to.x - from.x, dy = to.y - from.y;
  const double d = std::hypot(dx, dy) * curvature;
  const double theta = std::atan2(dy, dx);
  const double alpha = mod2pi(from.phi - theta);
  const double beta = mod2pi(to.phi - theta);

  const auto params = solve_word(word, alpha, beta, d);
  if (!params) return std::nullopt;

  DubinsPath path;
  path.start = from;
  path.word = word;
  path.curvature = curvature;
  path.param = *params;
  path.length = (path.param[0] + path.param[1] + path.param[2]) / curvature;

  // Closure check guards against numerically spurious word solutions.
  const Pose2D end = path.sample(path.length);
  const double pos_err = std::hypot(end.x - to.x, end.y - to.y);
  const double ang_err = std::abs(wrap_angle(end.phi - to.phi));
  if (pos_err * curvature > 1e-6 || ang_err > 1e-6) return std::nullopt;
  return path;
}

DubinsPath dubins_shortest(const Pose2D& from, const Pose2D& to, double curvature) {
  std::optional<DubinsPath> best;
  for (DubinsWord w : kAllDubinsWords) {
    const auto p = dubins_word_path(from, to, curvature, w);
    if (p && (!best || p->length < best->length)) best = p;
  }
  if (!best) throw InfeasibleError("no Dubins word connects the configurations");
  return *best;
}

}  // namespace tracksim
