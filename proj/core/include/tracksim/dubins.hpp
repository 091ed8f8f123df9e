#pragma once

#include <array>
#include <optional>

#include "tracksim/types.hpp"

namespace tracksim {

enum class DubinsWord { kLSL, kRSR, kLSR, kRSL, kRLR, kLRL };
inline constexpr std::array<DubinsWord, 6> kAllDubinsWords = {
    DubinsWord::kLSL, DubinsWord::kRSR, DubinsWord::kLSR,
    DubinsWord::kRSL, DubinsWord::kRLR, DubinsWord::kLRL};

// Three-segment path; params are normalized (radius to curvature 1), so the
// metric length is (t + p + q) / curvature.
struct DubinsPath {
  Pose2D start;
  DubinsWord word = DubinsWord::kLSL;
  double curvature = 1.0;         // 1/m
  std::array<double, 3> param{};  // normalized segment lengths
  double length = 0.0;            // m

  // Pose at arclength s in [0, length].
  Pose2D sample(double s) const;
  // Signed turn rate factor (-1, 0, +1) of the segment active at s.
  double turn_direction(double s) const;
};

// One specific word; nullopt when that word does not exist for the
// configuration pair.
std::optional<DubinsPath> dubins_word_path(const Pose2D& from, const Pose2D& to,
                                           double curvature, DubinsWord word);

// Shortest of the six words. Throws InfeasibleError for curvature <= 0.
DubinsPath dubins_shortest(const Pose2D& from, const Pose2D& to, double curvature);

}  // namespace tracksim
