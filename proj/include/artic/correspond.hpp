#pragma once

#include <vector>

#include "artic/image.hpp"

namespace artic {

/// One raw cross-state pixel match as stored in matches.csv. pix0 lives in
/// state-0 view `view0`, pix1 in state-1 view `view1`. Pixel coordinates are
/// continuous (centers at i + 0.5) and may be fractional.
struct MatchRow {
  Eigen::Vector2d pix0 = Eigen::Vector2d::Zero();
  Eigen::Vector2d pix1 = Eigen::Vector2d::Zero();
  int view0 = 0;
  int view1 = 0;
  bool outlier_gt = false;  // generator annotation, absent on real data
};

/// A lifted match: both endpoints in world space.
struct MatchPair {
  Vec3 p0 = Vec3::Zero();  // state-0 endpoint
  Vec3 p1 = Vec3::Zero();  // state-1 endpoint
  bool outlier_gt = false;
};

struct LiftResult {
  std::vector<MatchPair> pairs;
  int dropped = 0;  // pairs that hit invalid depth
};

/// Lift parallel pixel lists through the two frames' depth maps. Depth is
/// sampled by bilinear interpolation of inverse depth; pairs touching
/// background or out-of-bounds texels are dropped and counted.
LiftResult lift_matches(const std::vector<Eigen::Vector2d>& pix0,
                        const std::vector<Eigen::Vector2d>& pix1,
                        const Frame& frame0, const Frame& frame1,
                        const std::vector<bool>* outlier_gt = nullptr);

/// Lift a full match table; frames are looked up by their view ids.
LiftResult lift_all(const std::vector<MatchRow>& rows,
                    const std::vector<Frame>& frames0,
                    const std::vector<Frame>& frames1);

/// 3D locality filter: for each match, gather all matches whose p0 lies
/// within radius r (the query itself included), average their p1, and keep
/// the match when its own p1 deviates from that mean by less than r_prime.
/// Single pass; neighborhoods come from a uniform voxel grid with cell
/// size r. Returns one flag per match.
std::vector<char> locality_filter(const std::vector<MatchPair>& pairs,
                                  double r = 0.01, double r_prime = 0.02);

}  // namespace artic
