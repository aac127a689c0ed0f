#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "artic/correspond.hpp"
#include "artic/image.hpp"
#include "artic/rng.hpp"

namespace artic {

/// One cuboid of the assembly. Part 0 is the static base; every other part
/// articulates against it through a single 1-DoF joint. `rest` places the
/// box in the world at joint magnitude 0; the joint then moves the whole
/// box rigidly. `direction` flips the travel sign so doors open outward.
struct PartSpec {
  Vec3 half_extent = Vec3(0.1, 0.1, 0.1);
  RigidMotion rest;
  JointKind kind = JointKind::revolute;
  Vec3 axis = Vec3(0, 0, 1);   // world space, unit
  Vec3 origin = Vec3::Zero();  // point on the axis line (revolute)
  double limit = 0.0;          // max magnitude, radians or meters
  double direction = 1.0;      // +1 or -1
  Vec3 base_color = Vec3(0.7, 0.7, 0.7);
};

struct SceneSpec {
  std::string name = "custom";
  std::vector<PartSpec> parts;  // parts[0] = static base
  int n_views_train = 24;
  int n_views_test = 6;
  int image_width = 160;
  int image_height = 160;
  double fov_y_deg = 55.0;
  double radius_lo = 2.2, radius_hi = 2.9;   // camera distance range
  double azimuth_deg = 70.0;                 // spread around the front (-y)
  double elev_lo_deg = 8.0, elev_hi_deg = 52.0;
  Vec3 look_at = Vec3::Zero();
  double dropout_rate = 0.06;   // chance a view loses one part's mask
  int matches_per_part = 300;
  double outlier_rate = 0.10;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError on bad fields
};

/// Built-in scenes: door2, cabinet5, grid10, grid20.
SceneSpec preset_scene(const std::string& name);

/// Ground truth for one movable part's joint. Magnitudes are unsigned; the
/// state delta is |mag0 - mag1|. The axis sign is arbitrary (metrics are
/// sign-invariant).
struct GtJoint {
  int part_gt = 2;  // ground-truth global label (base = 1)
  JointKind kind = JointKind::revolute;
  Vec3 axis = Vec3(0, 0, 1);
  Vec3 origin = Vec3::Zero();
  double mag0 = 0.0, mag1 = 0.0;
  double limit = 0.0;
};

struct SceneData {
  SceneSpec spec;
  std::vector<double> frac0, frac1;  // per movable part, normalized state
  std::vector<GtJoint> joints;
  std::vector<Frame> frames0, frames1;  // train views first, then test
  std::vector<MatchRow> matches;
  std::vector<std::string> warnings;
};

/// World-space rigid motion of `part` at the given signed magnitude.
RigidMotion joint_motion(const PartSpec& part, double magnitude);

/// Pose of every part at per-movable-part state fractions (joint motion
/// composed with the rest placement). Index 0 is the base's rest pose.
std::vector<RigidMotion> part_poses(const SceneSpec& spec, const std::vector<double>& fracs);

/// Normalized joint states for both captures: one draw in [0.65, 0.75] and
/// one in [0.35, 0.45] per movable part.
std::pair<std::vector<double>, std::vector<double>> sample_states(const SceneSpec& spec,
                                                                  std::uint64_t seed);

/// Rasterize one view. `poses` must come from part_poses. Labels are
/// ground-truth global ids (background 0, base 1, movables 2..P).
Frame render_frame(const SceneSpec& spec, const std::vector<RigidMotion>& poses,
                   const Camera& cam, int state, int view);

/// Cameras on a sphere segment in front of the scene, then one render each.
/// View ids start at `view_offset`.
std::vector<Frame> render_views(const SceneSpec& spec, const std::vector<double>& fracs,
                                int state, int n_views, std::uint64_t seed,
                                bool is_test = false, int view_offset = 0);

/// Replace ground-truth labels by per-view permuted local ids, optionally
/// dropping whole masks to background. label_to_gt records the inverse map.
void permute_labels(std::vector<Frame>& frames, double dropout_rate, std::uint64_t seed);

/// Clustered exact pixel correspondences between the two states, plus
/// round(outlier_rate * N) wrong-partner rows flagged outlier_gt. Frames
/// must still carry ground-truth labels.
std::vector<MatchRow> make_correspondences(const SceneSpec& spec,
                                           const std::vector<double>& frac0,
                                           const std::vector<double>& frac1,
                                           const std::vector<Frame>& frames0,
                                           const std::vector<Frame>& frames1,
                                           int n_per_part, double outlier_rate,
                                           std::uint64_t seed,
                                           std::vector<std::string>* warnings = nullptr);

/// Uniform area-weighted samples of the posed surface of one part
/// (part < 0: the whole assembly).
std::vector<Vec3> sample_surface(const SceneSpec& spec, const std::vector<RigidMotion>& poses,
                                 int part, int n, Rng& rng);

/// Full deterministic generation: states, renders of both states (train +
/// test), correspondences, label permutation, visibility validation.
SceneData generate_scene(const SceneSpec& spec);

}  // namespace artic
