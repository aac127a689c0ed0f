#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "artic/metrics.hpp"
#include "artic/seg.hpp"
#include "artic/synth.hpp"
#include "artic/trainer.hpp"

namespace artic {

/// Majority-vote map from harmonized global part ids to ground-truth ids,
/// recovered through each frame's label provenance. Index = global id,
/// entry 0 and unresolved ids are 0.
std::vector<int> parts_to_gt(const ConsistentScene& scene);

/// Comparison of one ground-truth joint against the trained part that
/// claimed it. Metric fields are only present when they are meaningful:
/// nothing when the part was never found, no axis position for prismatic
/// joints, no magnitude error across a kind mismatch.
struct JointReport {
  int part_gt = 0;  // ground-truth global label (base = 1)
  bool found = false;
  bool kind_match = false;
  JointParams est, gt;
  std::optional<double> axis_angle_deg;
  std::optional<double> axis_pos_m;      // revolute pairs only
  std::optional<double> motion_err;      // degrees or meters by kind
};

/// Everything the evaluation knows about one reconstructed object.
/// Chamfer values follow the scaled convention of chamfer(); `cd_root`
/// records which flavor was used. Runtime never goes in here so that a
/// report is a pure function of (scene, config, seed).
struct ObjectReport {
  std::string scene;
  int n_parts_gt = 0;   // total parts including the static base
  int n_parts_est = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  bool cd_root = false;
  int cd_points = 0;
  double cd_s = 0.0, cd_w = 0.0;
  std::vector<double> cd_m;          // per movable ground-truth part, joint order
  double mislabel_rate = 0.0;        // fraction of primitives on the wrong part
  std::vector<JointReport> joints;   // one per ground-truth joint
  std::vector<std::string> warnings;
};

struct EvalOptions {
  int n_surface_points = 10000;  // ground-truth samples per chamfer set
  bool cd_root = false;
  std::uint64_t seed = 7;        // surface sampling stream
};

/// Score a trained model against the generator's ground truth at the
/// canonical (high-visibility) state.
ObjectReport evaluate(const TrainResult& result, const ConsistentScene& scene,
                      const SceneData& data, const EvalOptions& opts = {});

/// JSON round-trip. Serialization is byte-deterministic: fixed key order,
/// shortest-roundtrip numbers, no timestamps.
std::string report_to_json(const ObjectReport& report);
ObjectReport report_from_json(const std::string& text);

/// Aggregate many object reports into a CSV grouped by part-count bucket
/// (2 / 3 / 4-5 / 6-20). Cells with no contributing data stay empty.
std::string report_csv(const std::vector<ObjectReport>& reports);

}  // namespace artic
