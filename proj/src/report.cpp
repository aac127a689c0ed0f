#include "artic/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "json.hpp"

#include "artic/error.hpp"
#include "artic/kdtree.hpp"

namespace artic {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* kind_name(JointKind k) {
  return k == JointKind::revolute ? "revolute" : "prismatic";
}

JointKind kind_of(const std::string& s) {
  if (s == "revolute") return JointKind::revolute;
  if (s == "prismatic") return JointKind::prismatic;
  throw IoError("unknown joint kind: " + s);
}

/// JSON has no infinity; chamfer values can be infinite by contract.
ordered_json num_or_inf(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

double num_from(const ordered_json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw IoError("report: expected a number");
  }
  return j.get<double>();
}

ordered_json joint_params_json(const JointParams& p) {
  return ordered_json{{"kind", kind_name(p.kind)},
                      {"axis_dir", {p.axis_dir.x(), p.axis_dir.y(), p.axis_dir.z()}},
                      {"axis_origin", {p.axis_origin.x(), p.axis_origin.y(), p.axis_origin.z()}},
                      {"magnitude", p.magnitude}};
}

JointParams joint_params_from(const ordered_json& j) {
  JointParams p;
  p.kind = kind_of(j.at("kind").get<std::string>());
  for (int i = 0; i < 3; ++i) {
    p.axis_dir[i] = j.at("axis_dir").at(std::size_t(i)).get<double>();
    p.axis_origin[i] = j.at("axis_origin").at(std::size_t(i)).get<double>();
  }
  p.magnitude = j.at("magnitude").get<double>();
  return p;
}

}  // namespace

std::vector<int> parts_to_gt(const ConsistentScene& scene) {
  // votes[global][gt] over every (frame, local label) node whose provenance
  // is known. One vote per node; pixel areas would only matter for labels
  // the graph already disagrees on.
  std::vector<std::map<int, int>> votes(std::size_t(scene.n_parts) + 1);
  auto tally = [&](const Frame& f, int global, int local) {
    if (global <= 0 || global > scene.n_parts) return;
    if (local >= int(f.label_to_gt.size())) return;
    int gt = f.label_to_gt[std::size_t(local)];
    if (gt > 0) ++votes[std::size_t(global)][gt];
  };
  for (std::size_t i = 0; i < scene.frames0.size(); ++i) {
    const auto& l2g = scene.graph0.local_to_global[i];
    for (int l = 1; l < int(l2g.size()); ++l)
      tally(scene.frames0[i], l2g[std::size_t(l)], l);
  }
  for (std::size_t i = 0; i < scene.frames1.size(); ++i) {
    const auto& l2g = scene.graph1.local_to_global[i];
    for (int l = 1; l < int(l2g.size()); ++l) {
      int g1 = l2g[std::size_t(l)];
      if (g1 <= 0 || g1 >= int(scene.map_1_to_0.size())) continue;
      tally(scene.frames1[i], scene.map_1_to_0[std::size_t(g1)], l);
    }
  }
  std::vector<int> out(std::size_t(scene.n_parts) + 1, 0);
  for (int g = 1; g <= scene.n_parts; ++g) {
    int best_gt = 0, best_votes = 0;
    for (const auto& [gt, n] : votes[std::size_t(g)])
      if (n > best_votes) best_gt = gt, best_votes = n;  // map order breaks ties low
    out[std::size_t(g)] = best_gt;
  }
  return out;
}

ObjectReport evaluate(const TrainResult& result, const ConsistentScene& scene,
                      const SceneData& data, const EvalOptions& opts) {
  if (opts.n_surface_points <= 0)
    throw InvalidInputError("evaluate: surface point count must be positive");
  const SceneModel& model = result.model;
  const int n_gt_parts = int(data.spec.parts.size());

  ObjectReport rep;
  rep.scene = data.spec.name;
  rep.n_parts_gt = n_gt_parts;
  rep.n_parts_est = model.n_parts();
  rep.seed = data.spec.seed;
  rep.cd_root = opts.cd_root;
  rep.cd_points = opts.n_surface_points;
  rep.warnings = result.warnings;

  // Ground-truth surfaces at the canonical (high-visibility) state.
  const std::vector<double>& fracs = model.canonical_state == 0 ? data.frac0 : data.frac1;
  std::vector<RigidMotion> poses = part_poses(data.spec, fracs);
  Rng rng(opts.seed);
  std::vector<std::vector<Vec3>> gt_pts;
  gt_pts.resize(std::size_t(n_gt_parts));
  for (int p = 0; p < n_gt_parts; ++p)
    gt_pts[std::size_t(p)] = sample_surface(data.spec, poses, p, opts.n_surface_points, rng);
  std::vector<Vec3> gt_whole =
      sample_surface(data.spec, poses, -1, opts.n_surface_points, rng);

  // Predicted ground-truth part of every primitive through the label vote.
  std::vector<int> to_gt = parts_to_gt(scene);
  std::vector<int> prim_class(std::size_t(model.n_prims()));
  std::vector<int> class_count(std::size_t(model.n_parts()), 0);
  std::vector<std::vector<Vec3>> est_pts;
  est_pts.resize(std::size_t(n_gt_parts) + 1);
  std::vector<Vec3> all_centers;
  all_centers.reserve(std::size_t(model.n_prims()));
  for (int i = 0; i < model.n_prims(); ++i) {
    int c = hard_assign(model.prims[std::size_t(i)].logits);
    prim_class[std::size_t(i)] = c;
    ++class_count[std::size_t(c)];
    int gt = c + 1 < int(to_gt.size()) ? to_gt[std::size_t(c) + 1] : 0;
    if (gt >= 1 && gt <= n_gt_parts) est_pts[std::size_t(gt)].push_back(model.prims[std::size_t(i)].center);
    all_centers.push_back(model.prims[std::size_t(i)].center);
  }

  // Geometric truth for the mislabel rate: a primitive belongs to whichever
  // part's surface its center is closest to.
  std::vector<Vec3> sample_pool;
  std::vector<int> sample_part;
  for (int p = 0; p < n_gt_parts; ++p)
    for (const Vec3& v : gt_pts[std::size_t(p)]) {
      sample_pool.push_back(v);
      sample_part.push_back(p + 1);
    }
  KdTree pool_tree(sample_pool);
  int wrong = 0;
  for (int i = 0; i < model.n_prims(); ++i) {
    int c = prim_class[std::size_t(i)];
    int pred = c + 1 < int(to_gt.size()) ? to_gt[std::size_t(c) + 1] : 0;
    int truth = sample_part[std::size_t(pool_tree.nearest(model.prims[std::size_t(i)].center))];
    if (pred != truth) ++wrong;
  }
  rep.mislabel_rate = model.n_prims() > 0 ? double(wrong) / double(model.n_prims()) : 0.0;

  auto cd_of = [&](const std::vector<Vec3>& est, const std::vector<Vec3>& gt,
                   const std::string& what) {
    double v = chamfer(est, gt, opts.cd_root);
    if (std::isinf(v)) rep.warnings.push_back("no primitives assigned to " + what);
    return v;
  };
  rep.cd_s = cd_of(est_pts[1], gt_pts[0], "the static base");
  rep.cd_w = chamfer(all_centers, gt_whole, opts.cd_root);

  // One report per ground-truth joint, claimed by the mapped class with the
  // most primitives.
  for (const GtJoint& gj : data.joints) {
    JointReport jr;
    jr.part_gt = gj.part_gt;
    jr.gt.kind = gj.kind;
    jr.gt.axis_dir = gj.axis;
    jr.gt.axis_origin = gj.origin;
    jr.gt.magnitude = std::abs(gj.mag1 - gj.mag0);

    rep.cd_m.push_back(cd_of(est_pts[std::size_t(gj.part_gt)],
                             gt_pts[std::size_t(gj.part_gt) - 1],
                             "movable part " + std::to_string(gj.part_gt)));

    int claimed = -1;
    for (int c = 1; c < model.n_parts(); ++c) {
      if (c + 1 >= int(to_gt.size()) || to_gt[std::size_t(c) + 1] != gj.part_gt) continue;
      if (claimed < 0 || class_count[std::size_t(c)] > class_count[std::size_t(claimed)])
        claimed = c;
    }
    if (claimed < 0) {
      rep.warnings.push_back("no trained part maps to ground-truth part " +
                             std::to_string(gj.part_gt));
      rep.joints.push_back(jr);
      continue;
    }
    const MotionBasis& b = model.field.bases[std::size_t(claimed)];
    try {
      jr.est = decompose_joint({b.rot.normalized(), b.trans},
                               b.prismatic_locked ? JointKind::prismatic : JointKind::revolute);
    } catch (const DegenerateJointError&) {
      rep.warnings.push_back("part " + std::to_string(gj.part_gt) +
                             " barely moved; joint not decomposable");
      rep.joints.push_back(jr);
      continue;
    }
    jr.found = true;
    jr.kind_match = jr.est.kind == jr.gt.kind;
    jr.axis_angle_deg = metric_axis_angle(jr.est, jr.gt);
    jr.axis_pos_m = metric_axis_pos(jr.est, jr.gt);
    MotionError me = metric_part_motion(jr.est, jr.gt);
    if (!me.kind_mismatch) jr.motion_err = me.value;
    rep.joints.push_back(jr);
  }
  return rep;
}

std::string report_to_json(const ObjectReport& rep) {
  ordered_json j;
  j["scene"] = rep.scene;
  j["n_parts_gt"] = rep.n_parts_gt;
  j["n_parts_est"] = rep.n_parts_est;
  j["seed"] = rep.seed;
  j["config_hash"] = rep.config_hash;
  j["cd_convention"] = rep.cd_root ? "root" : "squared";
  j["cd_points"] = rep.cd_points;
  j["cd_s"] = num_or_inf(rep.cd_s);
  j["cd_m"] = ordered_json::array();
  for (double v : rep.cd_m) j["cd_m"].push_back(num_or_inf(v));
  j["cd_w"] = num_or_inf(rep.cd_w);
  j["mislabel_rate"] = rep.mislabel_rate;
  j["joints"] = ordered_json::array();
  for (const JointReport& jr : rep.joints) {
    ordered_json o;
    o["part_gt"] = jr.part_gt;
    o["found"] = jr.found;
    o["kind_match"] = jr.kind_match;
    o["gt"] = joint_params_json(jr.gt);
    if (jr.found) o["est"] = joint_params_json(jr.est);
    if (jr.axis_angle_deg) o["axis_angle_deg"] = *jr.axis_angle_deg;
    if (jr.axis_pos_m) {
      o["axis_pos_m"] = *jr.axis_pos_m;
      o["axis_pos_01m"] = *jr.axis_pos_m / 0.1;
    }
    if (jr.motion_err) {
      o["motion_err"] = *jr.motion_err;
      o["motion_unit"] = jr.gt.kind == JointKind::revolute ? "deg" : "m";
    }
    j["joints"].push_back(o);
  }
  j["warnings"] = rep.warnings;
  return j.dump(2) + "\n";
}

ObjectReport report_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw IoError(std::string("report: ") + e.what());
  }
  try {
    ObjectReport rep;
    rep.scene = j.at("scene").get<std::string>();
    rep.n_parts_gt = j.at("n_parts_gt").get<int>();
    rep.n_parts_est = j.at("n_parts_est").get<int>();
    rep.seed = j.at("seed").get<std::uint64_t>();
    rep.config_hash = j.at("config_hash").get<std::string>();
    rep.cd_root = j.at("cd_convention").get<std::string>() == "root";
    rep.cd_points = j.at("cd_points").get<int>();
    rep.cd_s = num_from(j.at("cd_s"));
    for (const auto& v : j.at("cd_m")) rep.cd_m.push_back(num_from(v));
    rep.cd_w = num_from(j.at("cd_w"));
    rep.mislabel_rate = j.at("mislabel_rate").get<double>();
    for (const auto& o : j.at("joints")) {
      JointReport jr;
      jr.part_gt = o.at("part_gt").get<int>();
      jr.found = o.at("found").get<bool>();
      jr.kind_match = o.at("kind_match").get<bool>();
      jr.gt = joint_params_from(o.at("gt"));
      if (o.contains("est")) jr.est = joint_params_from(o.at("est"));
      if (o.contains("axis_angle_deg")) jr.axis_angle_deg = o.at("axis_angle_deg").get<double>();
      if (o.contains("axis_pos_m")) jr.axis_pos_m = o.at("axis_pos_m").get<double>();
      if (o.contains("motion_err")) jr.motion_err = o.at("motion_err").get<double>();
      rep.joints.push_back(jr);
    }
    for (const auto& w : j.at("warnings")) rep.warnings.push_back(w.get<std::string>());
    return rep;
  } catch (const ordered_json::exception& e) {
    throw IoError(std::string("report: ") + e.what());
  }
}

namespace {

std::string fmt_num(double v) {
  if (std::isinf(v)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

struct Mean {
  double sum = 0.0;
  int n = 0;
  void add(double v) { sum += v, ++n; }
  std::string cell() const { return n == 0 ? std::string() : fmt_num(sum / n); }
};

}  // namespace

std::string report_csv(const std::vector<ObjectReport>& reports) {
  struct Bucket {
    int objects = 0, joints = 0, matched = 0;
    Mean axis_angle, axis_pos, motion_deg, motion_m, cd_s, cd_m, cd_w, mislabel;
  };
  const char* names[4] = {"2", "3", "4-5", "6-20"};
  Bucket buckets[4];
  auto index_of = [](int n_parts) {
    if (n_parts <= 2) return 0;
    if (n_parts == 3) return 1;
    if (n_parts <= 5) return 2;
    return 3;
  };
  for (const ObjectReport& rep : reports) {
    Bucket& b = buckets[index_of(rep.n_parts_gt)];
    ++b.objects;
    b.cd_s.add(rep.cd_s);
    b.cd_w.add(rep.cd_w);
    for (double v : rep.cd_m) b.cd_m.add(v);
    b.mislabel.add(rep.mislabel_rate);
    for (const JointReport& jr : rep.joints) {
      ++b.joints;
      if (!jr.kind_match) continue;  // wrong-type joints count against accuracy only
      ++b.matched;
      if (jr.axis_angle_deg) b.axis_angle.add(*jr.axis_angle_deg);
      if (jr.axis_pos_m) b.axis_pos.add(*jr.axis_pos_m);
      if (jr.motion_err) {
        if (jr.gt.kind == JointKind::revolute)
          b.motion_deg.add(*jr.motion_err);
        else
          b.motion_m.add(*jr.motion_err);
      }
    }
  }
  std::string out =
      "bucket,objects,joints,type_acc,axis_angle_deg,axis_pos_m,motion_deg,motion_m,"
      "cd_s,cd_m,cd_w,mislabel_rate\n";
  for (int i = 0; i < 4; ++i) {
    const Bucket& b = buckets[i];
    if (b.objects == 0) continue;
    out += names[i];
    out += ',' + std::to_string(b.objects);
    out += ',' + std::to_string(b.joints);
    out += ',' + (b.joints ? fmt_num(double(b.matched) / b.joints) : std::string());
    out += ',' + b.axis_angle.cell();
    out += ',' + b.axis_pos.cell();
    out += ',' + b.motion_deg.cell();
    out += ',' + b.motion_m.cell();
    out += ',' + b.cd_s.cell();
    out += ',' + b.cd_m.cell();
    out += ',' + b.cd_w.cell();
    out += ',' + b.mislabel.cell();
    out += '\n';
  }
  return out;
}

}  // namespace artic
