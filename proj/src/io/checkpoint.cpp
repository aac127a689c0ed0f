#include "json.hpp"

#include "artic/error.hpp"
#include "artic/io.hpp"

namespace artic {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kCheckpointVersion = 1;

ordered_json vec3_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

Vec3 vec3_from(const ordered_json& j) {
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

ordered_json quat_json(const Quat& q) { return {q.w, q.x, q.y, q.z}; }

Quat quat_from(const ordered_json& j) {
  return Quat(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
              j.at(3).get<double>());
}

}  // namespace

void save_checkpoint(const std::string& path, const SceneModel& model) {
  ordered_json j;
  j["version"] = kCheckpointVersion;
  j["canonical_state"] = model.canonical_state;
  j["part_to_gt"] = model.part_to_gt;
  j["bases"] = ordered_json::array();
  for (const MotionBasis& b : model.field.bases) {
    ordered_json o;
    o["rot"] = quat_json(b.rot);
    o["trans"] = vec3_json(b.trans);
    o["prismatic_locked"] = b.prismatic_locked;
    j["bases"].push_back(o);
  }
  j["prims"] = ordered_json::array();
  for (const Primitive& p : model.prims) {
    ordered_json o;
    o["center"] = vec3_json(p.center);
    o["rot"] = quat_json(p.rot);
    o["scale"] = vec3_json(p.scale);
    o["opacity"] = p.opacity;
    o["color"] = vec3_json(p.color);
    ordered_json lg = ordered_json::array();
    for (int k = 0; k < p.logits.size(); ++k) lg.push_back(p.logits(k));
    o["logits"] = lg;
    j["prims"].push_back(o);
  }
  j["knn"] = model.knn;
  write_text_file(path, j.dump() + "\n");
}

SceneModel load_checkpoint(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_text_file(path));
  } catch (const std::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  SceneModel model;
  try {
    int version = j.at("version").get<int>();
    if (version != kCheckpointVersion)
      throw IoError(path + ": checkpoint version " + std::to_string(version) +
                    " unsupported, expected " + std::to_string(kCheckpointVersion));
    model.canonical_state = j.at("canonical_state").get<int>();
    model.part_to_gt = j.at("part_to_gt").get<std::vector<int>>();
    for (const auto& o : j.at("bases")) {
      MotionBasis b;
      b.rot = quat_from(o.at("rot"));
      b.trans = vec3_from(o.at("trans"));
      b.prismatic_locked = o.at("prismatic_locked").get<bool>();
      model.field.bases.push_back(b);
    }
    for (const auto& o : j.at("prims")) {
      Primitive p;
      p.center = vec3_from(o.at("center"));
      p.rot = quat_from(o.at("rot"));
      p.scale = vec3_from(o.at("scale"));
      p.opacity = o.at("opacity").get<double>();
      p.color = vec3_from(o.at("color"));
      const auto& lg = o.at("logits");
      p.logits.resize(Eigen::Index(lg.size()));
      for (std::size_t k = 0; k < lg.size(); ++k)
        p.logits(Eigen::Index(k)) = lg.at(k).get<double>();
      model.prims.push_back(p);
    }
    model.knn = j.at("knn").get<std::vector<std::vector<int>>>();
  } catch (const ordered_json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  if (model.field.bases.empty()) throw IoError(path + ": checkpoint has no motion bases");
  for (const Primitive& p : model.prims)
    if (p.logits.size() != model.field.n_parts())
      throw IoError(path + ": logits length disagrees with basis count");
  if (model.knn.size() != model.prims.size())
    throw IoError(path + ": knn table length disagrees with primitive count");
  return model;
}

}  // namespace artic
