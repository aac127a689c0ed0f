#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "artic/error.hpp"
#include "artic/io.hpp"

namespace artic {

namespace {

using ordered_json = nlohmann::ordered_json;

namespace fs = std::filesystem;

ordered_json vec3_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

Vec3 vec3_from(const ordered_json& j) {
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

ordered_json quat_json(const Quat& q) { return {q.w, q.x, q.y, q.z}; }

Quat quat_from(const ordered_json& j) {
  return Quat(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
              j.at(3).get<double>());
}

const char* kind_name(JointKind k) {
  return k == JointKind::revolute ? "revolute" : "prismatic";
}

JointKind kind_of(const std::string& s) {
  if (s == "revolute") return JointKind::revolute;
  if (s == "prismatic") return JointKind::prismatic;
  throw IoError("unknown joint kind: " + s);
}

ordered_json parse_json(const std::string& text, const std::string& what) {
  try {
    return ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw IoError(what + ": " + e.what());
  }
}

std::string view_stem(int view) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "view_%03d", view);
  return buf;
}

void save_frame(const std::string& dir, const Frame& f) {
  std::string stem = dir + "/" + view_stem(f.view);
  write_png_rgb(stem + ".rgb.png", f.rgb);
  write_png_mask(stem + ".mask.png", f.label);
  write_depth(stem + ".depth.f32", f.depth);
  const Camera& c = f.camera;
  ordered_json j;
  j["width"] = c.width();
  j["height"] = c.height();
  j["fx"] = c.fx();
  j["fy"] = c.fy();
  j["cx"] = c.cx();
  j["cy"] = c.cy();
  ordered_json extr = ordered_json::array();
  for (int r = 0; r < 4; ++r)
    for (int col = 0; col < 4; ++col) extr.push_back(c.extrinsics()(r, col));
  j["extrinsics"] = extr;
  j["state"] = f.state;
  j["view"] = f.view;
  j["is_test"] = f.is_test;
  j["label_to_gt"] = f.label_to_gt;
  write_text_file(stem + ".cam.json", j.dump(2) + "\n");
}

Frame load_frame(const std::string& dir, int view) {
  std::string stem = dir + "/" + view_stem(view);
  Frame f;
  f.rgb = read_png_rgb(stem + ".rgb.png");
  f.label = read_png_mask(stem + ".mask.png");
  f.depth = read_depth(stem + ".depth.f32");
  ordered_json j = parse_json(read_text_file(stem + ".cam.json"), stem + ".cam.json");
  try {
    Mat4 extr;
    for (int r = 0; r < 4; ++r)
      for (int col = 0; col < 4; ++col)
        extr(r, col) = j.at("extrinsics").at(std::size_t(r * 4 + col)).get<double>();
    f.camera = Camera(j.at("width").get<int>(), j.at("height").get<int>(),
                      j.at("fx").get<double>(), j.at("fy").get<double>(),
                      j.at("cx").get<double>(), j.at("cy").get<double>(), extr);
    f.state = j.at("state").get<int>();
    f.view = j.at("view").get<int>();
    f.is_test = j.at("is_test").get<bool>();
    f.label_to_gt = j.at("label_to_gt").get<std::vector<int>>();
  } catch (const ordered_json::exception& e) {
    throw IoError(stem + ".cam.json: " + e.what());
  }
  if (f.rgb.width != f.depth.width || f.rgb.height != f.depth.height ||
      f.rgb.width != f.label.width || f.rgb.height != f.label.height ||
      f.rgb.width != f.camera.width() || f.rgb.height != f.camera.height())
    throw IoError(stem + ": image sizes disagree");
  return f;
}

std::vector<Frame> load_state_dir(const std::string& dir) {
  std::vector<Frame> frames;
  for (int v = 0; fs::exists(dir + "/" + view_stem(v) + ".cam.json"); ++v)
    frames.push_back(load_frame(dir, v));
  if (frames.empty()) throw IoError("no views found in " + dir);
  return frames;
}

std::string matches_csv(const std::vector<MatchRow>& rows) {
  std::string out = "pix0_u,pix0_v,view0,pix1_u,pix1_v,view1,is_outlier_gt\n";
  char buf[160];
  for (const MatchRow& m : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g,%.17g,%d,%d\n", m.pix0.x(),
                  m.pix0.y(), m.view0, m.pix1.x(), m.pix1.y(), m.view1, int(m.outlier_gt));
    out += buf;
  }
  return out;
}

std::vector<MatchRow> matches_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("pix0_u,pix0_v,view0,pix1_u,pix1_v,view1", 0) != 0)
    throw IoError("matches.csv: bad header");
  std::vector<MatchRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 6 && cells.size() != 7)
      throw IoError("matches.csv line " + std::to_string(lineno) + ": expected 6 or 7 cells");
    try {
      MatchRow m;
      m.pix0 = Eigen::Vector2d(std::stod(cells[0]), std::stod(cells[1]));
      m.view0 = std::stoi(cells[2]);
      m.pix1 = Eigen::Vector2d(std::stod(cells[3]), std::stod(cells[4]));
      m.view1 = std::stoi(cells[5]);
      if (cells.size() == 7) m.outlier_gt = std::stoi(cells[6]) != 0;
      rows.push_back(m);
    } catch (const std::exception&) {
      throw IoError("matches.csv line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return rows;
}

ordered_json spec_json(const SceneSpec& s) {
  ordered_json j;
  j["name"] = s.name;
  j["parts"] = ordered_json::array();
  for (const PartSpec& p : s.parts) {
    ordered_json o;
    o["half_extent"] = vec3_json(p.half_extent);
    o["rest_rot"] = quat_json(p.rest.rot);
    o["rest_trans"] = vec3_json(p.rest.trans);
    o["kind"] = kind_name(p.kind);
    o["axis"] = vec3_json(p.axis);
    o["origin"] = vec3_json(p.origin);
    o["limit"] = p.limit;
    o["direction"] = p.direction;
    o["base_color"] = vec3_json(p.base_color);
    j["parts"].push_back(o);
  }
  j["n_views_train"] = s.n_views_train;
  j["n_views_test"] = s.n_views_test;
  j["image_width"] = s.image_width;
  j["image_height"] = s.image_height;
  j["fov_y_deg"] = s.fov_y_deg;
  j["radius_lo"] = s.radius_lo;
  j["radius_hi"] = s.radius_hi;
  j["azimuth_deg"] = s.azimuth_deg;
  j["elev_lo_deg"] = s.elev_lo_deg;
  j["elev_hi_deg"] = s.elev_hi_deg;
  j["look_at"] = vec3_json(s.look_at);
  j["dropout_rate"] = s.dropout_rate;
  j["matches_per_part"] = s.matches_per_part;
  j["outlier_rate"] = s.outlier_rate;
  j["seed"] = s.seed;
  return j;
}

SceneSpec spec_from_json(const ordered_json& j) {
  SceneSpec s;
  try {
    s.name = j.at("name").get<std::string>();
    s.parts.clear();
    for (const auto& o : j.at("parts")) {
      PartSpec p;
      p.half_extent = vec3_from(o.at("half_extent"));
      p.rest = RigidMotion(quat_from(o.at("rest_rot")), vec3_from(o.at("rest_trans")));
      p.kind = kind_of(o.at("kind").get<std::string>());
      p.axis = vec3_from(o.at("axis"));
      p.origin = vec3_from(o.at("origin"));
      p.limit = o.at("limit").get<double>();
      p.direction = o.at("direction").get<double>();
      p.base_color = vec3_from(o.at("base_color"));
      s.parts.push_back(p);
    }
    s.n_views_train = j.at("n_views_train").get<int>();
    s.n_views_test = j.at("n_views_test").get<int>();
    s.image_width = j.at("image_width").get<int>();
    s.image_height = j.at("image_height").get<int>();
    s.fov_y_deg = j.at("fov_y_deg").get<double>();
    s.radius_lo = j.at("radius_lo").get<double>();
    s.radius_hi = j.at("radius_hi").get<double>();
    s.azimuth_deg = j.at("azimuth_deg").get<double>();
    s.elev_lo_deg = j.at("elev_lo_deg").get<double>();
    s.elev_hi_deg = j.at("elev_hi_deg").get<double>();
    s.look_at = vec3_from(j.at("look_at"));
    s.dropout_rate = j.at("dropout_rate").get<double>();
    s.matches_per_part = j.at("matches_per_part").get<int>();
    s.outlier_rate = j.at("outlier_rate").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const ordered_json::exception& e) {
    throw IoError(std::string("spec.json: ") + e.what());
  }
  return s;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("read failed: " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(text.data(), std::streamsize(text.size()));
  if (!out.good()) throw IoError("write failed: " + path);
}

void write_depth(const std::string& path, const Image<float>& img) {
  static_assert(sizeof(float) == 4);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  auto put_u32 = [&](std::uint32_t v) {
    // Little-endian regardless of host.
    char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
                 char((v >> 24) & 0xff)};
    out.write(b, 4);
  };
  put_u32(std::uint32_t(img.width));
  put_u32(std::uint32_t(img.height));
  for (float v : img.data) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(bits);
  }
  if (!out.good()) throw IoError("write failed: " + path);
}

Image<float> read_depth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  auto get_u32 = [&]() {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in.good()) throw IoError("depth file truncated: " + path);
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
           std::uint32_t(b[3]) << 24;
  };
  std::uint32_t w = get_u32(), h = get_u32();
  if (w == 0 || h == 0 || w > 1u << 16 || h > 1u << 16)
    throw IoError("depth file has implausible size: " + path);
  Image<float> img(int(w), int(h));
  for (float& v : img.data) {
    std::uint32_t bits = get_u32();
    std::memcpy(&v, &bits, 4);
  }
  char extra;
  if (in.read(&extra, 1)) throw IoError("depth file has trailing bytes: " + path);
  return img;
}

void save_scene(const std::string& dir, const SceneData& data) {
  std::error_code ec;
  fs::create_directories(dir + "/state0", ec);
  fs::create_directories(dir + "/state1", ec);
  if (ec) throw IoError("cannot create scene directory: " + dir);

  write_text_file(dir + "/spec.json", spec_json(data.spec).dump(2) + "\n");

  ordered_json gt;
  gt["frac0"] = data.frac0;
  gt["frac1"] = data.frac1;
  gt["joints"] = ordered_json::array();
  for (const GtJoint& g : data.joints) {
    ordered_json o;
    o["part_gt"] = g.part_gt;
    o["kind"] = kind_name(g.kind);
    o["axis"] = vec3_json(g.axis);
    o["origin"] = vec3_json(g.origin);
    o["mag0"] = g.mag0;
    o["mag1"] = g.mag1;
    o["limit"] = g.limit;
    gt["joints"].push_back(o);
  }
  gt["warnings"] = data.warnings;
  write_text_file(dir + "/gt_joints.json", gt.dump(2) + "\n");

  write_text_file(dir + "/matches.csv", matches_csv(data.matches));
  for (const Frame& f : data.frames0) save_frame(dir + "/state0", f);
  for (const Frame& f : data.frames1) save_frame(dir + "/state1", f);
}

SceneData load_scene(const std::string& dir) {
  SceneData data;
  data.spec = spec_from_json(parse_json(read_text_file(dir + "/spec.json"), "spec.json"));
  data.spec.validate();

  ordered_json gt = parse_json(read_text_file(dir + "/gt_joints.json"), "gt_joints.json");
  try {
    data.frac0 = gt.at("frac0").get<std::vector<double>>();
    data.frac1 = gt.at("frac1").get<std::vector<double>>();
    for (const auto& o : gt.at("joints")) {
      GtJoint g;
      g.part_gt = o.at("part_gt").get<int>();
      g.kind = kind_of(o.at("kind").get<std::string>());
      g.axis = vec3_from(o.at("axis"));
      g.origin = vec3_from(o.at("origin"));
      g.mag0 = o.at("mag0").get<double>();
      g.mag1 = o.at("mag1").get<double>();
      g.limit = o.at("limit").get<double>();
      data.joints.push_back(g);
    }
    data.warnings = gt.at("warnings").get<std::vector<std::string>>();
  } catch (const ordered_json::exception& e) {
    throw IoError(std::string("gt_joints.json: ") + e.what());
  }

  data.matches = matches_from_csv(read_text_file(dir + "/matches.csv"));
  data.frames0 = load_state_dir(dir + "/state0");
  data.frames1 = load_state_dir(dir + "/state1");
  for (const Frame& f : data.frames0)
    if (f.state != 0) throw IoError("state0 frame claims state " + std::to_string(f.state));
  for (const Frame& f : data.frames1)
    if (f.state != 1) throw IoError("state1 frame claims state " + std::to_string(f.state));
  return data;
}

void write_ply(const std::string& path, const std::vector<Vec3>& points,
               const std::vector<Vec3>* colors) {
  if (colors && colors->size() != points.size())
    throw InvalidInputError("write_ply: one color per point required");
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(points.size()) +
                    "\nproperty float x\nproperty float y\nproperty float z\n";
  if (colors)
    out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "end_header\n";
  char buf[128];
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3& p = points[i];
    if (colors) {
      Rgb8 c = to_rgb8((*colors)[i]);
      std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g %d %d %d\n", p.x(), p.y(), p.z(),
                    int(c.r), int(c.g), int(c.b));
    } else {
      std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", p.x(), p.y(), p.z());
    }
    out += buf;
  }
  write_text_file(path, out);
}

std::string training_log_csv(const std::vector<TrainLogRow>& log) {
  std::string out = "step,stage,rgbd,sem,sparsity,traj,total\n";
  char buf[200];
  for (const TrainLogRow& r : log) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step,
                  r.stage.c_str(), r.rgbd, r.sem, r.sparsity, r.traj, r.total);
    out += buf;
  }
  return out;
}

}  // namespace artic
