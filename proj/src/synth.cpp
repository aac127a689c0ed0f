#include "artic/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "artic/error.hpp"

namespace artic {

namespace {

constexpr double kCheckerCell = 0.06;
// Offset keeps face planes off exact checker boundaries so interpolation
// noise cannot flip the parity of a whole face.
constexpr double kCheckerBias = 511.503;

Vec3 shade_point(const PartSpec& part, const Vec3& local, const Vec3& n_world) {
  const Vec3 q = local / kCheckerCell + Vec3::Constant(kCheckerBias);
  int parity = (int(std::floor(q.x())) + int(std::floor(q.y())) + int(std::floor(q.z()))) & 1;
  double tex = parity ? 1.0 : 0.72;
  static const Vec3 l1 = Vec3(-0.35, -0.75, 0.55).normalized();
  static const Vec3 l2 = Vec3(0.70, 0.15, 0.40).normalized();
  double lam = 0.34 + 0.52 * std::max(0.0, n_world.dot(l1)) + 0.22 * std::max(0.0, n_world.dot(l2));
  return part.base_color * (std::min(lam, 1.0) * tex);
}

struct FaceDef {
  int axis;   // 0..2, the constant coordinate
  double sign;
};

constexpr FaceDef kFaces[6] = {{0, 1}, {0, -1}, {1, 1}, {1, -1}, {2, 1}, {2, -1}};

/// Four corners of a box face, counter-clockwise seen from outside.
void face_corners(const Vec3& he, const FaceDef& f, Vec3 out[4]) {
  int u = (f.axis + 1) % 3, v = (f.axis + 2) % 3;
  // For sign -1 swap winding so the outward normal stays consistent.
  double su[4] = {-1, 1, 1, -1};
  double sv[4] = {-1, -1, 1, 1};
  for (int k = 0; k < 4; ++k) {
    int kk = f.sign > 0 ? k : 3 - k;
    Vec3 c;
    c(f.axis) = f.sign * he(f.axis);
    c(u) = su[kk] * he(u);
    c(v) = sv[kk] * he(v);
    out[k] = c;
  }
}

double face_area(const Vec3& he, const FaceDef& f) {
  int u = (f.axis + 1) % 3, v = (f.axis + 2) % 3;
  return 4.0 * he(u) * he(v);
}

/// Uniform point on a face, with an optional margin pulled in from the rim.
Vec3 face_point(const Vec3& he, const FaceDef& f, double a, double b, double margin = 0.0) {
  int u = (f.axis + 1) % 3, v = (f.axis + 2) % 3;
  Vec3 c;
  c(f.axis) = f.sign * he(f.axis);
  double hu = std::max(he(u) - margin, 1e-4), hv = std::max(he(v) - margin, 1e-4);
  c(u) = (2.0 * a - 1.0) * hu;
  c(v) = (2.0 * b - 1.0) * hv;
  return c;
}

struct RasterTri {
  Vec3 world[3];
  Vec3 local[3];
  Vec3 n_world;
  int part;
};

std::vector<RasterTri> scene_triangles(const SceneSpec& spec,
                                       const std::vector<RigidMotion>& poses) {
  std::vector<RasterTri> tris;
  tris.reserve(spec.parts.size() * 12);
  for (std::size_t p = 0; p < spec.parts.size(); ++p) {
    const PartSpec& part = spec.parts[p];
    const RigidMotion& m = poses[p];
    for (const FaceDef& f : kFaces) {
      Vec3 c[4];
      face_corners(part.half_extent, f, c);
      Vec3 n_local = Vec3::Zero();
      n_local(f.axis) = f.sign;
      Vec3 n_world = m.rot.rotate(n_local);
      int idx[2][3] = {{0, 1, 2}, {0, 2, 3}};
      for (auto& t : idx) {
        RasterTri rt;
        rt.part = int(p);
        rt.n_world = n_world;
        for (int k = 0; k < 3; ++k) {
          rt.local[k] = c[t[k]];
          rt.world[k] = m.apply(c[t[k]]);
        }
        tris.push_back(rt);
      }
    }
  }
  return tris;
}

double edge_fn(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& q) {
  return (b.x() - a.x()) * (q.y() - a.y()) - (b.y() - a.y()) * (q.x() - a.x());
}

}  // namespace

void SceneSpec::validate() const {
  if (parts.size() < 2 || parts.size() > 20)
    throw ConfigError("scene spec: part count must be in [2, 20]");
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const PartSpec& ps = parts[p];
    if (!(ps.half_extent.minCoeff() > 0.0))
      throw ConfigError("scene spec: non-positive half extent");
    if (p == 0) continue;
    if (!std::isfinite(ps.limit) || ps.limit < 0.0)
      throw ConfigError("scene spec: joint limit must be finite and >= 0");
    if (std::abs(ps.axis.norm() - 1.0) > 1e-9)
      throw ConfigError("scene spec: joint axis must be unit length");
    if (std::abs(ps.direction) != 1.0)
      throw ConfigError("scene spec: joint direction must be +1 or -1");
  }
  if (n_views_train < 1 || n_views_test < 0)
    throw ConfigError("scene spec: bad view counts");
  if (image_width < 16 || image_height < 16)
    throw ConfigError("scene spec: image too small");
  if (!(fov_y_deg > 1.0 && fov_y_deg < 170.0)) throw ConfigError("scene spec: bad fov");
  if (!(radius_lo > 0.0 && radius_hi >= radius_lo))
    throw ConfigError("scene spec: bad camera radius range");
  if (!(azimuth_deg > 0.0 && azimuth_deg <= 179.0))
    throw ConfigError("scene spec: bad azimuth spread");
  if (!(elev_lo_deg > -89.0 && elev_hi_deg >= elev_lo_deg && elev_hi_deg < 89.0))
    throw ConfigError("scene spec: bad elevation range");
  if (dropout_rate < 0.0 || dropout_rate > 1.0)
    throw ConfigError("scene spec: dropout rate outside [0, 1]");
  if (outlier_rate < 0.0 || outlier_rate >= 1.0)
    throw ConfigError("scene spec: outlier rate outside [0, 1)");
  if (matches_per_part < 0) throw ConfigError("scene spec: negative match count");
}

RigidMotion joint_motion(const PartSpec& part, double magnitude) {
  JointParams j;
  j.kind = part.kind;
  j.axis_dir = part.axis;
  j.axis_origin = part.origin;
  j.magnitude = magnitude;
  return compose_joint(j);
}

std::vector<RigidMotion> part_poses(const SceneSpec& spec, const std::vector<double>& fracs) {
  if (fracs.size() + 1 != spec.parts.size())
    throw InvalidInputError("part_poses: one state fraction per movable part required");
  std::vector<RigidMotion> poses;
  poses.reserve(spec.parts.size());
  poses.push_back(spec.parts[0].rest);
  for (std::size_t p = 1; p < spec.parts.size(); ++p) {
    const PartSpec& ps = spec.parts[p];
    double mag = ps.direction * fracs[p - 1] * ps.limit;
    poses.push_back(joint_motion(ps, mag).compose(ps.rest));
  }
  return poses;
}

std::pair<std::vector<double>, std::vector<double>> sample_states(const SceneSpec& spec,
                                                                  std::uint64_t seed) {
  Rng rng(seed);
  std::size_t n = spec.parts.size() - 1;
  std::vector<double> f0(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) {
    f0[i] = rng.uniform(0.65, 0.75);
    f1[i] = rng.uniform(0.35, 0.45);
  }
  return {f0, f1};
}

Frame render_frame(const SceneSpec& spec, const std::vector<RigidMotion>& poses,
                   const Camera& cam, int state, int view) {
  Frame f;
  f.camera = cam;
  f.state = state;
  f.view = view;
  f.rgb = Image<Rgb8>(cam.width(), cam.height());
  f.depth = Image<float>(cam.width(), cam.height(), 0.0f);
  f.label = Image<std::uint16_t>(cam.width(), cam.height(), 0);
  Image<double> zbuf(cam.width(), cam.height(), std::numeric_limits<double>::infinity());

  Mat3 r = cam.extrinsics().block<3, 3>(0, 0);
  Vec3 t = cam.extrinsics().block<3, 1>(0, 3);
  for (const RasterTri& tri : scene_triangles(spec, poses)) {
    Vec3 c[3];
    Eigen::Vector2d p[3];
    bool ok = true;
    for (int k = 0; k < 3 && ok; ++k) {
      c[k] = r * tri.world[k] + t;
      ok = c[k].z() > 0.1;  // cameras orbit well outside the assembly
      if (ok)
        p[k] = Eigen::Vector2d(cam.fx() * c[k].x() / c[k].z() + cam.cx(),
                               cam.fy() * c[k].y() / c[k].z() + cam.cy());
    }
    if (!ok) continue;
    double area = edge_fn(p[0], p[1], p[2]);
    if (std::abs(area) < 1e-12) continue;
    int x_lo = std::max(0, int(std::floor(std::min({p[0].x(), p[1].x(), p[2].x()}) - 0.5)));
    int x_hi = std::min(cam.width() - 1, int(std::ceil(std::max({p[0].x(), p[1].x(), p[2].x()}))));
    int y_lo = std::max(0, int(std::floor(std::min({p[0].y(), p[1].y(), p[2].y()}) - 0.5)));
    int y_hi = std::min(cam.height() - 1, int(std::ceil(std::max({p[0].y(), p[1].y(), p[2].y()}))));
    for (int y = y_lo; y <= y_hi; ++y)
      for (int x = x_lo; x <= x_hi; ++x) {
        Eigen::Vector2d q(x + 0.5, y + 0.5);
        double w0 = edge_fn(p[1], p[2], q);
        double w1 = edge_fn(p[2], p[0], q);
        double w2 = edge_fn(p[0], p[1], q);
        if (area > 0 ? (w0 < 0 || w1 < 0 || w2 < 0) : (w0 > 0 || w1 > 0 || w2 > 0)) continue;
        double b0 = w0 / area, b1 = w1 / area, b2 = w2 / area;
        // Screen-linear interpolation of 1/z is exact on planar faces.
        double invz = b0 / c[0].z() + b1 / c[1].z() + b2 / c[2].z();
        double z = 1.0 / invz;
        if (z >= zbuf.at(x, y)) continue;
        zbuf.at(x, y) = z;
        Vec3 local = (b0 * tri.local[0] / c[0].z() + b1 * tri.local[1] / c[1].z() +
                      b2 * tri.local[2] / c[2].z()) * z;
        f.depth.at(x, y) = float(z);
        f.label.at(x, y) = std::uint16_t(tri.part + 1);
        f.rgb.at(x, y) = to_rgb8(shade_point(spec.parts[std::size_t(tri.part)], local, tri.n_world));
      }
  }
  return f;
}

std::vector<Frame> render_views(const SceneSpec& spec, const std::vector<double>& fracs,
                                int state, int n_views, std::uint64_t seed,
                                bool is_test, int view_offset) {
  std::vector<RigidMotion> poses = part_poses(spec, fracs);
  std::vector<Frame> frames;
  frames.reserve(std::size_t(n_views));
  Rng master(seed);
  for (int v = 0; v < n_views; ++v) {
    Rng rng = master.fork(std::uint64_t(v));
    double az = deg_to_rad(rng.uniform(-spec.azimuth_deg, spec.azimuth_deg));
    double el = deg_to_rad(rng.uniform(spec.elev_lo_deg, spec.elev_hi_deg));
    double rad = rng.uniform(spec.radius_lo, spec.radius_hi);
    Vec3 eye = spec.look_at + rad * Vec3(std::cos(el) * std::sin(az),
                                         -std::cos(el) * std::cos(az), std::sin(el));
    Vec3 target = spec.look_at + Vec3(rng.uniform(-0.04, 0.04), rng.uniform(-0.04, 0.04),
                                      rng.uniform(-0.04, 0.04));
    Camera cam = look_at_camera(spec.image_width, spec.image_height, spec.fov_y_deg, eye,
                                target, Vec3(0, 0, 1));
    Frame f = render_frame(spec, poses, cam, state, view_offset + v);
    f.is_test = is_test;
    frames.push_back(std::move(f));
  }
  return frames;
}

void permute_labels(std::vector<Frame>& frames, double dropout_rate, std::uint64_t seed) {
  Rng master(seed);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    Frame& f = frames[i];
    Rng rng = master.fork(i);
    int max_gt = f.n_labels();
    std::vector<std::size_t> count(std::size_t(max_gt) + 1, 0);
    for (auto l : f.label.data) ++count[l];
    // Dropout first: a dropped mask becomes background for this view.
    std::vector<char> dropped(std::size_t(max_gt) + 1, 0);
    for (int g = 1; g <= max_gt; ++g)
      if (count[std::size_t(g)] > 0 && rng.uniform() < dropout_rate) dropped[std::size_t(g)] = 1;
    std::vector<int> present;
    for (int g = 1; g <= max_gt; ++g)
      if (count[std::size_t(g)] > 0 && !dropped[std::size_t(g)]) present.push_back(g);
    std::vector<int> slot(present.size());
    for (std::size_t k = 0; k < slot.size(); ++k) slot[k] = int(k) + 1;
    rng.shuffle(slot);
    std::vector<std::uint16_t> to_local(std::size_t(max_gt) + 1, 0);
    f.label_to_gt.assign(present.size() + 1, 0);
    for (std::size_t k = 0; k < present.size(); ++k) {
      to_local[std::size_t(present[k])] = std::uint16_t(slot[k]);
      f.label_to_gt[std::size_t(slot[k])] = present[k];
    }
    for (auto& l : f.label.data) l = to_local[l];
  }
}

namespace {

/// Pick a view where `world` is visible at an interior surface pixel: the
/// mask agrees and interpolated depth matches the exact projection depth
/// (which rejects silhouettes, where lifting would be inexact).
std::optional<std::pair<int, Eigen::Vector2d>> find_visible_pixel(
    const std::vector<Frame>& frames, const Vec3& world, int gt_label, Rng& rng) {
  std::vector<int> order;
  for (std::size_t i = 0; i < frames.size(); ++i)
    if (!frames[i].is_test) order.push_back(int(i));
  rng.shuffle(order);
  for (int i : order) {
    const Frame& f = frames[std::size_t(i)];
    auto proj = f.camera.project(world);
    if (!proj) continue;
    const Eigen::Vector2d& pix = proj->pixel;
    if (pix.x() < 1.0 || pix.y() < 1.0 || pix.x() > f.camera.width() - 1.0 ||
        pix.y() > f.camera.height() - 1.0)
      continue;
    int px = int(std::floor(pix.x())), py = int(std::floor(pix.y()));
    if (f.label.at(px, py) != gt_label) continue;
    // Strict: interpolated depth must agree to float-rounding level, which
    // only holds when all four texels lie on the point's own face plane.
    // That is exactly the condition for later lifting to be exact.
    double d = sample_depth_invz(f.depth, pix);
    if (d <= 0.0 || std::abs(d - proj->depth) > 5e-7) continue;
    return std::make_pair(f.view, pix);
  }
  return std::nullopt;
}

int pick_face(const Vec3& he, Rng& rng) {
  double areas[6], total = 0.0;
  for (int k = 0; k < 6; ++k) total += areas[k] = face_area(he, kFaces[k]);
  double u = rng.uniform() * total;
  for (int k = 0; k < 5; ++k) {
    if (u < areas[k]) return k;
    u -= areas[k];
  }
  return 5;
}

}  // namespace

std::vector<MatchRow> make_correspondences(const SceneSpec& spec,
                                           const std::vector<double>& frac0,
                                           const std::vector<double>& frac1,
                                           const std::vector<Frame>& frames0,
                                           const std::vector<Frame>& frames1,
                                           int n_per_part, double outlier_rate,
                                           std::uint64_t seed,
                                           std::vector<std::string>* warnings) {
  std::vector<RigidMotion> poses0 = part_poses(spec, frac0);
  std::vector<RigidMotion> poses1 = part_poses(spec, frac1);
  Rng rng(seed);
  std::vector<MatchRow> rows;
  std::vector<Vec3> true_p1;  // state-1 endpoints, kept for outlier injection

  const int per_cluster = 15;
  // Clusters sit in small discs so the locality filter sees populated
  // neighborhoods; half its default radius keeps members mutually close.
  const double cluster_radius = 0.005;
  // Keep clusters of different parts apart so a filter neighborhood never
  // mixes motions; seeds closer than this could share members.
  const double min_seed_sep = 0.03;
  std::vector<std::pair<std::size_t, Vec3>> seeds;  // (part, state-0 world seed)

  for (std::size_t p = 0; p < spec.parts.size(); ++p) {
    const PartSpec& part = spec.parts[std::size_t(p)];
    int emitted = 0;
    int budget = 60 * n_per_part;
    int in_cluster = per_cluster;  // force a fresh cluster immediately
    int cluster_attempts = 0;
    const int attempts_cap = 3 * per_cluster;  // abandon never-visible faces
    int cluster_face = 0;
    Vec3 cluster_center = Vec3::Zero();
    while (emitted < n_per_part && budget-- > 0) {
      if (in_cluster >= per_cluster || cluster_attempts >= attempts_cap) {
        for (int pick = 0; pick < 20; ++pick) {
          cluster_face = pick_face(part.half_extent, rng);
          cluster_center = face_point(part.half_extent, kFaces[cluster_face], rng.uniform(),
                                      rng.uniform(), cluster_radius + 0.002);
          Vec3 seed0 = poses0[p].apply(cluster_center);
          bool clear = true;
          for (const auto& s : seeds)
            if (s.first != p && (s.second - seed0).norm() < min_seed_sep) { clear = false; break; }
          if (clear) break;
        }
        seeds.emplace_back(p, poses0[p].apply(cluster_center));
        in_cluster = 0;
        cluster_attempts = 0;
      }
      ++cluster_attempts;
      // Offset within the cluster disc, in the face plane.
      const FaceDef& fd = kFaces[cluster_face];
      int u = (fd.axis + 1) % 3, v = (fd.axis + 2) % 3;
      double ang = rng.uniform(0.0, 2.0 * kPi);
      double rr = cluster_radius * std::sqrt(rng.uniform());
      Vec3 local = cluster_center;
      local(u) += rr * std::cos(ang);
      local(v) += rr * std::sin(ang);
      Vec3 w0 = poses0[p].apply(local);
      Vec3 w1 = poses1[p].apply(local);
      auto hit0 = find_visible_pixel(frames0, w0, int(p) + 1, rng);
      if (!hit0) continue;
      auto hit1 = find_visible_pixel(frames1, w1, int(p) + 1, rng);
      if (!hit1) continue;
      MatchRow row;
      row.view0 = hit0->first;
      row.pix0 = hit0->second;
      row.view1 = hit1->first;
      row.pix1 = hit1->second;
      rows.push_back(row);
      true_p1.push_back(w1);
      ++in_cluster;
      ++emitted;
    }
    if (emitted == 0 && warnings)
      warnings->push_back("no correspondences found for part " + std::to_string(p + 1));
  }

  // Replace a fixed count of rows by wrong partners displaced >= 0.1 m.
  // Prefer partners inside a 0.3 m annulus: a far outlier shifts its
  // neighborhood mean by displacement / cluster size, and an uncapped one
  // can push every inlier around it past the filter's acceptance radius.
  std::size_t n_out = std::size_t(std::llround(outlier_rate * double(rows.size())));
  std::vector<int> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  rng.shuffle(order);
  std::size_t flagged = 0;
  for (int idx : order) {
    if (flagged == n_out) break;
    bool done = false;
    for (int attempt = 0; attempt < 200 && !done; ++attempt) {
      std::size_t q = rng.below(spec.parts.size());
      const PartSpec& part = spec.parts[q];
      int face = pick_face(part.half_extent, rng);
      Vec3 local = face_point(part.half_extent, kFaces[face], rng.uniform(), rng.uniform(), 0.002);
      Vec3 w1 = poses1[q].apply(local);
      double disp = (w1 - true_p1[std::size_t(idx)]).norm();
      if (disp < 0.1) continue;
      if (disp > 0.3 && attempt < 120) continue;
      auto hit = find_visible_pixel(frames1, w1, int(q) + 1, rng);
      if (!hit) continue;
      rows[std::size_t(idx)].view1 = hit->first;
      rows[std::size_t(idx)].pix1 = hit->second;
      rows[std::size_t(idx)].outlier_gt = true;
      done = true;
    }
    if (done) ++flagged;
  }
  if (flagged < n_out && warnings)
    warnings->push_back("only " + std::to_string(flagged) + " of " + std::to_string(n_out) +
                        " requested outliers could be injected");
  return rows;
}

std::vector<Vec3> sample_surface(const SceneSpec& spec, const std::vector<RigidMotion>& poses,
                                 int part, int n, Rng& rng) {
  std::vector<std::pair<std::size_t, int>> faces;  // (part, face)
  std::vector<double> cum;
  double total = 0.0;
  for (std::size_t p = 0; p < spec.parts.size(); ++p) {
    if (part >= 0 && std::size_t(part) != p) continue;
    for (int k = 0; k < 6; ++k) {
      faces.push_back({p, k});
      total += face_area(spec.parts[p].half_extent, kFaces[k]);
      cum.push_back(total);
    }
  }
  if (faces.empty()) throw InvalidInputError("sample_surface: no such part");
  std::vector<Vec3> pts;
  pts.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform() * total;
    std::size_t k = std::size_t(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    if (k >= faces.size()) k = faces.size() - 1;
    auto [p, face] = faces[k];
    Vec3 local = face_point(spec.parts[p].half_extent, kFaces[face], rng.uniform(), rng.uniform());
    pts.push_back(poses[p].apply(local));
  }
  return pts;
}

SceneData generate_scene(const SceneSpec& spec) {
  spec.validate();
  SceneData data;
  data.spec = spec;
  Rng master(spec.seed);
  auto sub = [&](std::uint64_t k) { return master.fork(k).next_u64(); };

  std::tie(data.frac0, data.frac1) = sample_states(spec, sub(1));
  data.frames0 = render_views(spec, data.frac0, 0, spec.n_views_train, sub(2), false, 0);
  auto test0 = render_views(spec, data.frac0, 0, spec.n_views_test, sub(3), true,
                            spec.n_views_train);
  data.frames0.insert(data.frames0.end(), test0.begin(), test0.end());
  data.frames1 = render_views(spec, data.frac1, 1, spec.n_views_train, sub(4), false, 0);
  auto test1 = render_views(spec, data.frac1, 1, spec.n_views_test, sub(5), true,
                            spec.n_views_train);
  data.frames1.insert(data.frames1.end(), test1.begin(), test1.end());

  data.matches = make_correspondences(spec, data.frac0, data.frac1, data.frames0, data.frames1,
                                      spec.matches_per_part, spec.outlier_rate, sub(6),
                                      &data.warnings);

  // Identifiability check: every movable part should fill >= 1% of the
  // pixels in at least 3 training views of each state.
  for (int state = 0; state < 2; ++state) {
    const auto& frames = state == 0 ? data.frames0 : data.frames1;
    for (std::size_t p = 1; p < spec.parts.size(); ++p) {
      int good = 0;
      for (const Frame& f : frames) {
        if (f.is_test) continue;
        std::size_t cnt = 0;
        for (auto l : f.label.data) cnt += l == p + 1;
        if (double(cnt) >= 0.01 * double(f.label.data.size())) ++good;
      }
      if (good < 3)
        data.warnings.push_back("part " + std::to_string(p + 1) + " covers >=1% of pixels in only " +
                                std::to_string(good) + " training views of state " +
                                std::to_string(state));
    }
  }

  permute_labels(data.frames0, spec.dropout_rate, sub(7));
  permute_labels(data.frames1, spec.dropout_rate, sub(8));

  for (std::size_t p = 1; p < spec.parts.size(); ++p) {
    const PartSpec& ps = spec.parts[p];
    GtJoint j;
    j.part_gt = int(p) + 1;
    j.kind = ps.kind;
    j.axis = ps.axis;
    j.origin = ps.origin;
    j.mag0 = data.frac0[p - 1] * ps.limit;
    j.mag1 = data.frac1[p - 1] * ps.limit;
    j.limit = ps.limit;
    data.joints.push_back(j);
  }
  return data;
}

namespace {

PartSpec make_box(const Vec3& he, const Vec3& center, const Vec3& color) {
  PartSpec p;
  p.half_extent = he;
  p.rest = RigidMotion(Quat::identity(), center);
  p.base_color = color;
  return p;
}

PartSpec revolute_door(const Vec3& he, const Vec3& center, const Vec3& color, const Vec3& axis,
                       const Vec3& origin, double direction, double limit_rad) {
  PartSpec p = make_box(he, center, color);
  p.kind = JointKind::revolute;
  p.axis = axis;
  p.origin = origin;
  p.limit = limit_rad;
  p.direction = direction;
  return p;
}

PartSpec prismatic_part(const Vec3& he, const Vec3& center, const Vec3& color, const Vec3& axis,
                        double limit_m) {
  PartSpec p = make_box(he, center, color);
  p.kind = JointKind::prismatic;
  p.axis = axis.normalized();
  p.origin = Vec3::Zero();
  p.limit = limit_m;
  p.direction = 1.0;
  return p;
}

Vec3 wheel_color(int k) {
  double g = double(k) * 2.399963229728653;  // golden angle keeps hues apart
  Vec3 c = Vec3(0.5 + 0.32 * std::cos(g), 0.5 + 0.32 * std::cos(g - 2.0944),
                0.5 + 0.32 * std::cos(g + 2.0944));
  return c;
}

/// Shared builder for the grid scenes: a slab base with n_movable panels,
/// alternating revolute doors (hinge edge cycling) and prismatic sliders
/// (direction cycling).
SceneSpec grid_scene(int n_movable, int n_cols, double cell, const Vec3& panel_he,
                     const Vec3& slab_he) {
  SceneSpec s;
  s.parts.push_back(make_box(slab_he, Vec3(0, 0, slab_he.z()), Vec3(0.56, 0.58, 0.60)));
  int n_rows = (n_movable + n_cols - 1) / n_cols;
  double hinge = panel_he.x() + 0.005;
  for (int k = 0; k < n_movable; ++k) {
    int col = k % n_cols, row = k / n_cols;
    double gx = (double(col) - 0.5 * double(n_cols - 1)) * cell;
    double gz = slab_he.z() + (double(row) - 0.5 * double(n_rows - 1)) * cell;
    Vec3 center(gx, -slab_he.y() - panel_he.y(), gz);
    Vec3 color = wheel_color(k);
    if (k % 2 == 0) {
      switch ((k / 2) % 4) {
        case 0:
          s.parts.push_back(revolute_door(panel_he, center, color, Vec3(0, 0, 1),
                                          Vec3(gx - hinge, center.y(), 0), -1.0, kPi / 2));
          break;
        case 1:
          s.parts.push_back(revolute_door(panel_he, center, color, Vec3(0, 0, 1),
                                          Vec3(gx + hinge, center.y(), 0), 1.0, kPi / 2));
          break;
        case 2:
          s.parts.push_back(revolute_door(panel_he, center, color, Vec3(1, 0, 0),
                                          Vec3(0, center.y(), gz - hinge), 1.0, kPi / 2));
          break;
        default:
          s.parts.push_back(revolute_door(panel_he, center, color, Vec3(1, 0, 0),
                                          Vec3(0, center.y(), gz + hinge), -1.0, kPi / 2));
      }
    } else {
      Vec3 dirs[4] = {Vec3(0, -1, 0), Vec3(-0.30, -0.90, 0.32), Vec3(0.30, -0.90, -0.32),
                      Vec3(0.0, -0.85, 0.53)};
      s.parts.push_back(prismatic_part(panel_he, center, color, dirs[(k / 2) % 4],
                                       0.8 * panel_he.y()));
    }
  }
  s.look_at = Vec3(0, 0, slab_he.z());
  return s;
}

}  // namespace

SceneSpec preset_scene(const std::string& name) {
  SceneSpec s;
  if (name == "door2") {
    s.parts.push_back(make_box(Vec3(0.45, 0.30, 0.55), Vec3(0, 0, 0.55), Vec3(0.58, 0.62, 0.66)));
    s.parts.push_back(revolute_door(Vec3(0.21, 0.018, 0.52), Vec3(-0.225, -0.33, 0.55),
                                    Vec3(0.72, 0.48, 0.40), Vec3(0, 0, 1), Vec3(-0.44, -0.33, 0),
                                    -1.0, kPi / 2));
    s.radius_lo = 2.2;
    s.radius_hi = 2.9;
    s.look_at = Vec3(0, 0, 0.55);
  } else if (name == "cabinet5") {
    s.parts.push_back(make_box(Vec3(0.45, 0.30, 0.60), Vec3(0, 0, 0.60), Vec3(0.55, 0.58, 0.62)));
    s.parts.push_back(prismatic_part(Vec3(0.20, 0.26, 0.115), Vec3(-0.22, -0.06, 1.06),
                                     Vec3(0.76, 0.56, 0.35), Vec3(0, -1, 0), 0.208));
    s.parts.push_back(prismatic_part(Vec3(0.20, 0.24, 0.115), Vec3(0.22, -0.08, 1.06),
                                     Vec3(0.35, 0.56, 0.76), Vec3(0, -1, 0), 0.192));
    s.parts.push_back(revolute_door(Vec3(0.21, 0.018, 0.42), Vec3(-0.23, -0.33, 0.47),
                                    Vec3(0.72, 0.45, 0.45), Vec3(0, 0, 1), Vec3(-0.44, -0.33, 0),
                                    -1.0, kPi / 2));
    s.parts.push_back(revolute_door(Vec3(0.21, 0.018, 0.42), Vec3(0.23, -0.33, 0.47),
                                    Vec3(0.45, 0.72, 0.45), Vec3(0, 0, 1), Vec3(0.44, -0.33, 0),
                                    1.0, kPi / 2));
    s.radius_lo = 2.3;
    s.radius_hi = 3.0;
    s.look_at = Vec3(0, 0, 0.60);
  } else if (name == "grid10") {
    s = grid_scene(9, 3, 0.40, Vec3(0.18, 0.085, 0.18), Vec3(0.62, 0.05, 0.62));
    s.radius_lo = 2.4;
    s.radius_hi = 3.0;
    s.azimuth_deg = 55.0;
    s.elev_hi_deg = 45.0;
  } else if (name == "grid20") {
    s = grid_scene(19, 5, 0.42, Vec3(0.20, 0.09, 0.20), Vec3(1.07, 0.05, 0.88));
    s.radius_lo = 2.6;
    s.radius_hi = 3.2;
    s.azimuth_deg = 50.0;
    s.elev_hi_deg = 42.0;
  } else {
    throw ConfigError("unknown scene preset: " + name);
  }
  s.name = name;
  return s;
}

}  // namespace artic
