#include "artic/trainer.hpp"

#include <cmath>
#include <numeric>

#include "artic/error.hpp"
#include "artic/kdtree.hpp"
#include "artic/rng.hpp"

namespace artic {

namespace {

/// Confidence of the label-derived initial logits. The softmax floor
/// exp(-8) keeps cross-basis weight leakage from dragging movable bases
/// toward identity, while still letting the semantic term relabel.
constexpr double kInitLogitGap = 8.0;

/// Adaptive-moment descent over one flat parameter block. Frozen
/// coordinates are handled by zeroing both the gradient and the moments.
class Adam {
 public:
  explicit Adam(int n)
      : m_(Eigen::VectorXd::Zero(n)), v_(Eigen::VectorXd::Zero(n)) {}

  Eigen::VectorXd step(const Eigen::VectorXd& g, double lr) {
    ++t_;
    m_ = 0.9 * m_ + 0.1 * g;
    v_ = 0.999 * v_.array() + 0.001 * g.array().square();
    double bc1 = 1.0 - std::pow(0.9, t_);
    double bc2 = 1.0 - std::pow(0.999, t_);
    Eigen::ArrayXd mhat = m_.array() / bc1;
    Eigen::ArrayXd vhat = v_.array() / bc2;
    return (lr * mhat / (vhat.sqrt() + 1e-8)).matrix();
  }

  void reset_coords(int start, int len) {
    m_.segment(start, len).setZero();
    v_.segment(start, len).setZero();
  }

  /// Fresh optimizer state. The objective changes between stages, and second
  /// moments accumulated on the old one would scale the new gradients wrongly
  /// for hundreds of steps.
  void reset_all() {
    m_.setZero();
    v_.setZero();
    t_ = 0;
  }

 private:
  Eigen::VectorXd m_, v_;
  int t_ = 0;
};

double movable_area(const std::vector<Frame>& frames) {
  double area = 0.0;
  for (const Frame& f : frames) {
    if (f.is_test) continue;
    for (std::uint16_t l : f.label.data)
      if (l >= 2) area += 1.0;
  }
  return area;
}

std::vector<const Frame*> train_frames(const std::vector<Frame>& frames) {
  std::vector<const Frame*> out;
  for (const Frame& f : frames)
    if (!f.is_test) out.push_back(&f);
  return out;
}

struct Blocks {
  Adam quat, trans, logits, color;
  Blocks(int n_bases, int n_parts, int n_prims)
      : quat(4 * n_bases), trans(3 * n_bases), logits(n_parts * n_prims),
        color(3 * n_prims) {}
};

Eigen::VectorXd flatten_quat(const ParamGrads& g) {
  Eigen::VectorXd out(4 * int(g.d_quat.size()));
  for (std::size_t j = 0; j < g.d_quat.size(); ++j)
    out.segment<4>(4 * int(j)) = g.d_quat[j];
  return out;
}

Eigen::VectorXd flatten_trans(const ParamGrads& g) {
  Eigen::VectorXd out(3 * int(g.d_trans.size()));
  for (std::size_t j = 0; j < g.d_trans.size(); ++j)
    out.segment<3>(3 * int(j)) = g.d_trans[j];
  return out;
}

/// Apply parameter updates, honoring the frozen static basis and locked
/// rotations, then renormalize quaternions.
void apply_motion_update(SceneModel& model, const Eigen::VectorXd& dq,
                         const Eigen::VectorXd& dt) {
  for (int j = 1; j < model.n_parts(); ++j) {
    MotionBasis& b = model.field.bases[std::size_t(j)];
    b.trans -= dt.segment<3>(3 * j);
    if (b.prismatic_locked) continue;
    b.rot.w -= dq(4 * j + 0);
    b.rot.x -= dq(4 * j + 1);
    b.rot.y -= dq(4 * j + 2);
    b.rot.z -= dq(4 * j + 3);
    b.rot = b.rot.normalized();
  }
}

/// Zero gradient coordinates of the static basis and of locked rotations so
/// their Adam moments never accumulate.
void mask_motion_grads(const SceneModel& model, ParamGrads& g) {
  g.d_quat[0].setZero();
  g.d_trans[0].setZero();
  for (int j = 1; j < model.n_parts(); ++j)
    if (model.field.bases[std::size_t(j)].prismatic_locked)
      g.d_quat[std::size_t(j)].setZero();
}

}  // namespace

int pick_canonical_state(const std::vector<Frame>& frames0,
                         const std::vector<Frame>& frames1) {
  return movable_area(frames1) > movable_area(frames0) ? 1 : 0;
}

SceneModel init_model(const std::vector<Frame>& canonical_frames, int n_parts,
                      const TrainConfig& cfg, std::vector<std::string>* warnings) {
  if (n_parts < 2)
    throw InvalidInputError("init_model: need at least a static and one movable part");
  std::vector<const Frame*> frames = train_frames(canonical_frames);
  if (frames.empty()) throw InvalidInputError("init_model: no training frames");

  struct Pick {
    int frame, x, y;
  };
  std::vector<Pick> valid;
  for (std::size_t fi = 0; fi < frames.size(); ++fi) {
    const Frame& f = *frames[fi];
    for (int y = 0; y < f.depth.height; ++y)
      for (int x = 0; x < f.depth.width; ++x)
        if (f.label.at(x, y) > 0 && f.depth.at(x, y) > 0.0f)
          valid.push_back({int(fi), x, y});
  }
  if (valid.empty()) throw InvalidInputError("init_model: no labeled depth pixels");

  Rng rng = Rng(cfg.seed).fork(101);
  std::vector<Pick> chosen;
  if (int(valid.size()) >= cfg.n_points) {
    rng.shuffle(valid);
    chosen.assign(valid.begin(), valid.begin() + cfg.n_points);
  } else {
    if (warnings)
      warnings->push_back("init_model: only " + std::to_string(valid.size()) +
                          " labeled pixels for " + std::to_string(cfg.n_points) +
                          " primitives; sampling with replacement");
    chosen.reserve(std::size_t(cfg.n_points));
    for (int i = 0; i < cfg.n_points; ++i)
      chosen.push_back(valid[std::size_t(rng.below(valid.size()))]);
  }

  SceneModel model;
  model.field = MotionField::identity(n_parts);
  model.prims.reserve(chosen.size());
  for (const Pick& c : chosen) {
    const Frame& f = *frames[std::size_t(c.frame)];
    Primitive p;
    p.center = f.camera.backproject(Eigen::Vector2d(c.x + 0.5, c.y + 0.5),
                                    double(f.depth.at(c.x, c.y)));
    p.color = to_linear(f.rgb.at(c.x, c.y));
    int label = f.label.at(c.x, c.y);
    if (label > n_parts)
      throw InvalidInputError("init_model: mask label exceeds the part count");
    p.logits = init_logits(label - 1, n_parts, kInitLogitGap);
    model.prims.push_back(p);
  }

  std::vector<Vec3> centers;
  centers.reserve(model.prims.size());
  for (const Primitive& p : model.prims) centers.push_back(p.center);
  KdTree tree(centers);
  model.knn.resize(model.prims.size());
  for (std::size_t i = 0; i < model.prims.size(); ++i) {
    std::vector<int> nn = tree.knearest(model.prims[i].center, cfg.knn_k + 1);
    std::vector<int>& mine = model.knn[i];
    for (int n : nn) {
      if (n == int(i)) continue;
      mine.push_back(n);
      if (int(mine.size()) == cfg.knn_k) break;
    }
    // Isotropic footprint from the nearest-neighbor spacing.
    double d = mine.empty() ? 1e-3
                            : (model.prims[i].center - centers[std::size_t(mine[0])]).norm();
    model.prims[i].scale = Vec3::Constant(std::max(d, 1e-4));
  }
  return model;
}

TrainResult train_model(const ConsistentScene& scene,
                        const std::vector<MatchPair>& matches,
                        const TrainConfig& cfg) {
  cfg.validate();
  if (scene.n_parts < 2)
    throw InvalidInputError("train_model: scene must have at least two parts");

  TrainResult res;
  int canonical = pick_canonical_state(scene.frames0, scene.frames1);
  const std::vector<Frame>& cano_frames = canonical == 0 ? scene.frames0 : scene.frames1;
  res.model = init_model(cano_frames, scene.n_parts, cfg, &res.warnings);
  res.model.canonical_state = canonical;
  SceneModel& model = res.model;
  const int n_parts = model.n_parts();
  const int n_prims = model.n_prims();

  // Matches oriented canonical -> other, each attributed to the nearest
  // initial primitive; both stay fixed for the whole run.
  std::vector<MatchPair> oriented = matches;
  if (canonical == 1)
    for (MatchPair& m : oriented) std::swap(m.p0, m.p1);
  std::vector<Vec3> centers;
  centers.reserve(model.prims.size());
  for (const Primitive& p : model.prims) centers.push_back(p.center);
  KdTree tree(centers);
  std::vector<int> assign;
  assign.reserve(oriented.size());
  for (const MatchPair& m : oriented) assign.push_back(tree.nearest(m.p0));
  if (oriented.empty())
    res.warnings.push_back("train_model: no correspondences; trajectory term inactive");

  Blocks adam(n_parts, n_parts, n_prims);
  // Every step consumes the full training batch; the per-frame losses are
  // noisy enough individually that sampled gradients meander.
  std::vector<const Frame*> warm_pool = train_frames(cano_frames);
  std::vector<const Frame*> main_pool = train_frames(scene.frames0);
  for (const Frame* f : train_frames(scene.frames1)) main_pool.push_back(f);
  if (warm_pool.empty() || main_pool.empty())
    throw InvalidInputError("train_model: no training frames");
  const double inv_warm = 1.0 / double(warm_pool.size());
  const double inv_main = 1.0 / double(main_pool.size());

  int step = 0;
  auto check_finite = [&](double total, const char* stage) {
    if (!std::isfinite(total))
      throw DivergenceError(std::string("training diverged: non-finite loss in ") +
                            stage + " stage at step " + std::to_string(step));
  };
  auto log_row = [&](const char* stage, double rgbd, double sem, double sparsity,
                     double traj, double total) {
    res.log.push_back({step, stage, rgbd, sem, sparsity, traj, total});
  };
  auto step_logits = [&](const ParamGrads& g, double lr) {
    Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(g.d_logits.data(),
                                                             g.d_logits.size());
    Eigen::VectorXd upd = adam.logits.step(flat, lr);
    for (int i = 0; i < n_prims; ++i)
      model.prims[std::size_t(i)].logits -= upd.segment(n_parts * i, n_parts);
  };

  // The photometric and semantic terms over the whole main pool; motion mode
  // applies to the non-canonical state, canonical frames pin the identity.
  auto batch_grads = [&](MotionMode mode, ParamGrads& g, double& rgbd, double& sem) {
    rgbd = 0.0;
    sem = 0.0;
    for (const Frame* f : main_pool) {
      MotionMode m = f->state == canonical ? MotionMode::identity : mode;
      ParamGrads part;
      part.init(n_parts, n_parts, n_prims);
      rgbd += loss_rgbd(model, *f, m, cfg, &part, nullptr);
      g.add_scaled(part, inv_main);
      part.init(n_parts, n_parts, n_prims);
      sem += loss_sem(model, *f, m, cfg, &part, nullptr);
      g.add_scaled(part, cfg.lambda_sem * inv_main);
    }
    rgbd *= inv_main;
    sem *= inv_main;
  };

  // Stage 1: color warm-up against canonical-state frames (identity motion).
  for (int it = 0; it < cfg.iters_warmup; ++it, ++step) {
    ParamGrads g;
    g.init(n_parts, n_parts, n_prims);
    double rgbd = 0.0;
    for (const Frame* f : warm_pool) {
      ParamGrads part;
      part.init(n_parts, n_parts, n_prims);
      rgbd += loss_rgbd(model, *f, MotionMode::identity, cfg, &part, nullptr);
      g.add_scaled(part, inv_warm);
    }
    rgbd *= inv_warm;
    check_finite(rgbd, "warmup");
    Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(g.d_color.data(),
                                                             g.d_color.size());
    Eigen::VectorXd upd = adam.color.step(flat, cfg.lr_color);
    for (int i = 0; i < n_prims; ++i)
      model.prims[std::size_t(i)].color -= upd.segment<3>(3 * i);
    log_row("warmup", rgbd, 0, 0, 0, rgbd);
  }

  // Stage 2: soft blending with the neighborhood sparsity term.
  bool prismatic_checked = false;
  auto run_prismatic_check = [&]() {
    res.locked = detect_prismatic(model.field, cfg.eps_deg);
    for (int j : res.locked) adam.quat.reset_coords(4 * j, 4);
    prismatic_checked = true;
  };
  for (int it = 0; it < cfg.iters_soft; ++it, ++step) {
    if (it == cfg.prismatic_check_step) run_prismatic_check();
    ParamGrads g, part;
    g.init(n_parts, n_parts, n_prims);
    double rgbd, sem;
    batch_grads(MotionMode::soft, g, rgbd, sem);
    part.init(n_parts, n_parts, n_prims);
    double sparsity = loss_sparsity(model, cfg, &part);
    g.add_scaled(part, cfg.lambda_sparsity);
    double total = rgbd + cfg.lambda_sem * sem + cfg.lambda_sparsity * sparsity;
    check_finite(total, "soft");

    mask_motion_grads(model, g);
    apply_motion_update(model, adam.quat.step(flatten_quat(g), cfg.lr_motion),
                        adam.trans.step(flatten_trans(g), cfg.lr_motion));
    step_logits(g, cfg.lr_logits);
    log_row("soft", rgbd, sem, sparsity, 0, total);
  }
  if (!prismatic_checked) run_prismatic_check();

  // Stage 3: hard assignment with full-batch trajectory supervision and
  // exponentially decaying learning rates.
  adam.quat.reset_all();
  adam.trans.reset_all();
  adam.logits.reset_all();
  for (int it = 0; it < cfg.iters_hard; ++it, ++step) {
    double decay = std::pow(cfg.hard_lr_decay,
                            double(it) / double(std::max(1, cfg.iters_hard - 1)));
    ParamGrads g, part;
    g.init(n_parts, n_parts, n_prims);
    double rgbd, sem;
    batch_grads(MotionMode::hard, g, rgbd, sem);
    part.init(n_parts, n_parts, n_prims);
    double traj = loss_traj(model, oriented, assign, cfg, &part, nullptr);
    g.add_scaled(part, cfg.lambda_traj);
    double total = rgbd + cfg.lambda_sem * sem + cfg.lambda_traj * traj;
    check_finite(total, "hard");

    mask_motion_grads(model, g);
    apply_motion_update(model, adam.quat.step(flatten_quat(g), cfg.lr_motion * decay),
                        adam.trans.step(flatten_trans(g), cfg.lr_motion * decay));
    step_logits(g, cfg.lr_logits * decay);
    log_row("hard", rgbd, sem, 0, traj, total);
  }
  return res;
}

}  // namespace artic
