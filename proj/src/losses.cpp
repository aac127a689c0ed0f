#include "artic/losses.hpp"

#include <cmath>

#include "artic/error.hpp"

namespace artic {

void TrainConfig::validate() const {
  if (iters_warmup < 0 || iters_soft < 0 || iters_hard < 0)
    throw ConfigError("train config: negative iteration count");
  if (prismatic_check_step < 0 || prismatic_check_step > iters_soft)
    throw ConfigError("train config: prismatic_check_step must lie within the soft stage");
  if (eps_deg <= 0.0) throw ConfigError("train config: eps_deg must be positive");
  for (double l : {lambda_ssim, lambda_d, lambda_sem, lambda_sparsity, lambda_traj})
    if (l < 0.0 || !std::isfinite(l)) throw ConfigError("train config: negative loss weight");
  if (lambda_ssim >= 1.0) throw ConfigError("train config: lambda_ssim must be < 1");
  if (knn_k < 1) throw ConfigError("train config: knn_k must be >= 1");
  if (softmax_tau <= 0.0) throw ConfigError("train config: softmax temperature must be positive");
  if (delta_vis <= 0.0) throw ConfigError("train config: delta_vis must be positive");
  for (double lr : {lr_motion, lr_logits, lr_color})
    if (lr <= 0.0) throw ConfigError("train config: learning rates must be positive");
  if (hard_lr_decay <= 0.0 || hard_lr_decay > 1.0)
    throw ConfigError("train config: hard_lr_decay must be in (0, 1]");
  if (pos_max_lr <= 0.0 || pos_min_lr <= 0.0 || pos_min_lr > pos_max_lr)
    throw ConfigError("train config: bad position LR bounds");
  if (pos_end <= pos_init) throw ConfigError("train config: position schedule end must be > init");
  if (n_points < 1) throw ConfigError("train config: n_points must be >= 1");
}

void ParamGrads::init(int n_bases, int n_parts, int n_prims) {
  d_quat.assign(std::size_t(n_bases), Eigen::Vector4d::Zero());
  d_trans.assign(std::size_t(n_bases), Vec3::Zero());
  d_logits = Eigen::MatrixXd::Zero(n_parts, n_prims);
  d_color = Eigen::Matrix3Xd::Zero(3, n_prims);
}

void ParamGrads::add_scaled(const ParamGrads& o, double scale) {
  for (std::size_t j = 0; j < d_quat.size(); ++j) {
    d_quat[j] += scale * o.d_quat[j];
    d_trans[j] += scale * o.d_trans[j];
  }
  d_logits += scale * o.d_logits;
  d_color += scale * o.d_color;
}

double lr_position(int step, const TrainConfig& cfg) {
  if (cfg.pos_end <= cfg.pos_init)
    throw ConfigError("lr_position: schedule end must be > init");
  if (step < cfg.pos_init) return cfg.pos_max_lr;
  if (step >= cfg.pos_end) return cfg.pos_min_lr;
  double t = double(step - cfg.pos_init) / double(cfg.pos_end - cfg.pos_init);
  return cfg.pos_max_lr * std::pow(cfg.pos_min_lr / cfg.pos_max_lr, t);
}

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Bilinear patch around a continuous pixel; valid only away from the
/// border so no clamping kink can enter a gradient.
struct Patch {
  int x0 = 0, y0 = 0;
  double fx = 0.0, fy = 0.0;
  bool ok = false;
};

Patch patch_at(int w, int h, const Eigen::Vector2d& pix) {
  double px = pix.x() - 0.5, py = pix.y() - 0.5;
  int x0 = int(std::floor(px)), y0 = int(std::floor(py));
  if (x0 < 0 || y0 < 0 || x0 > w - 2 || y0 > h - 2) return {};
  return {x0, y0, px - x0, py - y0, true};
}

/// Depth via bilinear interpolation of inverse depth, with the gradient
/// w.r.t. the pixel position. value <= 0 flags an invalid patch.
struct BilinDepth {
  double value = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
};

BilinDepth sample_depth_grad(const Image<float>& depth, const Patch& p) {
  double d00 = depth.at(p.x0, p.y0), d10 = depth.at(p.x0 + 1, p.y0);
  double d01 = depth.at(p.x0, p.y0 + 1), d11 = depth.at(p.x0 + 1, p.y0 + 1);
  if (d00 <= 0.0 || d10 <= 0.0 || d01 <= 0.0 || d11 <= 0.0) return {};
  double i00 = 1.0 / d00, i10 = 1.0 / d10, i01 = 1.0 / d01, i11 = 1.0 / d11;
  double s = (1 - p.fx) * (1 - p.fy) * i00 + p.fx * (1 - p.fy) * i10 +
             (1 - p.fx) * p.fy * i01 + p.fx * p.fy * i11;
  double ds_dfx = (i10 - i00) * (1 - p.fy) + (i11 - i01) * p.fy;
  double ds_dfy = (i01 - i00) * (1 - p.fx) + (i11 - i10) * p.fx;
  BilinDepth out;
  out.value = 1.0 / s;
  out.grad = -(1.0 / (s * s)) * Eigen::Vector2d(ds_dfx, ds_dfy);
  return out;
}

struct BilinRgb {
  Vec3 value = Vec3::Zero();
  Eigen::Matrix<double, 3, 2> grad = Eigen::Matrix<double, 3, 2>::Zero();
};

BilinRgb sample_rgb_grad(const Image<Rgb8>& rgb, const Patch& p) {
  Vec3 c00 = to_linear(rgb.at(p.x0, p.y0)), c10 = to_linear(rgb.at(p.x0 + 1, p.y0));
  Vec3 c01 = to_linear(rgb.at(p.x0, p.y0 + 1)), c11 = to_linear(rgb.at(p.x0 + 1, p.y0 + 1));
  BilinRgb out;
  out.value = (1 - p.fx) * (1 - p.fy) * c00 + p.fx * (1 - p.fy) * c10 +
              (1 - p.fx) * p.fy * c01 + p.fx * p.fy * c11;
  out.grad.col(0) = (c10 - c00) * (1 - p.fy) + (c11 - c01) * p.fy;
  out.grad.col(1) = (c01 - c00) * (1 - p.fx) + (c11 - c10) * p.fx;
  return out;
}

/// softmax() with the output written into a caller-owned buffer. Same shift,
/// same operation order, so the result is bit-identical; the point is to keep
/// the per-primitive inner loops free of heap churn.
void softmax_into(const Eigen::VectorXd& logits, double temperature, Eigen::VectorXd& out) {
  out = logits / temperature;
  double m = out.maxCoeff();
  out = (out.array() - m).exp();
  double s = out.sum();
  out /= s;
}

/// One primitive's center after applying the mode's motion. `weights` aliases
/// the caller's scratch buffer and is only valid until the next move_center
/// call with the same buffer.
struct Moved {
  Vec3 center = Vec3::Zero();
  int j_hard = -1;                             // hard mode only
  const Eigen::VectorXd* weights = nullptr;    // soft mode only
};

Moved move_center(const SceneModel& model, int i, MotionMode mode, double tau,
                  Eigen::VectorXd& wscratch) {
  Moved mv;
  const Primitive& prim = model.prims[std::size_t(i)];
  switch (mode) {
    case MotionMode::identity:
      mv.center = prim.center;
      break;
    case MotionMode::soft: {
      softmax_into(prim.logits, tau, wscratch);
      mv.weights = &wscratch;
      mv.center = Vec3::Zero();
      for (int j = 0; j < model.n_parts(); ++j) {
        const MotionBasis& b = model.field.bases[std::size_t(j)];
        mv.center += wscratch(j) * (b.rot.rotate(prim.center) + b.trans);
      }
      break;
    }
    case MotionMode::hard: {
      mv.j_hard = hard_assign(prim.logits);
      const MotionBasis& b = model.field.bases[std::size_t(mv.j_hard)];
      mv.center = b.rot.rotate(prim.center) + b.trans;
      break;
    }
  }
  return mv;
}

/// Scatter dL/dcenter' into basis gradients. Basis 0 is frozen, locked
/// bases receive no rotation gradient.
void scatter_center_grad(const SceneModel& model, int i, const Moved& mv, MotionMode mode,
                         const Vec3& g, ParamGrads& grads) {
  if (mode == MotionMode::identity) return;
  const Vec3& mu = model.prims[std::size_t(i)].center;
  auto push = [&](int j, double w) {
    if (j == 0 || w == 0.0) return;
    const MotionBasis& b = model.field.bases[std::size_t(j)];
    grads.d_trans[std::size_t(j)] += w * g;
    if (b.prismatic_locked) return;
    Mat34 jac;
    rotate_with_jacobian(b.rot, mu, &jac);
    grads.d_quat[std::size_t(j)] += w * (jac.transpose() * g);
  };
  if (mode == MotionMode::hard) {
    push(mv.j_hard, 1.0);
  } else {
    for (int j = 1; j < model.n_parts(); ++j) push(j, (*mv.weights)(j));
  }
}

struct VisiblePrim {
  int i;
  Moved mv;
  Patch patch;
  int label;
  double z;                              // camera-space depth
  BilinDepth depth;
  Eigen::Matrix<double, 2, 3> dpix_dy;   // pixel w.r.t. camera coords
  Mat3 cam_rot;
};

/// Run `fn` for every primitive that passes the visibility gate; returns
/// the visible count. The trace records every discrete decision involved.
/// With `match_label` the pixel's part label must equal the primitive's hard
/// class: a primitive projecting onto another part's mask is occluded or
/// mid-motion, and photometric supervision from that pixel would drag it
/// toward a surface it does not belong to.
template <typename F>
int for_visible(const SceneModel& model, const Frame& frame, MotionMode mode,
                const TrainConfig& cfg, bool match_label, DiscreteTrace* trace, F&& fn) {
  if (frame.label.data.empty() || frame.label.width != frame.depth.width ||
      frame.label.height != frame.depth.height)
    throw InvalidInputError("loss: frame has no usable label mask");
  const Camera& cam = frame.camera;
  Mat3 r = cam.extrinsics().block<3, 3>(0, 0);
  Vec3 t = cam.extrinsics().block<3, 1>(0, 3);
  int n_vis = 0;
  Eigen::VectorXd wscratch;
  for (int i = 0; i < model.n_prims(); ++i) {
    Moved mv = move_center(model, i, mode, cfg.softmax_tau, wscratch);
    Vec3 y = r * mv.center + t;
    if (y.z() <= 1e-6) continue;
    Eigen::Vector2d pix(cam.fx() * y.x() / y.z() + cam.cx(),
                        cam.fy() * y.y() / y.z() + cam.cy());
    if (pix.x() < 1.0 || pix.y() < 1.0 || pix.x() > cam.width() - 1.0 ||
        pix.y() > cam.height() - 1.0)
      continue;
    int ix = int(std::floor(pix.x())), iy = int(std::floor(pix.y()));
    int label = frame.label.at(ix, iy);
    if (label == 0) continue;  // background pixels carry no supervision
    if (match_label && hard_assign(model.prims[std::size_t(i)].logits) + 1 != label)
      continue;
    Patch patch = patch_at(frame.depth.width, frame.depth.height, pix);
    if (!patch.ok) continue;
    BilinDepth d = sample_depth_grad(frame.depth, patch);
    if (d.value <= 0.0) continue;
    if (std::abs(y.z() - d.value) >= cfg.delta_vis) continue;

    VisiblePrim vp;
    vp.i = i;
    vp.mv = std::move(mv);
    vp.patch = patch;
    vp.label = label;
    vp.z = y.z();
    vp.depth = d;
    vp.dpix_dy << cam.fx() / y.z(), 0.0, -cam.fx() * y.x() / (y.z() * y.z()),
        0.0, cam.fy() / y.z(), -cam.fy() * y.y() / (y.z() * y.z());
    vp.cam_rot = r;
    if (trace)
      trace->add({i, patch.x0, patch.y0, ix, iy, label,
                  mode == MotionMode::hard ? vp.mv.j_hard : -1});
    fn(vp);
    ++n_vis;
  }
  return n_vis;
}

}  // namespace

double loss_rgbd(const SceneModel& model, const Frame& frame, MotionMode mode,
                 const TrainConfig& cfg, ParamGrads* grads, DiscreteTrace* trace) {
  const double w_color = 1.0 - cfg.lambda_ssim;
  double total = 0.0;
  ParamGrads local;
  if (grads) local.init(model.n_parts(), model.n_parts(), model.n_prims());
  int n_vis = for_visible(model, frame, mode, cfg, true, trace, [&](const VisiblePrim& vp) {
    const Primitive& prim = model.prims[std::size_t(vp.i)];
    BilinRgb img = sample_rgb_grad(frame.rgb, vp.patch);
    Vec3 rc = prim.color - img.value;
    double rd = vp.z - vp.depth.value;
    total += w_color * rc.cwiseAbs().sum() + cfg.lambda_d * std::abs(rd);
    if (trace) {
      // Residual signs are the discrete branches of the L1 terms.
      int s = (rd > 0.0 ? 1 : 0) | (rc.x() > 0.0 ? 2 : 0) | (rc.y() > 0.0 ? 4 : 0) |
              (rc.z() > 0.0 ? 8 : 0);
      trace->add({s});
    }
    if (!grads) return;
    Vec3 sc(sign(rc.x()), sign(rc.y()), sign(rc.z()));
    local.d_color.col(vp.i) += w_color * sc;
    // Residual chain through the projected pixel and the camera depth.
    Eigen::Vector2d dL_dpix = -w_color * (img.grad.transpose() * sc) -
                              cfg.lambda_d * sign(rd) * vp.depth.grad;
    Vec3 dL_dy = vp.dpix_dy.transpose() * dL_dpix;
    dL_dy.z() += cfg.lambda_d * sign(rd);
    Vec3 g = vp.cam_rot.transpose() * dL_dy;
    scatter_center_grad(model, vp.i, vp.mv, mode, g, local);
  });
  if (n_vis == 0) return 0.0;
  if (grads) grads->add_scaled(local, 1.0 / double(n_vis));
  return total / double(n_vis);
}

double loss_sem(const SceneModel& model, const Frame& frame, MotionMode mode,
                const TrainConfig& cfg, ParamGrads* grads, DiscreteTrace* trace) {
  double total = 0.0;
  ParamGrads local;
  if (grads) local.init(model.n_parts(), model.n_parts(), model.n_prims());
  Eigen::VectorXd p, dl;
  int n_vis = for_visible(model, frame, mode, cfg, false, trace, [&](const VisiblePrim& vp) {
    if (vp.label > model.n_parts())
      throw InvalidInputError("loss_sem: mask label exceeds the part count");
    const Primitive& prim = model.prims[std::size_t(vp.i)];
    softmax_into(prim.logits, cfg.softmax_tau, p);
    int cls = vp.label - 1;
    total += -std::log(std::max(p(cls), 1e-300));
    if (!grads) return;
    dl = p / cfg.softmax_tau;
    dl(cls) -= 1.0 / cfg.softmax_tau;
    local.d_logits.col(vp.i) += dl;
  });
  if (n_vis == 0) return 0.0;
  if (grads) grads->add_scaled(local, 1.0 / double(n_vis));
  return total / double(n_vis);
}

double loss_sparsity(const SceneModel& model, const TrainConfig& cfg, ParamGrads* grads) {
  if (model.knn.size() != model.prims.size())
    throw InvalidInputError("loss_sparsity: knn index not built");
  const double tau = cfg.softmax_tau;
  std::vector<Eigen::VectorXd> w(model.prims.size());
  for (std::size_t i = 0; i < model.prims.size(); ++i)
    w[i] = softmax(model.prims[i].logits, tau);
  double total = 0.0;
  for (std::size_t i = 0; i < model.prims.size(); ++i) {
    for (int j : model.knn[i]) {
      Eigen::VectorXd diff = w[i] - w[std::size_t(j)];
      double n = diff.norm();
      total += n;
      if (!grads || n < 1e-12) continue;
      Eigen::VectorXd u = diff / n;
      // d||wi - wj|| / dlogits through each softmax Jacobian.
      auto jac_mul = [&](const Eigen::VectorXd& wk) {
        return (wk.cwiseProduct(u) - wk * wk.dot(u)) / tau;
      };
      grads->d_logits.col(int(i)) += jac_mul(w[i]);
      grads->d_logits.col(j) -= jac_mul(w[std::size_t(j)]);
    }
  }
  return total;
}

double loss_traj(const SceneModel& model, const std::vector<MatchPair>& matches,
                 const std::vector<int>& assign_prim, const TrainConfig& cfg,
                 ParamGrads* grads, DiscreteTrace* trace) {
  (void)cfg;
  if (matches.size() != assign_prim.size())
    throw InvalidInputError("loss_traj: one primitive attribution per match required");
  if (matches.empty()) return 0.0;
  // Summed, not averaged: each correspondence is an independent anchor, and
  // the collective pull is what lets this term outvote photometric
  // false minima during hard training.
  double total = 0.0;
  for (std::size_t m = 0; m < matches.size(); ++m) {
    const Primitive& prim = model.prims.at(std::size_t(assign_prim[m]));
    int j = hard_assign(prim.logits);
    if (trace) trace->add({int(m), j});
    const MotionBasis& b = model.field.bases[std::size_t(j)];
    Vec3 r = b.rot.rotate(matches[m].p0) + b.trans - matches[m].p1;
    double n = r.norm();
    total += n;
    if (!grads || j == 0 || n < 1e-15) continue;
    Vec3 u = r / n;
    grads->d_trans[std::size_t(j)] += u;
    if (b.prismatic_locked) continue;
    Mat34 jac;
    rotate_with_jacobian(b.rot, matches[m].p0, &jac);
    grads->d_quat[std::size_t(j)] += jac.transpose() * u;
  }
  return total;
}

}  // namespace artic
