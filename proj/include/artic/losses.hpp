#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "artic/correspond.hpp"
#include "artic/image.hpp"
#include "artic/model.hpp"

namespace artic {

/// How primitives move from the canonical state to the other state during
/// a loss evaluation.
enum class MotionMode { identity, soft, hard };

struct TrainConfig {
  int iters_warmup = 300;
  int iters_soft = 400;
  int iters_hard = 600;
  // Soft-stage step of the one-time prismatic check; the default defers it to
  // the end of the stage, where accumulated rotation is most informative.
  int prismatic_check_step = 400;
  double eps_deg = 15.0;           // below this rotation a basis is prismatic

  double lambda_ssim = 0.2;  // color L1 weight is (1 - lambda_ssim)
  double lambda_d = 0.5;
  double lambda_sem = 0.5;
  double lambda_sparsity = 1.0;
  double lambda_traj = 1.0;

  int knn_k = 8;
  double softmax_tau = 1.0;
  // Depth-consistency gate for visibility, meters. Wide enough that a part
  // mid-swing keeps photometric signal, narrow enough to reject genuinely
  // occluded primitives (interior faces sit much deeper than this).
  double delta_vis = 0.10;

  double lr_motion = 5e-3;
  double lr_logits = 1e-2;
  double lr_color = 5e-3;
  double hard_lr_decay = 0.01;  // motion LR factor reached at the last hard step

  // Position LR schedule (positions themselves stay frozen; the schedule is
  // exposed and tested as a pure function).
  double pos_max_lr = 1.6e-4;
  double pos_min_lr = 1e-8;
  int pos_init = 6000;
  int pos_end = 10000;

  int n_points = 5000;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

/// Gradients of one loss with respect to the optimized parameters. Basis 0
/// entries stay zero by construction everywhere.
struct ParamGrads {
  std::vector<Eigen::Vector4d> d_quat;  // per basis, (w, x, y, z)
  std::vector<Vec3> d_trans;
  Eigen::MatrixXd d_logits;   // n_parts x n_prims, one column per primitive
  Eigen::Matrix3Xd d_color;   // 3 x n_prims

  void init(int n_bases, int n_parts, int n_prims);
  void add_scaled(const ParamGrads& o, double scale);
};

/// Discrete decisions a loss made: visible set, interpolation cells, mask
/// labels, hard assignments. Finite-difference checks compare traces of the
/// +h and -h evaluations and skip coordinates that crossed a discontinuity.
struct DiscreteTrace {
  std::vector<int> items;

  void add(std::initializer_list<int> v) { items.insert(items.end(), v); }
  bool operator==(const DiscreteTrace& o) const { return items == o.items; }
  bool operator!=(const DiscreteTrace& o) const { return !(*this == o); }
};

/// Point-projective render loss: mean over visible primitives of
/// (1 - lambda_ssim) * |color - image|_1 + lambda_d * |z - depth|.
/// Visibility: projects >= 1 pixel inside the border, lands on a pixel whose
/// part label equals the primitive's hard class (a stand-in for z-buffer
/// occlusion), and agrees with the bilinear depth within delta_vis.
/// Gradients go to the motion bases (soft/hard) and to primitive colors.
double loss_rgbd(const SceneModel& model, const Frame& frame, MotionMode mode,
                 const TrainConfig& cfg, ParamGrads* grads = nullptr,
                 DiscreteTrace* trace = nullptr);

/// Cross-entropy between each visible primitive's soft weights and the mask
/// label at its projected pixel. Gradients flow to logits only.
double loss_sem(const SceneModel& model, const Frame& frame, MotionMode mode,
                const TrainConfig& cfg, ParamGrads* grads = nullptr,
                DiscreteTrace* trace = nullptr);

/// Sum over primitives and their knn neighbors of the L2 distance between
/// soft weight vectors.
double loss_sparsity(const SceneModel& model, const TrainConfig& cfg,
                     ParamGrads* grads = nullptr);

/// Sum over matches of the residual between the hard-assigned basis's image
/// of the canonical endpoint and the observed partner. `assign_prim` gives
/// the primitive whose logits attribute each match (nearest canonical
/// center, precomputed by the trainer).
double loss_traj(const SceneModel& model, const std::vector<MatchPair>& matches,
                 const std::vector<int>& assign_prim, const TrainConfig& cfg,
                 ParamGrads* grads = nullptr, DiscreteTrace* trace = nullptr);

/// Exponential position-LR decay: pos_max_lr until pos_init, geometric
/// interpolation to pos_min_lr at pos_end, constant after.
double lr_position(int step, const TrainConfig& cfg);

}  // namespace artic
