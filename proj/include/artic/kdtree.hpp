#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "artic/geom.hpp"

namespace artic {

/// Static kd-tree over 3D points. Ties in query results break toward the
/// lower point index so results are deterministic.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points) : pts_(std::move(points)) {
    idx_.resize(pts_.size());
    axes_.assign(pts_.size(), 0);
    for (std::size_t i = 0; i < idx_.size(); ++i) idx_[i] = int(i);
    if (!pts_.empty()) build(0, int(pts_.size()));
  }

  std::size_t size() const { return pts_.size(); }
  const Vec3& point(int i) const { return pts_[std::size_t(i)]; }

  /// Index of the nearest point (-1 when empty).
  int nearest(const Vec3& q) const {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    if (!pts_.empty()) nearest_rec(0, int(pts_.size()), 0, q, best, best_d2);
    return best;
  }

  /// Up to k nearest points, ascending by (distance, index).
  std::vector<int> knearest(const Vec3& q, int k) const {
    std::vector<std::pair<double, int>> heap;  // max-heap on (d2, index)
    if (k > 0 && !pts_.empty()) knearest_rec(0, int(pts_.size()), 0, q, k, heap);
    std::sort(heap.begin(), heap.end());
    std::vector<int> out;
    out.reserve(heap.size());
    for (auto& [d2, i] : heap) out.push_back(i);
    return out;
  }

  /// Indices with distance strictly below r, ascending by index.
  std::vector<int> radius(const Vec3& q, double r) const {
    std::vector<int> out;
    if (!pts_.empty() && r > 0.0) radius_rec(0, int(pts_.size()), 0, q, r * r, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  void build(int lo, int hi) {
    if (hi - lo <= kLeaf) return;
    Vec3 mn = pts_[std::size_t(idx_[std::size_t(lo)])], mx = mn;
    for (int i = lo; i < hi; ++i) {
      const Vec3& p = pts_[std::size_t(idx_[std::size_t(i)])];
      mn = mn.cwiseMin(p);
      mx = mx.cwiseMax(p);
    }
    int axis;
    (mx - mn).maxCoeff(&axis);
    int mid = (lo + hi) / 2;
    std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                     [&](int a, int b) {
                       double pa = pts_[std::size_t(a)](axis), pb = pts_[std::size_t(b)](axis);
                       return pa < pb || (pa == pb && a < b);
                     });
    axes_[std::size_t(mid)] = axis;
    build(lo, mid);
    build(mid + 1, hi);
  }

  void nearest_rec(int lo, int hi, int depth, const Vec3& q, int& best, double& best_d2) const {
    if (hi - lo <= kLeaf) {
      for (int i = lo; i < hi; ++i) consider(idx_[std::size_t(i)], q, best, best_d2);
      return;
    }
    int mid = (lo + hi) / 2;
    int pi = idx_[std::size_t(mid)];
    consider(pi, q, best, best_d2);
    int axis = axes_[std::size_t(mid)];
    double delta = q(axis) - pts_[std::size_t(pi)](axis);
    int nlo = delta < 0 ? lo : mid + 1, nhi = delta < 0 ? mid : hi;
    int flo = delta < 0 ? mid + 1 : lo, fhi = delta < 0 ? hi : mid;
    nearest_rec(nlo, nhi, depth + 1, q, best, best_d2);
    if (delta * delta <= best_d2) nearest_rec(flo, fhi, depth + 1, q, best, best_d2);
  }

  void consider(int i, const Vec3& q, int& best, double& best_d2) const {
    double d2 = (pts_[std::size_t(i)] - q).squaredNorm();
    if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
      best = i;
      best_d2 = d2;
    }
  }

  void knearest_rec(int lo, int hi, int depth, const Vec3& q, int k,
                    std::vector<std::pair<double, int>>& heap) const {
    auto push = [&](int i) {
      std::pair<double, int> e{(pts_[std::size_t(i)] - q).squaredNorm(), i};
      if (int(heap.size()) < k) {
        heap.push_back(e);
        std::push_heap(heap.begin(), heap.end());
      } else if (e < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = e;
        std::push_heap(heap.begin(), heap.end());
      }
    };
    if (hi - lo <= kLeaf) {
      for (int i = lo; i < hi; ++i) push(idx_[std::size_t(i)]);
      return;
    }
    int mid = (lo + hi) / 2;
    int pi = idx_[std::size_t(mid)];
    push(pi);
    int axis = axes_[std::size_t(mid)];
    double delta = q(axis) - pts_[std::size_t(pi)](axis);
    int nlo = delta < 0 ? lo : mid + 1, nhi = delta < 0 ? mid : hi;
    int flo = delta < 0 ? mid + 1 : lo, fhi = delta < 0 ? hi : mid;
    knearest_rec(nlo, nhi, depth + 1, q, k, heap);
    if (int(heap.size()) < k || delta * delta <= heap.front().first)
      knearest_rec(flo, fhi, depth + 1, q, k, heap);
  }

  void radius_rec(int lo, int hi, int depth, const Vec3& q, double r2,
                  std::vector<int>& out) const {
    if (hi - lo <= kLeaf) {
      for (int i = lo; i < hi; ++i) {
        int pi = idx_[std::size_t(i)];
        if ((pts_[std::size_t(pi)] - q).squaredNorm() < r2) out.push_back(pi);
      }
      return;
    }
    int mid = (lo + hi) / 2;
    int pi = idx_[std::size_t(mid)];
    if ((pts_[std::size_t(pi)] - q).squaredNorm() < r2) out.push_back(pi);
    int axis = axes_[std::size_t(mid)];
    double delta = q(axis) - pts_[std::size_t(pi)](axis);
    int nlo = delta < 0 ? lo : mid + 1, nhi = delta < 0 ? mid : hi;
    int flo = delta < 0 ? mid + 1 : lo, fhi = delta < 0 ? hi : mid;
    radius_rec(nlo, nhi, depth + 1, q, r2, out);
    if (delta * delta < r2) radius_rec(flo, fhi, depth + 1, q, r2, out);
  }

  static constexpr int kLeaf = 8;
  std::vector<Vec3> pts_;
  std::vector<int> idx_;
  std::vector<int> axes_;
};

}  // namespace artic
