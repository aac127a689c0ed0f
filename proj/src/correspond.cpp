#include "artic/correspond.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

#include "artic/error.hpp"

namespace artic {

LiftResult lift_matches(const std::vector<Eigen::Vector2d>& pix0,
                        const std::vector<Eigen::Vector2d>& pix1,
                        const Frame& frame0, const Frame& frame1,
                        const std::vector<bool>* outlier_gt) {
  if (pix0.size() != pix1.size())
    throw InvalidInputError("lift_matches: pixel lists differ in length");
  if (outlier_gt && outlier_gt->size() != pix0.size())
    throw InvalidInputError("lift_matches: outlier flags differ in length");
  LiftResult out;
  out.pairs.reserve(pix0.size());
  for (std::size_t i = 0; i < pix0.size(); ++i) {
    double d0 = sample_depth_invz(frame0.depth, pix0[i]);
    double d1 = sample_depth_invz(frame1.depth, pix1[i]);
    if (d0 <= 0.0 || d1 <= 0.0) {
      ++out.dropped;
      continue;
    }
    MatchPair mp;
    mp.p0 = frame0.camera.backproject(pix0[i], d0);
    mp.p1 = frame1.camera.backproject(pix1[i], d1);
    mp.outlier_gt = outlier_gt ? (*outlier_gt)[i] : false;
    out.pairs.push_back(mp);
  }
  return out;
}

LiftResult lift_all(const std::vector<MatchRow>& rows,
                    const std::vector<Frame>& frames0,
                    const std::vector<Frame>& frames1) {
  std::unordered_map<int, const Frame*> by_view0, by_view1;
  for (const Frame& f : frames0) by_view0[f.view] = &f;
  for (const Frame& f : frames1) by_view1[f.view] = &f;
  LiftResult out;
  out.pairs.reserve(rows.size());
  for (const MatchRow& row : rows) {
    auto it0 = by_view0.find(row.view0);
    auto it1 = by_view1.find(row.view1);
    if (it0 == by_view0.end() || it1 == by_view1.end())
      throw InvalidInputError("lift_all: match references an unknown view");
    std::vector<bool> flag{row.outlier_gt};
    LiftResult one = lift_matches({row.pix0}, {row.pix1}, *it0->second, *it1->second, &flag);
    out.dropped += one.dropped;
    for (auto& p : one.pairs) out.pairs.push_back(p);
  }
  return out;
}

namespace {

struct Cell {
  std::int64_t x, y, z;
};

Cell cell_of(const Vec3& p, double r) {
  return Cell{std::int64_t(std::floor(p.x() / r)), std::int64_t(std::floor(p.y() / r)),
              std::int64_t(std::floor(p.z() / r))};
}

std::uint64_t cell_key(const Cell& c) {
  auto m = [](std::int64_t v) { return std::uint64_t(v) & 0x1fffff; };
  return (m(c.x) << 42) | (m(c.y) << 21) | m(c.z);
}

}  // namespace

std::vector<char> locality_filter(const std::vector<MatchPair>& pairs,
                                  double r, double r_prime) {
  if (!(r > 0.0) || !(r_prime > 0.0))
    throw InvalidInputError("locality_filter: radii must be positive");
  std::vector<char> valid(pairs.size(), 1);
  if (pairs.empty()) return valid;

  std::unordered_map<std::uint64_t, std::vector<int>> grid;
  grid.reserve(pairs.size() * 2);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    grid[cell_key(cell_of(pairs[i].p0, r))].push_back(int(i));

  std::vector<int> nbr;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Vec3& p = pairs[i].p0;
    Cell c = cell_of(p, r);
    nbr.clear();
    // 27 neighbor cells cover every point within distance r.
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = grid.find(cell_key(Cell{c.x + dx, c.y + dy, c.z + dz}));
          if (it == grid.end()) continue;
          for (int j : it->second)
            if ((pairs[std::size_t(j)].p0 - p).norm() < r) nbr.push_back(j);
        }
    // Fixed summation order keeps the filter bit-deterministic.
    std::sort(nbr.begin(), nbr.end());
    Vec3 sum = Vec3::Zero();
    for (int j : nbr) sum += pairs[std::size_t(j)].p1;
    Vec3 mean = sum / double(nbr.size());  // the point itself is always a member
    valid[i] = ((pairs[i].p1 - mean).norm() < r_prime) ? 1 : 0;
  }
  return valid;
}

}  // namespace artic
