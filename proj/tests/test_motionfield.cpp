#include <doctest.h>

#include "artic/motion_field.hpp"
#include "artic/rng.hpp"

using namespace artic;

TEST_CASE("softmax is a probability vector and handles large logits") {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    int n = 2 + rng.index(6);
    Eigen::VectorXd l(n);
    for (int j = 0; j < n; ++j) l(j) = rng.uniform(-100.0, 100.0);
    Eigen::VectorXd p = softmax(l);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    // Shift invariance.
    Eigen::VectorXd p2 = softmax((l.array() + 37.5).matrix());
    CHECK((p - p2).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("softmax temperature sharpens and flattens") {
  Eigen::VectorXd l(3);
  l << 1.0, 0.0, -1.0;
  Eigen::VectorXd sharp = softmax(l, 0.1);
  Eigen::VectorXd flat = softmax(l, 10.0);
  CHECK(sharp(0) > 0.99);
  CHECK(std::abs(flat(0) - 1.0 / 3.0) < 0.05);
  CHECK_THROWS_AS(softmax(l, 0.0), InvalidInputError);
}

TEST_CASE("init_logits reproduces the two-part initial weights") {
  Eigen::VectorXd w = softmax(init_logits(0, 2));
  // softmax(1, 0) = (e, 1) / (e + 1)
  CHECK(w(0) == doctest::Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(w(1) == doctest::Approx(0.2689414213699951).epsilon(1e-12));
  CHECK_THROWS_AS(init_logits(2, 2), InvalidInputError);
  CHECK_THROWS_AS(init_logits(-1, 2), InvalidInputError);
}

TEST_CASE("soft_blend of identity and a half-turn is the rank-deficient average") {
  MotionField f = MotionField::identity(2);
  f.bases[1].rot = Quat::from_axis_angle(Vec3(0, 0, 1), kPi);
  f.bases[1].trans = Vec3(0.2, 0, 0);
  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  BlendedMotion b = soft_blend(f, w);
  Mat3 expected = Mat3::Zero();
  expected(2, 2) = 1.0;
  CHECK((b.linear - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((b.trans - Vec3(0.1, 0, 0)).norm() < 1e-12);
}

TEST_CASE("one-hot weights reduce soft_blend to the selected basis") {
  Rng rng(22);
  MotionField f = MotionField::identity(4);
  for (int j = 1; j < 4; ++j) {
    f.bases[j].rot = Quat::from_axis_angle(
        Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized(),
        rng.uniform(-2.0, 2.0));
    f.bases[j].trans = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  }
  for (int j = 0; j < 4; ++j) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(4);
    w(j) = 1.0;
    BlendedMotion b = soft_blend(f, w);
    CHECK((b.linear - f.bases[j].rot.to_matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((b.trans - f.bases[j].trans).norm() < 1e-12);
    // And near-one-hot softmax weights converge to the same thing.
    Eigen::VectorXd l = init_logits(j, 4, 60.0);
    BlendedMotion bs = soft_blend(f, softmax(l));
    CHECK((bs.linear - b.linear).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("blend weight count must match basis count") {
  MotionField f = MotionField::identity(3);
  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  CHECK_THROWS_AS(soft_blend(f, w), InvalidInputError);
}

TEST_CASE("hard_assign breaks ties toward the lowest index") {
  Eigen::VectorXd l(2);
  l << 1.0, 1.0;
  CHECK(hard_assign(l) == 0);
  Eigen::VectorXd m(4);
  m << 0.0, 2.0, 2.0, -1.0;
  CHECK(hard_assign(m) == 1);
  // Shift invariance.
  CHECK(hard_assign((m.array() + 11.0).matrix()) == 1);
}

TEST_CASE("detect_prismatic locks small rotations and leaves the rest") {
  MotionField f = MotionField::identity(4);
  f.bases[1].rot = Quat::from_axis_angle(Vec3(0, 1, 0), deg_to_rad(25.0));
  f.bases[2].rot = Quat::from_axis_angle(Vec3(1, 0, 0), deg_to_rad(3.0));
  f.bases[2].trans = Vec3(0, 0, 0.1);
  f.bases[3].rot = Quat::from_axis_angle(Vec3(0, 0, 1), deg_to_rad(14.9));
  auto locked = detect_prismatic(f, 15.0);
  CHECK(locked == std::vector<int>{2, 3});
  CHECK_FALSE(f.bases[1].prismatic_locked);
  CHECK(f.bases[2].prismatic_locked);
  CHECK(f.bases[2].rot.coeffs() == Vec4(1, 0, 0, 0));
  CHECK((f.bases[2].trans - Vec3(0, 0, 0.1)).norm() == 0.0);
  CHECK(f.bases[3].prismatic_locked);
  // Idempotent: a second call locks nothing new.
  CHECK(detect_prismatic(f, 15.0).empty());
}
