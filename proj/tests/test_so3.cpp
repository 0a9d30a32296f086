#include <gtest/gtest.h>

#include "geoatt/errors.hpp"
#include "geoatt/so3.hpp"
#include "support.hpp"

namespace geoatt {
namespace {

using test::aa_matrix;
using test::aa_rotation;
using test::kPi;
using test::max_abs;

const Vec3 e1 = Vec3::UnitX();
const Vec3 e2 = Vec3::UnitY();
const Vec3 e3 = Vec3::UnitZ();

TEST(Hat, ZeroAndBasis) {
  EXPECT_EQ(hat(Vec3::Zero()), Mat3::Zero());
  EXPECT_EQ(hat(e1) * e2, e3);
}

TEST(Hat, MatchesComponentCrossProduct) {
  test::Rand r;
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = r.vec();
    const Vec3 w = r.vec();
    const Vec3 cross(v.y() * w.z() - v.z() * w.y(), v.z() * w.x() - v.x() * w.z(),
                     v.x() * w.y() - v.y() * w.x());
    EXPECT_LT((hat(v) * w - cross).norm(), 1e-14);
    EXPECT_EQ(hat(v) + hat(v).transpose(), Mat3::Zero());
  }
}

TEST(Vee, InvertsHat) {
  EXPECT_EQ(vee(hat(Vec3(1, 2, 3))), Vec3(1, 2, 3));
  EXPECT_EQ(vee(Mat3::Zero()), Vec3::Zero());
  test::Rand r;
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = r.vec();
    EXPECT_EQ(vee(hat(v)), v);
  }
}

TEST(Vee, RejectsSymmetricInput) {
  EXPECT_THROW(vee(Mat3::Identity()), NotSkewSymmetric);
}

TEST(Rodrigues, QuarterTurnAboutZ) {
  Mat3 expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_LT(max_abs(rodrigues({e3, kPi / 2}).matrix() - expected), 1e-15);
}

TEST(Rodrigues, ZeroAndFullTurn) {
  EXPECT_EQ(rodrigues({e3, 0.0}).matrix(), Mat3::Identity());
  test::Rand r;
  for (int i = 0; i < 20; ++i) {
    EXPECT_LT(max_abs(rodrigues({r.unit(), 2 * kPi}).matrix() -
                      Mat3::Identity()),
              1e-12);
  }
}

TEST(Rodrigues, MatchesAngleAxisAndTrace) {
  test::Rand r;
  for (int i = 0; i < 200; ++i) {
    const Vec3 axis = r.unit();
    const double t = r.uniform(-4.0, 4.0);
    const RotationMatrix rot = rodrigues({axis, t});
    EXPECT_LT(max_abs(rot.matrix() - aa_matrix(axis, t)), 1e-14);
    EXPECT_NEAR(rot.trace(), 1.0 + 2.0 * std::cos(t), 1e-14);
    EXPECT_NO_THROW(RotationMatrix{rot.matrix()});
  }
}

TEST(RotationMatrix, CheckedConstruction) {
  EXPECT_THROW(RotationMatrix{2.0 * Mat3::Identity()}, NotOrthonormal);
  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1.0;
  EXPECT_THROW(RotationMatrix{reflection}, NotOrthonormal);
  EXPECT_NO_THROW(RotationMatrix{aa_matrix(Vec3(1, 2, 3), 0.7)});
}

TEST(RotationMatrix, RenormalizeRepairsDrift) {
  test::Rand r;
  const Mat3 drifted = aa_matrix(r.unit(), 1.1) + 1e-4 * r.mat();
  const RotationMatrix fixed = RotationMatrix::renormalize(drifted);
  EXPECT_LT(max_abs(fixed.matrix().transpose() * fixed.matrix() -
                    Mat3::Identity()),
            1e-14);
  EXPECT_NEAR(fixed.matrix().determinant(), 1.0, 1e-14);
  EXPECT_LT(max_abs(fixed.matrix() - drifted), 1e-3);
}

TEST(Chordal, Examples) {
  EXPECT_DOUBLE_EQ(chordal(RotationMatrix::identity()), 0.0);
  EXPECT_NEAR(chordal(rodrigues({e3, kPi})), 4.0, 1e-15);
  EXPECT_NEAR(chordal(rodrigues({e1, kPi / 2})), 2.0, 1e-15);
}

TEST(Psi, Examples) {
  EXPECT_EQ(psi(RotationMatrix::identity()), Vec3::Zero());
  EXPECT_LT((psi(rodrigues({e3, kPi / 2})) - e3).norm(), 1e-15);
  EXPECT_LT(psi(rodrigues({e3, kPi})).norm(), 1e-15);
}

TEST(Psi, IsSineTimesCanonicalAxis) {
  test::Rand r;
  for (int i = 0; i < 500; ++i) {
    const RotationMatrix rot = aa_rotation(r.unit(), r.uniform(0.0, kPi));
    const AxisAngle aa = axis_angle(rot);
    EXPECT_LT((psi(rot) - std::sin(aa.angle) * aa.axis).norm(), 1e-10);
  }
}

TEST(ErrorVector, Examples) {
  EXPECT_EQ(e_r(RotationMatrix::identity()), Vec3::Zero());
  EXPECT_LT((e_r(rodrigues({e3, kPi / 2})) - Vec3(0, 0, std::sqrt(2.0))).norm(),
            1e-15);
  EXPECT_THROW(e_r(rodrigues({e1, kPi})), AntipodalSingularity);
}

TEST(ErrorVector, SquaredNormIsChordal) {
  test::Rand r;
  for (int i = 0; i < 1000; ++i) {
    const RotationMatrix rot = aa_rotation(r.unit(), r.uniform(0.0, 3.1));
    EXPECT_NEAR(e_r(rot).squaredNorm(), chordal(rot), 1e-12);
  }
}

TEST(BigEc, Examples) {
  EXPECT_EQ(big_e_c(RotationMatrix::identity()), Mat3::Identity());
  const RotationMatrix r = rodrigues({e3, kPi / 2});
  EXPECT_LT(max_abs(big_e_c(r) - 0.5 * (Mat3::Identity() -
                                        r.matrix().transpose())),
            1e-15);
}

TEST(BigEc, SkewPartIsHalfSkewOfR) {
  test::Rand r;
  for (int i = 0; i < 100; ++i) {
    const RotationMatrix rot = aa_rotation(r.unit(), r.uniform(0.0, kPi));
    const Mat3 ec = big_e_c(rot);
    EXPECT_LT(max_abs(ec - ec.transpose() -
                      0.5 * (rot.matrix() - rot.matrix().transpose())),
              1e-15);
  }
}

TEST(BigE, Examples) {
  EXPECT_LT(max_abs(big_e(RotationMatrix::identity()) - Mat3::Identity()),
            1e-15);
  EXPECT_LT(max_abs(big_e(rodrigues({e3, kPi / 2})) -
                    (Mat3::Identity() + hat(e3)) / std::sqrt(2.0)),
            1e-15);
  EXPECT_NEAR(big_e(rodrigues({e1, kPi / 2})).determinant(), std::sqrt(0.5),
              1e-15);
  EXPECT_THROW(big_e(rodrigues({e2, kPi})), AntipodalSingularity);
}

TEST(BigE, MatchesAxisAngleForms) {
  test::Rand r;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 axis = r.unit();
    const double t = r.uniform(0.0, 3.0);
    const RotationMatrix rot = aa_rotation(axis, t);
    EXPECT_LT(max_abs(big_e(rot) - test::e_axis_angle(axis, t)), 1e-12);
    EXPECT_LT(max_abs(big_e_inv(rot) - test::e_inv_axis_angle(axis, t)),
              1e-12);
  }
}

TEST(BigE, InverseDeterminantAndSpectrum) {
  test::Rand r;
  for (int i = 0; i < 1000; ++i) {
    const double t = r.uniform(0.0, 3.0);
    const RotationMatrix rot = aa_rotation(r.unit(), t);
    const Mat3 e = big_e(rot);
    EXPECT_LT(max_abs(e * big_e_inv(rot) - Mat3::Identity()), 1e-10);
    EXPECT_NEAR(e.determinant(), std::sqrt((1.0 + std::cos(t)) / 2.0), 1e-10);
    Eigen::SelfAdjointEigenSolver<Mat3> eig(e * e.transpose());
    EXPECT_NEAR(eig.eigenvalues()[0], (1.0 + std::cos(t)) / 2.0, 1e-8);
    EXPECT_NEAR(eig.eigenvalues()[1], 1.0, 1e-8);
    EXPECT_NEAR(eig.eigenvalues()[2], 1.0, 1e-8);
  }
}

TEST(BigE, InverseOfIdentityIsIdentity) {
  EXPECT_LT(max_abs(big_e_inv(RotationMatrix::identity()) - Mat3::Identity()),
            1e-15);
}

TEST(AppendixIdentity, CrossProductSandwich) {
  test::Rand r;
  for (int i = 0; i < 1000; ++i) {
    const Mat3 a = r.mat();
    const Vec3 x = r.vec();
    EXPECT_LT(max_abs(hat(x) * a + a.transpose() * hat(x) -
                      hat((a.trace() * Mat3::Identity() - a) * x)),
              1e-12);
  }
}

TEST(OnePlusTrace, AccurateNearAntipode) {
  test::Rand r;
  for (double gap : {1e-1, 1e-3, 1e-5}) {
    const double t = kPi - gap;
    const RotationMatrix rot = aa_rotation(r.unit(), t);
    const double expected = 4.0 * std::pow(std::cos(t / 2.0), 2);
    EXPECT_NEAR(one_plus_trace(rot) / expected, 1.0, 1e-9) << gap;
  }
  EXPECT_DOUBLE_EQ(one_plus_trace(RotationMatrix::identity()), 4.0);
}

TEST(Quaternion, CheckedConstruction) {
  EXPECT_THROW(UnitQuaternion(1.0, Vec3(0.1, 0, 0)), NotUnitNorm);
  EXPECT_THROW(UnitQuaternion::normalized(0.0, Vec3::Zero()), NotUnitNorm);
  const UnitQuaternion q = UnitQuaternion::normalized(2.0, Vec3(0, 0, 2));
  EXPECT_NEAR(q.eta(), std::sqrt(0.5), 1e-15);
}

TEST(Quaternion, ExtractionExamples) {
  const UnitQuaternion id = quat_from_rotation(RotationMatrix::identity());
  EXPECT_DOUBLE_EQ(id.eta(), 1.0);
  EXPECT_EQ(id.eps(), Vec3::Zero());

  const UnitQuaternion q = quat_from_rotation(rodrigues({e3, kPi / 2}));
  EXPECT_NEAR(q.eta(), std::cos(kPi / 4), 1e-15);
  EXPECT_LT((q.eps() - Vec3(0, 0, std::sin(kPi / 4))).norm(), 1e-15);

  const UnitQuaternion half = quat_from_rotation(rodrigues({e1, kPi}));
  EXPECT_NEAR(half.eta(), 0.0, 1e-15);
  EXPECT_LT((half.eps() - e1).norm(), 1e-15);
  // At eta = 0 both signs describe the same rotation.
  const UnitQuaternion flipped = quat_from_rotation(rodrigues({-e2, kPi}));
  EXPECT_NEAR(std::abs(flipped.eps().y()), 1.0, 1e-15);
  EXPECT_LT(max_abs(rotation_from_quat(flipped).matrix() -
                    rodrigues({e2, kPi}).matrix()),
            1e-15);
}

TEST(Quaternion, AgreesWithEigenAndRoundTrips) {
  test::Rand r;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 axis = r.unit();
    const double t = r.uniform(0.0, kPi);
    const Mat3 m = aa_matrix(axis, t);
    const UnitQuaternion q = quat_from_rotation(RotationMatrix::unchecked(m));
    EXPECT_GE(q.eta(), 0.0);
    const Eigen::Quaterniond ref(Eigen::AngleAxisd(t, axis));
    const double sign = ref.w() < 0 ? -1.0 : 1.0;
    EXPECT_NEAR(q.eta(), sign * ref.w(), 1e-12);
    EXPECT_LT((q.eps() - sign * ref.vec()).norm(), 1e-12);
    EXPECT_LT(max_abs(rotation_from_quat(q).matrix() - m), 1e-10);
    EXPECT_LT(max_abs(rotation_from_quat(-q).matrix() - m), 1e-10);
  }
}

TEST(Quaternion, HamiltonProductComposesRotations) {
  test::Rand r;
  for (int i = 0; i < 100; ++i) {
    const Mat3 a = aa_matrix(r.unit(), r.uniform(0, kPi));
    const Mat3 b = aa_matrix(r.unit(), r.uniform(0, kPi));
    const UnitQuaternion qa = quat_from_rotation(RotationMatrix::unchecked(a));
    const UnitQuaternion qb = quat_from_rotation(RotationMatrix::unchecked(b));
    EXPECT_LT(max_abs(rotation_from_quat(qa * qb).matrix() - a * b), 1e-12);
    EXPECT_LT(max_abs(rotation_from_quat(qa.conjugate()).matrix() -
                      a.transpose()),
              1e-12);
  }
}

TEST(QuaternionE, Examples) {
  EXPECT_EQ(big_e_quat(UnitQuaternion()), Mat3::Identity());
  const UnitQuaternion q = quat_from_rotation(rodrigues({e3, kPi / 2}));
  EXPECT_LT(max_abs(big_e_quat(q) - (Mat3::Identity() + hat(e3)) / std::sqrt(2.0)),
            1e-12);
  EXPECT_THROW(big_e_quat(UnitQuaternion(0.0, e1)), AntipodalSingularity);
  EXPECT_THROW(big_e_inv_quat(UnitQuaternion(0.0, e1)), AntipodalSingularity);
}

TEST(QuaternionE, AgreesWithMatrixForms) {
  test::Rand r;
  for (int i = 0; i < 1000; ++i) {
    const double t = r.uniform(0.0, 3.0);
    const Vec3 axis = r.unit();
    const double sign = i % 2 ? -1.0 : 1.0;
    const UnitQuaternion q(sign * std::cos(t / 2), sign * std::sin(t / 2) * axis);
    const RotationMatrix rot = rotation_from_quat(q);
    EXPECT_LT(max_abs(big_e_quat(q) - big_e(rot)), 1e-10);
    EXPECT_LT(max_abs(big_e_inv_quat(q) - big_e_inv(rot)), 1e-10);
    EXPECT_LT(max_abs(big_e_quat(q) * big_e_inv_quat(q) - Mat3::Identity()),
              1e-10);
  }
}

TEST(RotationAngle, Examples) {
  EXPECT_DOUBLE_EQ(rotation_angle(RotationMatrix::identity()), 0.0);
  EXPECT_NEAR(rotation_angle(rodrigues({e2, 1.3})), 1.3, 1e-10);
  EXPECT_NEAR(rotation_angle(rodrigues({e2, 2 * kPi - 1.3})), 1.3, 1e-10);
  EXPECT_NEAR(rotation_angle(rodrigues({e2, kPi})), kPi, 1e-10);
}

TEST(RotationAngle, KeepsPrecisionForTinyAngles) {
  EXPECT_NEAR(rotation_angle(rodrigues({e1, 1e-9})), 1e-9, 1e-20);
}

TEST(AxisAngle, Canonical) {
  const AxisAngle zero = axis_angle(RotationMatrix::identity());
  EXPECT_EQ(zero.angle, 0.0);
  EXPECT_EQ(zero.axis, e1);
  const AxisAngle half = axis_angle(rodrigues({-e3, kPi}));
  EXPECT_NEAR(half.angle, kPi, 1e-12);
  EXPECT_LT((half.axis - e3).norm(), 1e-12);
  test::Rand r;
  for (int i = 0; i < 200; ++i) {
    const Vec3 axis = r.unit();
    const double t = r.uniform(0.01, kPi - 0.01);
    const AxisAngle aa = axis_angle(aa_rotation(axis, t));
    EXPECT_NEAR(aa.angle, t, 1e-10);
    EXPECT_LT((aa.axis - axis).norm(), 1e-9);
    EXPECT_NEAR(aa.axis.norm(), 1.0, 1e-12);
  }
}

TEST(Euler, IntrinsicZyx) {
  test::Rand r;
  for (int i = 0; i < 50; ++i) {
    const double y = r.uniform(-kPi, kPi);
    const double p = r.uniform(-kPi / 2, kPi / 2);
    const double ro = r.uniform(-kPi, kPi);
    const Mat3 expected = aa_matrix(e3, y) * aa_matrix(e2, p) * aa_matrix(e1, ro);
    EXPECT_LT(max_abs(euler_zyx(y, p, ro).matrix() - expected), 1e-14);
  }
  // The scenario's initial attitude is a 120 degree rotation.
  EXPECT_NEAR(euler_zyx(kPi, -kPi / 2, kPi / 2).trace(), 0.0, 1e-15);
}

TEST(ExpMap, MatchesRodrigues) {
  EXPECT_EQ(exp_map(Vec3::Zero()).matrix(), Mat3::Identity());
  const Vec3 v(0.3, -0.2, 0.9);
  EXPECT_LT(max_abs(exp_map(v).matrix() - aa_matrix(v, v.norm())), 1e-15);
}

}  // namespace
}  // namespace geoatt
