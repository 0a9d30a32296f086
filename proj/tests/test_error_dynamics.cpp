#include <gtest/gtest.h>

#include "geoatt/error_dynamics.hpp"
#include "geoatt/errors.hpp"
#include "support.hpp"

namespace geoatt {
namespace {

using test::aa_matrix;
using test::aa_rotation;
using test::cross_matrix;
using test::kPi;
using test::max_abs;

const Vec3 e1 = Vec3::UnitX();
const Vec3 e3 = Vec3::UnitZ();

TEST(AttitudeError, Examples) {
  const RotationMatrix r = aa_rotation(Vec3(1, -2, 0.5), 0.8);
  EXPECT_LT(max_abs(attitude_error(r, r).matrix() - Mat3::Identity()), 1e-15);
  EXPECT_EQ(attitude_error(RotationMatrix::identity(), r).matrix(), r.matrix());
}

TEST(ErrorStateTest, Examples) {
  const ErrorState zero = error_state(RotationMatrix::identity(), Vec3::Zero());
  EXPECT_EQ(zero.stacked(), Vec6::Zero());

  const ErrorState z = error_state(rodrigues({e3, kPi / 2}), Vec3(0.1, 0, 0));
  EXPECT_LT((z.e_r - Vec3(0, 0, std::sqrt(2.0))).norm(), 1e-15);
  EXPECT_EQ(z.beta_tilde, Vec3(0.1, 0, 0));

  EXPECT_THROW(error_state(rodrigues({e1, kPi}), Vec3::Zero()),
               AntipodalSingularity);
}

TEST(ErrorStateTest, NormBoundedByChordalRange) {
  test::Rand r;
  for (int i = 0; i < 500; ++i) {
    const ErrorState z =
        error_state(aa_rotation(r.unit(), r.uniform(0, kPi - 1e-6)), r.vec());
    EXPECT_LE(z.e_r.squaredNorm(), 4.0 + 1e-9);
  }
}

TEST(DynamicsMatrixTest, Examples) {
  Mat6 expected = Mat6::Zero();
  expected.topRightCorner<3, 3>() = -Mat3::Identity();
  EXPECT_EQ(f_matrix(Vec3::Zero(), Vec3::Zero(), RotationMatrix::identity()),
            expected);
  EXPECT_EQ(f0_matrix(Vec3::Zero(), Vec3::Zero()), expected);

  const Mat6 f = f_matrix(e1, Vec3::Zero(), RotationMatrix::identity());
  EXPECT_EQ(Mat3(f.topLeftCorner<3, 3>()), Mat3(-cross_matrix(e1)));
  const Mat6 f0 = f0_matrix(e1, Vec3::Zero());
  EXPECT_EQ(Mat3(f0.topLeftCorner<3, 3>()), Mat3(-cross_matrix(e1)));
}

TEST(DynamicsMatrixTest, BottomBlocksZero) {
  test::Rand r;
  for (int i = 0; i < 100; ++i) {
    const Mat6 f = f_matrix(r.vec(), r.vec(), aa_rotation(r.unit(), r.uniform(0, 3)));
    EXPECT_EQ(Mat3(f.bottomRows<3>().leftCols<3>()), Mat3::Zero());
    EXPECT_EQ(Mat3(f.bottomRows<3>().rightCols<3>()), Mat3::Zero());
  }
}

TEST(DynamicsMatrixTest, ContinuousAtIdentity) {
  test::Rand r;
  const Vec3 w = r.vec();
  const Vec3 b = r.vec();
  const Vec3 axis = r.unit();
  double previous = 1.0;
  for (double t : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    const double gap =
        max_abs(f_matrix(w, b, aa_rotation(axis, t)) - f0_matrix(w, b));
    EXPECT_LT(gap, previous);
    EXPECT_LT(gap, t);
    previous = gap;
  }
}

TEST(ErrorRate, Examples) {
  const RotationMatrix id = RotationMatrix::identity();
  EXPECT_EQ(e_r_dot_analytic(id, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                             Vec3::Zero(), Vec3::Zero()),
            Vec3::Zero());
  EXPECT_LT((e_r_dot_analytic(id, Vec3::Zero(), Vec3::Zero(), e1,
                              Vec3::Zero(), Vec3::Zero()) +
             e1)
                .norm(),
            1e-15);
  EXPECT_EQ(z_dot_analytic({}, f0_matrix(Vec3::Zero(), Vec3::Zero()), {}),
            Vec6::Zero());
  EXPECT_EQ(trace_r_tilde_dot(id, Vec3(1, 2, 3), Vec3(0.1, 0, 0), e3), 0.0);
}

// Exact error flow for constant inputs: R~(t) = exp(-t a^x) R~0 exp(t b^x)
// with a = omega_m - beta_hat + c and b = omega_m - beta + B1 delta1.
struct Flow {
  Mat3 r0;
  Vec3 a;
  Vec3 b;
  Mat3 at(double t) const {
    return aa_matrix(a, -t * a.norm()) * r0 * aa_matrix(b, t * b.norm());
  }
};

Vec3 e_r_oracle(const Mat3& m) {
  const Vec3 skew(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  return skew / std::sqrt(1.0 + m.trace());
}

TEST(ErrorRate, MatchesCentralDifferencesOfExactFlow) {
  test::Rand r(7);
  double worst = 0.0;
  double worst_half = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Mat3 r0 = aa_matrix(r.unit(), r.uniform(0.0, 2.5));
    const Vec3 w = r.vec();
    const Vec3 beta_hat = 0.3 * r.vec();
    const Vec3 beta_tilde = 0.3 * r.vec();
    const Vec3 d1 = 0.1 * r.vec();
    const Vec3 c = 0.5 * r.vec();
    const Flow flow{r0, w - beta_hat + c, w - beta_hat - beta_tilde + d1};
    const Vec3 analytic = e_r_dot_analytic(RotationMatrix::unchecked(r0), w,
                                           beta_hat, beta_tilde, d1, c);
    const auto fd = [&](double h) {
      return (e_r_oracle(flow.at(h)) - e_r_oracle(flow.at(-h))) / (2.0 * h);
    };
    worst = std::max(worst, (fd(1e-3) - analytic).norm());
    worst_half = std::max(worst_half, (fd(5e-4) - analytic).norm());
    EXPECT_LT((fd(1e-5) - analytic).norm(), 1e-6);
  }
  EXPECT_NEAR(worst / worst_half, 4.0, 0.8);
}

TEST(ErrorRate, StackedFormMatchesComponents) {
  test::Rand r(8);
  for (int i = 0; i < 200; ++i) {
    const RotationMatrix rt = aa_rotation(r.unit(), r.uniform(0.0, 3.0));
    const Vec3 w = r.vec();
    const Vec3 beta_hat = r.vec();
    const Vec3 beta_tilde = r.vec();
    ErrorInputs in{r.vec(), r.vec(), r.vec(), r.vec()};
    const Vec6 zdot = z_dot_analytic(error_state(rt, beta_tilde),
                                     f_matrix(w, beta_hat, rt), in);
    const Vec3 top = e_r_dot_analytic(rt, w, beta_hat, beta_tilde,
                                      in.delta1_shaped, in.correction_q);
    EXPECT_LT((zdot.head<3>() - top).norm(), 1e-12);
    EXPECT_LT((zdot.tail<3>() - (in.delta2_shaped - in.correction_b)).norm(),
              1e-15);
  }
}

TEST(ErrorRate, HomogeneousPartIsLinear) {
  test::Rand r(9);
  for (int i = 0; i < 50; ++i) {
    const RotationMatrix rt = aa_rotation(r.unit(), r.uniform(0.0, 3.0));
    const Mat6 f = f_matrix(r.vec(), r.vec(), rt);
    const ErrorState z = error_state(rt, r.vec());
    EXPECT_LT((z_dot_analytic(z, f, {}) - f * z.stacked()).norm(), 1e-15);
  }
}

TEST(ErrorRate, AtIdentityReducesToF0) {
  test::Rand r(10);
  const Vec3 w = r.vec();
  const Vec3 bh = r.vec();
  const ErrorState z{r.vec(), r.vec()};
  EXPECT_LT((z_dot_analytic(z, f_matrix(w, bh, RotationMatrix::identity()), {}) -
             f0_matrix(w, bh) * z.stacked())
                .norm(),
            1e-15);
}

TEST(TraceRate, MatchesKinematicsTrace) {
  test::Rand r(11);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 m = aa_matrix(r.unit(), r.uniform(0.0, kPi));
    const RotationMatrix rt = RotationMatrix::unchecked(m);
    const Vec3 w = r.vec();
    const Vec3 bh = r.vec();
    const Vec3 bt = r.vec();
    const Vec3 d1 = r.vec();
    const Vec3 c = r.vec();
    const double fast = trace_r_tilde_dot(rt, bt, d1, c);
    // Independent evaluation of the kinematics with hand-built cross matrices.
    const Mat3 direct = m * cross_matrix(w - bh - bt + d1) -
                        cross_matrix(w - bh + c) * m;
    EXPECT_NEAR(fast, direct.trace(), 1e-10);
    EXPECT_NEAR(fast, r_tilde_rate(rt, w, bh, bt, d1, c).trace(), 1e-10);
    EXPECT_LT(max_abs(r_tilde_rate(rt, w, bh, bt, d1, c) - direct), 1e-12);
  }
}

TEST(TraceRate, MatchesFiniteDifference) {
  test::Rand r(12);
  for (int i = 0; i < 100; ++i) {
    const Mat3 r0 = aa_matrix(r.unit(), r.uniform(0.0, 3.0));
    const Vec3 w = r.vec();
    const Vec3 bh = r.vec();
    const Vec3 bt = r.vec();
    const Vec3 d1 = r.vec();
    const Vec3 c = r.vec();
    const Flow flow{r0, w - bh + c, w - bh - bt + d1};
    const double h = 1e-5;
    const double fd = (flow.at(h).trace() - flow.at(-h).trace()) / (2.0 * h);
    EXPECT_NEAR(trace_r_tilde_dot(RotationMatrix::unchecked(r0), bt, d1, c), fd,
                1e-6);
  }
}

}  // namespace
}  // namespace geoatt
