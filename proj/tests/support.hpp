#pragma once

// Random sampling and closed-form oracles shared by the unit tests. Oracles
// are built on Eigen's AngleAxis/Quaternion types or on hand expansions, not
// on the library code under test.

#include <cmath>
#include <random>

#include <Eigen/Geometry>

#include "geoatt/so3.hpp"

namespace geoatt::test {

inline constexpr double kPi = 3.14159265358979323846;

class Rand {
 public:
  explicit Rand(std::uint64_t seed = 12345) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double normal() { return normal_(rng_); }
  Vec3 vec() { return {normal(), normal(), normal()}; }
  Vec3 unit() {
    Vec3 v = vec();
    while (v.norm() < 1e-6) {
      v = vec();
    }
    return v.normalized();
  }
  Mat3 mat() {
    Mat3 m;
    for (int i = 0; i < 9; ++i) {
      m(i) = normal();
    }
    return m;
  }
  Mat3 spd3() {
    const Mat3 a = mat();
    return a * a.transpose() + 0.1 * Mat3::Identity();
  }
  Mat6 spd6() {
    Mat6 a;
    for (int i = 0; i < 36; ++i) {
      a(i) = normal();
    }
    return a * a.transpose() + 0.1 * Mat6::Identity();
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline Mat3 aa_matrix(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

inline RotationMatrix aa_rotation(const Vec3& axis, double angle) {
  return RotationMatrix::unchecked(aa_matrix(axis, angle));
}

inline Mat3 cross_matrix(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

/// E(R) = [(1 + cos t) I + sin t a^x] / sqrt(2 + 2 cos t).
inline Mat3 e_axis_angle(const Vec3& axis, double t) {
  return ((1.0 + std::cos(t)) * Mat3::Identity() +
          std::sin(t) * cross_matrix(axis)) /
         std::sqrt(2.0 + 2.0 * std::cos(t));
}

/// E^-1(R) = [(1 + cos t) I - sin t a^x + (1 - cos t) a a^T] / sqrt(2 + 2 cos t).
inline Mat3 e_inv_axis_angle(const Vec3& axis, double t) {
  return ((1.0 + std::cos(t)) * Mat3::Identity() -
          std::sin(t) * cross_matrix(axis) +
          (1.0 - std::cos(t)) * axis * axis.transpose()) /
         std::sqrt(2.0 + 2.0 * std::cos(t));
}

inline double max_abs(const Eigen::MatrixXd& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace geoatt::test
