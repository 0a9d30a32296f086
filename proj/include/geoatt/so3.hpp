#pragma once

// Rotation-group algebra: hat/vee, Rodrigues, the chordal metric, the two
// chordal error vectors (psi, e_R) and the matrices E_c, E, E^-1 in both
// rotation-matrix and unit-quaternion form.

#include <Eigen/Dense>

namespace geoatt {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Default distance from the antipodal set tr[R] = -1 (or eta = 0) below
/// which singular maps refuse to evaluate.
inline constexpr double kAntipodalTolerance = 1e-9;

/// Tolerance on ||R^T R - I||_inf and |det R - 1| for checked construction.
inline constexpr double kOrthonormalTolerance = 1e-9;

/// Proper orthogonal 3x3 matrix.
class RotationMatrix {
 public:
  RotationMatrix() : m_(Mat3::Identity()) {}

  /// Checked construction; throws NotOrthonormal.
  explicit RotationMatrix(const Mat3& m);

  static RotationMatrix identity() { return {}; }

  /// Wraps a matrix that is orthonormal by construction (products of
  /// rotations, closed-form maps). No check.
  static RotationMatrix unchecked(const Mat3& m) {
    RotationMatrix r;
    r.m_ = m;
    return r;
  }

  /// Gram-Schmidt re-orthonormalization of a drifted matrix.
  static RotationMatrix renormalize(const Mat3& m);

  const Mat3& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }
  RotationMatrix transpose() const { return unchecked(m_.transpose()); }

  friend RotationMatrix operator*(const RotationMatrix& a,
                                  const RotationMatrix& b) {
    return unchecked(a.m_ * b.m_);
  }
  friend Vec3 operator*(const RotationMatrix& a, const Vec3& v) {
    return a.m_ * v;
  }

 private:
  Mat3 m_;
};

struct AxisAngle {
  Vec3 axis = Vec3::UnitX();
  double angle = 0.0;
};

/// (eta, eps) on the unit 3-sphere, Hamilton product convention.
class UnitQuaternion {
 public:
  UnitQuaternion() : eta_(1.0), eps_(Vec3::Zero()) {}

  /// Checked construction: |eta^2 + |eps|^2 - 1| <= 1e-12, else NotUnitNorm.
  UnitQuaternion(double eta, const Vec3& eps);

  /// Divides by the norm; throws NotUnitNorm on a zero quaternion.
  static UnitQuaternion normalized(double eta, const Vec3& eps);
  static UnitQuaternion normalized(const Eigen::Vector4d& coeffs) {
    return normalized(coeffs[0], coeffs.tail<3>());
  }

  double eta() const { return eta_; }
  const Vec3& eps() const { return eps_; }

  /// (eta, eps_x, eps_y, eps_z)
  Eigen::Vector4d coeffs() const {
    return {eta_, eps_.x(), eps_.y(), eps_.z()};
  }

  UnitQuaternion conjugate() const { return raw(eta_, -eps_); }
  UnitQuaternion operator-() const { return raw(-eta_, -eps_); }

  friend UnitQuaternion operator*(const UnitQuaternion& p,
                                  const UnitQuaternion& q) {
    return raw(p.eta_ * q.eta_ - p.eps_.dot(q.eps_),
               p.eta_ * q.eps_ + q.eta_ * p.eps_ + p.eps_.cross(q.eps_));
  }

 private:
  static UnitQuaternion raw(double eta, const Vec3& eps) {
    UnitQuaternion q;
    q.eta_ = eta;
    q.eps_ = eps;
    return q;
  }

  double eta_;
  Vec3 eps_;
};

Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws NotSkewSymmetric if ||m + m^T||_inf > 1e-9.
Vec3 vee(const Mat3& m);

/// (R - R^T)^vee without the skew-symmetry check.
Vec3 skew_vee(const Mat3& m);

RotationMatrix rodrigues(const AxisAngle& aa);

/// exp(hat(v)), i.e. rodrigues about v/|v| by |v|.
RotationMatrix exp_map(const Vec3& v);

/// 1 + tr[R] = 2 (1 + cos theta). For tr[R] < 0 it is evaluated as 4 eta^2
/// from the quaternion, which keeps full relative precision near the
/// antipodal set where the plain sum cancels.
double one_plus_trace(const RotationMatrix& r);

/// tr[I - R] = 2(1 - cos theta).
double chordal(const RotationMatrix& r);

/// 1/2 (R - R^T)^vee = sin(theta) axis.
Vec3 psi(const RotationMatrix& r);

/// (R - R^T)^vee / sqrt(1 + tr R). Throws AntipodalSingularity.
Vec3 e_r(const RotationMatrix& r, double tol = kAntipodalTolerance);

/// 1/2 (tr[R] I - R^T).
Mat3 big_e_c(const RotationMatrix& r);

/// (2 E_c + 1/2 e_R e_R^T) / sqrt(1 + tr R).
Mat3 big_e(const RotationMatrix& r, double tol = kAntipodalTolerance);

/// (2 E_c^T + e_R e_R^T) / sqrt(1 + tr R).
Mat3 big_e_inv(const RotationMatrix& r, double tol = kAntipodalTolerance);

/// Shepperd extraction with canonical sign eta >= 0.
UnitQuaternion quat_from_rotation(const RotationMatrix& r);
RotationMatrix rotation_from_quat(const UnitQuaternion& q);

/// (eta^2 I + eta eps^x) / |eta|.
Mat3 big_e_quat(const UnitQuaternion& q, double tol = kAntipodalTolerance);

/// (eta^2 I - eta eps^x + eps eps^T) / |eta|.
Mat3 big_e_inv_quat(const UnitQuaternion& q,
                    double tol = kAntipodalTolerance);

/// Rotation angle in [0, pi].
double rotation_angle(const RotationMatrix& r);

/// Canonical axis-angle: theta in [0, pi]; at theta = pi the axis has its
/// first nonzero component positive; at theta = 0 the axis is e1.
AxisAngle axis_angle(const RotationMatrix& r);

/// Intrinsic Z-Y-X (yaw, pitch, roll) rotation Rz(yaw) Ry(pitch) Rx(roll).
RotationMatrix euler_zyx(double yaw, double pitch, double roll);

}  // namespace geoatt
