#include "geoatt/so3.hpp"

#include <cmath>
#include <string>

#include "geoatt/errors.hpp"

namespace geoatt {

namespace {

double one_plus_trace_checked(const RotationMatrix& r, double tol,
                              const char* where) {
  const double s = one_plus_trace(r);
  if (s <= tol) {
    throw AntipodalSingularity(std::string(where) +
                               ": tr[R] too close to -1 (1 + tr = " +
                               std::to_string(s) + ")");
  }
  return s;
}

double abs_eta_checked(const UnitQuaternion& q, double tol,
                       const char* where) {
  const double a = std::abs(q.eta());
  if (a <= tol) {
    throw AntipodalSingularity(std::string(where) + ": |eta| too small");
  }
  return a;
}

// First nonzero component positive.
Vec3 canonical_sign(const Vec3& v) {
  for (int i = 0; i < 3; ++i) {
    if (v[i] != 0.0) {
      return v[i] > 0.0 ? v : Vec3(-v);
    }
  }
  return v;
}

}  // namespace

RotationMatrix::RotationMatrix(const Mat3& m) : m_(m) {
  if (!m.allFinite()) {
    throw NotOrthonormal("rotation matrix has non-finite entries");
  }
  const double ortho =
      (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = m.determinant();
  if (ortho > kOrthonormalTolerance ||
      std::abs(det - 1.0) > kOrthonormalTolerance) {
    throw NotOrthonormal("matrix is not in SO(3): ||R^T R - I|| = " +
                         std::to_string(ortho) +
                         ", det = " + std::to_string(det));
  }
}

RotationMatrix RotationMatrix::renormalize(const Mat3& m) {
  Vec3 c0 = m.col(0).normalized();
  Vec3 c1 = m.col(1) - c0.dot(m.col(1)) * c0;
  c1.normalize();
  Mat3 out;
  out.col(0) = c0;
  out.col(1) = c1;
  out.col(2) = c0.cross(c1);
  return unchecked(out);
}

UnitQuaternion::UnitQuaternion(double eta, const Vec3& eps)
    : eta_(eta), eps_(eps) {
  const double n2 = eta * eta + eps.squaredNorm();
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > 1e-12) {
    throw NotUnitNorm("quaternion norm^2 = " + std::to_string(n2));
  }
}

UnitQuaternion UnitQuaternion::normalized(double eta, const Vec3& eps) {
  const double n = std::sqrt(eta * eta + eps.squaredNorm());
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw NotUnitNorm("cannot normalize a zero or non-finite quaternion");
  }
  return raw(eta / n, eps / n);
}

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) {
  const double asym = (m + m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-9)) {
    throw NotSkewSymmetric("vee: ||m + m^T||_inf = " + std::to_string(asym));
  }
  return {m(2, 1), m(0, 2), m(1, 0)};
}

Vec3 skew_vee(const Mat3& m) {
  return {m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)};
}

RotationMatrix rodrigues(const AxisAngle& aa) {
  const Mat3 k = hat(aa.axis);
  const Mat3 r = Mat3::Identity() + std::sin(aa.angle) * k +
                 (1.0 - std::cos(aa.angle)) * (k * k);
  return RotationMatrix::unchecked(r);
}

RotationMatrix exp_map(const Vec3& v) {
  const double angle = v.norm();
  if (angle == 0.0) {
    return RotationMatrix::identity();
  }
  return rodrigues({v / angle, angle});
}

double one_plus_trace(const RotationMatrix& r) {
  const double tr = r.trace();
  if (tr >= 0.0) {
    return 1.0 + tr;
  }
  const double eta = quat_from_rotation(r).eta();
  return 4.0 * eta * eta;
}

double chordal(const RotationMatrix& r) { return 3.0 - r.trace(); }

Vec3 psi(const RotationMatrix& r) { return 0.5 * skew_vee(r.matrix()); }

Vec3 e_r(const RotationMatrix& r, double tol) {
  const double s = one_plus_trace_checked(r, tol, "e_r");
  return skew_vee(r.matrix()) / std::sqrt(s);
}

Mat3 big_e_c(const RotationMatrix& r) {
  return 0.5 * (r.trace() * Mat3::Identity() - r.matrix().transpose());
}

Mat3 big_e(const RotationMatrix& r, double tol) {
  const double s = one_plus_trace_checked(r, tol, "big_e");
  const Vec3 e = skew_vee(r.matrix()) / std::sqrt(s);
  return (2.0 * big_e_c(r) + 0.5 * e * e.transpose()) / std::sqrt(s);
}

Mat3 big_e_inv(const RotationMatrix& r, double tol) {
  const double s = one_plus_trace_checked(r, tol, "big_e_inv");
  const Vec3 e = skew_vee(r.matrix()) / std::sqrt(s);
  return (2.0 * big_e_c(r).transpose() + e * e.transpose()) / std::sqrt(s);
}

UnitQuaternion quat_from_rotation(const RotationMatrix& rot) {
  const Mat3& r = rot.matrix();
  const double tr = r.trace();
  double eta = 0.0;
  Vec3 eps;
  if (tr >= r(0, 0) && tr >= r(1, 1) && tr >= r(2, 2)) {
    eta = 0.5 * std::sqrt(std::max(0.0, 1.0 + tr));
    const double f = 0.25 / eta;
    eps << (r(2, 1) - r(1, 2)) * f, (r(0, 2) - r(2, 0)) * f,
        (r(1, 0) - r(0, 1)) * f;
  } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
    const double x =
        0.5 * std::sqrt(std::max(0.0, 1.0 + r(0, 0) - r(1, 1) - r(2, 2)));
    const double f = 0.25 / x;
    eta = (r(2, 1) - r(1, 2)) * f;
    eps << x, (r(0, 1) + r(1, 0)) * f, (r(0, 2) + r(2, 0)) * f;
  } else if (r(1, 1) >= r(2, 2)) {
    const double y =
        0.5 * std::sqrt(std::max(0.0, 1.0 - r(0, 0) + r(1, 1) - r(2, 2)));
    const double f = 0.25 / y;
    eta = (r(0, 2) - r(2, 0)) * f;
    eps << (r(0, 1) + r(1, 0)) * f, y, (r(1, 2) + r(2, 1)) * f;
  } else {
    const double z =
        0.5 * std::sqrt(std::max(0.0, 1.0 - r(0, 0) - r(1, 1) + r(2, 2)));
    const double f = 0.25 / z;
    eta = (r(1, 0) - r(0, 1)) * f;
    eps << (r(0, 2) + r(2, 0)) * f, (r(1, 2) + r(2, 1)) * f, z;
  }
  if (eta < 0.0) {
    eta = -eta;
    eps = -eps;
  } else if (eta == 0.0) {
    eps = canonical_sign(eps);
  }
  return UnitQuaternion::normalized(eta, eps);
}

RotationMatrix rotation_from_quat(const UnitQuaternion& q) {
  const double eta = q.eta();
  const Vec3& eps = q.eps();
  const Mat3 r = (eta * eta - eps.squaredNorm()) * Mat3::Identity() +
                 2.0 * eps * eps.transpose() + 2.0 * eta * hat(eps);
  return RotationMatrix::unchecked(r);
}

Mat3 big_e_quat(const UnitQuaternion& q, double tol) {
  const double a = abs_eta_checked(q, tol, "big_e_quat");
  const double eta = q.eta();
  return (eta * eta * Mat3::Identity() + eta * hat(q.eps())) / a;
}

Mat3 big_e_inv_quat(const UnitQuaternion& q, double tol) {
  const double a = abs_eta_checked(q, tol, "big_e_inv_quat");
  const double eta = q.eta();
  const Vec3& eps = q.eps();
  return (eta * eta * Mat3::Identity() - eta * hat(eps) +
          eps * eps.transpose()) /
         a;
}

double rotation_angle(const RotationMatrix& r) {
  // atan2 keeps full precision near 0 and pi, where acos((tr-1)/2) loses
  // half the significand.
  const double s = 0.5 * skew_vee(r.matrix()).norm();
  const double c = 0.5 * (r.trace() - 1.0);
  return std::atan2(s, c);
}

AxisAngle axis_angle(const RotationMatrix& r) {
  const UnitQuaternion q = quat_from_rotation(r);
  const double n = q.eps().norm();
  if (n == 0.0) {
    return {Vec3::UnitX(), 0.0};
  }
  const double angle = 2.0 * std::atan2(n, q.eta());
  Vec3 axis = q.eps() / n;
  if (q.eta() <= 1e-15) {
    axis = canonical_sign(axis);
  }
  return {axis, angle};
}

RotationMatrix euler_zyx(double yaw, double pitch, double roll) {
  return rodrigues({Vec3::UnitZ(), yaw}) * rodrigues({Vec3::UnitY(), pitch}) *
         rodrigues({Vec3::UnitX(), roll});
}

}  // namespace geoatt
