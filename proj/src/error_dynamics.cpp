#include "geoatt/error_dynamics.hpp"

namespace geoatt {

RotationMatrix attitude_error(const RotationMatrix& r_hat,
                              const RotationMatrix& r) {
  return r_hat.transpose() * r;
}

ErrorState error_state(const RotationMatrix& r_tilde, const Vec3& beta_tilde) {
  return {e_r(r_tilde), beta_tilde};
}

DynamicsMatrix f_matrix(const Vec3& omega_m, const Vec3& beta_hat,
                        const RotationMatrix& r_tilde) {
  DynamicsMatrix f = DynamicsMatrix::Zero();
  f.topLeftCorner<3, 3>() = -hat(omega_m - beta_hat);
  f.topRightCorner<3, 3>() = -big_e(r_tilde);
  return f;
}

DynamicsMatrix f0_matrix(const Vec3& omega_m, const Vec3& beta_hat) {
  DynamicsMatrix f = DynamicsMatrix::Zero();
  f.topLeftCorner<3, 3>() = -hat(omega_m - beta_hat);
  f.topRightCorner<3, 3>() = -Mat3::Identity();
  return f;
}

Vec3 e_r_dot_analytic(const RotationMatrix& r_tilde, const Vec3& omega_m,
                      const Vec3& beta_hat, const Vec3& beta_tilde,
                      const Vec3& delta1_shaped, const Vec3& correction) {
  const Vec3 e = e_r(r_tilde);
  const Mat3 big = big_e(r_tilde);
  return e.cross(omega_m - beta_hat) + big * (delta1_shaped - beta_tilde) -
         big.transpose() * correction;
}

Vec6 z_dot_analytic(const ErrorState& z, const DynamicsMatrix& f,
                    const ErrorInputs& in) {
  const Mat3 big = -f.topRightCorner<3, 3>();
  Vec6 out = f * z.stacked();
  out.head<3>() += big * in.delta1_shaped - big.transpose() * in.correction_q;
  out.tail<3>() += in.delta2_shaped - in.correction_b;
  return out;
}

double trace_r_tilde_dot(const RotationMatrix& r_tilde,
                         const Vec3& beta_tilde, const Vec3& delta1_shaped,
                         const Vec3& correction) {
  return skew_vee(r_tilde.matrix())
      .dot(beta_tilde - delta1_shaped + correction);
}

Mat3 r_tilde_rate(const RotationMatrix& r_tilde, const Vec3& omega_m,
                  const Vec3& beta_hat, const Vec3& beta_tilde,
                  const Vec3& delta1_shaped, const Vec3& correction) {
  const Mat3& rt = r_tilde.matrix();
  const Vec3 beta = beta_hat + beta_tilde;
  return rt * hat(omega_m) - hat(omega_m) * rt - rt * hat(beta) +
         hat(beta_hat) * rt + rt * hat(delta1_shaped) - hat(correction) * rt;
}

}  // namespace geoatt
