#pragma once

// Estimation-error definitions and the analytic error dynamics used as a
// differential oracle for the filters.

#include "geoatt/so3.hpp"

namespace geoatt {

/// z = (e_R, beta_tilde).
struct ErrorState {
  Vec3 e_r = Vec3::Zero();
  Vec3 beta_tilde = Vec3::Zero();

  Vec6 stacked() const {
    Vec6 z;
    z << e_r, beta_tilde;
    return z;
  }
  static ErrorState from_stacked(const Vec6& z) {
    return {z.head<3>(), z.tail<3>()};
  }
};

/// 6x6 error-system matrix; the bottom row of 3x3 blocks is zero for every
/// instance built here (F, F0, F_Y, F_q).
using DynamicsMatrix = Mat6;

/// Disturbance and correction terms entering the error system, already
/// shaped: B1 delta1, B2 delta2, G_q psi(R_tilde eps), G_b psi(R_tilde eps).
struct ErrorInputs {
  Vec3 delta1_shaped = Vec3::Zero();
  Vec3 delta2_shaped = Vec3::Zero();
  Vec3 correction_q = Vec3::Zero();
  Vec3 correction_b = Vec3::Zero();
};

/// R_tilde = R_hat^T R.
RotationMatrix attitude_error(const RotationMatrix& r_hat,
                              const RotationMatrix& r);

ErrorState error_state(const RotationMatrix& r_tilde, const Vec3& beta_tilde);

/// [[-(omega_m - beta_hat)^x, -E(R_tilde)], [0, 0]].
DynamicsMatrix f_matrix(const Vec3& omega_m, const Vec3& beta_hat,
                        const RotationMatrix& r_tilde);

/// [[-(omega_m - beta_hat)^x, -I], [0, 0]].
DynamicsMatrix f0_matrix(const Vec3& omega_m, const Vec3& beta_hat);

/// Time derivative of e_R(R_tilde):
///   e_R^x (omega_m - beta_hat) + E (B1 delta1 - beta_tilde) - E^T correction
Vec3 e_r_dot_analytic(const RotationMatrix& r_tilde, const Vec3& omega_m,
                      const Vec3& beta_hat, const Vec3& beta_tilde,
                      const Vec3& delta1_shaped, const Vec3& correction);

/// z_dot = F z + [E B1 delta1; B2 delta2] - [E^T G_q psi; G_b psi].
/// E is read back from the top-right block of F, so F must come from
/// f_matrix (or f0_matrix when R_tilde = I).
Vec6 z_dot_analytic(const ErrorState& z, const DynamicsMatrix& f,
                    const ErrorInputs& in);

/// tr[dR_tilde/dt] = (R_tilde - R_tilde^T)^vee . (beta_tilde - B1 delta1 +
/// correction).
double trace_r_tilde_dot(const RotationMatrix& r_tilde,
                         const Vec3& beta_tilde, const Vec3& delta1_shaped,
                         const Vec3& correction);

/// Right-hand side of the attitude error kinematics, term by term:
///   R~ w^x - w^x R~ - R~ beta^x + beta_hat^x R~ + R~ (B1 d1)^x
///   - (G_q psi)^x R~,   with beta = beta_hat + beta_tilde.
Mat3 r_tilde_rate(const RotationMatrix& r_tilde, const Vec3& omega_m,
                  const Vec3& beta_hat, const Vec3& beta_tilde,
                  const Vec3& delta1_shaped, const Vec3& correction);

}  // namespace geoatt
