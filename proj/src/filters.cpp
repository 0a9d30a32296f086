#include "geoatt/filters.hpp"

#include <cmath>
#include <string>

#include "geoatt/errors.hpp"

namespace geoatt {

namespace {

Mat3 inverse_checked(const Mat3& q3) {
  Mat3 inv;
  bool ok = false;
  q3.computeInverseWithCheck(inv, ok, 1e-14);
  if (!ok || !inv.allFinite()) {
    throw SingularTuning("Q3 is not invertible");
  }
  return inv;
}

// P blkdiag(W, 0) P for symmetric P.
Mat6 quadratic_term(const Mat6& p, const Mat3& w) {
  const Eigen::Matrix<double, 6, 3> left = p.leftCols<3>();
  return left * w * left.transpose();
}

Mat6 blkdiag(const Mat3& a, const Mat3& b) {
  Mat6 out = Mat6::Zero();
  out.topLeftCorner<3, 3>() = a;
  out.bottomRightCorner<3, 3>() = b;
  return out;
}

GainPair scaled_gains(const Mat6& p, const Mat3& q3_inv, const Mat3& top,
                      double bottom_scale) {
  return {top * p.topLeftCorner<3, 3>() * q3_inv,
          bottom_scale * p.bottomLeftCorner<3, 3>() * q3_inv};
}

double one_plus_trace_checked(const RotationMatrix& m) {
  const double s = one_plus_trace(m);
  if (s <= kAntipodalTolerance) {
    throw AntipodalSingularity("measured error antipodal to estimate");
  }
  return s;
}

}  // namespace

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::StandardMekf:
      return "standard_mekf";
    case FilterKind::IdealMekf:
      return "ideal_mekf";
    case FilterKind::GeneralizedMekf:
      return "generalized_mekf";
    case FilterKind::QuaternionMekf:
      return "quaternion_mekf";
    case FilterKind::Complementary:
      return "complementary";
  }
  return "unknown";
}

FilterKind filter_kind_from_string(std::string_view name) {
  for (FilterKind k :
       {FilterKind::StandardMekf, FilterKind::IdealMekf,
        FilterKind::GeneralizedMekf, FilterKind::QuaternionMekf,
        FilterKind::Complementary}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  throw ValidationError("unknown filter kind '" + std::string(name) + "'");
}

TuningParams TuningParams::isotropic(double q1, double q2, double q3) {
  return {q1 * Mat3::Identity(), q2 * Mat3::Identity(),
          q3 * Mat3::Identity()};
}

void TuningParams::validate() const {
  const auto check = [](const Mat3& q, const char* name) {
    if (!q.allFinite() || (q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw InvalidTuning(std::string(name) + " is not symmetric");
    }
    Eigen::LLT<Mat3> llt(q);
    if (llt.info() != Eigen::Success) {
      throw InvalidTuning(std::string(name) + " is not positive definite");
    }
  };
  check(q1, "Q1");
  check(q2, "Q2");
  check(q3, "Q3");
}

EstimatorRhs estimator_rhs(const FilterState& state, const Vec3& omega_m,
                           const RotationMatrix& y, const GainPair& gains) {
  const Vec3 innovation = psi(state.r_hat.transpose() * y);
  const Vec3 omega_hat = omega_m - state.beta_hat + gains.g_q * innovation;
  return {state.r_hat.matrix() * hat(omega_hat), gains.g_b * innovation};
}

GainPair gain_standard_mekf(const Mat6& p, const Mat3& q3) {
  return scaled_gains(p, inverse_checked(q3), Mat3::Identity(), 1.0);
}

Mat6 riccati_standard(const Mat6& p, const DynamicsMatrix& f0,
                      const TuningParams& tuning) {
  return f0 * p + p * f0.transpose() + blkdiag(tuning.q1, tuning.q2) -
         quadratic_term(p, inverse_checked(tuning.q3));
}

GainPair gain_ideal(const Mat6& p, const Mat3& q3,
                    const RotationMatrix& r_tilde) {
  const double s = one_plus_trace_checked(r_tilde);
  const Vec3 e = skew_vee(r_tilde.matrix()) / std::sqrt(s);
  const Mat3 top = 0.5 * (r_tilde.trace() * Mat3::Identity() -
                          r_tilde.matrix().transpose() + e * e.transpose());
  return scaled_gains(p, inverse_checked(q3), top, 0.5 * std::sqrt(s));
}

Mat6 riccati_ideal(const Mat6& p, const DynamicsMatrix& f,
                   const RotationMatrix& r_tilde, const TuningParams& tuning) {
  const double s = one_plus_trace_checked(r_tilde);
  const Mat3 big = big_e(r_tilde);
  return f * p + p * f.transpose() +
         blkdiag(big * tuning.q1 * big.transpose(), tuning.q2) -
         0.25 * s * quadratic_term(p, inverse_checked(tuning.q3));
}

GainPair gain_generalized(const Mat6& p, const Mat3& q3,
                          const RotationMatrix& m) {
  // Same closed form as the ideal gain with R_tilde replaced by M.
  return gain_ideal(p, q3, m);
}

Mat3 measured_big_e(const RotationMatrix& m) {
  const double s = one_plus_trace_checked(m);
  return (0.5 * s * Mat3::Identity() + hat(psi(m))) / std::sqrt(s);
}

DynamicsMatrix f_measured(const Vec3& omega_m, const Vec3& beta_hat,
                          const RotationMatrix& m) {
  DynamicsMatrix f = DynamicsMatrix::Zero();
  f.topLeftCorner<3, 3>() = -hat(omega_m - beta_hat);
  f.topRightCorner<3, 3>() = -measured_big_e(m);
  return f;
}

Mat6 riccati_generalized(const Mat6& p, const Vec3& omega_m,
                         const Vec3& beta_hat, const RotationMatrix& m,
                         const TuningParams& tuning) {
  const double s = one_plus_trace_checked(m);
  const DynamicsMatrix f = f_measured(omega_m, beta_hat, m);
  const Mat3 big = -f.topRightCorner<3, 3>();
  return f * p + p * f.transpose() +
         blkdiag(big * tuning.q1 * big.transpose(), tuning.q2) -
         0.25 * s * quadratic_term(p, inverse_checked(tuning.q3));
}

GainPair gain_quat(const Mat6& p, const Mat3& q3, const UnitQuaternion& q_m) {
  const double eta = q_m.eta();
  if (std::abs(eta) <= kAntipodalTolerance) {
    throw AntipodalSingularity("gain_quat: |eta| too small");
  }
  const Vec3& eps = q_m.eps();
  const Mat3 top =
      eta * eta * Mat3::Identity() + eta * hat(eps) + eps * eps.transpose();
  return scaled_gains(p, inverse_checked(q3), top, std::abs(eta));
}

DynamicsMatrix f_quat(const Vec3& omega_m, const Vec3& beta_hat,
                      const UnitQuaternion& q_m) {
  const double eta = q_m.eta();
  const double sgn = eta > 0.0 ? 1.0 : (eta < 0.0 ? -1.0 : 0.0);
  DynamicsMatrix f = DynamicsMatrix::Zero();
  f.topLeftCorner<3, 3>() = -hat(omega_m - beta_hat);
  f.topRightCorner<3, 3>() =
      -sgn * (eta * Mat3::Identity() + hat(q_m.eps()));
  return f;
}

Mat6 riccati_quat(const Mat6& p, const Vec3& omega_m, const Vec3& beta_hat,
                  const UnitQuaternion& q_m, const TuningParams& tuning,
                  std::optional<double> hinf_gamma) {
  const double eta = q_m.eta();
  if (std::abs(eta) <= kAntipodalTolerance) {
    throw AntipodalSingularity("riccati_quat: |eta| too small");
  }
  const DynamicsMatrix f = f_quat(omega_m, beta_hat, q_m);
  const Mat3 ex = hat(q_m.eps());
  const Mat3 left = eta * Mat3::Identity() + ex;
  const Mat3 right = eta * Mat3::Identity() - ex;
  Mat6 rate = f * p + p * f.transpose() +
              blkdiag(left * tuning.q1 * right, tuning.q2) -
              eta * eta * quadratic_term(p, inverse_checked(tuning.q3));
  if (hinf_gamma) {
    rate += (p * p) / (*hinf_gamma * *hinf_gamma);
  }
  return rate;
}

GainPair complementary_gains(double k_p, double k_i) {
  if (k_p < 0.0 || k_i < 0.0) {
    throw InvalidTuning("complementary gains must be non-negative");
  }
  return {k_p * Mat3::Identity(), -k_i * Mat3::Identity()};
}

double lyapunov_value(const ErrorState& z, const Mat6& p) {
  Eigen::LLT<Mat6> llt(p);
  if (llt.info() != Eigen::Success) {
    throw SingularP("P is not positive definite");
  }
  const Vec6 zz = z.stacked();
  return zz.dot(llt.solve(zz));
}

PBounds p_bounds(const Mat6& p) {
  Eigen::SelfAdjointEigenSolver<Mat6> es(p, Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(5)};
}

FilterRate filter_rate(const FilterSettings& settings, const FilterState& s,
                       const Vec3& omega_m, const RotationMatrix& y,
                       const RotationMatrix* truth) {
  FilterRate out;
  const RotationMatrix m = s.r_hat.transpose() * y;
  GainPair gains;
  const TuningParams& tuning = settings.tuning;

  switch (settings.kind) {
    case FilterKind::Complementary:
      gains = complementary_gains(settings.k_p, settings.k_i);
      break;
    case FilterKind::StandardMekf:
      gains = gain_standard_mekf(s.p, tuning.q3);
      out.p_dot =
          riccati_standard(s.p, f0_matrix(omega_m, s.beta_hat), tuning);
      break;
    case FilterKind::IdealMekf: {
      if (truth == nullptr) {
        throw ValidationError("ideal_mekf needs the true attitude");
      }
      const RotationMatrix r_tilde = s.r_hat.transpose() * *truth;
      if (one_plus_trace(r_tilde) <= kAntipodalTolerance) {
        out.gyro_only = true;
        break;
      }
      gains = gain_ideal(s.p, tuning.q3, r_tilde);
      out.p_dot = riccati_ideal(
          s.p, f_matrix(omega_m, s.beta_hat, r_tilde), r_tilde, tuning);
      break;
    }
    case FilterKind::GeneralizedMekf:
      if (one_plus_trace(m) <= kAntipodalTolerance) {
        out.gyro_only = true;
        break;
      }
      gains = gain_generalized(s.p, tuning.q3, m);
      out.p_dot = riccati_generalized(s.p, omega_m, s.beta_hat, m, tuning);
      break;
    case FilterKind::QuaternionMekf:
      throw ValidationError("quaternion_mekf is propagated on S^3");
  }

  const EstimatorRhs rhs = estimator_rhs(s, omega_m, y, gains);
  out.r_hat_dot = rhs.r_hat_dot;
  out.beta_hat_dot = rhs.beta_hat_dot;
  return out;
}

QuatFilterRate quat_filter_rate(const FilterSettings& settings,
                                const QuatFilterState& s, const Vec3& omega_m,
                                const UnitQuaternion& q_y) {
  if (settings.kind != FilterKind::QuaternionMekf) {
    throw ValidationError("only quaternion_mekf is propagated on S^3");
  }
  QuatFilterRate out;
  const UnitQuaternion q_m = s.q_hat.conjugate() * q_y;
  GainPair gains;
  if (std::abs(q_m.eta()) <= kAntipodalTolerance) {
    out.gyro_only = true;
  } else {
    gains = gain_quat(s.p, settings.tuning.q3, q_m);
    out.p_dot = riccati_quat(s.p, omega_m, s.beta_hat, q_m, settings.tuning,
                             settings.hinf_gamma);
  }
  const Vec3 innovation = psi_quat(q_m);
  const Vec3 omega_hat = omega_m - s.beta_hat + gains.g_q * innovation;
  const double eta = s.q_hat.eta();
  const Vec3& eps = s.q_hat.eps();
  out.q_hat_dot[0] = -0.5 * eps.dot(omega_hat);
  out.q_hat_dot.tail<3>() = 0.5 * (eta * omega_hat + eps.cross(omega_hat));
  out.beta_hat_dot = gains.g_b * innovation;
  return out;
}

}  // namespace geoatt
