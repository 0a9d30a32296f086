#pragma once

// Attitude/bias estimator with pluggable gain providers: the standard
// SO(3)-MEKF, the ideal (true-error) MEKF, the generalized SO(3)-MEKF, its
// unit-quaternion form, and the fixed-gain complementary filter.

#include <optional>
#include <string>
#include <string_view>

#include "geoatt/error_dynamics.hpp"
#include "geoatt/so3.hpp"

namespace geoatt {

enum class FilterKind {
  StandardMekf,
  IdealMekf,  // consumes the true attitude; test/validation only
  GeneralizedMekf,
  QuaternionMekf,
  Complementary,
};

std::string_view to_string(FilterKind kind);

/// Throws ValidationError for an unknown name.
FilterKind filter_kind_from_string(std::string_view name);

/// True for kinds propagated on the unit quaternion rather than on SO(3).
inline bool uses_quaternion(FilterKind kind) {
  return kind == FilterKind::QuaternionMekf;
}

/// True for kinds that integrate a Riccati gain matrix.
inline bool has_riccati(FilterKind kind) {
  return kind != FilterKind::Complementary;
}

struct FilterState {
  RotationMatrix r_hat;
  Vec3 beta_hat = Vec3::Zero();
  Mat6 p = Mat6::Identity();
};

struct QuatFilterState {
  UnitQuaternion q_hat;
  Vec3 beta_hat = Vec3::Zero();
  Mat6 p = Mat6::Identity();
};

struct GainPair {
  Mat3 g_q = Mat3::Zero();
  Mat3 g_b = Mat3::Zero();
};

/// Q1 = B1 B1^T, Q2 = B2 B2^T, Q3 = K K^T; each symmetric positive definite.
struct TuningParams {
  Mat3 q1 = Mat3::Identity();
  Mat3 q2 = Mat3::Identity();
  Mat3 q3 = Mat3::Identity();

  static TuningParams isotropic(double q1, double q2, double q3);

  /// Throws InvalidTuning unless all three are symmetric (1e-12) and
  /// positive definite.
  void validate() const;
};

struct EstimatorRhs {
  Mat3 r_hat_dot = Mat3::Zero();
  Vec3 beta_hat_dot = Vec3::Zero();
};

/// R_hat_dot = R_hat (omega_m - beta_hat + G_q psi(R_hat^T Y))^x,
/// beta_hat_dot = G_b psi(R_hat^T Y).
EstimatorRhs estimator_rhs(const FilterState& state, const Vec3& omega_m,
                           const RotationMatrix& y, const GainPair& gains);

// --- Standard SO(3)-MEKF ---------------------------------------------------

/// [G_q; G_b] = P [I; 0] Q3^-1. Throws SingularTuning.
GainPair gain_standard_mekf(const Mat6& p, const Mat3& q3);

/// F0 P + P F0^T + blkdiag(Q1, Q2) - P blkdiag(Q3^-1, 0) P.
Mat6 riccati_standard(const Mat6& p, const DynamicsMatrix& f0,
                      const TuningParams& tuning);

// --- Ideal MEKF (true error R_tilde known) --------------------------------

/// G_q = 1/2 (tr[R~] I - R~^T + e e^T) P11 Q3^-1,
/// G_b = 1/2 sqrt(1 + tr[R~]) P21 Q3^-1.
/// Solves E^T(R~) G_q = 1/2 sqrt(1+tr) P11 Q3^-1 exactly.
GainPair gain_ideal(const Mat6& p, const Mat3& q3,
                    const RotationMatrix& r_tilde);

/// F P + P F^T + blkdiag(E Q1 E^T, Q2) - 1/4 (1 + tr) P blkdiag(Q3^-1, 0) P.
Mat6 riccati_ideal(const Mat6& p, const DynamicsMatrix& f,
                   const RotationMatrix& r_tilde, const TuningParams& tuning);

// --- Generalized SO(3)-MEKF (R_tilde replaced by M = R_hat^T Y) -----------

GainPair gain_generalized(const Mat6& p, const Mat3& q3,
                          const RotationMatrix& m);

/// E(M) = [1/2 (1 + tr M) I + psi(M)^x] / sqrt(1 + tr M).
Mat3 measured_big_e(const RotationMatrix& m);

/// F_Y: top-left -(omega_m - beta_hat)^x, top-right -E(M).
DynamicsMatrix f_measured(const Vec3& omega_m, const Vec3& beta_hat,
                          const RotationMatrix& m);

Mat6 riccati_generalized(const Mat6& p, const Vec3& omega_m,
                         const Vec3& beta_hat, const RotationMatrix& m,
                         const TuningParams& tuning);

// --- Quaternion (S^3) form -------------------------------------------------

/// G_q = (eta^2 I + eta eps^x + eps eps^T) P11 Q3^-1, G_b = |eta| P21 Q3^-1.
GainPair gain_quat(const Mat6& p, const Mat3& q3, const UnitQuaternion& q_m);

/// F_q: top-right -sgn(eta) [eta I + eps^x].
DynamicsMatrix f_quat(const Vec3& omega_m, const Vec3& beta_hat,
                      const UnitQuaternion& q_m);

/// F_q P + P F_q^T + blkdiag([eta I + eps^x] Q1 [eta I - eps^x], Q2)
/// - P blkdiag(eta^2 Q3^-1, 0) P  (+ P^2 / gamma^2 when hinf_gamma is set).
Mat6 riccati_quat(const Mat6& p, const Vec3& omega_m, const Vec3& beta_hat,
                  const UnitQuaternion& q_m, const TuningParams& tuning,
                  std::optional<double> hinf_gamma = std::nullopt);

/// psi(M) from the quaternion of M: 2 eta eps.
inline Vec3 psi_quat(const UnitQuaternion& q_m) {
  return 2.0 * q_m.eta() * q_m.eps();
}

// --- Complementary filter --------------------------------------------------

/// Fixed gains G_q = k_p I, G_b = -k_i I (the bias integrator runs against
/// the innovation). Throws InvalidTuning for negative gains.
GainPair complementary_gains(double k_p, double k_i);

// --- Lyapunov / P-bound monitor -------------------------------------------

/// V = z^T P^-1 z. Throws SingularP unless P is positive definite.
double lyapunov_value(const ErrorState& z, const Mat6& p);

struct PBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

PBounds p_bounds(const Mat6& p);

// --- Full filter right-hand sides used by the simulation harness ----------

struct FilterSettings {
  FilterKind kind = FilterKind::GeneralizedMekf;
  TuningParams tuning;
  double k_p = 0.0;
  double k_i = 0.0;
  std::optional<double> hinf_gamma;
};

struct FilterRate {
  Mat3 r_hat_dot = Mat3::Zero();
  Vec3 beta_hat_dot = Vec3::Zero();
  Mat6 p_dot = Mat6::Zero();
  bool gyro_only = false;  // measurement antipodal to the estimate
};

struct QuatFilterRate {
  Eigen::Vector4d q_hat_dot = Eigen::Vector4d::Zero();
  Vec3 beta_hat_dot = Vec3::Zero();
  Mat6 p_dot = Mat6::Zero();
  bool gyro_only = false;
};

/// Rate of an SO(3)-propagated filter. `truth` is required for IdealMekf
/// and ignored otherwise. When tr[R_hat^T Y] <= -1 + 1e-9 the gains are
/// zeroed, P is held, and gyro_only is set.
FilterRate filter_rate(const FilterSettings& settings, const FilterState& s,
                       const Vec3& omega_m, const RotationMatrix& y,
                       const RotationMatrix* truth = nullptr);

/// Rate of the quaternion-propagated filter; q_hat_dot = 1/2 q_hat (x)
/// (0, omega_hat).
QuatFilterRate quat_filter_rate(const FilterSettings& settings,
                                const QuatFilterState& s, const Vec3& omega_m,
                                const UnitQuaternion& q_y);

}  // namespace geoatt
