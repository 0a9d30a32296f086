#include "geoatt/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "geoatt/error_dynamics.hpp"
#include "geoatt/filters.hpp"
#include "geoatt/sim.hpp"

namespace geoatt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double normal() { return normal_(rng_); }
  Vec3 gaussian3() { return {normal(), normal(), normal()}; }

  Vec3 unit3() {
    for (;;) {
      const Vec3 v = gaussian3();
      const double n = v.norm();
      if (n > 1e-6) {
        return v / n;
      }
    }
  }
  Mat3 gaussian33() {
    Mat3 m;
    for (int i = 0; i < 9; ++i) {
      m(i) = normal();
    }
    return m;
  }
  Mat3 spd3() {
    const Mat3 a = gaussian33();
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

// exp(theta * axis^x) via Eigen's angle-axis type, independent of the
// library's own Rodrigues implementation.
Mat3 expm(const Vec3& v) {
  const double n = v.norm();
  if (n == 0.0) {
    return Mat3::Identity();
  }
  return Eigen::AngleAxisd(n, v / n).toRotationMatrix();
}

CheckResult finish(std::string name, double residual, double tol,
                   Clock::time_point start, std::string detail = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.max_residual = residual;
  r.tolerance = tol;
  r.passed = std::isfinite(residual) && residual <= tol;
  r.seconds = seconds_since(start);
  r.detail = std::move(detail);
  return r;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

bool VerifyReport::all_passed() const { return first_failure() == nullptr; }

const CheckResult* VerifyReport::first_failure() const {
  for (const CheckResult& c : checks) {
    if (!c.passed) {
      return &c;
    }
  }
  return nullptr;
}

std::vector<CheckResult> check_identities(const VerifyOptions& opt) {
  const auto start = Clock::now();
  Sampler s(opt.seed);
  double chordal_res = 0.0;
  double inverse_res = 0.0;
  double det_res = 0.0;
  double eig_res = 0.0;
  double appendix_res = 0.0;
  for (int n = 0; n < opt.identity_samples; ++n) {
    const double theta = s.uniform(0.0, 3.0);
    const RotationMatrix r = RotationMatrix::unchecked(expm(theta * s.unit3()));
    const double c = std::cos(theta);

    chordal_res = std::max(chordal_res,
                           std::abs(e_r(r).squaredNorm() - chordal(r)));

    const Mat3 e = opt.big_e(r);
    inverse_res =
        std::max(inverse_res, max_abs(e * big_e_inv(r) - Mat3::Identity()));
    det_res = std::max(det_res,
                       std::abs(e.determinant() - std::sqrt((1.0 + c) / 2.0)));

    Eigen::SelfAdjointEigenSolver<Mat3> eig(e * e.transpose(),
                                            Eigen::EigenvaluesOnly);
    Vec3 expected(std::min(1.0, (1.0 + c) / 2.0), 1.0, 1.0);
    std::sort(expected.data(), expected.data() + 3);
    eig_res = std::max(eig_res, max_abs(eig.eigenvalues() - expected));

    const Mat3 a = s.gaussian33();
    const Vec3 v = s.gaussian3();
    const Mat3 lhs = hat(v) * a + a.transpose() * hat(v);
    const Mat3 rhs = hat((a.trace() * Mat3::Identity() - a) * v);
    appendix_res = std::max(appendix_res, max_abs(lhs - rhs));
  }
  const std::string n = std::to_string(opt.identity_samples) + " rotations";
  return {finish("identity_chordal", chordal_res, 1e-12, start, n),
          finish("identity_e_inverse", inverse_res, 1e-10, start, n),
          finish("identity_det_e", det_res, 1e-10, start, n),
          finish("identity_eig_eet", eig_res, 1e-8, start, n),
          finish("identity_appendix", appendix_res, 1e-12, start, n)};
}

std::vector<CheckResult> check_finite_difference(const VerifyOptions& opt) {
  const auto start = Clock::now();
  Sampler s(opt.seed + 1);
  constexpr double kStep = 1e-5;
  constexpr std::array<double, 3> kSamples = {0.0, 0.25, 0.5};
  double res_h = 0.0;
  double res_h2 = 0.0;
  long points = 0;

  for (int n = 0; n < opt.fd_trajectories; ++n) {
    const RotationMatrix r0 =
        RotationMatrix::unchecked(expm(s.uniform(0.0, 2.8) * s.unit3()));
    const Vec3 omega_m = s.uniform(0.5, 3.0) * s.unit3();
    const Vec3 beta_hat = s.uniform(0.0, 1.0) * s.unit3();
    const Vec3 beta_tilde = s.uniform(0.0, 1.0) * s.unit3();
    const Vec3 delta1 = s.uniform(0.0, 1.0) * s.unit3();
    const Vec3 correction = s.uniform(0.0, 3.0) * s.unit3();
    const Vec3 delta2 = s.uniform(0.0, 1.0) * s.unit3();
    const Vec3 correction_b = s.uniform(0.0, 1.0) * s.unit3();

    // Exact flow of R~' = R~ b^x - a^x R~ with constant inputs.
    const Vec3 a = omega_m - beta_hat + correction;
    const Vec3 b = omega_m - (beta_hat + beta_tilde) + delta1;
    const auto flow = [&](double t) {
      return RotationMatrix::unchecked(expm(-t * a) * r0.matrix() *
                                       expm(t * b));
    };

    for (double t0 : kSamples) {
      const RotationMatrix r = flow(t0);
      if (one_plus_trace(r) < 0.05) {
        continue;
      }
      ++points;
      const Vec3 analytic = e_r_dot_analytic(r, omega_m, beta_hat, beta_tilde,
                                             delta1, correction);
      const Mat3 rate = r_tilde_rate(r, omega_m, beta_hat, beta_tilde, delta1,
                                     correction);
      const double trace_rate =
          trace_r_tilde_dot(r, beta_tilde, delta1, correction);

      ErrorInputs in;
      in.delta1_shaped = delta1;
      in.delta2_shaped = delta2;
      in.correction_q = correction;
      in.correction_b = correction_b;
      const Vec6 zdot = z_dot_analytic(error_state(r, beta_tilde),
                                       f_matrix(omega_m, beta_hat, r), in);

      for (int k = 0; k < 2; ++k) {
        const double h = k == 0 ? kStep : kStep / 2.0;
        const RotationMatrix rp = flow(t0 + h);
        const RotationMatrix rm = flow(t0 - h);
        const Vec3 fd = (e_r(rp) - e_r(rm)) / (2.0 * h);
        const Mat3 fd_r = (rp.matrix() - rm.matrix()) / (2.0 * h);
        double res = (fd - analytic).cwiseAbs().maxCoeff();
        res = std::max(res, max_abs(fd_r - rate));
        res = std::max(res, std::abs(fd_r.trace() - trace_rate));
        if (k == 0) {
          res_h = std::max(res_h, res);
        } else {
          res_h2 = std::max(res_h2, res);
        }
      }
      // The stacked form must reproduce the same e_R rate exactly.
      res_h = std::max(res_h, (zdot.head<3>() - analytic).cwiseAbs().maxCoeff());
      res_h = std::max(res_h, (zdot.tail<3>() - (delta2 - correction_b))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
  }
  const double ratio = res_h / res_h2;
  const std::string detail = std::to_string(points) +
                             " points; residual(h)=" + fmt(res_h) +
                             ", residual(h/2)=" + fmt(res_h2) +
                             ", ratio=" + fmt(ratio);
  return {finish("error_rate_finite_difference", res_h, 1e-6, start, detail),
          finish("error_rate_convergence_ratio", std::abs(ratio / 4.0 - 1.0), 0.2,
                 start, detail)};
}

CheckResult check_gain_condition(const VerifyOptions& opt) {
  const auto start = Clock::now();
  Sampler s(opt.seed + 2);
  double res = 0.0;
  for (int n = 0; n < opt.gain_samples; ++n) {
    // Same angular domain as the identity suite; closer to the antipode the
    // double-precision residual grows like 1 / (1 + tr).
    const RotationMatrix r =
        RotationMatrix::unchecked(expm(s.uniform(0.0, 3.0) * s.unit3()));
    const Mat6 p = s.spd6();
    const Mat3 q3 = s.spd3();
    const GainPair g = gain_ideal(p, q3, r);
    const Mat3 q3_inv = q3.inverse();
    const double k = 0.5 * std::sqrt(one_plus_trace(r));
    const Mat3 top = opt.big_e(r).transpose() * g.g_q -
                     k * p.topLeftCorner<3, 3>() * q3_inv;
    const Mat3 bottom = g.g_b - k * p.bottomLeftCorner<3, 3>() * q3_inv;
    res = std::max({res, max_abs(top), max_abs(bottom)});
  }
  return finish("gain_condition", res, 1e-10, start,
                std::to_string(opt.gain_samples) + " (P, R~) samples");
}

CheckResult check_quaternion_gains(const VerifyOptions& opt) {
  const auto start = Clock::now();
  Sampler s(opt.seed + 3);
  double res = 0.0;
  for (int n = 0; n < opt.quat_samples; ++n) {
    const double theta = s.uniform(0.0, kPi - 0.05);
    const Vec3 axis = s.unit3();
    // Both sheets of the double cover.
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    const UnitQuaternion q = UnitQuaternion::normalized(
        sign * std::cos(theta / 2.0), sign * std::sin(theta / 2.0) * axis);
    const RotationMatrix m = rotation_from_quat(q);
    const Mat6 p = s.spd6();
    const TuningParams tuning{s.spd3(), s.spd3(), s.spd3()};
    const Vec3 omega_m = s.gaussian3();
    const Vec3 beta_hat = s.gaussian3();

    const GainPair gq = gain_quat(p, tuning.q3, q);
    const GainPair gr = gain_generalized(p, tuning.q3, m);
    res = std::max({res, max_abs(gq.g_q - gr.g_q), max_abs(gq.g_b - gr.g_b)});
    const Mat6 pq = riccati_quat(p, omega_m, beta_hat, q, tuning);
    const Mat6 pr = riccati_generalized(p, omega_m, beta_hat, m, tuning);
    res = std::max(res, max_abs(pq - pr));
    const GainPair gneg = gain_quat(p, tuning.q3, -q);
    res = std::max({res, max_abs(gneg.g_q - gq.g_q), max_abs(gneg.g_b - gq.g_b)});
  }
  return finish("quaternion_gain_agreement", res, 1e-10, start,
                std::to_string(opt.quat_samples) + " states, gains and rates");
}

CheckResult check_mekf_limit(const VerifyOptions& opt) {
  const auto start = Clock::now();
  Sampler s(opt.seed + 4);
  double res = 0.0;
  const int samples = std::max(1, opt.quat_samples);
  for (int n = 0; n < samples; ++n) {
    const RotationMatrix m = RotationMatrix::unchecked(expm(1e-6 * s.unit3()));
    const Mat6 p = s.spd6();
    const TuningParams tuning{s.spd3(), s.spd3(), s.spd3()};
    const Vec3 omega_m = s.gaussian3();
    const Vec3 beta_hat = s.gaussian3();

    const GainPair gg = gain_generalized(p, tuning.q3, m);
    const GainPair gs = gain_standard_mekf(p, tuning.q3);
    Eigen::Matrix<double, 6, 3> stack_g;
    Eigen::Matrix<double, 6, 3> stack_s;
    stack_g << gg.g_q, gg.g_b;
    stack_s << gs.g_q, gs.g_b;
    res = std::max(res, (stack_g - stack_s).norm() / stack_s.norm());

    const Mat6 rg = riccati_generalized(p, omega_m, beta_hat, m, tuning);
    const Mat6 rs =
        riccati_standard(p, f0_matrix(omega_m, beta_hat), tuning);
    res = std::max(res, (rg - rs).norm() / rs.norm());
  }
  return finish("mekf_limit", res, 1e-5, start,
                "theta(M) = 1e-6, relative Frobenius deviation");
}

CheckResult check_representation_equivalence(const VerifyOptions& opt) {
  const auto start = Clock::now();
  ScenarioConfig cfg;
  cfg.duration = opt.equivalence_duration;
  cfg.transient_split = std::min(cfg.transient_split, cfg.duration);
  cfg.seed = opt.seed;
  cfg.filters = {FilterKind::GeneralizedMekf, FilterKind::QuaternionMekf};
  double att = 0.0;
  double bias = 0.0;
  run_scenario(
      cfg,
      [&](const StepView& v) {
        const FilterSnapshot& a = v.filters[0];
        const FilterSnapshot& b = v.filters[1];
        att = std::max(att, rotation_angle(a.r_hat.transpose() * b.r_hat));
        bias = std::max(bias, (a.beta_hat - b.beta_hat).norm());
      },
      RunOptions{.monitors = false});
  return finish("representation_equivalence", std::max(att, bias), 1e-6,
                start,
                "max attitude gap " + fmt(att) + " rad, bias gap " +
                    fmt(bias) + " rad/s over " + fmt(cfg.duration) + " s");
}

CheckResult check_lyapunov_monotonicity(const VerifyOptions& opt) {
  const auto start = Clock::now();
  Sampler s(opt.seed + 5);
  double max_increase = -std::numeric_limits<double>::infinity();
  double min_lambda = std::numeric_limits<double>::infinity();
  double worst_final = 0.0;
  for (int n = 0; n < opt.lyapunov_runs; ++n) {
    ScenarioConfig cfg;
    cfg.duration = opt.lyapunov_duration;
    cfg.transient_split = std::min(cfg.transient_split, cfg.duration);
    cfg.sigma_omega = 0.0;
    cfg.sigma_beta = 0.0;
    cfg.sigma_eps = 0.0;
    cfg.filters = {FilterKind::GeneralizedMekf};
    // Estimate at identity, so the initial error is the truth attitude.
    for (;;) {
      cfg.initial_euler = {s.uniform(-kPi, kPi), s.uniform(-kPi / 2, kPi / 2),
                           s.uniform(-kPi, kPi)};
      const double angle = rotation_angle(euler_zyx(
          cfg.initial_euler[0], cfg.initial_euler[1], cfg.initial_euler[2]));
      if (angle <= 175.0 / kRadToDeg) {
        break;
      }
    }
    const Vec3 beta_tilde = s.uniform(0.0, 1.0) * s.unit3();
    cfg.beta_hat0 = cfg.beta0 - beta_tilde;

    double prev = std::numeric_limits<double>::quiet_NaN();
    double final_err = 0.0;
    run_scenario(cfg, [&](const StepView& v) {
      const FilterSnapshot& f = v.filters[0];
      if (!std::isnan(prev) && !std::isnan(f.lyapunov)) {
        max_increase = std::max(max_increase, f.lyapunov - prev);
      }
      prev = f.lyapunov;
      min_lambda = std::min(min_lambda, f.pmin);
      final_err = f.att_err_deg / kRadToDeg;
    });
    worst_final = std::max(worst_final, final_err);
  }
  CheckResult r = finish("lyapunov_monotonicity", max_increase, 1e-9, start);
  r.passed = r.passed && min_lambda > 1e-6 && worst_final < 1e-2;
  r.detail = std::to_string(opt.lyapunov_runs) + " runs; max dV/step " +
             fmt(max_increase) + ", min lambda(P) " + fmt(min_lambda) +
             ", worst final error " + fmt(worst_final) + " rad";
  return r;
}

std::vector<CheckResult> check_tuning(const VerifyOptions&) {
  const auto start = Clock::now();
  const TuningSelection sel =
      select_tuning(std::sqrt(kPi / 12.0), 5.9126, 1.7738);
  const double q_res = std::max({std::abs(sel.q.q1 - 5.263),
                                 std::abs(sel.q.q2 - 0.5272),
                                 std::abs(sel.q.q3 - 0.1676)});
  const auto rates =
      s1_riccati_rates(sel.steady, sel.q.q1, sel.q.q2, sel.q.q3);
  double fp_res = 0.0;
  for (double r : rates) {
    fp_res = std::max(fp_res, std::abs(r));
  }
  CheckResult fixed = finish("s1_fixed_point", fp_res, 1e-10, start,
                             "p_a=" + fmt(sel.steady.p_a) +
                                 ", p_b=" + fmt(sel.steady.p_b) +
                                 ", p_c=" + fmt(sel.steady.p_c));
  fixed.passed = fixed.passed && p_bounds(sel.p0).lambda_min > 0.0;
  return {finish("tuning_reproduction", q_res, 1e-3, start,
                 "q1=" + fmt(sel.q.q1) + ", q2=" + fmt(sel.q.q2) +
                     ", q3=" + fmt(sel.q.q3)),
          fixed};
}

VerifyReport run_verification(const VerifyOptions& opt) {
  VerifyReport rep;
  const auto add = [&](auto&& results) {
    for (auto& r : results) {
      rep.checks.push_back(std::move(r));
    }
  };
  add(check_identities(opt));
  add(check_finite_difference(opt));
  rep.checks.push_back(check_gain_condition(opt));
  rep.checks.push_back(check_quaternion_gains(opt));
  rep.checks.push_back(check_mekf_limit(opt));
  rep.checks.push_back(check_representation_equivalence(opt));
  rep.checks.push_back(check_lyapunov_monotonicity(opt));
  add(check_tuning(opt));
  return rep;
}

}  // namespace geoatt
