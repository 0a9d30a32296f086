#pragma once

// Batch oracle suite: algebraic identities, the error-dynamics finite
// difference oracle, gain conditions, the MEKF limit, SO(3)/S^3
// equivalence, Lyapunov monotonicity and the scalar steady-state tuning.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "geoatt/so3.hpp"

namespace geoatt {

struct CheckResult {
  std::string name;
  bool passed = false;
  double max_residual = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  /// Null when every check passed.
  const CheckResult* first_failure() const;
};

struct VerifyOptions {
  std::uint64_t seed = 20240607;
  int identity_samples = 10000;
  int fd_trajectories = 1000;
  int gain_samples = 10000;
  int quat_samples = 1000;
  int lyapunov_runs = 100;
  double lyapunov_duration = 30.0;
  double equivalence_duration = 10.0;
  // E(R) implementation under test; swapped by mutation fixtures.
  std::function<Mat3(const RotationMatrix&)> big_e = [](const RotationMatrix& r) {
    return geoatt::big_e(r);
  };
};

// Individual checks. Residuals are absolute unless the detail says otherwise.
std::vector<CheckResult> check_identities(const VerifyOptions& opt);
std::vector<CheckResult> check_finite_difference(const VerifyOptions& opt);
CheckResult check_gain_condition(const VerifyOptions& opt);
CheckResult check_quaternion_gains(const VerifyOptions& opt);
CheckResult check_mekf_limit(const VerifyOptions& opt);
CheckResult check_representation_equivalence(const VerifyOptions& opt);
CheckResult check_lyapunov_monotonicity(const VerifyOptions& opt);
std::vector<CheckResult> check_tuning(const VerifyOptions& opt);

VerifyReport run_verification(const VerifyOptions& opt = {});

}  // namespace geoatt
