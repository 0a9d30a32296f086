#include "geoatt/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "geoatt/errors.hpp"
#include "geoatt/triad.hpp"

namespace geoatt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxTriadRetries = 10;
constexpr double kPMinFloor = 1e-9;

using Mat3Map = Eigen::Map<Mat3>;
using Mat3CMap = Eigen::Map<const Mat3>;
using Mat6Map = Eigen::Map<Mat6>;
using Mat6CMap = Eigen::Map<const Mat6>;

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw ValidationError(what);
  }
}

bool finite3(const Vec3& v) { return v.allFinite(); }

}  // namespace

void ScenarioConfig::validate() const {
  require(std::isfinite(dt) && dt > 0.0, "dt must be > 0");
  require(std::isfinite(duration) && std::isfinite(transient_split) &&
              transient_split > 0.0 && duration >= transient_split,
          "need duration >= transient_split > 0");
  require(sigma_omega >= 0.0 && sigma_beta >= 0.0 && sigma_eps >= 0.0,
          "noise standard deviations must be >= 0");
  require(std::isfinite(sigma_omega) && std::isfinite(sigma_beta) &&
              std::isfinite(sigma_eps),
          "noise standard deviations must be finite");
  require(std::isfinite(noise_hold) && noise_hold >= 0.0,
          "noise_hold must be >= 0");
  require(std::isfinite(design_sigma_eps) && design_sigma_eps > 0.0,
          "design_sigma_eps must be > 0");
  require(std::isfinite(k_p) && std::isfinite(k_i) && k_p >= 0.0 &&
              k_i >= 0.0,
          "k_p and k_i must be finite and >= 0");
  require(std::isfinite(p0_scale) && p0_scale > 0.0, "p0_scale must be > 0");
  require(!filters.empty(), "at least one filter is required");
  require(filters.size() <= 32, "at most 32 filters per run");
  require(n_runs >= 1, "n_runs must be >= 1");
  require(finite3(beta0) && finite3(beta_hat0), "bias values must be finite");
  require(finite3(reference1) && finite3(reference2) &&
              reference1.norm() > 0.0 && reference2.norm() > 0.0 &&
              reference1.normalized().cross(reference2.normalized()).norm() >
                  1e-6,
          "reference vectors must be nonzero and non-parallel");
  for (double a : initial_euler) {
    require(std::isfinite(a), "initial_euler must be finite");
  }
  for (double a : estimate_euler) {
    require(std::isfinite(a), "estimate_euler must be finite");
  }
  if (hinf_gamma) {
    require(std::isfinite(*hinf_gamma) && *hinf_gamma > 0.0,
            "hinf_gamma must be > 0");
  }
  if (tuning) {
    require(tuning->q1 > 0.0 && tuning->q2 > 0.0 && tuning->q3 > 0.0,
            "q1, q2, q3 must be > 0");
  }
}

Vec3 true_angular_velocity(double t) {
  return {std::cos(3.0 * t), 0.1 * std::sin(2.0 * t), -std::cos(t)};
}

NoiseDraw draw_noise(Rng& rng, const ScenarioConfig& cfg) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto vec = [&](double sigma) {
    const double a = normal(rng);
    const double b = normal(rng);
    const double c = normal(rng);
    return Vec3(sigma * a, sigma * b, sigma * c);
  };
  NoiseDraw n;
  n.delta1 = vec(cfg.sigma_omega);
  n.delta2 = vec(cfg.sigma_beta);
  n.eps1 = vec(cfg.sigma_eps);
  n.eps2 = vec(cfg.sigma_eps);
  return n;
}

SensorReading measure(const TruthState& truth, double t,
                      const NoiseDraw& noise, const ScenarioConfig& cfg) {
  SensorReading out;
  out.omega_m = true_angular_velocity(t) + truth.beta + noise.delta1;
  const Mat3& r = truth.r.matrix();
  const VectorObservation o1{r.transpose() * cfg.reference1 + noise.eps1,
                             cfg.reference1};
  const VectorObservation o2{r.transpose() * cfg.reference2 + noise.eps2,
                             cfg.reference2};
  out.y = triad(o1, o2);
  return out;
}

SensorReading sample_sensors(const TruthState& truth, double t, Rng& rng,
                             const ScenarioConfig& cfg, NoiseDraw* used,
                             int* retries) {
  for (int attempt = 0;; ++attempt) {
    const NoiseDraw noise = draw_noise(rng, cfg);
    try {
      SensorReading reading = measure(truth, t, noise, cfg);
      if (used != nullptr) {
        *used = noise;
      }
      return reading;
    } catch (const DegenerateObservations&) {
      if (attempt + 1 >= kMaxTriadRetries) {
        throw;
      }
      if (retries != nullptr) {
        ++*retries;
      }
    }
  }
}

// --- CoupledSystem ---------------------------------------------------------

CoupledSystem::CoupledSystem(const ScenarioConfig& cfg,
                             std::vector<FilterSettings> filters)
    : cfg_(cfg), filters_(std::move(filters)) {
  offsets_.reserve(filters_.size());
  for (std::size_t i = 0; i < filters_.size(); ++i) {
    offsets_.push_back(size_);
    size_ += att_size(i) + 3 + 36;
  }
}

Eigen::VectorXd CoupledSystem::pack(
    const TruthState& truth, std::span<const FilterState> filters) const {
  if (filters.size() != filters_.size()) {
    throw ValidationError("pack: filter count mismatch");
  }
  Eigen::VectorXd x(size_);
  Mat3Map{x.data()} = truth.r.matrix();
  x.segment<3>(9) = truth.beta;
  for (std::size_t i = 0; i < filters_.size(); ++i) {
    double* p = x.data() + offsets_[i];
    if (uses_quaternion(filters_[i].kind)) {
      x.segment<4>(offsets_[i]) = quat_from_rotation(filters[i].r_hat).coeffs();
    } else {
      Mat3Map{p} = filters[i].r_hat.matrix();
    }
    p += att_size(i);
    Eigen::Map<Vec3>{p} = filters[i].beta_hat;
    Mat6Map{p + 3} = filters[i].p;
  }
  return x;
}

TruthState CoupledSystem::truth(const Eigen::VectorXd& x) const {
  return {RotationMatrix::unchecked(Mat3CMap(x.data())), x.segment<3>(9)};
}

FilterState CoupledSystem::filter_state(const Eigen::VectorXd& x,
                                        std::size_t i) const {
  const double* p = x.data() + offsets_[i];
  FilterState s;
  if (uses_quaternion(filters_[i].kind)) {
    s.r_hat = rotation_from_quat(
        UnitQuaternion::normalized(Eigen::Map<const Eigen::Vector4d>(p)));
  } else {
    s.r_hat = RotationMatrix::unchecked(Mat3CMap(p));
  }
  p += att_size(i);
  s.beta_hat = Eigen::Map<const Vec3>(p);
  s.p = Mat6CMap(p + 3);
  return s;
}

Eigen::VectorXd CoupledSystem::rhs(double t, const Eigen::VectorXd& x,
                                   const NoiseDraw& noise,
                                   std::uint32_t* gyro_only) const {
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size_));
  const TruthState tr = truth(x);
  Mat3Map{dx.data()} = tr.r.matrix() * hat(true_angular_velocity(t));
  dx.segment<3>(9) = noise.delta2;

  const SensorReading reading = measure(tr, t, noise, cfg_);
  std::optional<UnitQuaternion> q_y;

  for (std::size_t i = 0; i < filters_.size(); ++i) {
    const FilterSettings& fs = filters_[i];
    const double* src = x.data() + offsets_[i];
    double* dst = dx.data() + offsets_[i];
    const std::size_t a = att_size(i);
    bool gyro = false;
    if (uses_quaternion(fs.kind)) {
      if (!q_y) {
        q_y = quat_from_rotation(reading.y);
      }
      QuatFilterState s{
          UnitQuaternion::normalized(Eigen::Map<const Eigen::Vector4d>(src)),
          Eigen::Map<const Vec3>(src + a), Mat6CMap(src + a + 3)};
      const QuatFilterRate r =
          quat_filter_rate(fs, s, reading.omega_m, *q_y);
      Eigen::Map<Eigen::Vector4d>{dst} = r.q_hat_dot;
      Eigen::Map<Vec3>{dst + a} = r.beta_hat_dot;
      Mat6Map{dst + a + 3} = r.p_dot;
      gyro = r.gyro_only;
    } else {
      const FilterState s{RotationMatrix::unchecked(Mat3CMap(src)),
                          Eigen::Map<const Vec3>(src + a),
                          Mat6CMap(src + a + 3)};
      const FilterRate r =
          filter_rate(fs, s, reading.omega_m, reading.y, &tr.r);
      Mat3Map{dst} = r.r_hat_dot;
      Eigen::Map<Vec3>{dst + a} = r.beta_hat_dot;
      Mat6Map{dst + a + 3} = r.p_dot;
      gyro = r.gyro_only;
    }
    if (gyro && gyro_only != nullptr) {
      *gyro_only |= (1u << i);
    }
  }
  return dx;
}

Eigen::VectorXd CoupledSystem::rk4_step(const Eigen::VectorXd& x, double t,
                                        double dt, const NoiseDraw& noise,
                                        std::uint32_t* gyro_only) const {
  const auto f = [&](double tt, const Eigen::VectorXd& xx) {
    return rhs(tt, xx, noise, gyro_only);
  };
  Eigen::VectorXd next = rk4(f, t, x, dt);

  Mat3Map{next.data()} =
      RotationMatrix::renormalize(Mat3CMap(next.data())).matrix();
  for (std::size_t i = 0; i < filters_.size(); ++i) {
    double* p = next.data() + offsets_[i];
    if (uses_quaternion(filters_[i].kind)) {
      Eigen::Map<Eigen::Vector4d> q(p);
      q.normalize();
    } else {
      Mat3Map{p} = RotationMatrix::renormalize(Mat3CMap(p)).matrix();
    }
    Mat6Map pm(p + att_size(i) + 3);
    const Mat6 sym = 0.5 * (pm + pm.transpose());
    pm = sym;
  }
  return next;
}

// --- Gain selection --------------------------------------------------------

S1Gains s1_steady_state_gains(double q1, double q2, double q3) {
  if (!(q3 > 0.0) || !(q2 >= 0.0) || !std::isfinite(q1) ||
      !std::isfinite(q2) || !std::isfinite(q3)) {
    throw InvalidTuning("S1 steady state needs q3 > 0 and q2 >= 0");
  }
  S1Gains g;
  g.p_b = -std::sqrt(q2 * q3);
  const double inner = q1 - 2.0 * g.p_b;
  if (!(inner > 0.0)) {
    throw InvalidTuning("S1 steady state needs q1 + 2 sqrt(q2 q3) > 0");
  }
  g.p_a = std::sqrt(q3 * inner);
  g.p_c = -g.p_a * g.p_b / q3;
  return g;
}

std::array<double, 3> s1_riccati_rates(const S1Gains& p, double q1, double q2,
                                       double q3) {
  return {-2.0 * p.p_b + q1 - p.p_a * p.p_a / q3,
          -p.p_c - p.p_a * p.p_b / q3, q2 - p.p_b * p.p_b / q3};
}

Mat6 initial_gain_matrix(const S1Gains& g, double scale) {
  Mat6 p = Mat6::Zero();
  p.topLeftCorner<3, 3>() = g.p_a * Mat3::Identity();
  p.topRightCorner<3, 3>() = g.p_b * Mat3::Identity();
  p.bottomLeftCorner<3, 3>() = g.p_b * Mat3::Identity();
  p.bottomRightCorner<3, 3>() = g.p_c * Mat3::Identity();
  return scale * p;
}

TuningSelection select_tuning(double sigma_eps, double k_p, double k_i,
                              double p0_scale) {
  TuningSelection sel;
  sel.q.q3 = (0.8 * sigma_eps) * (0.8 * sigma_eps);
  sel.q.q2 = k_i * k_i * sel.q.q3;
  sel.q.q1 = sel.q.q3 * (k_p * k_p - 2.0 * k_i);
  if (!(sel.q.q1 > 0.0) || !(sel.q.q2 > 0.0) || !(sel.q.q3 > 0.0)) {
    throw InvalidTuning("selected tuning is not positive (q1 = " +
                        std::to_string(sel.q.q1) +
                        ", q2 = " + std::to_string(sel.q.q2) +
                        ", q3 = " + std::to_string(sel.q.q3) + ")");
  }
  sel.steady = s1_steady_state_gains(sel.q.q1, sel.q.q2, sel.q.q3);
  sel.p0 = initial_gain_matrix(sel.steady, p0_scale);
  if (p_bounds(sel.p0).lambda_min <= 0.0) {
    throw InvalidTuning("initial gain matrix is not positive definite");
  }
  return sel;
}

TuningSelection resolve_tuning(const ScenarioConfig& cfg) {
  if (!cfg.tuning) {
    return select_tuning(cfg.design_sigma_eps, cfg.k_p, cfg.k_i,
                         cfg.p0_scale);
  }
  TuningSelection sel;
  sel.q = *cfg.tuning;
  sel.steady = s1_steady_state_gains(sel.q.q1, sel.q.q2, sel.q.q3);
  sel.p0 = initial_gain_matrix(sel.steady, cfg.p0_scale);
  if (p_bounds(sel.p0).lambda_min <= 0.0) {
    throw InvalidTuning("initial gain matrix is not positive definite");
  }
  return sel;
}

std::vector<FilterSettings> make_filter_settings(const ScenarioConfig& cfg) {
  const TuningSelection sel = resolve_tuning(cfg);
  const TuningParams tuning =
      TuningParams::isotropic(sel.q.q1, sel.q.q2, sel.q.q3);
  tuning.validate();
  std::vector<FilterSettings> out;
  for (FilterKind k : cfg.filters) {
    out.push_back({k, tuning, cfg.k_p, cfg.k_i, cfg.hinf_gamma});
  }
  return out;
}

// --- Runs ------------------------------------------------------------------

std::vector<std::string> run_scenario(const ScenarioConfig& cfg,
                                      const StepSink& sink,
                                      const RunOptions& options) {
  cfg.validate();
  const TuningSelection sel = resolve_tuning(cfg);
  const CoupledSystem sys(cfg, make_filter_settings(cfg));
  const std::size_t nf = sys.filter_count();

  TruthState truth{euler_zyx(cfg.initial_euler[0], cfg.initial_euler[1],
                             cfg.initial_euler[2]),
                   cfg.beta0};
  const FilterState init{euler_zyx(cfg.estimate_euler[0],
                                   cfg.estimate_euler[1],
                                   cfg.estimate_euler[2]),
                         cfg.beta_hat0, sel.p0};
  const std::vector<FilterState> inits(nf, init);
  Eigen::VectorXd x = sys.pack(truth, inits);

  const long steps = std::lround(cfg.duration / cfg.dt);
  const long hold =
      cfg.noise_hold > 0.0
          ? std::max(1L, std::lround(cfg.noise_hold / cfg.dt))
          : 1L;

  Rng rng(cfg.seed);
  NoiseDraw noise;
  std::vector<FilterSnapshot> snaps(nf);
  std::vector<std::string> diagnostics;
  std::vector<long> gyro_only_count(nf, 0);
  std::vector<bool> assumption_flagged(nf, false);
  int triad_retries = 0;

  long k = 0;
  try {
    for (k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) * cfg.dt;
      truth = sys.truth(x);
      SensorReading reading;
      if (k % hold == 0) {
        reading = sample_sensors(truth, t, rng, cfg, &noise, &triad_retries);
      } else {
        reading = measure(truth, t, noise, cfg);
      }

      for (std::size_t i = 0; i < nf; ++i) {
        const FilterState s = sys.filter_state(x, i);
        FilterSnapshot& snap = snaps[i];
        const RotationMatrix r_tilde = attitude_error(s.r_hat, truth.r);
        snap.r_hat = s.r_hat;
        snap.beta_hat = s.beta_hat;
        snap.att_err_deg = rotation_angle(r_tilde) * kRadToDeg;
        snap.bias_err_degps = (truth.beta - s.beta_hat).norm() * kRadToDeg;
        snap.lyapunov = kNaN;
        snap.pmin = kNaN;
        snap.pmax = kNaN;
        if (options.monitors && has_riccati(sys.filter(i).kind)) {
          const PBounds b = p_bounds(s.p);
          snap.pmin = b.lambda_min;
          snap.pmax = b.lambda_max;
          if (b.lambda_min <= kPMinFloor) {
            if (!assumption_flagged[i]) {
              diagnostics.push_back(
                  std::string(to_string(sys.filter(i).kind)) +
                  ": lambda_min(P) = " + std::to_string(b.lambda_min) +
                  " at t = " + std::to_string(t));
              assumption_flagged[i] = true;
            }
          } else if (one_plus_trace(r_tilde) > kAntipodalTolerance) {
            snap.lyapunov = lyapunov_value(
                error_state(r_tilde, truth.beta - s.beta_hat), s.p);
          }
        }
      }

      StepView view;
      view.step = k;
      view.t = t;
      view.truth = &truth;
      view.filters = snaps;
      view.triad_err_deg =
          rotation_angle(attitude_error(reading.y, truth.r)) * kRadToDeg;
      sink(view);

      if (k < steps) {
        std::uint32_t gyro = 0;
        x = sys.rk4_step(x, t, cfg.dt, noise, &gyro);
        for (std::size_t i = 0; i < nf; ++i) {
          if ((gyro >> i) & 1u) {
            ++gyro_only_count[i];
          }
        }
      }
    }
  } catch (const SimulationError&) {
    throw;
  } catch (const Error& e) {
    throw SimulationError(e.what(), cfg.seed, k);
  }

  for (std::size_t i = 0; i < nf; ++i) {
    if (gyro_only_count[i] > 0) {
      diagnostics.push_back(std::string(to_string(sys.filter(i).kind)) +
                            ": " + std::to_string(gyro_only_count[i]) +
                            " gyro-only step(s) at antipodal measurements");
    }
  }
  if (triad_retries > 0) {
    diagnostics.push_back(std::to_string(triad_retries) +
                          " degenerate TRIAD draw(s) redrawn");
  }
  return diagnostics;
}

RunRecord run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  RunRecord rec;
  rec.seed = cfg.seed;
  rec.filters = cfg.filters;
  const std::size_t rows =
      static_cast<std::size_t>(std::lround(cfg.duration / cfg.dt)) + 1;
  rec.t.reserve(rows);
  rec.truth.reserve(rows);
  rec.triad_err_deg.reserve(rows);
  rec.samples.reserve(rows * cfg.filters.size());
  rec.diagnostics = run_scenario(
      cfg,
      [&](const StepView& v) {
        rec.t.push_back(v.t);
        rec.truth.push_back(*v.truth);
        rec.triad_err_deg.push_back(v.triad_err_deg);
        rec.samples.insert(rec.samples.end(), v.filters.begin(),
                           v.filters.end());
      },
      options);
  return rec;
}

// --- Metrics ---------------------------------------------------------------

RmsAccumulator::RmsAccumulator(std::vector<FilterKind> filters,
                               double transient_split)
    : kinds_(std::move(filters)),
      split_(transient_split),
      att_(kinds_.size()),
      bias_(kinds_.size()) {}

void RmsAccumulator::add(const StepView& step) {
  const int w = step.t < split_ ? 0 : 1;
  for (std::size_t i = 0; i < kinds_.size(); ++i) {
    const FilterSnapshot& s = step.filters[i];
    att_[i][w].sum += s.att_err_deg * s.att_err_deg;
    ++att_[i][w].count;
    bias_[i][w].sum += s.bias_err_degps * s.bias_err_degps;
    ++bias_[i][w].count;
  }
  triad_[w].sum += step.triad_err_deg * step.triad_err_deg;
  ++triad_[w].count;
}

double RmsAccumulator::rms(const Sums& s) {
  return s.count > 0 ? std::sqrt(s.sum / static_cast<double>(s.count)) : 0.0;
}

RunMetrics RmsAccumulator::result() const {
  RunMetrics m;
  for (std::size_t i = 0; i < kinds_.size(); ++i) {
    m.filters.push_back({kinds_[i],
                         {rms(att_[i][0]), rms(att_[i][1])},
                         {rms(bias_[i][0]), rms(bias_[i][1])}});
  }
  m.triad_deg = {rms(triad_[0]), rms(triad_[1])};
  return m;
}

RunMetrics rms_metrics(const RunRecord& record, double transient_split) {
  RmsAccumulator acc(record.filters, transient_split);
  const std::size_t nf = record.filters.size();
  for (std::size_t row = 0; row < record.rows(); ++row) {
    StepView v;
    v.step = static_cast<long>(row);
    v.t = record.t[row];
    v.truth = &record.truth[row];
    v.filters = std::span<const FilterSnapshot>(
        record.samples.data() + row * nf, nf);
    v.triad_err_deg = record.triad_err_deg[row];
    acc.add(v);
  }
  return acc.result();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

MonteCarloSummary monte_carlo(const ScenarioConfig& cfg, int n_runs,
                              unsigned threads) {
  if (n_runs < 1) {
    throw ValidationError("n_runs must be >= 1");
  }
  cfg.validate();
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n_runs));

  std::vector<RunMetrics> results(static_cast<std::size_t>(n_runs));
  std::vector<std::vector<std::string>> diags(results.size());
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_runs) {
        return;
      }
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure) {
          return;
        }
      }
      ScenarioConfig run_cfg = cfg;
      run_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
      try {
        RmsAccumulator acc(run_cfg.filters, run_cfg.transient_split);
        diags[static_cast<std::size_t>(i)] = run_scenario(
            run_cfg, [&](const StepView& v) { acc.add(v); },
            RunOptions{.monitors = false});
        results[static_cast<std::size_t>(i)] = acc.result();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        return;
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back(worker);
    }
    for (auto& th : pool) {
      th.join();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  MonteCarloSummary sum;
  sum.n_runs = n_runs;
  sum.seed = cfg.seed;
  const std::size_t nf = cfg.filters.size();
  sum.filters.resize(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    sum.filters[f].kind = cfg.filters[f];
  }
  for (std::size_t i = 0; i < results.size(); ++i) {
    const RunMetrics& m = results[i];
    for (std::size_t f = 0; f < nf; ++f) {
      sum.filters[f].attitude_deg.transient += m.filters[f].attitude_deg.transient;
      sum.filters[f].attitude_deg.steady += m.filters[f].attitude_deg.steady;
      sum.filters[f].bias_degps.transient += m.filters[f].bias_degps.transient;
      sum.filters[f].bias_degps.steady += m.filters[f].bias_degps.steady;
    }
    sum.triad_deg.transient += m.triad_deg.transient;
    sum.triad_deg.steady += m.triad_deg.steady;
    for (const std::string& d : diags[i]) {
      sum.diagnostics.push_back("run " + std::to_string(i) + ": " + d);
    }
  }
  const double n = static_cast<double>(n_runs);
  for (FilterMetrics& f : sum.filters) {
    f.attitude_deg.transient /= n;
    f.attitude_deg.steady /= n;
    f.bias_degps.transient /= n;
    f.bias_degps.steady /= n;
  }
  sum.triad_deg.transient /= n;
  sum.triad_deg.steady /= n;
  return sum;
}

}  // namespace geoatt
