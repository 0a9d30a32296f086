#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace geoatt {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSkewSymmetric : public Error {
 public:
  using Error::Error;
};

class NotOrthonormal : public Error {
 public:
  using Error::Error;
};

class NotUnitNorm : public Error {
 public:
  using Error::Error;
};

/// Raised where e_R, E(R)^-1 or a quaternion |eta| division would blow up
/// (rotation angle within tolerance of pi).
class AntipodalSingularity : public Error {
 public:
  using Error::Error;
};

class SingularTuning : public Error {
 public:
  using Error::Error;
};

class InvalidTuning : public Error {
 public:
  using Error::Error;
};

class SingularP : public Error {
 public:
  using Error::Error;
};

class DegenerateObservations : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A failure inside a simulation run, tagged with the run seed and step.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, std::uint64_t seed, long step)
      : Error(what + " (seed " + std::to_string(seed) + ", step " +
              std::to_string(step) + ")"),
        seed_(seed),
        step_(step) {}

  std::uint64_t seed() const noexcept { return seed_; }
  long step() const noexcept { return step_; }

 private:
  std::uint64_t seed_;
  long step_;
};

}  // namespace geoatt
