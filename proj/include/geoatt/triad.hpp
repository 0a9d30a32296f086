#pragma once

#include "geoatt/so3.hpp"

namespace geoatt {

/// A body-frame direction and the inertial reference it observes, related
/// by body = R^T reference. Both are normalized before use.
struct VectorObservation {
  Vec3 body;
  Vec3 reference;
};

/// Minimum angle (rad) between the two body directions, and between the two
/// reference directions, accepted by triad().
inline constexpr double kTriadMinSeparation = 1e-6;

/// Two-vector attitude determination. The first observation is matched
/// exactly: R * normalize(obs1.body) == normalize(obs1.reference).
/// Throws DegenerateObservations for zero or near-parallel vectors.
RotationMatrix triad(const VectorObservation& obs1,
                     const VectorObservation& obs2);

}  // namespace geoatt
