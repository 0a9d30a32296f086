#include "geoatt/triad.hpp"

#include <cmath>
#include <string>

#include "geoatt/errors.hpp"

namespace geoatt {

namespace {

Mat3 frame(const Vec3& first, const Vec3& second, const char* side) {
  const double n1 = first.norm();
  const double n2 = second.norm();
  if (!(n1 > 0.0) || !(n2 > 0.0) || !std::isfinite(n1) ||
      !std::isfinite(n2)) {
    throw DegenerateObservations(std::string("triad: zero ") + side +
                                 " vector");
  }
  const Vec3 t1 = first / n1;
  const Vec3 cross = t1.cross(second / n2);
  const double sin_sep = cross.norm();
  if (sin_sep < std::sin(kTriadMinSeparation)) {
    throw DegenerateObservations(std::string("triad: ") + side +
                                 " vectors are (anti)parallel");
  }
  const Vec3 t2 = cross / sin_sep;
  Mat3 out;
  out.col(0) = t1;
  out.col(1) = t2;
  out.col(2) = t1.cross(t2);
  return out;
}

}  // namespace

RotationMatrix triad(const VectorObservation& obs1,
                     const VectorObservation& obs2) {
  const Mat3 body = frame(obs1.body, obs2.body, "body");
  const Mat3 ref = frame(obs1.reference, obs2.reference, "reference");
  return RotationMatrix::unchecked(ref * body.transpose());
}

}  // namespace geoatt
