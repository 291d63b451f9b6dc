#include "cbp/geometry.hpp"

#include <algorithm>
#include <string>

namespace cbp {

Vec3 unit(const Vec3& v) {
  const double n = norm(v);
  if (!(n > kDegeneracyThreshold)) {
    throw DegenerateVector("cannot normalise vector of norm " + std::to_string(n));
  }
  return v / n;
}

Frame orthonormalize(const Frame& f) {
  const double gram_det = std::pow(dot(f.x_axis, cross(f.y_axis, f.z_axis)), 2);
  if (!(gram_det > 1e-9)) {
    throw DegenerateFrame("frame axes are nearly linearly dependent");
  }
  const Vec3 x = f.x_axis / norm(f.x_axis);
  Vec3 y = f.y_axis - dot(f.y_axis, x) * x;
  y = y / norm(y);
  Vec3 z = f.z_axis - dot(f.z_axis, x) * x;
  z -= dot(z, y) * y;
  z = z / norm(z);
  return {x, y, z};
}

double orthonormality_error(const Frame& f) {
  return std::max({std::abs(norm(f.x_axis) - 1.0), std::abs(norm(f.y_axis) - 1.0),
                   std::abs(norm(f.z_axis) - 1.0), std::abs(dot(f.x_axis, f.y_axis)),
                   std::abs(dot(f.x_axis, f.z_axis)), std::abs(dot(f.y_axis, f.z_axis))});
}

Frame frame_from_heading(const Vec3& heading) {
  const Vec3 x = unit(heading);
  Vec3 y = cross(x, Vec3{0.0, 0.0, 1.0});
  if (norm(y) < 1e-9) {
    y = cross(x, Vec3{0.0, 1.0, 0.0});
  }
  y = unit(y);
  return {x, y, cross(x, y)};
}

}  // namespace cbp
