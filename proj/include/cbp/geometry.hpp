#pragma once

#include <cmath>

#include "cbp/errors.hpp"

namespace cbp {

// Norm below which a vector is treated as zero: two points closer than this
// are considered collocated.
inline constexpr double kDegeneracyThreshold = 1e-12;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// v/|v|. Throws DegenerateVector when |v| <= kDegeneracyThreshold.
Vec3 unit(const Vec3& v);

// Natural Frenet frame of a unit-speed particle; x_axis is the velocity.
struct Frame {
  Vec3 x_axis{1.0, 0.0, 0.0};
  Vec3 y_axis{0.0, 1.0, 0.0};
  Vec3 z_axis{0.0, 0.0, 1.0};

  friend bool operator==(const Frame&, const Frame&) = default;
};

// Gram-Schmidt in x, y, z order. The x direction is kept exactly (only
// rescaled) so the agent's heading is never rotated by the correction.
// Throws DegenerateFrame when the Gram determinant is <= 1e-9.
Frame orthonormalize(const Frame& f);

// Largest deviation of f from orthonormality: max over |axis|-1 and
// pairwise dot products.
double orthonormality_error(const Frame& f);

// Right-handed frame whose x axis is unit(heading). y = unit(h x k) with
// k = (0,0,1), falling back to k = (0,1,0) when |h x k| < 1e-9; z = x cross y.
Frame frame_from_heading(const Vec3& heading);

struct AgentState {
  Vec3 position;
  Frame frame;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

}  // namespace cbp
