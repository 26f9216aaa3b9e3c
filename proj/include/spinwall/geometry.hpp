#pragma once

#include <array>

#include "spinwall/vec3.hpp"

namespace spinwall {

// Geometry of the two admissible circles on the unit sphere.
//
// Circle d (d = 1, 2) is the set of unit vectors u with |u - (u.v_d) v_d| = R
// and u.v_d > 0. It lies in the plane orthogonal to the axis v_d at height
// sqrt(1 - R^2), i.e. it is centered at c_d = v_d sqrt(1 - R^2) with radius R.
// The circles are disjoint as long as R < r_max(v1, v2).
//
// Each circle carries a fixed right-handed in-plane frame (e1_d, e2_d) with
// e1_d x e2_d = v_d, so that the chart
//     embed(d, phi) = c_d + R (cos phi e1_d + sin phi e2_d)
// is deterministic across runs. Angles are always reported in [-pi, pi).

inline constexpr double kUnitNormTol = 1e-12;
inline constexpr double kOnCircleTol = 1e-9;
inline constexpr double kChiZeroTol = 1e-14;

// sign(a1*b2 - a2*b1) of two plane vectors, 0 when the cross product is
// numerically zero (|.| < kChiZeroTol).
int chi(double a1, double a2, double b1, double b2);

// sqrt((1 - v1.v2)/2), the largest admissible circle radius.
double r_max(const Vec3& v1, const Vec3& v2);

struct CircleFrame {
  Vec3 e1, e2;
};

class SystemGeometry {
 public:
  // Validates |v1| = |v2| = 1, v1 != v2 and 0 < R < r_max (strict).
  static SystemGeometry make(const Vec3& v1, const Vec3& v2, double R);

  double radius() const { return radius_; }
  const Vec3& axis(int d) const { return axes_[check_d(d)]; }
  const Vec3& center(int d) const { return centers_[check_d(d)]; }
  const CircleFrame& frame(int d) const { return frames_[check_d(d)]; }
  double center_height() const { return height_; }  // sqrt(1 - R^2)

  Vec3 embed(int d, double phi) const;

  // Inverse chart of embed. Throws std::domain_error if u is not on circle d
  // within kOnCircleTol.
  double project_angle(const Vec3& u, int d) const;

  // Oriented angle from u to u2 around the center of circle d, in [-pi, pi).
  // Both points must lie on circle d.
  double oriented_angle(const Vec3& u, const Vec3& u2, int d) const;

  bool on_circle(const Vec3& u, int d, double tol = kOnCircleTol) const;

  // Dot product between points of circle d at angle separation theta:
  // (1 - R^2) + R^2 cos(theta). Used to invert bond dot products exactly.
  double bond_dot(double theta) const;
  // Inverse of bond_dot, clamped: theta = acos((dot - 1 + R^2)/R^2) >= 0.
  double bond_angle(double dot_value) const;

 private:
  static int check_d(int d);

  Vec3 axes_[2];
  Vec3 centers_[2];
  CircleFrame frames_[2];
  double radius_ = 0.0;
  double height_ = 0.0;
};

}  // namespace spinwall
