#include "spinwall/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "spinwall/numerics.hpp"

namespace spinwall {

int chi(double a1, double a2, double b1, double b2) {
  const double c = a1 * b2 - a2 * b1;
  if (std::abs(c) < kChiZeroTol) return 0;
  return c > 0 ? 1 : -1;
}

double r_max(const Vec3& v1, const Vec3& v2) {
  if (std::abs(norm(v1) - 1.0) > kUnitNormTol || std::abs(norm(v2) - 1.0) > kUnitNormTol)
    throw std::invalid_argument("r_max: axes must be unit vectors");
  return std::sqrt(std::max(0.0, (1.0 - dot(v1, v2)) / 2.0));
}

int SystemGeometry::check_d(int d) {
  if (d != 1 && d != 2) throw std::invalid_argument("circle index must be 1 or 2");
  return d - 1;
}

static CircleFrame frame_for_axis(const Vec3& v) {
  // e1 is the reference direction ex (or ey when v is nearly parallel to ex)
  // projected onto the plane orthogonal to v; e2 = v x e1 closes the
  // right-handed frame.
  Vec3 ref{1.0, 0.0, 0.0};
  Vec3 p = ref - dot(ref, v) * v;
  if (norm(p) < 1e-6) {
    ref = Vec3{0.0, 1.0, 0.0};
    p = ref - dot(ref, v) * v;
  }
  CircleFrame f;
  f.e1 = normalized(p);
  f.e2 = cross(v, f.e1);
  return f;
}

SystemGeometry SystemGeometry::make(const Vec3& v1, const Vec3& v2, double R) {
  if (std::abs(norm(v1) - 1.0) > kUnitNormTol || std::abs(norm(v2) - 1.0) > kUnitNormTol)
    throw std::invalid_argument("SystemGeometry: axes must be unit vectors");
  if (norm(v1 - v2) < kUnitNormTol)
    throw std::invalid_argument("SystemGeometry: axes must be distinct");
  const double rmax = r_max(v1, v2);
  if (!(R > 0.0) || !(R < rmax))
    throw std::invalid_argument("SystemGeometry: radius must satisfy 0 < R < " +
                                std::to_string(rmax));
  SystemGeometry g;
  g.axes_[0] = v1;
  g.axes_[1] = v2;
  g.radius_ = R;
  g.height_ = std::sqrt(1.0 - R * R);
  for (int i = 0; i < 2; ++i) {
    g.centers_[i] = g.axes_[i] * g.height_;
    g.frames_[i] = frame_for_axis(g.axes_[i]);
  }
  return g;
}

Vec3 SystemGeometry::embed(int d, double phi) const {
  const int i = check_d(d);
  return centers_[i] + radius_ * (std::cos(phi) * frames_[i].e1 + std::sin(phi) * frames_[i].e2);
}

bool SystemGeometry::on_circle(const Vec3& u, int d, double tol) const {
  const int i = check_d(d);
  const Vec3 p = u - dot(u, axes_[i]) * axes_[i];
  return std::abs(norm(p) - radius_) <= tol && dot(u, axes_[i]) > 0.0;
}

double SystemGeometry::project_angle(const Vec3& u, int d) const {
  const int i = check_d(d);
  const Vec3 p = u - dot(u, axes_[i]) * axes_[i];
  if (std::abs(norm(p) - radius_) > kOnCircleTol)
    throw std::domain_error("project_angle: |pi_perp(u)| != R, point is not on circle " +
                            std::to_string(d));
  if (!(dot(u, axes_[i]) > 0.0))
    throw std::domain_error("project_angle: <u, v_d> <= 0, point is not on circle " +
                            std::to_string(d));
  const double a = std::atan2(dot(p, frames_[i].e2), dot(p, frames_[i].e1));
  return wrap_angle(a);
}

double SystemGeometry::oriented_angle(const Vec3& u, const Vec3& u2, int d) const {
  const int i = check_d(d);
  if (!on_circle(u, d) || !on_circle(u2, d))
    throw std::domain_error("oriented_angle: both points must lie on circle " + std::to_string(d));
  const Vec3 p = u - centers_[i];
  const Vec3 q = u2 - centers_[i];
  const int s = chi(dot(p, frames_[i].e1), dot(p, frames_[i].e2), dot(q, frames_[i].e1),
                    dot(q, frames_[i].e2));
  const double c = std::clamp(dot(p, q) / (radius_ * radius_), -1.0, 1.0);
  if (s == 0) return c > 0.0 ? 0.0 : -M_PI;
  return wrap_angle(s * std::acos(c));
}

double SystemGeometry::bond_dot(double theta) const {
  return (1.0 - radius_ * radius_) + radius_ * radius_ * std::cos(theta);
}

double SystemGeometry::bond_angle(double dot_value) const {
  const double c = std::clamp((dot_value - (1.0 - radius_ * radius_)) / (radius_ * radius_), -1.0,
                              1.0);
  return std::acos(c);
}

}  // namespace spinwall
