#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace lcd {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0]+b[0], a[1]+b[1], a[2]+b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0]-b[0], a[1]-b[1], a[2]-b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s*a[0], s*a[1], s*a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0]*b[0] + a[1]*b[1] + a[2]*b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1]*b[2]-a[2]*b[1], a[2]*b[0]-a[0]*b[2], a[0]*b[1]-a[1]*b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double dist(const Vec3& a, const Vec3& b) { return norm(a - b); }

inline Vec4 operator+(const Vec4& a, const Vec4& b) { return {a[0]+b[0], a[1]+b[1], a[2]+b[2], a[3]+b[3]}; }
inline Vec4 operator-(const Vec4& a, const Vec4& b) { return {a[0]-b[0], a[1]-b[1], a[2]-b[2], a[3]-b[3]}; }
inline Vec4 operator*(double s, const Vec4& a) { return {s*a[0], s*a[1], s*a[2], s*a[3]}; }
inline double dot(const Vec4& a, const Vec4& b) { return a[0]*b[0] + a[1]*b[1] + a[2]*b[2] + a[3]*b[3]; }
inline double norm(const Vec4& a) { return std::sqrt(dot(a, a)); }

// distance from p to the line through q with unit direction d
inline double line_dist(const Vec3& p, const Vec3& q, const Vec3& d) {
  Vec3 v = p - q;
  double t = dot(v, d);
  return norm(v - t*d);
}

}  // namespace lcd
