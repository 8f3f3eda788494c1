#ifndef GOC_GEOMETRY_HPP_
#define GOC_GEOMETRY_HPP_

#include <cmath>

namespace goc {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 const& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 const& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
};

constexpr Vec2 operator+(Vec2 a, Vec2 const& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, Vec2 const& b) { return a -= b; }
constexpr Vec2 operator-(Vec2 const& a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
constexpr bool operator==(Vec2 const& a, Vec2 const& b) { return a.x == b.x && a.y == b.y; }

constexpr double dot(Vec2 const& a, Vec2 const& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 const& a, Vec2 const& b) { return a.x * b.y - a.y * b.x; }
constexpr double norm2(Vec2 const& a) { return dot(a, a); }
inline double norm(Vec2 const& a) { return std::hypot(a.x, a.y); }

//! Rotates by -90 degrees; for a curve traversed with its interior on the
//! left this maps the tangent onto the outward normal.
constexpr Vec2 right_normal(Vec2 const& t) { return {t.y, -t.x}; }

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace goc

#endif  // GOC_GEOMETRY_HPP_
