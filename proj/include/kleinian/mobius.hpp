#pragma once

// Möbius transformations of the Riemann sphere as determinant-one 2x2 complex
// matrices, together with Hermitian circlines (circles and lines treated
// uniformly).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <ostream>
#include <vector>

#include "kleinian/error.hpp"

namespace kleinian {

using Complex = std::complex<double>;

inline constexpr double kDeterminantTolerance = 1e-12;
inline constexpr double kParabolicTolerance = 1e-9;
inline constexpr double kPoleTolerance = 1e-14;

/// Unit-sphere coordinates of a point of the extended plane.
struct Vec3 {
  double x = 0, y = 0, z = 0;

  friend Vec3 operator-(const Vec3& p, const Vec3& q) { return {p.x - q.x, p.y - q.y, p.z - q.z}; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// A point of the Riemann sphere: a finite complex number or infinity.
class SpherePoint {
 public:
  constexpr SpherePoint() = default;
  SpherePoint(Complex z) : value_(z) {}  // NOLINT(google-explicit-constructor)
  SpherePoint(double re, double im) : value_(Complex(re, im)) {}

  static constexpr SpherePoint infinity() { return SpherePoint(); }

  bool is_infinity() const { return !value_.has_value(); }
  bool is_finite() const { return value_.has_value(); }
  Complex value() const { return *value_; }

  /// Inverse stereographic projection onto the unit sphere; infinity is the north pole.
  Vec3 to_sphere() const {
    if (!value_) return {0, 0, 1};
    const double r2 = std::norm(*value_);
    const double s = 1.0 / (1.0 + r2);
    return {2 * value_->real() * s, 2 * value_->imag() * s, (r2 - 1) * s};
  }

  static SpherePoint from_sphere(const Vec3& p) {
    if (p.z >= 1.0 - 1e-15) return infinity();
    return Complex(p.x, p.y) / (1.0 - p.z);
  }

  friend std::ostream& operator<<(std::ostream& os, const SpherePoint& p) {
    if (p.is_infinity()) return os << "inf";
    return os << p.value();
  }

 private:
  std::optional<Complex> value_;
};

/// Chordal distance on the unit sphere; at most 2.
inline double chordal_distance(const SpherePoint& p, const SpherePoint& q) {
  if (p.is_infinity() && q.is_infinity()) return 0;
  if (p.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(q.value()));
  if (q.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(p.value()));
  const Complex z = p.value(), w = q.value();
  return 2.0 * std::abs(z - w) / std::sqrt((1.0 + std::norm(z)) * (1.0 + std::norm(w)));
}

enum class MapClass { Identity, Parabolic, Elliptic, Loxodromic };

inline const char* to_string(MapClass c) {
  switch (c) {
    case MapClass::Identity: return "identity";
    case MapClass::Parabolic: return "parabolic";
    case MapClass::Elliptic: return "elliptic";
    case MapClass::Loxodromic: return "loxodromic";
  }
  return "?";
}

class Circline;

/// z -> (az + b)/(cz + d) with ad - bc = 1. M and -M are the same map.
class MoebiusMap {
 public:
  MoebiusMap() : a_(1), b_(0), c_(0), d_(1) {}

  /// Normalizes to determinant one; the square root is taken with nonnegative
  /// real part (nonnegative imaginary part on ties).
  MoebiusMap(Complex a, Complex b, Complex c, Complex d) {
    const Complex det = a * d - b * c;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (!(scale > 0) || std::abs(det) <= 1e-300 || std::abs(det) < 1e-28 * scale * scale || !std::isfinite(scale))
      throw Error(ErrorCode::SingularMatrix, "determinant vanishes");
    const Complex root = std::sqrt(det);
    a_ = a / root;
    b_ = b / root;
    c_ = c / root;
    d_ = d / root;
  }

  static MoebiusMap identity() { return {}; }
  static MoebiusMap translation(Complex t) { return {1, t, 0, 1}; }
  /// Maps p1, p2, p3 to 0, 1, infinity.
  static MoebiusMap to_zero_one_infinity(const SpherePoint& p1, const SpherePoint& p2, const SpherePoint& p3);
  /// The unique map sending (p1, p2, p3) to (q1, q2, q3).
  static MoebiusMap three_point(const std::array<SpherePoint, 3>& from, const std::array<SpherePoint, 3>& to) {
    return to_zero_one_infinity(to[0], to[1], to[2]).inverse() * to_zero_one_infinity(from[0], from[1], from[2]);
  }

  Complex a() const { return a_; }
  Complex b() const { return b_; }
  Complex c() const { return c_; }
  Complex d() const { return d_; }

  Complex determinant() const { return a_ * d_ - b_ * c_; }
  Complex trace() const { return a_ + d_; }
  Complex trace_squared() const { return trace() * trace(); }

  MoebiusMap inverse() const { return raw(d_, -b_, -c_, a_); }
  MoebiusMap negated() const { return raw(-a_, -b_, -c_, -d_); }

  /// Matrix product; (M * N)(z) = M(N(z)).
  friend MoebiusMap operator*(const MoebiusMap& m, const MoebiusMap& n) {
    return MoebiusMap(m.a_ * n.a_ + m.b_ * n.c_, m.a_ * n.b_ + m.b_ * n.d_, m.c_ * n.a_ + m.d_ * n.c_,
                      m.c_ * n.b_ + m.d_ * n.d_);
  }

  /// Product without renormalization, for tight inner loops over products of
  /// determinant-one factors.
  MoebiusMap multiply_unnormalized(const MoebiusMap& n) const {
    return raw(a_ * n.a_ + b_ * n.c_, a_ * n.b_ + b_ * n.d_, c_ * n.a_ + d_ * n.c_, c_ * n.b_ + d_ * n.d_);
  }

  double entry_scale() const { return std::abs(a_) + std::abs(b_) + std::abs(c_) + std::abs(d_); }

  SpherePoint operator()(const SpherePoint& p) const {
    const double tiny = kPoleTolerance * entry_scale();
    if (p.is_infinity()) {
      if (std::abs(c_) < tiny) return SpherePoint::infinity();
      return a_ / c_;
    }
    const Complex z = p.value();
    const Complex den = c_ * z + d_;
    if (std::abs(den) < tiny * std::max(1.0, std::abs(z))) return SpherePoint::infinity();
    return (a_ * z + b_) / den;
  }

  /// |M'(z)| = 1/|cz + d|^2. At infinity only meaningful when infinity is fixed
  /// (c = 0), where the chart multiplier is |d|^2.
  double multiplier_modulus(const SpherePoint& p) const {
    if (p.is_infinity()) return std::norm(d_);
    return 1.0 / std::norm(c_ * p.value() + d_);
  }

  Circline operator()(const Circline& circ) const;

  friend std::ostream& operator<<(std::ostream& os, const MoebiusMap& m) {
    return os << "[[" << m.a_ << "," << m.b_ << "],[" << m.c_ << "," << m.d_ << "]]";
  }

 private:
  static MoebiusMap raw(Complex a, Complex b, Complex c, Complex d) {
    MoebiusMap m;
    m.a_ = a;
    m.b_ = b;
    m.c_ = c;
    m.d_ = d;
    return m;
  }

  Complex a_, b_, c_, d_;
};

inline MoebiusMap compose(const MoebiusMap& m, const MoebiusMap& n) { return m * n; }
inline SpherePoint apply(const MoebiusMap& m, const SpherePoint& p) { return m(p); }

inline MoebiusMap MoebiusMap::to_zero_one_infinity(const SpherePoint& p1, const SpherePoint& p2,
                                                   const SpherePoint& p3) {
  // z -> (z - p1)(p2 - p3) / ((z - p3)(p2 - p1)), with the infinite point's factors dropped.
  if (p1.is_infinity()) {
    const Complex z2 = p2.value(), z3 = p3.value();
    return MoebiusMap(0, z2 - z3, 1, -z3);
  }
  if (p2.is_infinity()) {
    const Complex z1 = p1.value(), z3 = p3.value();
    return MoebiusMap(1, -z1, 1, -z3);
  }
  if (p3.is_infinity()) {
    const Complex z1 = p1.value(), z2 = p2.value();
    return MoebiusMap(1, -z1, 0, z2 - z1);
  }
  const Complex z1 = p1.value(), z2 = p2.value(), z3 = p3.value();
  return MoebiusMap(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1));
}

/// min over the sign ambiguity of the maximal entry deviation.
inline double projective_distance(const MoebiusMap& m, const MoebiusMap& n) {
  auto dev = [](const MoebiusMap& x, const MoebiusMap& y) {
    return std::max({std::abs(x.a() - y.a()), std::abs(x.b() - y.b()), std::abs(x.c() - y.c()),
                     std::abs(x.d() - y.d())});
  };
  return std::min(dev(m, n), dev(m, n.negated()));
}

inline bool projectively_equal(const MoebiusMap& m, const MoebiusMap& n, double tol = 1e-9) {
  return projective_distance(m, n) < tol;
}

inline bool is_identity(const MoebiusMap& m, double tol = 1e-9) {
  return projectively_equal(m, MoebiusMap::identity(), tol);
}

inline MapClass classify(const MoebiusMap& m, double parabolic_tol = kParabolicTolerance) {
  const Complex t2 = m.trace_squared();
  if (std::abs(t2 - 4.0) < parabolic_tol) return is_identity(m, 1e-7) ? MapClass::Identity : MapClass::Parabolic;
  if (std::abs(t2.imag()) < parabolic_tol && t2.real() >= 0 && t2.real() < 4) return MapClass::Elliptic;
  return MapClass::Loxodromic;
}

enum class FixedPointKind { Parabolic, Attracting, Repelling, Neutral };

struct FixedPoint {
  SpherePoint point;
  FixedPointKind kind;
};

/// One point for parabolic maps, two otherwise. Loxodromic points are tagged
/// by the modulus of the derivative there.
inline std::vector<FixedPoint> fixed_points(const MoebiusMap& m, double parabolic_tol = kParabolicTolerance) {
  const MapClass cls = classify(m, parabolic_tol);
  if (cls == MapClass::Identity) throw Error(ErrorCode::IdentityMap, "every point is fixed");
  const Complex a = m.a(), b = m.b(), c = m.c(), d = m.d();
  const double tiny = kPoleTolerance * m.entry_scale();
  const bool c_zero = std::abs(c) < tiny;

  if (cls == MapClass::Parabolic) {
    if (c_zero) return {{SpherePoint::infinity(), FixedPointKind::Parabolic}};
    return {{SpherePoint((a - d) / (2.0 * c)), FixedPointKind::Parabolic}};
  }

  auto tag = [&](const SpherePoint& p, double multiplier) {
    if (cls == MapClass::Elliptic) return FixedPoint{p, FixedPointKind::Neutral};
    return FixedPoint{p, multiplier < 1 ? FixedPointKind::Attracting : FixedPointKind::Repelling};
  };

  if (c_zero) {
    // Affine map z -> (a/d) z + b/d.
    const Complex k = a / d;
    return {tag(SpherePoint(b / (d - a)), std::abs(k)), tag(SpherePoint::infinity(), 1.0 / std::abs(k))};
  }

  // Roots of c z^2 + (d - a) z - b = 0; discriminant (a - d)^2 + 4bc = tr^2 - 4.
  const Complex disc = std::sqrt(m.trace_squared() - 4.0);
  const Complex amd = a - d;
  const Complex q = std::abs(amd + disc) >= std::abs(amd - disc) ? amd + disc : amd - disc;
  const Complex z1 = q / (2.0 * c);
  const Complex z2 = -2.0 * b / q;
  return {tag(SpherePoint(z1), m.multiplier_modulus(z1)), tag(SpherePoint(z2), m.multiplier_modulus(z2))};
}

/// The attracting fixed point of a loxodromic map, the unique fixed point of a
/// parabolic one, nothing otherwise.
inline std::optional<SpherePoint> limit_fixed_point(const MoebiusMap& m, double parabolic_tol = kParabolicTolerance) {
  const MapClass cls = classify(m, parabolic_tol);
  if (cls == MapClass::Identity || cls == MapClass::Elliptic) return std::nullopt;
  for (const auto& fp : fixed_points(m, parabolic_tol))
    if (fp.kind == FixedPointKind::Parabolic || fp.kind == FixedPointKind::Attracting) return fp.point;
  return std::nullopt;
}

/// Circle or line: locus of A|z|^2 + 2 Re(conj(B) z) + C = 0, i.e. the Hermitian
/// form [[A, B], [conj(B), C]] evaluated on (z, 1). Stored scale-normalized so
/// that max(|A|, |B|, |C|) = 1, with a canonical overall sign.
class Circline {
 public:
  static constexpr double kLineTolerance = 1e-12;

  Circline(double a, Complex b, double c) : Circline(a, b, c, std::norm(b) - a * c) {}

  /// With the discriminant |B|^2 - AC supplied separately, e.g. carried
  /// exactly through a transport instead of recomputed with cancellation.
  Circline(double a, Complex b, double c, double discriminant) : a_(a), b_(b), c_(c), disc_(discriminant) {
    const double s = std::max({std::abs(a_), std::abs(b_), std::abs(c_)});
    if (!(s > 0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "circline coefficients vanish");
    a_ /= s;
    b_ /= s;
    c_ /= s;
    disc_ /= s * s;
    if (!(disc_ > 0)) throw Error(ErrorCode::InvalidArgument, "degenerate circline");
    // Sign: largest-magnitude component positive, earlier components win ties.
    const std::array<double, 4> comps{a_, b_.real(), b_.imag(), c_};
    double best = 0;
    for (double v : comps)
      if (std::abs(v) > std::abs(best) * (1 + 1e-12)) best = v;
    if (best < 0) {
      a_ = -a_;
      b_ = -b_;
      c_ = -c_;
    }
  }

  static Circline circle(Complex center, double radius) {
    if (!(radius > 0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
    return {1.0, -center, std::norm(center) - radius * radius};
  }

  /// Re(conj(normal) z) = offset, normal of any nonzero length.
  static Circline line(Complex normal, double offset) {
    const double len = std::abs(normal);
    if (!(len > 0)) throw Error(ErrorCode::InvalidArgument, "line normal vanishes");
    return {0.0, normal / (2.0 * len), -offset / len};
  }

  static Circline horizontal_line(double im) { return line(Complex(0, 1), im); }

  /// Through three distinct points (a line if one is infinite or they are collinear).
  static Circline through(const SpherePoint& p, const SpherePoint& q, const SpherePoint& r);

  double A() const { return a_; }
  Complex B() const { return b_; }
  double C() const { return c_; }

  bool is_line() const { return std::abs(a_) < kLineTolerance; }
  Complex center() const { return -b_ / a_; }
  double radius() const { return std::sqrt(disc_) / std::abs(a_); }
  /// |B|^2 - AC of the scale-normalized form.
  double discriminant() const { return disc_; }
  /// Unit normal and offset for lines (Re(conj(n) z) = offset).
  Complex line_normal() const { return b_ / std::abs(b_); }
  double line_offset() const { return -c_ / (2.0 * std::abs(b_)); }

  /// Signed value of the defining form; zero on the circline.
  double evaluate(Complex z) const { return a_ * std::norm(z) + 2.0 * (std::conj(b_) * z).real() + c_; }

  /// The cutting plane n . X = h of the unit sphere, with |n| = 1.
  struct Plane {
    Vec3 normal;
    double offset;
  };
  Plane sphere_plane() const {
    Vec3 n{b_.real(), b_.imag(), 0.5 * (a_ - c_)};
    double h = -0.5 * (a_ + c_);
    const double len = n.norm();
    return {{n.x / len, n.y / len, n.z / len}, h / len};
  }

  /// Chordal (unit-sphere) diameter of the circle.
  double chordal_diameter() const { return 2.0 * std::sqrt(sphere_radius_squared()); }

  /// Squared radius of the circle on the unit sphere, (|B|^2 - AC) / |n|^2.
  double sphere_radius_squared() const {
    const double nsq = std::norm(b_) + 0.25 * (a_ - c_) * (a_ - c_);
    return disc_ / nsq;
  }

  /// Chordal distance from a point to the circle on the sphere.
  double chordal_distance_to(const SpherePoint& p) const {
    const Plane pl = sphere_plane();
    const Vec3 x = p.to_sphere();
    // Nearest circle point: project x onto the plane, then radially onto the circle.
    const double rho = std::sqrt(sphere_radius_squared());
    const double t = x.x * pl.normal.x + x.y * pl.normal.y + x.z * pl.normal.z - pl.offset;
    Vec3 proj{x.x - t * pl.normal.x, x.y - t * pl.normal.y, x.z - t * pl.normal.z};
    const Vec3 centre{pl.offset * pl.normal.x, pl.offset * pl.normal.y, pl.offset * pl.normal.z};
    Vec3 radial = proj - centre;
    const double rl = radial.norm();
    if (rl < 1e-300) return std::sqrt(t * t + rho * rho);
    const Vec3 nearest{centre.x + rho * radial.x / rl, centre.y + rho * radial.y / rl, centre.z + rho * radial.z / rl};
    return (x - nearest).norm();
  }

  /// A point on the circline parametrized by angle on the sphere circle.
  SpherePoint point_at(double angle) const {
    const Plane pl = sphere_plane();
    const double rho = std::sqrt(sphere_radius_squared());
    // Orthonormal basis of the plane.
    Vec3 n = pl.normal;
    Vec3 u = std::abs(n.z) < 0.9 ? Vec3{-n.y, n.x, 0} : Vec3{0, -n.z, n.y};
    const double ul = u.norm();
    u = {u.x / ul, u.y / ul, u.z / ul};
    const Vec3 v{n.y * u.z - n.z * u.y, n.z * u.x - n.x * u.z, n.x * u.y - n.y * u.x};
    const double ca = std::cos(angle), sa = std::sin(angle);
    const Vec3 x{pl.offset * n.x + rho * (ca * u.x + sa * v.x), pl.offset * n.y + rho * (ca * u.y + sa * v.y),
                 pl.offset * n.z + rho * (ca * u.z + sa * v.z)};
    return SpherePoint::from_sphere(x);
  }

  friend std::ostream& operator<<(std::ostream& os, const Circline& c) {
    if (c.is_line()) return os << "line(n=" << c.line_normal() << ", off=" << c.line_offset() << ")";
    return os << "circle(c=" << c.center() << ", r=" << c.radius() << ")";
  }

 private:
  double a_;
  Complex b_;
  double c_;
  double disc_;
};

/// Hermitian transport (M^-1)^* H M^-1.
inline Circline MoebiusMap::operator()(const Circline& h) const {
  // N = M^-1 = [[d, -b], [-c, a]]; result = N^* H N.
  const Complex n11 = d_, n12 = -b_, n21 = -c_, n22 = a_;
  const Complex hA = h.A(), hB = h.B(), hBc = std::conj(h.B()), hC = h.C();
  // H N
  const Complex p11 = hA * n11 + hB * n21, p12 = hA * n12 + hB * n22;
  const Complex p21 = hBc * n11 + hC * n21, p22 = hBc * n12 + hC * n22;
  // N^* (H N)
  const Complex r11 = std::conj(n11) * p11 + std::conj(n21) * p21;
  const Complex r12 = std::conj(n11) * p12 + std::conj(n21) * p22;
  const Complex r22 = std::conj(n12) * p12 + std::conj(n22) * p22;
  // det N = 1, so the discriminant is carried over exactly.
  return {r11.real(), r12, r22.real(), h.discriminant()};
}

inline Circline map_circline(const MoebiusMap& m, const Circline& c) { return m(c); }

inline Circline Circline::through(const SpherePoint& p, const SpherePoint& q, const SpherePoint& r) {
  // Send the real line through the three points: the map taking (0, 1, inf) to (p, q, r).
  const MoebiusMap m = MoebiusMap::to_zero_one_infinity(p, q, r).inverse();
  return m(horizontal_line(0.0));
}

/// Equality of loci up to scale and sign, compared through the sphere plane.
inline double circline_distance(const Circline& x, const Circline& y) {
  const auto px = x.sphere_plane(), py = y.sphere_plane();
  auto dev = [](const Circline::Plane& u, const Circline::Plane& v, double s) {
    return std::max({std::abs(u.normal.x - s * v.normal.x), std::abs(u.normal.y - s * v.normal.y),
                     std::abs(u.normal.z - s * v.normal.z), std::abs(u.offset - s * v.offset)});
  };
  return std::min(dev(px, py, 1.0), dev(px, py, -1.0));
}

}  // namespace kleinian
