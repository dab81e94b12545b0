#pragma once

// Circle packings: oriented circles on the sphere, tangency graphs, Descartes
// residuals, Apollonian generation and normalization to the standard gasket.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <istream>
#include <iterator>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kleinian/error.hpp"
#include "kleinian/mobius.hpp"

namespace kleinian {

/// Oriented Hermitian form A|z|^2 + 2 Re(conj(B) z) + C; the interior of the
/// circle is where the form is negative. Positive rescaling keeps orientation.
/// The discriminant D = |B|^2 - AC is carried alongside, since recomputing it
/// from the entries cancels badly for small circles.
struct HermitianForm {
  double A = 0;
  Complex B = 0;
  double C = 0;
  double D = 0;

  HermitianForm() = default;
  HermitianForm(double a, Complex b, double c) : A(a), B(b), C(c), D(std::norm(b) - a * c) {}
  HermitianForm(double a, Complex b, double c, double d) : A(a), B(b), C(c), D(d) {}

  double evaluate(Complex z) const { return A * std::norm(z) + 2.0 * (std::conj(B) * z).real() + C; }
  double discriminant() const { return D; }

  HermitianForm normalized() const {
    const double s = std::max({std::abs(A), std::abs(B), std::abs(C)});
    return {A / s, B / s, C / s, D / (s * s)};
  }

  /// Image under a Möbius map: (M^-1)^* H M^-1, orientation preserved.
  HermitianForm transported(const MoebiusMap& m) const {
    const Complex n11 = m.d(), n12 = -m.b(), n21 = -m.c(), n22 = m.a();
    const Complex p11 = A * n11 + B * n21, p12 = A * n12 + B * n22;
    const Complex p21 = std::conj(B) * n11 + C * n21, p22 = std::conj(B) * n12 + C * n22;
    const double a = (std::conj(n11) * p11 + std::conj(n21) * p21).real();
    const Complex b = std::conj(n11) * p12 + std::conj(n21) * p22;
    const double c = (std::conj(n12) * p12 + std::conj(n22) * p22).real();
    return HermitianForm{a, b, c, D}.normalized();
  }

  /// Image under complex conjugation z -> conj(z).
  HermitianForm conjugated() const { return {A, std::conj(B), C, D}; }
};

/// Interior of an oriented circle as a spherical cap {X : u . X >= cos(rho)}.
struct SphereCap {
  Vec3 axis;
  double cos_rho = 1, sin_rho = 0, rho = 0;
};

/// A circle or line with a chosen interior. Circles carry a signed radius: a
/// negative radius means the interior is the outside (an enclosing circle).
/// Lines carry a unit normal pointing into the interior half plane
/// Re(conj(n) z) > offset.
class Circle {
 public:
  static Circle disc(Complex center, double radius) {
    if (!(radius != 0) || !std::isfinite(radius)) throw Error(ErrorCode::InvalidArgument, "radius must be nonzero");
    const double s = radius > 0 ? 1.0 : -1.0;
    // Kept at |A| = 1 so centre and radius read back exactly.
    Circle c;
    c.form_ = {s, -s * center, s * (std::norm(center) - radius * radius), radius * radius};
    if (!std::isfinite(c.form_.C)) throw Error(ErrorCode::InvalidArgument, "circle out of range");
    return c;
  }

  static Circle half_plane(Complex normal, double offset) {
    const double len = std::abs(normal);
    if (!(len > 0)) throw Error(ErrorCode::InvalidArgument, "line normal vanishes");
    return from_form({0.0, -normal / len, 2.0 * offset});
  }

  static Circle from_form(const HermitianForm& f) {
    Circle c;
    c.form_ = f.normalized();
    if (!(c.form_.discriminant() > 0)) throw Error(ErrorCode::InvalidArgument, "degenerate circle");
    return c;
  }

  /// Orients an unoriented circline; `flip` selects the outside of a circle or
  /// the half plane opposite the stored normal.
  static Circle from_circline(const Circline& c, bool flip = false) {
    const double s = flip ? -1.0 : 1.0;
    double a = c.A();
    Complex b = c.B();
    double cc = c.C();
    if (a < 0) {
      a = -a;
      b = -b;
      cc = -cc;
    }
    return from_form({s * a, s * b, s * cc, c.discriminant()});
  }

  const HermitianForm& form() const { return form_; }
  Circline circline() const { return {form_.A, form_.B, form_.C, form_.D}; }

  bool is_line() const { return std::abs(form_.A) < Circline::kLineTolerance; }
  Complex center() const { return -form_.B / form_.A; }
  double radius() const { return std::sqrt(std::max(0.0, form_.discriminant())) / form_.A; }
  /// Signed curvature 1/radius; zero for lines.
  double curvature() const {
    if (is_line()) return 0.0;
    return form_.A / std::sqrt(std::max(1e-300, form_.discriminant()));
  }
  Complex normal() const { return -form_.B / std::abs(form_.B); }
  double offset() const { return form_.C / (2.0 * std::abs(form_.B)); }

  SphereCap cap() const {
    const double nx = form_.B.real(), ny = form_.B.imag(), nz = 0.5 * (form_.A - form_.C);
    const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
    SphereCap cap;
    cap.axis = {-nx / len, -ny / len, -nz / len};
    cap.cos_rho = 0.5 * (form_.A + form_.C) / len;
    cap.sin_rho = std::sqrt(std::max(0.0, form_.discriminant())) / len;
    cap.rho = std::atan2(cap.sin_rho, cap.cos_rho);
    return cap;
  }

  double chordal_diameter() const { return 2.0 * cap().sin_rho; }

  Circle transformed(const MoebiusMap& m) const { return from_form(form_.transported(m)); }
  Circle reversed() const { return from_form({-form_.A, -form_.B, -form_.C, form_.D}); }

  friend std::ostream& operator<<(std::ostream& os, const Circle& c) {
    if (c.is_line()) return os << "L(n=" << c.normal() << ", off=" << c.offset() << ")";
    return os << "C(c=" << c.center() << ", r=" << c.radius() << ")";
  }

 private:
  HermitianForm form_;
};

struct CirclePacking {
  std::vector<Circle> circles;
  /// Optional word (or other label) that produced each circle.
  std::vector<std::string> provenance;

  std::size_t size() const { return circles.size(); }
};

/// Orients unoriented circlines so that no interior contains the others: each
/// circle takes its smaller cap, and near-great circles take the side holding
/// fewer cap centres of the rest.
inline CirclePacking packing_from_circlines(const std::vector<Circline>& cs) {
  CirclePacking p;
  p.circles.reserve(cs.size());
  for (const auto& c : cs) {
    Circle o = Circle::from_circline(c);
    if (o.cap().cos_rho < 0) o = o.reversed();
    p.circles.push_back(o);
  }
  std::vector<SphereCap> caps;
  for (const auto& c : p.circles) caps.push_back(c.cap());
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (std::abs(caps[i].cos_rho) > 1e-9) continue;
    std::size_t inside = 0, outside = 0;
    for (std::size_t j = 0; j < caps.size(); ++j) {
      if (j == i) continue;
      const Vec3& u = caps[i].axis;
      const Vec3& v = caps[j].axis;
      const double dot = u.x * v.x + u.y * v.y + u.z * v.z;
      (dot > caps[i].cos_rho ? inside : outside) += 1;
    }
    if (inside > outside) p.circles[i] = p.circles[i].reversed();
  }
  return p;
}

// ---------------------------------------------------------------------------
// File formats

/// `C re im radius` (negative radius: enclosing) or `L re im offset` (unit
/// interior normal and offset); `#` starts a comment.
inline CirclePacking read_packing(std::istream& is) {
  CirclePacking p;
  std::string line;
  for (std::size_t lineno = 1; std::getline(is, line); ++lineno) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    double x, y, z;
    std::string label, extra;
    if (!(ls >> x >> y >> z))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected three numbers");
    ls >> label;
    if (ls >> extra) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": trailing input");
    try {
      if (tag == "C")
        p.circles.push_back(Circle::disc({x, y}, z));
      else if (tag == "L")
        p.circles.push_back(Circle::half_plane({x, y}, z));
      else
        throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": unknown tag '" + tag + "'");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw;
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
    }
    p.provenance.push_back(label);
  }
  bool any = false;
  for (const auto& s : p.provenance) any = any || !s.empty();
  if (!any) p.provenance.clear();
  return p;
}

inline void write_packing(std::ostream& os, const CirclePacking& p) {
  char buf[128];
  auto z0 = [](double x) { return x == 0 ? 0.0 : x; };
  for (std::size_t i = 0; i < p.circles.size(); ++i) {
    const Circle& c = p.circles[i];
    if (c.is_line()) {
      const Complex n = c.normal();
      std::snprintf(buf, sizeof buf, "L %.17g %.17g %.17g", z0(n.real()), z0(n.imag()), z0(c.offset()));
    } else {
      const Complex z = c.center();
      std::snprintf(buf, sizeof buf, "C %.17g %.17g %.17g", z0(z.real()), z0(z.imag()), c.radius());
    }
    os << buf;
    if (i < p.provenance.size() && !p.provenance[i].empty()) os << ' ' << p.provenance[i];
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Tangency

struct TangencyEdge {
  std::size_t i = 0, j = 0;
  SpherePoint point;
  /// Angular gap between the caps (zero for exact tangency).
  double gap = 0;
};

struct TangencyGraph {
  std::size_t vertex_count = 0;
  /// Sorted by (i, j) with i < j.
  std::vector<TangencyEdge> edges;

  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(vertex_count);
    for (const auto& e : edges) {
      adj[e.i].push_back(e.j);
      adj[e.j].push_back(e.i);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
  }
};

/// One edge per line: `i j re im` (the point at infinity as `inf inf`).
inline void write_edge_list(std::ostream& os, const TangencyGraph& g) {
  char buf[96];
  for (const auto& e : g.edges) {
    os << e.i << ' ' << e.j << ' ';
    if (e.point.is_infinity())
      os << "inf inf";
    else {
      std::snprintf(buf, sizeof buf, "%.17g %.17g", e.point.value().real(), e.point.value().imag());
      os << buf;
    }
    os << '\n';
  }
}

namespace detail {

inline double dot(const Vec3& u, const Vec3& v) { return u.x * v.x + u.y * v.y + u.z * v.z; }

/// Angle between unit vectors, accurate for nearby and nearly opposite pairs.
inline double angle_between(const Vec3& u, const Vec3& v) {
  const Vec3 c{u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
  return std::atan2(c.norm(), dot(u, v));
}

struct PairScan {
  std::vector<TangencyEdge> tangent;
  std::vector<std::pair<std::size_t, std::size_t>> overlapping;
  double worst_overlap = 0;
};

/// Finds every pair of caps whose separation is within `tol` of touching.
/// Caps are bucketed by angular radius into levels with grid cells sized to
/// the level, and each pair is tested once from its smaller member.
inline PairScan scan_pairs(const std::vector<Circle>& circles, double tol) {
  const std::size_t n = circles.size();
  std::vector<SphereCap> caps(n);
  std::vector<int> level(n);
  constexpr int kMaxLevel = 60;
  auto level_radius = [](int l) { return l == 0 ? 3.2 : std::ldexp(1.0, -l); };
  for (std::size_t i = 0; i < n; ++i) {
    caps[i] = circles[i].cap();
    int l = 0;
    while (l < kMaxLevel && caps[i].rho <= level_radius(l + 1)) ++l;
    level[i] = l;
  }
  using Key = std::array<std::int64_t, 3>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = 0x9e3779b97f4a7c15ull;
      for (auto v : k) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdull;
      }
      return static_cast<std::size_t>(h ^ (h >> 33));
    }
  };
  std::vector<std::unordered_map<Key, std::vector<std::size_t>, KeyHash>> grids(kMaxLevel + 1);
  auto cell = [&](int l) { return 2.0 * level_radius(l) + tol; };
  auto key = [&](const Vec3& u, int l) {
    const double s = cell(l);
    return Key{static_cast<std::int64_t>(std::floor(u.x / s)), static_cast<std::int64_t>(std::floor(u.y / s)),
               static_cast<std::int64_t>(std::floor(u.z / s))};
  };
  std::vector<int> used;
  for (std::size_t i = 0; i < n; ++i) {
    auto& g = grids[level[i]];
    if (g.empty()) used.push_back(level[i]);
    g[key(caps[i].axis, level[i])].push_back(i);
  }
  std::sort(used.begin(), used.end());

  PairScan out;
  for (std::size_t i = 0; i < n; ++i) {
    for (int l : used) {
      if (l > level[i]) break;
      const Key k = key(caps[i].axis, l);
      for (std::int64_t dx = -1; dx <= 1; ++dx)
        for (std::int64_t dy = -1; dy <= 1; ++dy)
          for (std::int64_t dz = -1; dz <= 1; ++dz) {
            const auto it = grids[l].find({k[0] + dx, k[1] + dy, k[2] + dz});
            if (it == grids[l].end()) continue;
            for (std::size_t j : it->second) {
              if (l == level[i] && j >= i) continue;
              const double theta = angle_between(caps[i].axis, caps[j].axis);
              const double gap = theta - (caps[i].rho + caps[j].rho);
              if (gap > tol) continue;
              const std::size_t a = std::min(i, j), b = std::max(i, j);
              // A circle repeated with the opposite orientation is an overlap.
              const bool same = circline_distance(circles[i].circline(), circles[j].circline()) < tol;
              if (gap < -tol || same) {
                out.overlapping.emplace_back(a, b);
                out.worst_overlap = std::max(out.worst_overlap, same ? 2 * tol : -gap);
                continue;
              }
              // Touching point: rotate from cap a's axis toward b's by rho_a.
              const SphereCap& ca = caps[a];
              const SphereCap& cb = caps[b];
              const double d = dot(ca.axis, cb.axis);
              Vec3 w{cb.axis.x - d * ca.axis.x, cb.axis.y - d * ca.axis.y, cb.axis.z - d * ca.axis.z};
              const double wl = w.norm();
              SpherePoint p = SpherePoint::infinity();
              if (wl > 0) {
                w = {w.x / wl, w.y / wl, w.z / wl};
                p = SpherePoint::from_sphere({ca.cos_rho * ca.axis.x + ca.sin_rho * w.x,
                                              ca.cos_rho * ca.axis.y + ca.sin_rho * w.y,
                                              ca.cos_rho * ca.axis.z + ca.sin_rho * w.z});
              }
              out.tangent.push_back({a, b, p, gap});
            }
          }
    }
  }
  std::sort(out.tangent.begin(), out.tangent.end(),
            [](const TangencyEdge& x, const TangencyEdge& y) { return std::pair(x.i, x.j) < std::pair(y.i, y.j); });
  std::sort(out.overlapping.begin(), out.overlapping.end());
  return out;
}

}  // namespace detail

/// Tangency graph of a packing, with pair tolerance measured as the angular
/// gap between interior caps on the unit sphere.
inline TangencyGraph detect_tangencies(const CirclePacking& p, double tol = 1e-6) {
  if (!(tol > 0)) throw Error(ErrorCode::RangeError, "tolerance must be positive");
  auto scan = detail::scan_pairs(p.circles, tol);
  if (!scan.overlapping.empty()) {
    const auto [i, j] = scan.overlapping.front();
    throw Error(ErrorCode::OverlappingCircles,
                "circles " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
  }
  return {p.circles.size(), std::move(scan.tangent)};
}

inline double descartes_residual(double k1, double k2, double k3, double k4) {
  const double s = k1 + k2 + k3 + k4;
  return s * s - 2.0 * (k1 * k1 + k2 * k2 + k3 * k3 + k4 * k4);
}

/// Point where two tangent oriented circles touch (from their caps).
inline SpherePoint tangency_point(const Circle& a, const Circle& b) {
  const SphereCap ca = a.cap(), cb = b.cap();
  const double d = detail::dot(ca.axis, cb.axis);
  Vec3 w{cb.axis.x - d * ca.axis.x, cb.axis.y - d * ca.axis.y, cb.axis.z - d * ca.axis.z};
  const double wl = w.norm();
  if (!(wl > 0)) throw Error(ErrorCode::InvalidArgument, "circles are concentric on the sphere");
  w = {w.x / wl, w.y / wl, w.z / wl};
  return SpherePoint::from_sphere({ca.cos_rho * ca.axis.x + ca.sin_rho * w.x, ca.cos_rho * ca.axis.y + ca.sin_rho * w.y,
                                   ca.cos_rho * ca.axis.z + ca.sin_rho * w.z});
}

// ---------------------------------------------------------------------------
// Generation

/// Packing grown from a Descartes quadruple by repeatedly replacing a circle
/// with its mirror image in the circle through the tangency points of the
/// other three. An interstice is abandoned once that mirror circle, which
/// bounds everything inside it, has chordal diameter below `epsilon`; circles
/// smaller than `epsilon` are not output. The quadruple comes first, then new
/// circles generation by generation.
inline CirclePacking apollonian_packing(const std::array<Circle, 4>& quad, double epsilon,
                                        std::size_t max_generations = std::size_t(-1),
                                        std::size_t max_circles = std::size_t{1} << 22) {
  if (!(epsilon > 0)) throw Error(ErrorCode::RangeError, "epsilon must be positive");
  {
    const auto scan = detail::scan_pairs({quad.begin(), quad.end()}, 1e-9);
    if (!scan.overlapping.empty() || scan.tangent.size() != 6)
      throw Error(ErrorCode::InvalidArgument, "initial circles are not a mutually tangent quadruple");
  }
  std::vector<Circle> all(quad.begin(), quad.end());
  std::vector<bool> keep(4, true);
  struct Item {
    std::size_t i, j, k, opposite, generation;
  };
  std::deque<Item> queue;
  for (std::size_t o = 0; o < 4; ++o) {
    std::array<std::size_t, 3> t{};
    std::size_t n = 0;
    for (std::size_t x = 0; x < 4; ++x)
      if (x != o) t[n++] = x;
    queue.push_back({t[0], t[1], t[2], o, 1});
  }
  std::size_t kept = 4;
  while (!queue.empty() && kept < max_circles) {
    const Item it = queue.front();
    queue.pop_front();
    if (it.generation > max_generations) continue;
    const SpherePoint tij = tangency_point(all[it.i], all[it.j]);
    const SpherePoint tik = tangency_point(all[it.i], all[it.k]);
    const SpherePoint tjk = tangency_point(all[it.j], all[it.k]);
    if (Circline::through(tij, tik, tjk).chordal_diameter() < epsilon) continue;
    const MoebiusMap t = MoebiusMap::to_zero_one_infinity(tij, tik, tjk);
    const Circle mirror =
        Circle::from_form(all[it.opposite].form().transported(t).conjugated().transported(t.inverse()));
    const std::size_t m = all.size();
    all.push_back(mirror);
    const bool big = mirror.chordal_diameter() >= epsilon;
    keep.push_back(big);
    kept += big;
    queue.push_back({it.i, it.j, m, it.k, it.generation + 1});
    queue.push_back({it.i, it.k, m, it.j, it.generation + 1});
    queue.push_back({it.j, it.k, m, it.i, it.generation + 1});
  }
  CirclePacking p;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (keep[i]) p.circles.push_back(all[i]);
  return p;
}

/// Base triple of the standard gasket: Im z = 0 (interior below), Im z = 1
/// (interior above) and the circle of radius 1/2 about i/2.
inline std::array<Circle, 3> standard_base_triple() {
  return {Circle::half_plane({0, -1}, 0), Circle::half_plane({0, 1}, 1), Circle::disc({0, 0.5}, 0.5)};
}

/// Tangency points of the base triple, in the pair order (0,1), (0,2), (1,2).
inline std::array<SpherePoint, 3> standard_tangency_points() {
  return {SpherePoint::infinity(), Complex(0, 0), Complex(0, 1)};
}

/// Standard strip gasket between Im z = 0 and Im z = 1, down to chordal size epsilon.
inline CirclePacking standard_gasket(double epsilon, std::size_t max_generations = std::size_t(-1)) {
  const auto b = standard_base_triple();
  return apollonian_packing({b[0], b[1], b[2], Circle::disc({1, 0.5}, 0.5)}, epsilon, max_generations);
}

/// Bounded gasket with curvatures (-1, 2, 2, 3) inside the unit circle.
inline CirclePacking bounded_gasket(double epsilon, std::size_t max_generations = std::size_t(-1)) {
  return apollonian_packing({Circle::disc(0, -1), Circle::disc(-0.5, 0.5), Circle::disc(0.5, 0.5),
                             Circle::disc({0, 2.0 / 3.0}, 1.0 / 3.0)},
                            epsilon, max_generations);
}

// ---------------------------------------------------------------------------
// Normalization

/// The lexicographically first mutually tangent triple when circles are
/// ordered by decreasing radius (lines first, ties by index).
inline std::optional<std::array<std::size_t, 3>> select_normalization_triple(const CirclePacking& p,
                                                                             const TangencyGraph& g) {
  const std::size_t n = p.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Radii compared to 9 significant digits so rounding does not break ties.
  auto size_of = [&](std::size_t i) {
    if (p.circles[i].is_line()) return std::numeric_limits<double>::infinity();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", std::abs(p.circles[i].radius()));
    return std::strtod(buf, nullptr);
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return size_of(a) > size_of(b); });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
  auto adj = g.adjacency();
  for (auto& a : adj) std::sort(a.begin(), a.end(), [&](std::size_t x, std::size_t y) { return rank[x] < rank[y]; });
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = order[r];
    for (std::size_t j : adj[i]) {
      if (rank[j] <= r) continue;
      for (std::size_t k : adj[j]) {
        if (rank[k] <= rank[j]) continue;
        if (std::binary_search(adj[i].begin(), adj[i].end(), k,
                               [&](std::size_t x, std::size_t y) { return rank[x] < rank[y]; }))
          return std::array<std::size_t, 3>{i, j, k};
      }
    }
  }
  return std::nullopt;
}

/// Möbius map taking the tangency points of the triple (i, j, k) to those of
/// the standard base triple: circle i goes to Im z = 0, j to Im z = 1, k to
/// the circle about i/2.
inline MoebiusMap normalize_to_standard_gasket(const CirclePacking& p, const std::array<std::size_t, 3>& triple,
                                               double tol = 1e-6) {
  const auto [i, j, k] = triple;
  if (i >= p.size() || j >= p.size() || k >= p.size() || i == j || j == k || i == k)
    throw Error(ErrorCode::NoTangentTriple, "triple indices invalid");
  const auto scan = detail::scan_pairs({p.circles[i], p.circles[j], p.circles[k]}, tol);
  if (scan.tangent.size() != 3 || !scan.overlapping.empty())
    throw Error(ErrorCode::NoTangentTriple, "circles are not mutually tangent");
  const std::array<SpherePoint, 3> from{tangency_point(p.circles[i], p.circles[j]),
                                        tangency_point(p.circles[i], p.circles[k]),
                                        tangency_point(p.circles[j], p.circles[k])};
  return MoebiusMap::three_point(from, standard_tangency_points());
}

inline MoebiusMap normalize_to_standard_gasket(const CirclePacking& p, double tol = 1e-6) {
  const auto g = detect_tangencies(p, tol);
  const auto triple = select_normalization_triple(p, g);
  if (!triple) throw Error(ErrorCode::NoTangentTriple, "no three mutually tangent circles");
  return normalize_to_standard_gasket(p, *triple, tol);
}

inline CirclePacking transform(const CirclePacking& p, const MoebiusMap& m) {
  CirclePacking out;
  out.provenance = p.provenance;
  out.circles.reserve(p.size());
  for (const auto& c : p.circles) out.circles.push_back(c.transformed(m));
  return out;
}

// ---------------------------------------------------------------------------
// Verdict

struct GasketReport {
  bool pass = false;
  bool connected = false;
  std::size_t components = 0;
  std::size_t edges = 0;
  std::size_t triangles = 0;
  /// Triangles with no fourth circle tangent to all three in the packing.
  std::size_t open_triangles = 0;
  std::size_t quadruples = 0;
  /// max |(k1+k2+k3+k4)^2 - 2 sum k^2| over tangent quadruples.
  double worst_residual = 0;
  /// Same, divided by max(1, sum k^2).
  double worst_relative_residual = 0;
  std::array<std::size_t, 4> worst_quadruple{};
  std::vector<std::pair<std::size_t, std::size_t>> crossings;
  /// Circles in failing quadruples, crossing pairs, or outside the largest component.
  std::vector<std::size_t> offenders;
};

inline GasketReport is_apollonian_like(const CirclePacking& p, double tol = 1e-6, double residual_tol = 1e-6) {
  if (p.size() < 4) throw Error(ErrorCode::InvalidArgument, "need at least four circles");
  const std::size_t n = p.size();
  GasketReport r;
  auto scan = detail::scan_pairs(p.circles, tol);
  r.crossings = scan.overlapping;
  r.edges = scan.tangent.size();
  TangencyGraph g{n, std::move(scan.tangent)};
  const auto adj = g.adjacency();

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges) parent[find(e.i)] = find(e.j);
  std::vector<std::size_t> comp_size(n, 0);
  for (std::size_t v = 0; v < n; ++v) ++comp_size[find(v)];
  std::size_t largest = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (comp_size[v] > 0) ++r.components;
    if (comp_size[v] > comp_size[largest]) largest = v;
  }
  r.connected = r.components == 1;

  std::vector<std::size_t> offenders;
  for (std::size_t v = 0; v < n; ++v)
    if (find(v) != largest) offenders.push_back(v);
  for (const auto& [a, b] : r.crossings) {
    offenders.push_back(a);
    offenders.push_back(b);
  }

  std::vector<double> k(n);
  for (std::size_t v = 0; v < n; ++v) k[v] = p.circles[v].curvature();
  std::vector<std::size_t> common, four;
  for (const auto& e : g.edges) {
    const std::size_t i = e.i, j = e.j;
    common.clear();
    std::set_intersection(adj[i].begin(), adj[i].end(), adj[j].begin(), adj[j].end(), std::back_inserter(common));
    for (std::size_t kk : common) {
      if (kk <= j) continue;
      ++r.triangles;
      four.clear();
      std::set_intersection(common.begin(), common.end(), adj[kk].begin(), adj[kk].end(), std::back_inserter(four));
      if (four.empty()) ++r.open_triangles;
      for (std::size_t l : four) {
        if (l <= kk) continue;
        ++r.quadruples;
        const double res = std::abs(descartes_residual(k[i], k[j], k[kk], k[l]));
        const double scale = std::max(1.0, k[i] * k[i] + k[j] * k[j] + k[kk] * k[kk] + k[l] * k[l]);
        if (res > r.worst_residual) r.worst_residual = res;
        if (res / scale > r.worst_relative_residual) {
          r.worst_relative_residual = res / scale;
          r.worst_quadruple = {i, j, kk, l};
        }
        if (res / scale > residual_tol) offenders.insert(offenders.end(), {i, j, kk, l});
      }
    }
  }
  std::sort(offenders.begin(), offenders.end());
  offenders.erase(std::unique(offenders.begin(), offenders.end()), offenders.end());
  r.offenders = std::move(offenders);
  r.pass = r.connected && r.crossings.empty() && r.quadruples > 0 && r.worst_relative_residual <= residual_tol;
  return r;
}

}  // namespace kleinian
