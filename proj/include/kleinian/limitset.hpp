#pragma once

// Limit sets of marked Möbius groups: fixed-point clouds, depth-first circle
// enumeration with diameter pruning, Hausdorff diagnostics, and rasterization.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "kleinian/error.hpp"
#include "kleinian/groups.hpp"
#include "kleinian/mobius.hpp"

namespace kleinian {

struct Window {
  double x0 = -1, y0 = -1, x1 = 2, y1 = 2;

  bool valid() const { return x1 > x0 && y1 > y0; }
  bool contains(const SpherePoint& p) const {
    if (p.is_infinity()) return false;
    const Complex z = p.value();
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
  /// Whether a circline meets the closed window.
  bool meets(const Circline& c) const;
};

namespace detail {

/// Uniform hash grid over R^D storing indices. Neighbour queries look at the
/// 2^D cells nearest to the query point, which covers every stored point
/// within half a cell in each coordinate.
template <std::size_t D>
class GridIndex {
 public:
  using Key = std::array<std::int64_t, D>;

  explicit GridIndex(double cell) : cell_(cell) {}

  void insert(const std::array<double, D>& x, std::size_t index) {
    Key k{};
    for (std::size_t i = 0; i < D; ++i) k[i] = static_cast<std::int64_t>(std::floor(x[i] / cell_));
    cells_[k].push_back(index);
  }

  /// Calls visit(index) on candidates near x until it returns true.
  template <class Visit>
  bool any_near(const std::array<double, D>& x, Visit&& visit) const {
    Key base{};
    std::array<std::int64_t, D> step{};
    for (std::size_t i = 0; i < D; ++i) {
      const double q = x[i] / cell_;
      const double f = std::floor(q);
      base[i] = static_cast<std::int64_t>(f);
      step[i] = q - f < 0.5 ? -1 : 1;
    }
    for (std::size_t mask = 0; mask < (std::size_t{1} << D); ++mask) {
      Key k = base;
      for (std::size_t i = 0; i < D; ++i)
        if (mask >> i & 1) k[i] += step[i];
      const auto it = cells_.find(k);
      if (it == cells_.end()) continue;
      for (std::size_t idx : it->second)
        if (visit(idx)) return true;
    }
    return false;
  }

 private:
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

  double cell_;
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> cells_;
};

inline std::array<double, 3> sphere_coords(const SpherePoint& p) {
  const Vec3 v = p.to_sphere();
  return {v.x, v.y, v.z};
}

inline std::array<double, 4> plane_coords(const Circline& c, double sign) {
  const auto pl = c.sphere_plane();
  return {sign * pl.normal.x, sign * pl.normal.y, sign * pl.normal.z, sign * pl.offset};
}

}  // namespace detail

inline bool Window::meets(const Circline& c) const {
  if (c.is_line()) {
    // Points z with Re(conj(n) z) = offset: compare the corner values.
    const Complex n = c.line_normal();
    const double off = c.line_offset();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Complex z : {Complex(x0, y0), Complex(x0, y1), Complex(x1, y0), Complex(x1, y1)}) {
      const double v = (std::conj(n) * z).real();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return off >= lo && off <= hi;
  }
  const Complex z = c.center();
  const double r = c.radius();
  const double px = std::clamp(z.real(), x0, x1), py = std::clamp(z.imag(), y0, y1);
  const double nearest = std::abs(z - Complex(px, py));
  // farthest corner
  const double fx = std::max(std::abs(z.real() - x0), std::abs(z.real() - x1));
  const double fy = std::max(std::abs(z.imag() - y0), std::abs(z.imag() - y1));
  return nearest <= r && std::hypot(fx, fy) >= r;
}

struct LimitPoint {
  SpherePoint point;
  std::size_t word_length = 0;
  Word word;
};

/// Points of a limit set, pairwise at least `dedup_tolerance` apart in the
/// chordal metric; insertion order is preserved and the first point wins.
class LimitSetCloud {
 public:
  explicit LimitSetCloud(double dedup_tolerance = 1e-9)
      : dedup_tolerance_(dedup_tolerance), grid_(2 * dedup_tolerance) {
    if (!(dedup_tolerance > 0)) throw Error(ErrorCode::InvalidArgument, "dedup tolerance must be positive");
  }

  bool contains(const SpherePoint& p) const {
    return grid_.any_near(detail::sphere_coords(p), [&](std::size_t i) {
      return chordal_distance(points_[i].point, p) < dedup_tolerance_;
    });
  }

  bool insert(const SpherePoint& p, std::size_t word_length, const Word& word) {
    if (contains(p)) return false;
    grid_.insert(detail::sphere_coords(p), points_.size());
    points_.push_back({p, word_length, word});
    return true;
  }

  const std::vector<LimitPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double dedup_tolerance() const { return dedup_tolerance_; }

 private:
  double dedup_tolerance_;
  std::vector<LimitPoint> points_;
  detail::GridIndex<3> grid_;
};

enum class CloudMode {
  /// Limit fixed points of the reduced words of length <= depth.
  FixedPoints,
  /// Translates u . fix(w) for reduced u, w with |u| + |w| <= depth; each is
  /// the fixed point of the conjugate u w u^-1. Closed under every generator
  /// when passing from depth d to d + 1.
  OrbitClosed,
};

namespace detail {

struct WordMatrix {
  Word word;
  MoebiusMap map;
};

/// Reduced words over the free letters up to max_len with their images, in
/// length-lexicographic order.
inline std::vector<WordMatrix> words_with_images(const MarkedGroup& g, std::size_t max_len) {
  std::vector<WordMatrix> out;
  ReducedWordStream stream(2 * g.free_rank(), max_len);
  // Parent of a length-n word is its length-(n-1) prefix, already emitted.
  std::map<std::vector<Letter>, std::size_t> index;
  while (auto w = stream.next()) {
    if (w->empty()) {
      out.push_back({*w, MoebiusMap()});
    } else {
      std::vector<Letter> prefix(w->letters().begin(), w->letters().end() - 1);
      const MoebiusMap& pm = out[index.at(prefix)].map;
      out.push_back({*w, pm * g.image(w->letters().back())});
    }
    index.emplace(out.back().word.letters(), out.size() - 1);
  }
  return out;
}

}  // namespace detail

/// Cloud of parabolic and attracting fixed points of nontrivial reduced words.
inline LimitSetCloud limit_points_by_fixed_points(const MarkedGroup& g, std::size_t max_word_len, double dedup,
                                                  CloudMode mode = CloudMode::OrbitClosed) {
  if (max_word_len < 1) throw Error(ErrorCode::InvalidArgument, "max_word_len must be >= 1");
  const auto words = detail::words_with_images(g, max_word_len);
  struct Fixed {
    std::size_t word_index;
    SpherePoint point;
  };
  std::vector<Fixed> fixed;
  for (std::size_t i = 1; i < words.size(); ++i)
    if (auto p = limit_fixed_point(words[i].map)) fixed.push_back({i, *p});
  if (fixed.empty()) throw Error(ErrorCode::EllipticOnly, "no parabolic or loxodromic word up to the bound");

  LimitSetCloud cloud(dedup);
  if (mode == CloudMode::FixedPoints) {
    for (const auto& f : fixed) cloud.insert(f.point, words[f.word_index].word.size(), words[f.word_index].word);
    return cloud;
  }
  // words is length-lexicographic: first index of each length.
  std::vector<std::size_t> offset(max_word_len + 2, words.size());
  for (std::size_t i = words.size(); i-- > 0;) offset[words[i].word.size()] = i;
  // Ordered by |u| + |w|, then w, then u; nesting across depths follows.
  for (std::size_t total = 1; total <= max_word_len; ++total)
    for (const auto& f : fixed) {
      const Word& w = words[f.word_index].word;
      if (w.size() > total) continue;
      const std::size_t ulen = total - w.size();
      for (std::size_t ui = offset[ulen]; ui < offset[ulen + 1]; ++ui) {
        const auto& u = words[ui];
        const SpherePoint p = u.map(f.point);
        if (cloud.contains(p)) continue;
        const Word conj = reduce(u.word + w + u.word.inverse());
        cloud.insert(p, conj.size(), conj);
      }
    }
  return cloud;
}

/// Seeds for the group generated by z + 1 and z / (2i z + 1): the boundary
/// lines of the strip |Im z| <= 1/2 and the circle through 0 and 1 tangent to both.
inline std::vector<Circline> strip_gasket_seeds() {
  return {Circline::horizontal_line(0.5), Circline::horizontal_line(-0.5), Circline::circle({0.5, 0}, 0.5)};
}

struct DfsConfig {
  double epsilon = 1e-3;
  std::size_t max_depth = 64;
  std::vector<Circline> seeds;
  /// Chordal tolerance (on the sphere plane coordinates) for identifying circlines.
  double circle_dedup = 1e-8;
  /// Worker threads over top-level branches; output is identical for any value.
  unsigned threads = 1;

  void validate() const {
    if (!(epsilon > 0)) throw Error(ErrorCode::RangeError, "epsilon must be positive");
    if (max_depth < 1) throw Error(ErrorCode::RangeError, "max_depth must be >= 1");
    if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "at least one seed circline required");
    if (!(circle_dedup > 0)) throw Error(ErrorCode::RangeError, "circle_dedup must be positive");
  }
};

struct DfsStats {
  std::uint64_t words_visited = 0;
  std::uint64_t branches_pruned = 0;
  std::uint64_t circles_emitted = 0;
  std::uint64_t depth_exhausted = 0;
  std::size_t max_depth_reached = 0;
  std::chrono::duration<double> wall_time{0};
};

struct EmittedCircle {
  Circline circle;
  Word word;
  std::size_t seed = 0;
  /// Chordal diameter at least epsilon when emitted.
  bool resolved = false;
  /// Emitted at max_depth with the branch still alive.
  bool depth_exhausted = false;
};

struct DfsResult {
  LimitSetCloud cloud;
  std::vector<EmittedCircle> circles;
  DfsStats stats;
};

/// Set of circlines up to a tolerance on the unit-sphere cutting plane.
class CirclineSet {
 public:
  explicit CirclineSet(double tol) : tol_(tol), grid_(2 * tol) {}

  bool contains(const Circline& c) const {
    for (double sign : {1.0, -1.0}) {
      const auto x = detail::plane_coords(c, sign);
      const bool hit = grid_.any_near(x, [&](std::size_t i) {
        const auto& y = coords_[i];
        return std::abs(x[0] - y[0]) < tol_ && std::abs(x[1] - y[1]) < tol_ && std::abs(x[2] - y[2]) < tol_ &&
               std::abs(x[3] - y[3]) < tol_;
      });
      if (hit) return true;
    }
    return false;
  }

  bool insert(const Circline& c) {
    if (contains(c)) return false;
    const auto x = detail::plane_coords(c, 1.0);
    grid_.insert(x, coords_.size());
    coords_.push_back(x);
    return true;
  }

 private:
  double tol_;
  detail::GridIndex<4> grid_;
  std::vector<std::array<double, 4>> coords_;
};

namespace detail {

class CircleDfs {
 public:
  CircleDfs(const MarkedGroup& g, const DfsConfig& cfg) : group_(g), cfg_(cfg), seen_(cfg.circle_dedup) {
    letters_ = static_cast<Letter>(2 * g.free_rank());
  }

  /// Explores the subtree under the one-letter word `first`, given the seeds
  /// alive at the root.
  void run_branch(Letter first, const std::vector<std::size_t>& live_at_root) {
    path_.assign(1, first);
    visit(group_.image(first), live_at_root, 1);
  }

  std::vector<EmittedCircle> circles;
  DfsStats stats;

 private:
  void visit(const MoebiusMap& m, const std::vector<std::size_t>& parent_live, std::size_t depth) {
    ++stats.words_visited;
    stats.max_depth_reached = std::max(stats.max_depth_reached, depth);
    std::vector<std::size_t> live;
    const std::size_t first_emitted = circles.size();
    for (std::size_t s : parent_live) {
      const Circline img = m(cfg_.seeds[s]);
      const bool big = img.chordal_diameter() >= cfg_.epsilon;
      if (seen_.insert(img)) circles.push_back({img, Word(path_), s, big, false});
      if (big) live.push_back(s);
    }
    if (live.empty()) {
      ++stats.branches_pruned;
      return;
    }
    if (depth >= cfg_.max_depth) {
      ++stats.depth_exhausted;
      for (std::size_t i = first_emitted; i < circles.size(); ++i) circles[i].depth_exhausted = true;
      return;
    }
    const Letter last = path_.back();
    for (Letter l = 0; l < letters_; ++l) {
      if (l == inverse_letter(last)) continue;
      path_.push_back(l);
      visit(m * group_.image(l), live, depth + 1);
      path_.pop_back();
    }
  }

  const MarkedGroup& group_;
  const DfsConfig& cfg_;
  CirclineSet seen_;
  Letter letters_;
  std::vector<Letter> path_;
};

}  // namespace detail

/// Depth-first traversal of reduced words transporting the seed circlines.
/// The seeds are emitted first (empty word). Each seed is followed down a
/// branch while its image has chordal diameter >= epsilon; once every image at
/// a word is smaller, the branch is pruned. Circlines are emitted the first
/// time they are seen in sequential depth-first order.
inline DfsResult limit_set_dfs(const MarkedGroup& g, const DfsConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  DfsResult result{LimitSetCloud(cfg.circle_dedup), {}, {}};

  CirclineSet global(cfg.circle_dedup);
  std::vector<std::size_t> live;
  for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
    const bool big = cfg.seeds[s].chordal_diameter() >= cfg.epsilon;
    if (global.insert(cfg.seeds[s])) result.circles.push_back({cfg.seeds[s], Word(), s, big, false});
    if (big) live.push_back(s);
  }

  const auto letters = static_cast<Letter>(2 * g.free_rank());
  std::vector<detail::CircleDfs> branches;
  branches.reserve(letters);
  for (Letter l = 0; l < letters; ++l) branches.emplace_back(g, cfg);

  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, letters));
  if (workers == 1) {
    for (Letter l = 0; l < letters; ++l) branches[l].run_branch(l, live);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (Letter l = static_cast<Letter>(w); l < letters; l = static_cast<Letter>(l + workers))
          branches[l].run_branch(l, live);
      });
    for (auto& t : pool) t.join();
  }

  // Merge in branch order, which is the sequential visiting order.
  for (auto& b : branches) {
    result.stats.words_visited += b.stats.words_visited;
    result.stats.branches_pruned += b.stats.branches_pruned;
    result.stats.depth_exhausted += b.stats.depth_exhausted;
    result.stats.max_depth_reached = std::max(result.stats.max_depth_reached, b.stats.max_depth_reached);
    for (auto& c : b.circles)
      if (global.insert(c.circle)) result.circles.push_back(std::move(c));
  }
  result.stats.circles_emitted = result.circles.size();
  for (const auto& c : result.circles)
    if (!c.circle.is_line()) result.cloud.insert(c.circle.center(), c.word.size(), c.word);
  result.stats.wall_time = std::chrono::steady_clock::now() - start;
  return result;
}

/// Symmetric Hausdorff distance (Euclidean) between the finite points of two
/// clouds lying in the window.
inline double hausdorff_distance(const LimitSetCloud& a, const LimitSetCloud& b, const Window& window) {
  auto collect = [&](const LimitSetCloud& c) {
    std::vector<Complex> out;
    for (const auto& p : c.points())
      if (window.contains(p.point)) out.push_back(p.point.value());
    return out;
  };
  const auto pa = collect(a), pb = collect(b);
  if (pa.empty() || pb.empty()) throw Error(ErrorCode::EmptyWindow, "a cloud has no points in the window");

  // Directed distance via a uniform grid with expanding ring search.
  auto directed = [&](const std::vector<Complex>& from, const std::vector<Complex>& to) {
    const double w = window.x1 - window.x0, h = window.y1 - window.y0;
    const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(to.size()))));
    const double cell = std::max(w, h) / static_cast<double>(n);
    const auto nx = static_cast<std::int64_t>(std::ceil(w / cell)) + 1, ny = static_cast<std::int64_t>(std::ceil(h / cell)) + 1;
    std::vector<std::vector<Complex>> grid(static_cast<std::size_t>(nx * ny));
    auto cell_of = [&](Complex z) {
      const auto ix = std::clamp<std::int64_t>(static_cast<std::int64_t>((z.real() - window.x0) / cell), 0, nx - 1);
      const auto iy = std::clamp<std::int64_t>(static_cast<std::int64_t>((z.imag() - window.y0) / cell), 0, ny - 1);
      return std::pair{ix, iy};
    };
    for (Complex z : to) {
      const auto [ix, iy] = cell_of(z);
      grid[static_cast<std::size_t>(iy * nx + ix)].push_back(z);
    }
    double worst = 0;
    for (Complex z : from) {
      const auto [cx, cy] = cell_of(z);
      double best = std::numeric_limits<double>::infinity();
      for (std::int64_t ring = 0;; ++ring) {
        // Cells in ring k are at least (k - 1) * cell away.
        if (ring > 0 && static_cast<double>(ring - 1) * cell > best) break;
        if (ring > nx + ny) break;
        for (std::int64_t iy = cy - ring; iy <= cy + ring; ++iy)
          for (std::int64_t ix = cx - ring; ix <= cx + ring; ++ix) {
            if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring) continue;
            if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) continue;
            for (Complex q : grid[static_cast<std::size_t>(iy * nx + ix)]) best = std::min(best, std::abs(q - z));
          }
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(pa, pb), directed(pb, pa));
}

struct RenderOutput {
  std::string ppm;
  std::string svg;
  std::size_t width = 0, height = 0;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace detail

/// Rasterizes cloud points and circle outlines into a binary P6 pixmap and an
/// SVG with one element per circle meeting the window. `header` lines are
/// written as comments.
inline RenderOutput render(const LimitSetCloud& cloud, const std::vector<Circline>& circles, const Window& window,
                           std::size_t resolution, const std::string& header = {}) {
  if (!window.valid()) throw Error(ErrorCode::InvalidArgument, "degenerate window");
  if (resolution < 16) throw Error(ErrorCode::RangeError, "resolution must be >= 16");
  RenderOutput out;
  out.width = resolution;
  out.height = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(static_cast<double>(resolution) * (window.y1 - window.y0) /
                                              (window.x1 - window.x0))));
  const double sx = static_cast<double>(out.width) / (window.x1 - window.x0);
  const double sy = static_cast<double>(out.height) / (window.y1 - window.y0);
  std::vector<unsigned char> pix(out.width * out.height * 3, 255);
  auto plot = [&](double x, double y, unsigned char r, unsigned char g, unsigned char b) {
    const double px = (x - window.x0) * sx, py = (window.y1 - y) * sy;
    if (!(px >= 0 && py >= 0)) return;
    const auto ix = static_cast<std::size_t>(px), iy = static_cast<std::size_t>(py);
    if (ix >= out.width || iy >= out.height) return;
    unsigned char* p = &pix[(iy * out.width + ix) * 3];
    p[0] = r;
    p[1] = g;
    p[2] = b;
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (!header.empty()) {
    std::string safe = header;
    for (std::size_t pos; (pos = safe.find("--")) != std::string::npos;) safe.replace(pos, 2, "- -");
    svg << "<!--\n" << safe << (safe.back() == '\n' ? "" : "\n") << "-->\n";
  }
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << out.width << "\" height=\""
      << out.height << "\" viewBox=\"" << detail::format_double(window.x0) << " "
      << detail::format_double(-window.y1) << " " << detail::format_double(window.x1 - window.x0) << " "
      << detail::format_double(window.y1 - window.y0) << "\">\n";
  svg << "<g fill=\"none\" stroke=\"black\" stroke-width=\""
      << detail::format_double((window.x1 - window.x0) / static_cast<double>(out.width)) << "\">\n";

  const double pixel = 1.0 / std::max(sx, sy);
  for (const auto& c : circles) {
    if (!window.meets(c)) continue;
    if (c.is_line()) {
      // Clip Re(conj(n) z) = off to the window along its direction.
      const Complex n = c.line_normal();
      const Complex dir = n * Complex(0, 1);
      const Complex p0 = n * c.line_offset();
      const double span = std::hypot(window.x1 - window.x0, window.y1 - window.y0) +
                          std::abs(p0 - Complex(0.5 * (window.x0 + window.x1), 0.5 * (window.y0 + window.y1)));
      const Complex from = p0 - span * dir, to = p0 + span * dir;
      svg << "<line x1=\"" << detail::format_double(from.real()) << "\" y1=\"" << detail::format_double(-from.imag())
          << "\" x2=\"" << detail::format_double(to.real()) << "\" y2=\"" << detail::format_double(-to.imag())
          << "\"/>\n";
      const auto steps = static_cast<std::size_t>(2 * span / pixel) + 1;
      for (std::size_t i = 0; i <= steps; ++i) {
        const Complex z = from + (to - from) * (static_cast<double>(i) / static_cast<double>(steps));
        plot(z.real(), z.imag(), 0, 0, 0);
      }
    } else {
      const Complex z = c.center();
      const double r = c.radius();
      svg << "<circle cx=\"" << detail::format_double(z.real()) << "\" cy=\"" << detail::format_double(-z.imag())
          << "\" r=\"" << detail::format_double(r) << "\"/>\n";
      const auto steps = std::min<std::size_t>(1u << 20, static_cast<std::size_t>(6.3 * r / pixel) + 8);
      for (std::size_t i = 0; i < steps; ++i) {
        const double t = 6.283185307179586 * static_cast<double>(i) / static_cast<double>(steps);
        plot(z.real() + r * std::cos(t), z.imag() + r * std::sin(t), 0, 0, 0);
      }
    }
  }
  svg << "</g>\n";
  for (const auto& p : cloud.points())
    if (window.contains(p.point)) plot(p.point.value().real(), p.point.value().imag(), 200, 0, 0);
  svg << "</svg>\n";
  out.svg = svg.str();

  std::ostringstream ppm;
  ppm << "P6\n";
  std::istringstream hs(header);
  for (std::string line; std::getline(hs, line);) ppm << "# " << line << "\n";
  ppm << out.width << " " << out.height << "\n255\n";
  ppm.write(reinterpret_cast<const char*>(pix.data()), static_cast<std::streamsize>(pix.size()));
  out.ppm = ppm.str();
  return out;
}

/// One point per line: `re im word_length word` (infinity as `inf inf`, the
/// empty word as `1`).
inline void write_cloud(std::ostream& os, const LimitSetCloud& cloud, const Alphabet& alphabet) {
  char buf[80];
  for (const auto& p : cloud.points()) {
    if (p.point.is_infinity())
      os << "inf inf";
    else {
      std::snprintf(buf, sizeof buf, "%.17g %.17g", p.point.value().real(), p.point.value().imag());
      os << buf;
    }
    const std::string w = p.word.to_string(alphabet);
    os << ' ' << p.word_length << ' ' << (w.empty() ? "1" : w) << '\n';
  }
}

}  // namespace kleinian
