#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "kleinian/limitset.hpp"
#include "test_support.hpp"

namespace kleinian {
namespace {

const Window kWindow{-1, -1, 2, 2};

MarkedGroup hw() { return solve_parabolic_commutator().group; }

bool cloud_has(const LimitSetCloud& c, const SpherePoint& p, double tol) {
  for (const auto& q : c.points())
    if (chordal_distance(q.point, p) < tol) return true;
  return false;
}

TEST(FixedPointCloud, DiagonalGroupGivesZeroAndInfinity) {
  const MarkedGroup g(Alphabet("a"), {MoebiusMap(2, 0, 0, 0.5)});
  const auto cloud = limit_points_by_fixed_points(g, 3, 1e-9);
  ASSERT_EQ(cloud.size(), 2u);
  EXPECT_TRUE(cloud_has(cloud, SpherePoint::infinity(), 1e-12));
  EXPECT_TRUE(cloud_has(cloud, Complex(0, 0), 1e-12));
  // The plain fixed-point mode also sees both through a and A.
  EXPECT_EQ(limit_points_by_fixed_points(g, 3, 1e-9, CloudMode::FixedPoints).size(), 2u);
}

TEST(FixedPointCloud, EllipticOnlyThrows) {
  const MarkedGroup g(Alphabet("a"), {MoebiusMap(0, -1, 1, 0)});
  try {
    limit_points_by_fixed_points(g, 4, 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EllipticOnly);
  }
  EXPECT_THROW(limit_points_by_fixed_points(g, 0, 1e-9), Error);
}

TEST(FixedPointCloud, ContainsKnownFixedPoints) {
  for (CloudMode mode : {CloudMode::FixedPoints, CloudMode::OrbitClosed}) {
    const auto cloud = limit_points_by_fixed_points(hw(), 4, 1e-9, mode);
    EXPECT_TRUE(cloud_has(cloud, SpherePoint::infinity(), 1e-9));
    EXPECT_TRUE(cloud_has(cloud, Complex(0, 0), 1e-9));
    EXPECT_TRUE(cloud_has(cloud, Complex(-0.5, 0.5), 1e-9));
  }
}

TEST(FixedPointCloud, DedupInvariant) {
  const auto cloud = limit_points_by_fixed_points(hw(), 6, 1e-6);
  const auto& pts = cloud.points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) ASSERT_GE(chordal_distance(pts[i].point, pts[j].point), 1e-6);
}

TEST(FixedPointCloud, RecordedWordFixesPoint) {
  const MarkedGroup g = hw();
  const auto cloud = limit_points_by_fixed_points(g, 5, 1e-9);
  for (const auto& p : cloud.points()) {
    const auto fp = limit_fixed_point(g.evaluate(p.word));
    ASSERT_TRUE(fp.has_value());
    EXPECT_LT(chordal_distance(*fp, p.point), 1e-7);
    EXPECT_EQ(p.word.size(), p.word_length);
  }
}

TEST(FixedPointCloud, Nesting) {
  for (CloudMode mode : {CloudMode::FixedPoints, CloudMode::OrbitClosed}) {
    const auto small = limit_points_by_fixed_points(hw(), 5, 1e-9, mode);
    const auto big = limit_points_by_fixed_points(hw(), 6, 1e-9, mode);
    for (const auto& p : small.points()) EXPECT_TRUE(big.contains(p.point));
    // Insertion order is a prefix.
    for (std::size_t i = 0; i < small.size(); ++i)
      EXPECT_LT(chordal_distance(small.points()[i].point, big.points()[i].point), 1e-12);
  }
}

TEST(FixedPointCloud, GeneratorInvariance) {
  const MarkedGroup g = hw();
  const auto d = limit_points_by_fixed_points(g, 6, 1e-9);
  const auto next = limit_points_by_fixed_points(g, 7, 1e-9);
  LimitSetCloud probe(1e-6);
  for (const auto& p : next.points()) probe.insert(p.point, 0, Word());
  for (Letter l = 0; l < 4; ++l)
    for (const auto& p : d.points()) ASSERT_TRUE(probe.contains(g.image(l)(p.point)));
}

TEST(FixedPointCloud, Deterministic) {
  std::ostringstream x, y;
  write_cloud(x, limit_points_by_fixed_points(hw(), 6, 1e-9), Alphabet("ab"));
  write_cloud(y, limit_points_by_fixed_points(hw(), 6, 1e-9), Alphabet("ab"));
  EXPECT_EQ(x.str(), y.str());
  EXPECT_FALSE(x.str().empty());
}

TEST(FixedPointCloud, HausdorffToDenseCloudShrinks) {
  const MarkedGroup g = hw();
  const auto dense = limit_points_by_fixed_points(g, 9, 1e-9);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t d = 5; d <= 8; ++d) {
    const double h = hausdorff_distance(limit_points_by_fixed_points(g, d, 1e-9), dense, kWindow);
    EXPECT_LE(h, prev) << "depth " << d;
    prev = h;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(Cloud, WriterFormat) {
  LimitSetCloud c;
  c.insert(SpherePoint::infinity(), 1, Word::parse("a", Alphabet("ab")));
  c.insert(Complex(0.5, -0.25), 0, Word());
  std::ostringstream os;
  write_cloud(os, c, Alphabet("ab"));
  EXPECT_EQ(os.str(), "inf inf 1 a\n0.5 -0.25 0 1\n");
}

LimitSetCloud points(std::initializer_list<Complex> zs) {
  LimitSetCloud c;
  for (Complex z : zs) c.insert(z, 0, Word());
  return c;
}

TEST(Hausdorff, Examples) {
  const auto a = points({0.0, {1, 1}, {0.5, -0.5}});
  EXPECT_DOUBLE_EQ(hausdorff_distance(a, a, kWindow), 0.0);
  EXPECT_DOUBLE_EQ(hausdorff_distance(points({0.0}), points({1.0}), kWindow), 1.0);
  const auto shifted = points({0.5, {1.5, 1}, {1.0, -0.5}});
  EXPECT_NEAR(hausdorff_distance(a, shifted, kWindow), 0.5, 1e-15);
  EXPECT_THROW(hausdorff_distance(points({10.0}), a, kWindow), Error);
}

TEST(Hausdorff, MatchesBruteForce) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 2);
  for (int trial = 0; trial < 20; ++trial) {
    LimitSetCloud a, b;
    std::vector<Complex> pa, pb;
    for (int i = 0; i < 60; ++i) {
      const Complex z(u(rng), u(rng));
      if (a.insert(z, 0, Word())) pa.push_back(z);
    }
    for (int i = 0; i < 1 + trial * 5; ++i) {
      const Complex z(u(rng), u(rng));
      if (b.insert(z, 0, Word())) pb.push_back(z);
    }
    auto directed = [](const std::vector<Complex>& x, const std::vector<Complex>& y) {
      double worst = 0;
      for (Complex p : x) {
        double best = 1e300;
        for (Complex q : y) best = std::min(best, std::abs(p - q));
        worst = std::max(worst, best);
      }
      return worst;
    };
    EXPECT_DOUBLE_EQ(hausdorff_distance(a, b, kWindow), std::max(directed(pa, pb), directed(pb, pa)));
  }
}

DfsConfig hw_config(double eps, std::size_t depth) {
  DfsConfig c;
  c.epsilon = eps;
  c.max_depth = depth;
  c.seeds = strip_gasket_seeds();
  return c;
}

TEST(Dfs, InvalidConfig) {
  auto c = hw_config(0, 4);
  EXPECT_THROW(limit_set_dfs(hw(), c), Error);
  c = hw_config(1e-2, 0);
  EXPECT_THROW(limit_set_dfs(hw(), c), Error);
  c = hw_config(1e-2, 3);
  c.seeds.clear();
  EXPECT_THROW(limit_set_dfs(hw(), c), Error);
}

TEST(Dfs, LargeEpsilonEmitsOnlySeeds) {
  const auto r = limit_set_dfs(hw(), hw_config(2.5, 10));
  EXPECT_EQ(r.stats.words_visited, 4u);
  ASSERT_EQ(r.circles.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(r.circles[i].word.empty());
    EXPECT_LT(circline_distance(r.circles[i].circle, strip_gasket_seeds()[i]), 1e-15);
  }
}

TEST(Dfs, Soundness) {
  const MarkedGroup g = hw();
  const auto cfg = hw_config(1e-2, 7);
  const auto r = limit_set_dfs(g, cfg);
  EXPECT_GE(r.stats.words_visited, r.stats.circles_emitted);
  EXPECT_EQ(r.stats.circles_emitted, r.circles.size());
  EXPECT_EQ(r.stats.max_depth_reached, 7u);
  for (const auto& c : r.circles) {
    ASSERT_TRUE(c.word.is_reduced());
    ASSERT_LE(c.word.size(), 7u);
    const Circline again = g.evaluate(c.word)(cfg.seeds[c.seed]);
    EXPECT_LT(circline_distance(again, c.circle), 1e-9);
  }
}

TEST(Dfs, NoDuplicatesAndCloudFromCentres) {
  const auto r = limit_set_dfs(hw(), hw_config(1e-2, 6));
  CirclineSet seen(1e-8);
  std::size_t finite = 0;
  for (const auto& c : r.circles) {
    EXPECT_TRUE(seen.insert(c.circle));
    if (!c.circle.is_line()) ++finite;
  }
  EXPECT_LE(r.cloud.size(), finite);
  EXPECT_GT(r.cloud.size(), 0u);
}

TEST(Dfs, TangencyPreserved) {
  const auto seeds = strip_gasket_seeds();
  const MarkedGroup g = hw();
  const auto r = limit_set_dfs(g, hw_config(1e-2, 6));
  // Seed images under the same word stay pairwise tangent.
  std::map<Word, std::vector<std::size_t>> by_word;
  for (const auto& c : r.circles) by_word[c.word].push_back(c.seed);
  for (const auto& [w, s] : by_word) {
    const MoebiusMap m = g.evaluate(w);
    for (std::size_t i = 0; i < seeds.size(); ++i)
      for (std::size_t j = i + 1; j < seeds.size(); ++j) {
        const Circline x = m(seeds[i]), y = m(seeds[j]);
        // Tangent circlines meet in one point: the inversive product is 1.
        const double ip = (std::norm(x.B() - y.B()) - (x.A() - y.A()) * (x.C() - y.C()) - (std::norm(x.B()) - x.A() * x.C()) -
                           (std::norm(y.B()) - y.A() * y.C())) /
                          (2 * std::sqrt((std::norm(x.B()) - x.A() * x.C()) * (std::norm(y.B()) - y.A() * y.C())));
        EXPECT_NEAR(std::abs(ip), 1.0, 1e-6) << w.to_string(g.alphabet());
      }
  }
}

TEST(Dfs, HalvingEpsilonNeverEmitsFewer) {
  std::uint64_t prev = 0;
  for (double eps : {0.4, 0.2, 0.1, 0.05, 0.025}) {
    const auto r = limit_set_dfs(hw(), hw_config(eps, 8));
    EXPECT_GE(r.stats.circles_emitted, prev) << eps;
    prev = r.stats.circles_emitted;
  }
}

TEST(Dfs, ThreadCountDoesNotChangeOutput) {
  auto cfg = hw_config(1e-2, 7);
  const auto one = limit_set_dfs(hw(), cfg);
  cfg.threads = 3;
  const auto many = limit_set_dfs(hw(), cfg);
  ASSERT_EQ(one.circles.size(), many.circles.size());
  for (std::size_t i = 0; i < one.circles.size(); ++i) {
    EXPECT_EQ(one.circles[i].word, many.circles[i].word);
    EXPECT_EQ(one.circles[i].seed, many.circles[i].seed);
  }
  std::ostringstream x, y;
  write_cloud(x, one.cloud, Alphabet("ab"));
  write_cloud(y, many.cloud, Alphabet("ab"));
  EXPECT_EQ(x.str(), y.str());
}

// Oracle for the shipped seeds: the largest disks avoiding a dense fixed-point
// cloud are the circle |z - 1/2| = 1/2 (up to integer translation) and the half
// planes beyond Im z = +-1/2.
TEST(Seeds, LargestEmptyDisksOfDenseCloud) {
  const auto cloud = limit_points_by_fixed_points(hw(), 8, 1e-9);
  double max_im = -1e9, min_im = 1e9;
  std::vector<Complex> pts;
  for (const auto& p : cloud.points()) {
    if (!p.point.is_finite()) continue;
    const Complex z = p.point.value();
    max_im = std::max(max_im, z.imag());
    min_im = std::min(min_im, z.imag());
    if (kWindow.contains(p.point)) pts.push_back(z);
  }
  EXPECT_LE(max_im, 0.5 + 1e-9);
  EXPECT_GE(min_im, -0.5 - 1e-9);
  EXPECT_GT(max_im, 0.5 - 1e-3);
  EXPECT_LT(min_im, -0.5 + 1e-3);

  // Largest empty disk with centre scanned over the strip.
  double best = 0;
  Complex best_centre;
  for (int i = 0; i <= 100; ++i)
    for (int j = -10; j <= 10; ++j) {
      const Complex c(-0.5 + 0.02 * i, 0.02 * j);
      double r = 1e9;
      for (Complex z : pts) r = std::min(r, std::abs(z - c));
      if (r > best) {
        best = r;
        best_centre = c;
      }
    }
  EXPECT_NEAR(best, 0.5, 0.02);
  EXPECT_NEAR(best_centre.imag(), 0.0, 0.02);
  const double frac = best_centre.real() - std::floor(best_centre.real());
  EXPECT_NEAR(frac, 0.5, 0.02);

  // The seed circle itself is empty inside and its boundary is accumulated on.
  const Circline seed = strip_gasket_seeds()[2];
  for (Complex z : pts) EXPECT_GE(std::abs(z - seed.center()), 0.5 - 1e-9);
  for (int k = 0; k < 16; ++k) {
    const Complex on = seed.center() + std::polar(0.5, 6.283185307179586 * k / 16);
    double r = 1e9;
    for (Complex z : pts) r = std::min(r, std::abs(z - on));
    EXPECT_LT(r, 0.05) << k;
  }
}

TEST(Render, EmptyCloudIsBlank) {
  const Window w{0, 0, 1, 1};
  const auto out = render(LimitSetCloud(), {}, w, 32);
  const std::string head = "P6\n32 32\n255\n";
  ASSERT_EQ(out.ppm.size(), head.size() + 32 * 32 * 3);
  EXPECT_EQ(out.ppm.substr(0, head.size()), head);
  EXPECT_EQ(out.ppm.find_first_not_of('\xff', head.size()), std::string::npos);
  EXPECT_EQ(out.svg.find("<circle"), std::string::npos);
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

TEST(Render, SingleCircle) {
  const auto out = render(LimitSetCloud(), {Circline::circle({0.5, 0.5}, 0.25)}, {0, 0, 1, 1}, 64);
  EXPECT_EQ(count(out.svg, "<circle"), 1u);
  EXPECT_NE(out.ppm.find('\0', 20), std::string::npos);
}

TEST(Render, InvalidArguments) {
  EXPECT_THROW(render(LimitSetCloud(), {}, {0, 0, 0, 1}, 64), Error);
  EXPECT_THROW(render(LimitSetCloud(), {}, {0, 0, 1, 1}, 8), Error);
}

TEST(Render, DeterministicWithHeader) {
  const auto r = limit_set_dfs(hw(), hw_config(2e-2, 6));
  std::vector<Circline> circles;
  for (const auto& c : r.circles) circles.push_back(c.circle);
  const auto x = render(r.cloud, circles, kWindow, 128, "epsilon=0.02\ndepth=6");
  const auto y = render(r.cloud, circles, kWindow, 128, "epsilon=0.02\ndepth=6");
  EXPECT_EQ(x.ppm, y.ppm);
  EXPECT_EQ(x.svg, y.svg);
  EXPECT_EQ(x.ppm.rfind("P6\n# epsilon=0.02\n# depth=6\n128 128\n255\n", 0), 0u);
  EXPECT_NE(x.svg.find("<line"), std::string::npos);
}

}  // namespace
}  // namespace kleinian
