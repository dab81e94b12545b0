#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "kleinian/gasket.hpp"
#include "kleinian/limitset.hpp"
#include "test_support.hpp"

namespace kleinian {
namespace {

double point_gap(const SpherePoint& p, const SpherePoint& q) { return chordal_distance(p, q); }

TEST(Circle, SignedRadiusAndCurvature) {
  const Circle c = Circle::disc({1, 2}, 0.25);
  EXPECT_NEAR(c.radius(), 0.25, 1e-15);
  EXPECT_NEAR(c.curvature(), 4.0, 1e-13);
  EXPECT_LT(c.form().evaluate({1, 2}), 0);
  const Circle e = Circle::disc(0, -2);
  EXPECT_NEAR(e.radius(), -2, 1e-15);
  EXPECT_NEAR(e.curvature(), -0.5, 1e-15);
  EXPECT_GT(e.form().evaluate(0), 0);
  EXPECT_LT(e.form().evaluate(5), 0);
  const Circle l = Circle::half_plane({0, 2}, 1);
  EXPECT_TRUE(l.is_line());
  EXPECT_EQ(l.curvature(), 0.0);
  EXPECT_NEAR(std::abs(l.normal() - Complex(0, 1)), 0, 1e-15);
  EXPECT_NEAR(l.offset(), 1, 1e-15);
  EXPECT_LT(l.form().evaluate({0, 3}), 0);
  EXPECT_THROW(Circle::disc(0, 0), Error);
}

TEST(Circle, CapOfCentredDisc) {
  // Stereographic image of |z| = r is the parallel with height (r^2-1)/(r^2+1),
  // so the interior cap is centred on the south pole with cos rho = (1-r^2)/(1+r^2).
  for (double r : {0.1, 0.5, 1.0, 3.0}) {
    const SphereCap cap = Circle::disc(0, r).cap();
    EXPECT_NEAR(cap.axis.z, -1, 1e-15);
    EXPECT_NEAR(cap.cos_rho, (1 - r * r) / (1 + r * r), 1e-15);
    EXPECT_NEAR(cap.sin_rho, 2 * r / (1 + r * r), 1e-15);
  }
}

TEST(Circle, TransportPreservesInterior) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const MoebiusMap m = testing::random_map(rng);
    const Circle c = Circle::disc(testing::random_complex(rng), 0.3);
    const Circle img = c.transformed(m);
    const SpherePoint inside = m(c.center());
    if (!inside.is_finite()) continue;
    EXPECT_LT(img.form().evaluate(inside.value()), 0);
    EXPECT_LT(circline_distance(img.circline(), m(c.circline())), 1e-9);
  }
}

TEST(Tangency, Examples) {
  CirclePacking p{{Circle::disc(0, 1), Circle::disc(2, 1)}, {}};
  auto g = detect_tangencies(p);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_LT(point_gap(g.edges[0].point, Complex(1, 0)), 1e-12);

  p = CirclePacking{{Circle::disc(0, 1), Circle::disc(10, 1)}, {}};
  EXPECT_TRUE(detect_tangencies(p).edges.empty());

  const auto base = standard_base_triple();
  p = CirclePacking{{base[0], base[1], base[2]}, {}};
  g = detect_tangencies(p);
  ASSERT_EQ(g.edges.size(), 3u);
  const auto pts = standard_tangency_points();
  for (std::size_t e = 0; e < 3; ++e) EXPECT_LT(point_gap(g.edges[e].point, pts[e]), 1e-12) << e;
}

TEST(Tangency, InternalTangencyWithEnclosingCircle) {
  CirclePacking p{{Circle::disc(0, -1), Circle::disc(0.5, 0.5)}, {}};
  const auto g = detect_tangencies(p);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_LT(point_gap(g.edges[0].point, Complex(1, 0)), 1e-12);
}

TEST(Tangency, OverlapThrows) {
  CirclePacking p{{Circle::disc(0, 1), Circle::disc(1.5, 1)}, {}};
  try {
    detect_tangencies(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OverlappingCircles);
  }
  // Nested positive discs overlap too.
  p = CirclePacking{{Circle::disc(0, 1), Circle::disc(0.1, 0.2)}, {}};
  EXPECT_THROW(detect_tangencies(p), Error);
}

TEST(Tangency, MatchesBruteForceOnGasket) {
  const auto p = bounded_gasket(0.05);
  const auto g = detect_tangencies(p);
  std::set<std::pair<std::size_t, std::size_t>> brute;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const Circle &a = p.circles[i], &b = p.circles[j];
      const double d = std::abs(a.center() - b.center());
      if (std::abs(d - std::abs(a.radius() + b.radius())) < 1e-9) brute.emplace(i, j);
    }
  std::set<std::pair<std::size_t, std::size_t>> found;
  for (const auto& e : g.edges) found.emplace(e.i, e.j);
  EXPECT_EQ(found, brute);
}

TEST(Tangency, MoebiusInvariance) {
  std::mt19937_64 rng(11);
  const auto p = standard_gasket(0.05);
  const auto g = detect_tangencies(p);
  for (int t = 0; t < 20; ++t) {
    const MoebiusMap m = testing::random_map(rng);
    const auto q = transform(p, m);
    const auto h = detect_tangencies(q);
    ASSERT_EQ(h.edges.size(), g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      ASSERT_EQ(h.edges[e].i, g.edges[e].i);
      ASSERT_EQ(h.edges[e].j, g.edges[e].j);
      EXPECT_LT(point_gap(h.edges[e].point, m(g.edges[e].point)), 1e-6);
    }
  }
}

TEST(Descartes, Examples) {
  EXPECT_EQ(descartes_residual(-1, 2, 2, 3), 0.0);
  EXPECT_EQ(descartes_residual(0, 0, 1, 1), 0.0);
  EXPECT_EQ(descartes_residual(1, 1, 1, 1), 8.0);
}

TEST(Descartes, Symmetric) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 10);
  for (int t = 0; t < 100; ++t) {
    std::array<double, 4> k{u(rng), u(rng), u(rng), u(rng)};
    const double r = descartes_residual(k[0], k[1], k[2], k[3]);
    std::sort(k.begin(), k.end());
    do {
      EXPECT_NEAR(descartes_residual(k[0], k[1], k[2], k[3]), r, 1e-12 * (1 + std::abs(r)));
    } while (std::next_permutation(k.begin(), k.end()));
  }
}

// Independent oracle: the linear Descartes recursion on (curvature, curvature * centre)
// for the gasket with curvatures (-1, 2, 2, 3).
struct KW {
  double k;
  Complex w;
};

std::vector<KW> descartes_oracle(double max_curvature) {
  std::vector<KW> out{{-1, 0}, {2, -1}, {2, 1}, {3, {0, 2}}};
  struct Item {
    std::array<KW, 3> triple;
    KW opposite;
  };
  std::vector<Item> stack;
  for (int o = 0; o < 4; ++o) {
    std::array<KW, 3> t{};
    int n = 0;
    for (int x = 0; x < 4; ++x)
      if (x != o) t[n++] = out[x];
    stack.push_back({t, out[o]});
  }
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const KW next{2 * (it.triple[0].k + it.triple[1].k + it.triple[2].k) - it.opposite.k,
                  2.0 * (it.triple[0].w + it.triple[1].w + it.triple[2].w) - it.opposite.w};
    if (next.k > max_curvature) continue;
    out.push_back(next);
    for (int x = 0; x < 3; ++x) {
      std::array<KW, 3> t = it.triple;
      const KW dropped = t[x];
      t[x] = next;
      stack.push_back({t, dropped});
    }
  }
  return out;
}

TEST(Generator, BoundedGasketMatchesDescartesOracle) {
  const double eps = 0.02;
  const auto lib = bounded_gasket(eps);
  // Chordal diameter of a circle in the unit disc is between 2r and 4r.
  const auto oracle = descartes_oracle(4.0 / eps + 1);
  auto key = [](double k, Complex w) {
    return std::tuple(std::llround(k * 1e6), std::llround(w.real() * 1e6), std::llround(w.imag() * 1e6));
  };
  std::set<std::tuple<long long, long long, long long>> lib_keys, oracle_keys;
  for (const auto& c : lib.circles) {
    const double k = c.curvature();
    EXPECT_NEAR(k, std::round(k), 1e-6);
    lib_keys.insert(key(k, k * c.center()));
  }
  EXPECT_EQ(lib_keys.size(), lib.size());
  for (const auto& o : oracle) {
    const Circle c = Circle::disc(o.w / o.k, 1 / o.k);
    if (c.chordal_diameter() >= eps) oracle_keys.insert(key(o.k, o.w));
  }
  EXPECT_EQ(lib_keys, oracle_keys);
}

TEST(Generator, GenerationsAndOrder) {
  const auto g0 = bounded_gasket(1e-9, 0);
  EXPECT_EQ(g0.size(), 4u);
  const auto g1 = bounded_gasket(1e-9, 1);
  ASSERT_EQ(g1.size(), 8u);
  std::multiset<long> k;
  for (std::size_t i = 4; i < 8; ++i) k.insert(std::lround(g1.circles[i].curvature()));
  EXPECT_EQ(k, (std::multiset<long>{3, 6, 6, 15}));
  EXPECT_THROW(apollonian_packing({Circle::disc(0, 1), Circle::disc(3, 1), Circle::disc(6, 1), Circle::disc(9, 1)}, 0.1),
               Error);
}

TEST(Generator, StandardGasketIsStrip) {
  const auto p = standard_gasket(0.02);
  for (std::size_t i = 2; i < p.size(); ++i) {
    const Circle& c = p.circles[i];
    ASSERT_FALSE(c.is_line());
    EXPECT_GE(c.center().imag() - c.radius(), -1e-12);
    EXPECT_LE(c.center().imag() + c.radius(), 1 + 1e-12);
    // Integral curvatures: the base quadruple is (0, 0, 2, 2).
    EXPECT_NEAR(c.curvature(), std::round(c.curvature()), 1e-6);
  }
}

TEST(Normalize, StandardIsIdentity) {
  const auto p = standard_gasket(0.05);
  EXPECT_TRUE(is_identity(normalize_to_standard_gasket(p), 1e-9));
  EXPECT_TRUE(is_identity(normalize_to_standard_gasket(p, {0, 1, 2}), 1e-9));
}

TEST(Normalize, RecoversDistortion) {
  std::mt19937_64 rng(2024);
  const auto p = standard_gasket(0.05);
  for (int t = 0; t < 50; ++t) {
    const MoebiusMap g = testing::random_map(rng);
    const auto q = transform(p, g);
    EXPECT_LT(projective_distance(normalize_to_standard_gasket(q, {0, 1, 2}), g.inverse()), 1e-6);
    // The default triple may differ, but the image still contains the base
    // triple, so it lies in the standard gasket: integral curvatures inside
    // the strip, and a passing verdict.
    const auto back = transform(q, normalize_to_standard_gasket(q));
    for (const auto& b : standard_base_triple()) {
      bool found = false;
      for (const auto& c : back.circles) found = found || circline_distance(c.circline(), b.circline()) < 1e-6;
      EXPECT_TRUE(found);
    }
    for (const auto& c : back.circles) {
      if (c.is_line()) continue;
      EXPECT_NEAR(c.curvature(), std::round(c.curvature()), 1e-5 * std::max(1.0, c.curvature()));
      EXPECT_GE(c.center().imag() - c.radius(), -1e-6);
      EXPECT_LE(c.center().imag() + c.radius(), 1 + 1e-6);
    }
    EXPECT_TRUE(is_apollonian_like(back).pass);
  }
}

TEST(Normalize, NoTangentTriple) {
  CirclePacking p{{Circle::disc(0, 1), Circle::disc(2, 1), Circle::disc(4, 1), Circle::disc(10, 1)}, {}};
  try {
    normalize_to_standard_gasket(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoTangentTriple);
  }
  EXPECT_THROW(normalize_to_standard_gasket(p, {0, 1, 2}), Error);
  EXPECT_THROW(normalize_to_standard_gasket(p, {0, 0, 1}), Error);
}

TEST(Normalize, DfsFamilyResiduals) {
  DfsConfig cfg;
  cfg.epsilon = 1e-2;
  cfg.max_depth = 8;
  cfg.seeds = strip_gasket_seeds();
  const auto r = limit_set_dfs(solve_parabolic_commutator().group, cfg);
  std::vector<Circline> cs;
  for (const auto& c : r.circles)
    if (c.resolved) cs.push_back(c.circle);
  const auto p = packing_from_circlines(cs);
  const MoebiusMap m = normalize_to_standard_gasket(p);
  EXPECT_TRUE(projectively_equal(m, MoebiusMap(-1, Complex(0.5, 0.5), 0, 1), 1e-12));
  const auto report = is_apollonian_like(transform(p, m));
  EXPECT_TRUE(report.pass);
  EXPECT_LT(report.worst_residual, 1e-6);
}

TEST(Verdict, TruncatedGasketPasses) {
  const auto p = bounded_gasket(1e-9, 1);
  const auto r = is_apollonian_like(p);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.connected);
  EXPECT_TRUE(r.crossings.empty());
  EXPECT_GE(r.quadruples, 5u);
  EXPECT_LT(r.worst_residual, 1e-9);
}

TEST(Verdict, PerturbedRadiusFails) {
  auto p = bounded_gasket(1e-9, 1);
  for (std::size_t victim = 1; victim < p.size(); ++victim) {
    auto q = p;
    const Circle& c = q.circles[victim];
    q.circles[victim] = Circle::disc(c.center(), c.radius() * 0.95);
    const auto r = is_apollonian_like(q);
    EXPECT_FALSE(r.pass) << victim;
    EXPECT_TRUE(std::binary_search(r.offenders.begin(), r.offenders.end(), victim)) << victim;
  }
}

TEST(Verdict, EnlargedRadiusReportsCrossing) {
  auto p = bounded_gasket(1e-9, 1);
  p.circles[3] = Circle::disc(p.circles[3].center(), p.circles[3].radius() * 1.05);
  const auto r = is_apollonian_like(p);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.crossings.empty());
  EXPECT_TRUE(std::binary_search(r.offenders.begin(), r.offenders.end(), 3u));
}

TEST(Verdict, MinimalQuadruple) {
  const auto base = standard_base_triple();
  CirclePacking p{{base[0], base[1], base[2], Circle::disc({1, 0.5}, 0.5)}, {}};
  const auto r = is_apollonian_like(p);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.quadruples, 1u);
  EXPECT_THROW(is_apollonian_like(CirclePacking{{base[0], base[1], base[2]}, {}}), Error);
}

TEST(Verdict, DisconnectedFails) {
  auto p = bounded_gasket(1e-9, 1);
  // A tiny disc alone in an interstice.
  p.circles.push_back(Circle::disc({0.35, 0.55}, 1e-3));
  const auto r = is_apollonian_like(p);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.connected);
  EXPECT_EQ(r.offenders, std::vector<std::size_t>{p.size() - 1});
}

TEST(Orientation, FromCirclines) {
  const auto p = packing_from_circlines(strip_gasket_seeds());
  // Interiors are the half planes outside the strip and the disc.
  EXPECT_LT(p.circles[0].form().evaluate({0, 2}), 0);
  EXPECT_LT(p.circles[1].form().evaluate({0, -2}), 0);
  EXPECT_LT(p.circles[2].form().evaluate({0.5, 0}), 0);
  EXPECT_NO_THROW(detect_tangencies(p));
  // Great circles fall back to counting the others.
  const auto q = packing_from_circlines({Circline::circle(0, 1), Circline::circle(0.5, 0.5), Circline::circle(-0.5, 0.5)});
  EXPECT_LT(q.circles[0].curvature(), 0);
  EXPECT_EQ(detect_tangencies(q).edges.size(), 3u);
}

TEST(Io, RoundTrip) {
  auto p = standard_gasket(0.1);
  std::ostringstream os;
  write_packing(os, p);
  std::istringstream is(os.str());
  const auto q = read_packing(is);
  ASSERT_EQ(q.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(q.circles[i].is_line(), p.circles[i].is_line());
    EXPECT_LT(circline_distance(q.circles[i].circline(), p.circles[i].circline()), 1e-14);
    EXPECT_LT(std::abs(q.circles[i].form().normalized().evaluate({0.3, 0.7}) - p.circles[i].form().normalized().evaluate({0.3, 0.7})), 1e-12);
  }
  std::ostringstream again;
  write_packing(again, q);
  EXPECT_EQ(again.str(), os.str());
}

TEST(Io, ParseErrorsCarryLine) {
  std::istringstream bad("C 0 0 1\n# fine\nX 1 2 3\n");
  try {
    read_packing(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::istringstream zero("C 0 0 0\n");
  EXPECT_THROW(read_packing(zero), Error);
  std::istringstream labelled("C 0 0 1 ab\nL 0 1 0.5\n");
  const auto p = read_packing(labelled);
  ASSERT_EQ(p.provenance.size(), 2u);
  EXPECT_EQ(p.provenance[0], "ab");
}

TEST(Io, EdgeList) {
  const auto base = standard_base_triple();
  std::ostringstream os;
  write_edge_list(os, detect_tangencies(CirclePacking{{base[0], base[1], base[2]}, {}}));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "0 1 inf inf");
  std::getline(is, line);
  EXPECT_EQ(line.substr(0, 4), "0 2 ");
}

}  // namespace
}  // namespace kleinian
