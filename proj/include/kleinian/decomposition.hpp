#pragma once

// Graphs of groups with a splitting validator, finite tree systems of metric
// spaces and their limits, and cut analysis on finite graphs.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <deque>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kleinian/error.hpp"

namespace kleinian {

// ---------------------------------------------------------------------------
// Graphs of groups

enum class VertexType { TwoEnded, HangingFuchsian, Rigid };

inline std::string_view to_string(VertexType t) {
  switch (t) {
    case VertexType::TwoEnded: return "TwoEnded";
    case VertexType::HangingFuchsian: return "HangingFuchsian";
    case VertexType::Rigid: return "Rigid";
  }
  return "?";
}

inline VertexType parse_vertex_type(std::string s) {
  std::string k;
  for (char ch : s)
    if (ch != '-' && ch != '_') k += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (k == "twoended") return VertexType::TwoEnded;
  if (k == "hangingfuchsian") return VertexType::HangingFuchsian;
  if (k == "rigid") return VertexType::Rigid;
  throw Error(ErrorCode::ParseError, "unknown vertex type '" + s + "'");
}

struct GogVertex {
  std::string id;
  VertexType type = VertexType::Rigid;
  std::string label;
  /// Number of peripheral subgroups; only meaningful for hanging Fuchsian vertices.
  std::size_t slots = 0;
};

struct GogEdge {
  std::string from, to;
  std::string label;
  bool two_ended = true;
  /// Peripheral slot taken at the hanging Fuchsian endpoint(s).
  std::optional<std::size_t> slot;
};

class GraphOfGroups {
 public:
  std::vector<GogVertex> vertices;
  std::vector<GogEdge> edges;

  std::size_t index_of(const std::string& id) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i].id == id) return i;
    throw Error(ErrorCode::UnknownVertex, "no vertex '" + id + "'");
  }

  /// Throws InvalidStructure unless ids are unique, edges reference existing
  /// vertices, slots are in range and the underlying graph is connected.
  void validate_structure() const {
    if (vertices.empty()) throw Error(ErrorCode::InvalidStructure, "graph of groups has no vertices");
    std::set<std::string> ids;
    for (const auto& v : vertices)
      if (!ids.insert(v.id).second) throw Error(ErrorCode::InvalidStructure, "duplicate vertex '" + v.id + "'");
    std::vector<std::size_t> parent(vertices.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto& ed = edges[e];
      std::size_t a, b;
      try {
        a = index_of(ed.from);
        b = index_of(ed.to);
      } catch (const Error&) {
        throw Error(ErrorCode::InvalidStructure, "edge " + std::to_string(e) + " references a missing vertex");
      }
      if (ed.slot) {
        bool hf = false;
        for (std::size_t x : {a, b}) {
          if (vertices[x].type != VertexType::HangingFuchsian) continue;
          hf = true;
          if (*ed.slot >= vertices[x].slots)
            throw Error(ErrorCode::InvalidStructure, "edge " + std::to_string(e) + " slot out of range at '" +
                                                         vertices[x].id + "'");
        }
        if (!hf)
          throw Error(ErrorCode::InvalidStructure,
                      "edge " + std::to_string(e) + " has a slot but no hanging Fuchsian endpoint");
      }
      parent[find(a)] = find(b);
    }
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (find(i) != find(0)) throw Error(ErrorCode::InvalidStructure, "graph of groups is disconnected");
  }

  bool is_tree() const {
    try {
      validate_structure();
    } catch (const Error&) {
      return false;
    }
    return edges.size() + 1 == vertices.size();
  }
};

enum class BowditchClause { EdgeTwoEnded = 1, TypeAlternation = 2, PeripheralSlots = 3 };

inline std::string_view clause_name(BowditchClause c) {
  switch (c) {
    case BowditchClause::EdgeTwoEnded: return "i";
    case BowditchClause::TypeAlternation: return "ii";
    case BowditchClause::PeripheralSlots: return "iii";
  }
  return "?";
}

struct Violation {
  BowditchClause clause;
  /// Offending vertex ids, or "e<k>" for edge k.
  std::vector<std::string> ids;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  bool pass = true;
  std::vector<Violation> violations;

  bool violates(BowditchClause c) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.clause == c; });
  }
  std::set<BowditchClause> clauses() const {
    std::set<BowditchClause> s;
    for (const auto& v : violations) s.insert(v.clause);
    return s;
  }
};

/// Checks the three splitting clauses: (i) every edge group two-ended, (ii) no
/// edge joins vertices of the same type, (iii) each hanging Fuchsian vertex has
/// its peripheral slots filled by incident edges bijectively.
inline ValidationReport validate_bowditch(const GraphOfGroups& g) {
  g.validate_structure();
  ValidationReport r;
  auto edge_id = [](std::size_t e) { return "e" + std::to_string(e); };
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& ed = g.edges[e];
    if (!ed.two_ended)
      r.violations.push_back({BowditchClause::EdgeTwoEnded, {edge_id(e)}, "edge group is not two-ended"});
    const auto& a = g.vertices[g.index_of(ed.from)];
    const auto& b = g.vertices[g.index_of(ed.to)];
    if (a.type == b.type) {
      std::vector<std::string> ids{std::min(a.id, b.id), std::max(a.id, b.id)};
      r.violations.push_back(
          {BowditchClause::TypeAlternation, ids, "adjacent vertices share type " + std::string(to_string(a.type))});
    }
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const auto& x = g.vertices[v];
    if (x.type != VertexType::HangingFuchsian) continue;
    std::vector<std::size_t> fill(x.slots, 0);
    std::size_t unslotted = 0;
    for (const auto& ed : g.edges) {
      const int ends = (ed.from == x.id) + (ed.to == x.id);
      for (int k = 0; k < ends; ++k) {
        if (ed.slot)
          ++fill[*ed.slot];
        else
          ++unslotted;
      }
    }
    std::ostringstream why;
    if (unslotted) why << unslotted << " incident edge(s) without a slot";
    for (std::size_t s = 0; s < fill.size(); ++s)
      if (fill[s] != 1) why << (why.tellp() > 0 ? "; " : "") << "slot " << s << " filled " << fill[s] << " times";
    if (why.tellp() > 0) r.violations.push_back({BowditchClause::PeripheralSlots, {x.id}, why.str()});
  }
  std::sort(r.violations.begin(), r.violations.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.clause, a.ids) < std::tie(b.clause, b.ids);
  });
  r.pass = r.violations.empty();
  return r;
}

/// Line format: `vertex <id> <type> [slots=n] [label=s]` and
/// `edge <id1> <id2> twoended=<bool> [slot=k] [label=s]`; `#` starts a comment.
inline GraphOfGroups read_graph_of_groups(std::istream& in) {
  GraphOfGroups g;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + msg);
  };
  auto parse_count = [&](const std::string& v) -> std::size_t {
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      fail("expected a nonnegative integer, got '" + v + "'");
    return std::stoul(v);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    std::map<std::string, std::string> opts;
    auto split_opts = [&](std::size_t from) {
      for (std::size_t i = from; i < tok.size(); ++i) {
        const auto eq = tok[i].find('=');
        if (eq == std::string::npos) fail("expected key=value, got '" + tok[i] + "'");
        opts[tok[i].substr(0, eq)] = tok[i].substr(eq + 1);
      }
    };
    if (tok[0] == "vertex") {
      if (tok.size() < 3) fail("vertex needs an id and a type");
      GogVertex v;
      v.id = tok[1];
      try {
        v.type = parse_vertex_type(tok[2]);
      } catch (const Error&) {
        fail("unknown vertex type '" + tok[2] + "'");
      }
      split_opts(3);
      for (const auto& [k, val] : opts) {
        if (k == "slots")
          v.slots = parse_count(val);
        else if (k == "label")
          v.label = val;
        else
          fail("unknown vertex option '" + k + "'");
      }
      g.vertices.push_back(v);
    } else if (tok[0] == "edge") {
      if (tok.size() < 3) fail("edge needs two vertex ids");
      GogEdge e;
      e.from = tok[1];
      e.to = tok[2];
      split_opts(3);
      if (!opts.count("twoended")) fail("edge needs twoended=<bool>");
      for (const auto& [k, val] : opts) {
        if (k == "twoended") {
          if (val == "true" || val == "1")
            e.two_ended = true;
          else if (val == "false" || val == "0")
            e.two_ended = false;
          else
            fail("twoended must be true or false");
        } else if (k == "slot") {
          e.slot = parse_count(val);
        } else if (k == "label") {
          e.label = val;
        } else {
          fail("unknown edge option '" + k + "'");
        }
      }
      g.edges.push_back(e);
    } else {
      fail("unknown record '" + tok[0] + "'");
    }
  }
  return g;
}

inline void write_graph_of_groups(std::ostream& os, const GraphOfGroups& g) {
  for (const auto& v : g.vertices) {
    os << "vertex " << v.id << ' ' << to_string(v.type);
    if (v.type == VertexType::HangingFuchsian) os << " slots=" << v.slots;
    if (!v.label.empty()) os << " label=" << v.label;
    os << '\n';
  }
  for (const auto& e : g.edges) {
    os << "edge " << e.from << ' ' << e.to << " twoended=" << (e.two_ended ? "true" : "false");
    if (e.slot) os << " slot=" << *e.slot;
    if (!e.label.empty()) os << " label=" << e.label;
    os << '\n';
  }
}

/// The splitting of the handlebody group with three curves a, b, c: a rigid
/// handlebody piece, a cyclic vertex per curve, and one hanging Fuchsian
/// S x I per curve with a single peripheral subgroup.
inline GraphOfGroups abc_example() {
  GraphOfGroups g;
  g.vertices.push_back({"H", VertexType::Rigid, "handlebody", 0});
  for (const char* c : {"a", "b", "c"}) {
    const std::string s = c;
    g.vertices.push_back({"T" + s, VertexType::TwoEnded, "torus_" + s, 0});
    g.vertices.push_back({"S" + s, VertexType::HangingFuchsian, "SxI_" + s, 1});
    g.edges.push_back({"H", "T" + s, "Z_" + s, true, std::nullopt});
    g.edges.push_back({"T" + s, "S" + s, "Z_d" + s, true, 0});
  }
  return g;
}

struct GogMutation {
  std::string name;
  GraphOfGroups graph;
  BowditchClause expected;
};

/// Ten single-change variants of abc_example, each breaking exactly one clause.
inline std::vector<GogMutation> abc_mutations() {
  std::vector<GogMutation> out;
  auto add = [&](std::string name, BowditchClause c, const std::function<void(GraphOfGroups&)>& f) {
    GraphOfGroups g = abc_example();
    f(g);
    out.push_back({std::move(name), std::move(g), c});
  };
  auto edge = [](GraphOfGroups& g, const std::string& a, const std::string& b) -> GogEdge& {
    for (auto& e : g.edges)
      if ((e.from == a && e.to == b) || (e.from == b && e.to == a)) return e;
    throw Error(ErrorCode::UnknownVertex, "no edge " + a + "-" + b);
  };
  auto vertex = [](GraphOfGroups& g, const std::string& id) -> GogVertex& { return g.vertices[g.index_of(id)]; };

  add("edge H-Ta not two-ended", BowditchClause::EdgeTwoEnded, [&](auto& g) { edge(g, "H", "Ta").two_ended = false; });
  add("edge Tb-Sb not two-ended", BowditchClause::EdgeTwoEnded, [&](auto& g) { edge(g, "Tb", "Sb").two_ended = false; });
  add("edge H-Tc not two-ended", BowditchClause::EdgeTwoEnded, [&](auto& g) { edge(g, "H", "Tc").two_ended = false; });
  add("Ta retyped rigid", BowditchClause::TypeAlternation, [&](auto& g) { vertex(g, "Ta").type = VertexType::Rigid; });
  add("Sb retyped two-ended", BowditchClause::TypeAlternation, [&](auto& g) {
    vertex(g, "Sb").type = VertexType::TwoEnded;
    vertex(g, "Sb").slots = 0;
    edge(g, "Tb", "Sb").slot.reset();
  });
  add("extra edge Ta-Tb", BowditchClause::TypeAlternation,
      [&](auto& g) { g.edges.push_back({"Ta", "Tb", "Z_ab", true, std::nullopt}); });
  add("extra rigid vertex on H", BowditchClause::TypeAlternation, [&](auto& g) {
    g.vertices.push_back({"H2", VertexType::Rigid, "", 0});
    g.edges.push_back({"H", "H2", "Z", true, std::nullopt});
  });
  add("Sa declares two slots", BowditchClause::PeripheralSlots, [&](auto& g) { vertex(g, "Sa").slots = 2; });
  add("edge Tb-Sb loses its slot", BowditchClause::PeripheralSlots, [&](auto& g) { edge(g, "Tb", "Sb").slot.reset(); });
  add("second edge into slot 0 of Sc", BowditchClause::PeripheralSlots, [&](auto& g) {
    g.vertices.push_back({"Td", VertexType::TwoEnded, "", 0});
    g.edges.push_back({"H", "Td", "Z_d", true, std::nullopt});
    g.edges.push_back({"Td", "Sc", "Z_dd", true, 0});
  });
  return out;
}

// ---------------------------------------------------------------------------
// Finite metric spaces and tree systems

using Rational = boost::multiprecision::cpp_rational;

/// Accepts integers, fractions `p/q` and decimals, all converted exactly.
inline Rational parse_rational(const std::string& s) {
  auto bad = [&]() -> Rational { throw Error(ErrorCode::ParseError, "not a rational number: '" + s + "'"); };
  if (s.empty()) return bad();
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  auto digits = [](const std::string& t) {
    return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  const std::string body = s.substr(i);
  // cpp_int reads a leading 0 as octal.
  auto integer = [](std::string t) {
    const auto nz = t.find_first_not_of('0');
    return boost::multiprecision::cpp_int(nz == std::string::npos ? std::string("0") : t.substr(nz));
  };
  Rational r;
  if (const auto slash = body.find('/'); slash != std::string::npos) {
    const std::string num = body.substr(0, slash), den = body.substr(slash + 1);
    if (!digits(num) || !digits(den)) return bad();
    const auto d = integer(den);
    if (d == 0) return bad();
    r = Rational(integer(num), d);
  } else if (const auto dot = body.find('.'); dot != std::string::npos) {
    const std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
    if ((!ip.empty() && !digits(ip)) || !digits(fp)) return bad();
    boost::multiprecision::cpp_int den = 1;
    for (std::size_t k = 0; k < fp.size(); ++k) den *= 10;
    r = Rational(integer(ip + fp), den);
  } else {
    if (!digits(body)) return bad();
    r = Rational(integer(body));
  }
  return neg ? Rational(-r) : r;
}

inline std::string format_rational(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;

  /// Validates the metric axioms exactly; throws InvalidStructure otherwise.
  FiniteMetricSpace(std::vector<std::string> labels, std::vector<std::vector<Rational>> d)
      : labels_(std::move(labels)), d_(std::move(d)) {
    const std::size_t n = labels_.size();
    if (d_.size() != n) throw Error(ErrorCode::InvalidStructure, "distance matrix size differs from point count");
    std::set<std::string> seen;
    for (const auto& l : labels_)
      if (!seen.insert(l).second) throw Error(ErrorCode::InvalidStructure, "duplicate point '" + l + "'");
    for (std::size_t i = 0; i < n; ++i) {
      if (d_[i].size() != n) throw Error(ErrorCode::InvalidStructure, "distance matrix is not square");
      if (d_[i][i] != 0) throw Error(ErrorCode::InvalidStructure, "nonzero diagonal at " + labels_[i]);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (d_[i][j] != d_[j][i]) throw Error(ErrorCode::InvalidStructure, "asymmetric distance");
        if (i != j && d_[i][j] <= 0)
          throw Error(ErrorCode::InvalidStructure, "distance between distinct points must be positive");
        for (std::size_t k = 0; k < n; ++k)
          if (d_[i][k] > d_[i][j] + d_[j][k])
            throw Error(ErrorCode::InvalidStructure,
                        "triangle inequality fails at " + labels_[i] + "," + labels_[j] + "," + labels_[k]);
      }
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const Rational& d(std::size_t i, std::size_t j) const { return d_.at(i).at(j); }
  const std::vector<std::vector<Rational>>& matrix() const { return d_; }

  std::size_t index_of(const std::string& l) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == l) return i;
    throw Error(ErrorCode::UnknownPoint, "no point '" + l + "'");
  }

  Rational diameter() const {
    Rational m = 0;
    for (const auto& row : d_)
      for (const auto& x : row) m = std::max(m, x);
    return m;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<Rational>> d_;
};

inline Rational gromov_product(const FiniteMetricSpace& X, std::size_t x, std::size_t y, std::size_t z) {
  if (x >= X.size() || y >= X.size() || z >= X.size()) throw Error(ErrorCode::UnknownPoint, "point index out of range");
  return (X.d(x, y) + X.d(x, z) - X.d(y, z)) / 2;
}

inline Rational gromov_product(const FiniteMetricSpace& X, const std::string& x, const std::string& y,
                               const std::string& z) {
  return gromov_product(X, X.index_of(x), X.index_of(y), X.index_of(z));
}

/// One unoriented tree edge; `glue` lists pairs (point of K_u, point of K_v),
/// i.e. the bijection for the orientation u -> v. The reverse orientation is
/// its inverse.
struct TreeEdge {
  std::size_t u = 0, v = 0;
  std::vector<std::pair<std::size_t, std::size_t>> glue;
};

struct TreeSystem {
  std::vector<std::string> names;
  std::vector<FiniteMetricSpace> spaces;
  std::vector<TreeEdge> edges;

  void validate() const {
    const std::size_t n = spaces.size();
    if (n == 0) throw Error(ErrorCode::InvalidStructure, "tree system has no vertices");
    if (names.size() != n) throw Error(ErrorCode::InvalidStructure, "vertex names differ from space count");
    if (edges.size() + 1 != n) throw Error(ErrorCode::InvalidStructure, "a tree on n vertices has n-1 edges");
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : edges) {
      if (e.u >= n || e.v >= n || e.u == e.v) throw Error(ErrorCode::InvalidStructure, "bad tree edge");
      if (e.glue.empty()) throw Error(ErrorCode::InvalidStructure, "gluing set is empty");
      std::set<std::size_t> left, right;
      for (const auto& [p, q] : e.glue) {
        if (p >= spaces[e.u].size() || q >= spaces[e.v].size())
          throw Error(ErrorCode::InvalidStructure, "gluing references a missing point");
        if (!left.insert(p).second || !right.insert(q).second)
          throw Error(ErrorCode::InvalidStructure, "gluing map is not a bijection");
      }
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> q{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!q.empty()) {
      const auto t = q.front();
      q.pop_front();
      for (auto s : adj[t])
        if (!seen[s]) {
          seen[s] = true;
          ++reached;
          q.push_back(s);
        }
    }
    if (reached != n) throw Error(ErrorCode::InvalidStructure, "tree is disconnected");
  }

  std::size_t total_points() const {
    std::size_t k = 0;
    for (const auto& s : spaces) k += s.size();
    return k;
  }
};

struct TreeSystemLimit {
  FiniteMetricSpace space;
  /// class_of[t][i]: quotient point of point i in K_t.
  std::vector<std::vector<std::size_t>> class_of;
};

/// Quotient of the disjoint union by the gluings with the infimal chain
/// metric: a chain alternates steps inside one K_t with free jumps between
/// identified points.
inline TreeSystemLimit tree_system_limit(const TreeSystem& S) {
  S.validate();
  const std::size_t nt = S.spaces.size();
  std::vector<std::size_t> offset(nt + 1, 0);
  for (std::size_t t = 0; t < nt; ++t) offset[t + 1] = offset[t] + S.spaces[t].size();
  const std::size_t total = offset[nt];

  std::vector<std::vector<std::size_t>> same(total);
  for (const auto& e : S.edges)
    for (const auto& [p, q] : e.glue) {
      same[offset[e.u] + p].push_back(offset[e.v] + q);
      same[offset[e.v] + q].push_back(offset[e.u] + p);
    }
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> cls(total, none);
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t s = 0; s < total; ++s) {
    if (cls[s] != none) continue;
    const std::size_t c = members.size();
    members.emplace_back();
    std::vector<std::size_t> stack{s};
    cls[s] = c;
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      members[c].push_back(x);
      for (auto y : same[x])
        if (cls[y] == none) {
          cls[y] = c;
          stack.push_back(y);
        }
    }
    std::sort(members[c].begin(), members[c].end());
  }

  const std::size_t m = members.size();
  std::vector<std::map<std::size_t, Rational>> adj(m);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& K = S.spaces[t];
    for (std::size_t i = 0; i < K.size(); ++i)
      for (std::size_t j = i + 1; j < K.size(); ++j) {
        const std::size_t a = cls[offset[t] + i], b = cls[offset[t] + j];
        if (a == b) continue;
        auto it = adj[a].find(b);
        if (it == adj[a].end() || K.d(i, j) < it->second) {
          adj[a][b] = K.d(i, j);
          adj[b][a] = K.d(i, j);
        }
      }
  }

  // Dijkstra from every class; exact comparisons keep the order well defined.
  std::vector<std::vector<Rational>> d(m, std::vector<Rational>(m, 0));
  for (std::size_t src = 0; src < m; ++src) {
    std::vector<std::optional<Rational>> best(m);
    std::vector<bool> done(m, false);
    using Item = std::pair<Rational, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    best[src] = Rational(0);
    pq.push({Rational(0), src});
    while (!pq.empty()) {
      auto [dist, x] = pq.top();
      pq.pop();
      if (done[x]) continue;
      done[x] = true;
      for (const auto& [y, w] : adj[x]) {
        const Rational nd = dist + w;
        if (!best[y] || nd < *best[y]) {
          best[y] = nd;
          pq.push({nd, y});
        }
      }
    }
    for (std::size_t y = 0; y < m; ++y) {
      if (!best[y]) throw Error(ErrorCode::MetricDegenerate, "quotient is disconnected");
      d[src][y] = *best[y];
      if (y != src && d[src][y] == 0)
        throw Error(ErrorCode::MetricDegenerate, "distinct quotient points at distance zero");
    }
  }

  std::vector<std::string> labels(m);
  for (std::size_t c = 0; c < m; ++c) {
    std::string l;
    for (auto x : members[c]) {
      const std::size_t t = static_cast<std::size_t>(std::upper_bound(offset.begin(), offset.end(), x) - offset.begin()) - 1;
      if (!l.empty()) l += '=';
      l += S.names[t] + ":" + S.spaces[t].label(x - offset[t]);
    }
    labels[c] = l;
  }
  TreeSystemLimit out{FiniteMetricSpace(std::move(labels), std::move(d)), {}};
  out.class_of.resize(nt);
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t i = 0; i < S.spaces[t].size(); ++i) out.class_of[t].push_back(cls[offset[t] + i]);
  return out;
}

/// Line format:
///   space <name> <label>...   followed by one row of distances per point
///   edge <name1> <name2> <label1>:<label2> ...
/// Distances are integers, fractions p/q or decimals.
inline TreeSystem read_tree_system(std::istream& in) {
  TreeSystem S;
  std::vector<std::vector<std::string>> pending_labels;
  std::vector<std::vector<std::vector<Rational>>> rows;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + msg);
  };
  auto space_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < S.names.size(); ++i)
      if (S.names[i] == name) return i;
    fail("unknown space '" + name + "'");
    return std::size_t{0};
  };
  auto label_index = [&](std::size_t t, const std::string& l) {
    const auto& ls = pending_labels[t];
    for (std::size_t i = 0; i < ls.size(); ++i)
      if (ls[i] == l) return i;
    fail("unknown point '" + l + "' in space '" + S.names[t] + "'");
    return std::size_t{0};
  };
  auto open_rows = [&]() { return !rows.empty() && rows.back().size() < pending_labels.back().size(); };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "space") {
      if (open_rows()) fail("previous space has missing distance rows");
      if (tok.size() < 3) fail("space needs a name and at least one point");
      if (std::find(S.names.begin(), S.names.end(), tok[1]) != S.names.end()) fail("duplicate space '" + tok[1] + "'");
      S.names.push_back(tok[1]);
      pending_labels.emplace_back(tok.begin() + 2, tok.end());
      rows.emplace_back();
    } else if (tok[0] == "edge") {
      if (open_rows()) fail("previous space has missing distance rows");
      if (tok.size() < 4) fail("edge needs two spaces and at least one gluing pair");
      TreeEdge e;
      e.u = space_index(tok[1]);
      e.v = space_index(tok[2]);
      for (std::size_t i = 3; i < tok.size(); ++i) {
        const auto colon = tok[i].find(':');
        if (colon == std::string::npos) fail("gluing pair must be <label>:<label>");
        e.glue.emplace_back(label_index(e.u, tok[i].substr(0, colon)), label_index(e.v, tok[i].substr(colon + 1)));
      }
      S.edges.push_back(e);
    } else {
      if (!open_rows()) fail("unexpected distance row");
      if (tok.size() != pending_labels.back().size()) fail("distance row has the wrong length");
      std::vector<Rational> row;
      try {
        for (const auto& t : tok) row.push_back(parse_rational(t));
      } catch (const Error& err) {
        fail(err.what());
      }
      rows.back().push_back(std::move(row));
    }
  }
  if (open_rows()) fail("last space has missing distance rows");
  for (std::size_t t = 0; t < S.names.size(); ++t) {
    try {
      S.spaces.emplace_back(pending_labels[t], rows[t]);
    } catch (const Error& err) {
      throw Error(ErrorCode::InvalidStructure, "space '" + S.names[t] + "': " + err.what());
    }
  }
  return S;
}

inline void write_metric_space(std::ostream& os, const FiniteMetricSpace& X, const std::string& name = "limit") {
  os << "space " << name;
  for (const auto& l : X.labels()) os << ' ' << l;
  os << '\n';
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (std::size_t j = 0; j < X.size(); ++j) os << (j ? " " : "") << format_rational(X.d(i, j));
    os << '\n';
  }
}

inline void write_tree_system(std::ostream& os, const TreeSystem& S) {
  for (std::size_t t = 0; t < S.spaces.size(); ++t) write_metric_space(os, S.spaces[t], S.names[t]);
  for (const auto& e : S.edges) {
    os << "edge " << S.names[e.u] << ' ' << S.names[e.v];
    for (const auto& [p, q] : e.glue) os << ' ' << S.spaces[e.u].label(p) << ':' << S.spaces[e.v].label(q);
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Cut analysis on finite graphs

class SimpleGraph {
 public:
  SimpleGraph() = default;
  explicit SimpleGraph(std::size_t n) { resize(n); }

  std::size_t add_vertex(std::string label = {}) {
    if (label.empty()) label = std::to_string(adj_.size());
    if (index_.count(label)) throw Error(ErrorCode::InvalidStructure, "duplicate vertex '" + label + "'");
    index_[label] = adj_.size();
    labels_.push_back(std::move(label));
    adj_.emplace_back();
    return adj_.size() - 1;
  }

  /// Vertex by label, added if new.
  std::size_t vertex(const std::string& label) {
    auto it = index_.find(label);
    return it != index_.end() ? it->second : add_vertex(label);
  }

  void add_edge(std::size_t u, std::size_t v) {
    check(u);
    check(v);
    if (u == v) throw Error(ErrorCode::InvalidStructure, "loop at " + labels_[u]);
    if (adj_[u].count(v)) throw Error(ErrorCode::InvalidStructure, "duplicate edge " + labels_[u] + "-" + labels_[v]);
    adj_[u].insert(v);
    adj_[v].insert(u);
  }

  std::size_t size() const { return adj_.size(); }
  std::size_t edge_count() const {
    std::size_t k = 0;
    for (const auto& a : adj_) k += a.size();
    return k / 2;
  }
  const std::set<std::size_t>& neighbors(std::size_t v) const {
    check(v);
    return adj_[v];
  }
  bool adjacent(std::size_t u, std::size_t v) const { return neighbors(u).count(v) > 0; }
  const std::string& label(std::size_t v) const {
    check(v);
    return labels_[v];
  }
  std::size_t index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw Error(ErrorCode::UnknownVertex, "no vertex '" + label + "'");
    return it->second;
  }

  /// Component id per vertex, skipping vertices with removed[v]; removed
  /// vertices get -1. Returns the component count.
  std::size_t components(const std::vector<bool>& removed, std::vector<long>& comp) const {
    comp.assign(size(), -1);
    std::size_t count = 0;
    for (std::size_t s = 0; s < size(); ++s) {
      if (removed[s] || comp[s] >= 0) continue;
      std::vector<std::size_t> stack{s};
      comp[s] = static_cast<long>(count);
      while (!stack.empty()) {
        const auto x = stack.back();
        stack.pop_back();
        for (auto y : adj_[x])
          if (!removed[y] && comp[y] < 0) {
            comp[y] = static_cast<long>(count);
            stack.push_back(y);
          }
      }
      ++count;
    }
    return count;
  }

  bool connected() const {
    std::vector<long> comp;
    return size() == 0 || components(std::vector<bool>(size(), false), comp) == 1;
  }

 private:
  void resize(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) add_vertex();
  }
  void check(std::size_t v) const {
    if (v >= adj_.size()) throw Error(ErrorCode::UnknownVertex, "vertex " + std::to_string(v) + " out of range");
  }

  std::vector<std::set<std::size_t>> adj_;
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t> index_;
};

/// Edge list, one `u v` per line; a lone label declares an isolated vertex.
inline SimpleGraph read_simple_graph(std::istream& in) {
  SimpleGraph g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() > 2) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 'u v'");
    const auto u = g.vertex(tok[0]);
    if (tok.size() == 2) {
      try {
        g.add_edge(u, g.vertex(tok[1]));
      } catch (const Error& e) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  return g;
}

/// Components of G - v that contain a neighbour of v.
inline std::size_t local_cut_valency(const SimpleGraph& g, std::size_t v) {
  const auto& nb = g.neighbors(v);
  std::vector<bool> removed(g.size(), false);
  removed[v] = true;
  std::vector<long> comp;
  g.components(removed, comp);
  std::set<long> hit;
  for (auto u : nb) hit.insert(comp[u]);
  return hit.size();
}

/// Components of the punctured ball B_r(v) - v. In a graph that locally looks
/// like a space near v, this counts the ends of the complement of v.
inline std::size_t local_valency(const SimpleGraph& g, std::size_t v, std::size_t radius = 1) {
  g.neighbors(v);
  std::vector<long> dist(g.size(), -1);
  std::deque<std::size_t> q{v};
  dist[v] = 0;
  while (!q.empty()) {
    const auto x = q.front();
    q.pop_front();
    if (static_cast<std::size_t>(dist[x]) == radius) continue;
    for (auto y : g.neighbors(x))
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        q.push_back(y);
      }
  }
  std::vector<bool> removed(g.size());
  for (std::size_t x = 0; x < g.size(); ++x) removed[x] = dist[x] < 0 || x == v;
  std::vector<long> comp;
  return g.components(removed, comp);
}

struct CutPair {
  std::size_t x = 0, y = 0;
  std::size_t components = 0;
  /// Both vertices have local valency equal to the component count.
  bool flagged = false;

  friend bool operator==(const CutPair&, const CutPair&) = default;
};

/// All pairs {x, y} whose removal disconnects G, sorted by (x, y).
inline std::vector<CutPair> cut_pairs(const SimpleGraph& g) {
  if (g.size() < 4) throw Error(ErrorCode::InvalidArgument, "cut pairs need at least 4 vertices");
  if (!g.connected()) throw Error(ErrorCode::InvalidArgument, "graph must be connected");
  std::vector<std::size_t> val(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) val[v] = local_valency(g, v, 1);
  std::vector<CutPair> out;
  std::vector<bool> removed(g.size(), false);
  std::vector<long> comp;
  for (std::size_t x = 0; x < g.size(); ++x)
    for (std::size_t y = x + 1; y < g.size(); ++y) {
      removed[x] = removed[y] = true;
      const std::size_t k = g.components(removed, comp);
      removed[x] = removed[y] = false;
      if (k > 1) out.push_back({x, y, k, val[x] == k && val[y] == k});
    }
  return out;
}

/// Replaces every edge by a path of length two through a new vertex labelled
/// `u~v`; returns the graph and the new vertex ids.
inline std::pair<SimpleGraph, std::vector<std::size_t>> subdivide(const SimpleGraph& g) {
  SimpleGraph h;
  for (std::size_t v = 0; v < g.size(); ++v) h.add_vertex(g.label(v));
  std::vector<std::size_t> mids;
  for (std::size_t u = 0; u < g.size(); ++u)
    for (auto v : g.neighbors(u)) {
      if (v < u) continue;
      const auto m = h.add_vertex(g.label(u) + "~" + g.label(v));
      h.add_edge(u, m);
      h.add_edge(m, v);
      mids.push_back(m);
    }
  return {std::move(h), std::move(mids)};
}

}  // namespace kleinian
