// kleinian: limit sets, gasket verification and splitting checks.
// Exit status: 0 success or pass, 1 verdict failure, 2 usage or input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kleinian/config.hpp"
#include "kleinian/decomposition.hpp"
#include "kleinian/gasket.hpp"
#include "kleinian/groups.hpp"
#include "kleinian/limitset.hpp"
#include "kleinian/pipeline.hpp"

using namespace kleinian;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string header(const RunConfig& c, const std::string& prefix = "# ") {
  std::string h = prefix + "kleinian " + c.command + "\n";
  for (const auto& line : echo_config(c)) h += prefix + line + "\n";
  return h;
}

// Write to a sibling temp file and rename over the target.
void write_atomic(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  const std::string tmp = path + ".tmp";
  if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
  }
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + tmp);
    os << content;
    if (!os.flush()) throw Error(ErrorCode::IoError, "write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp + " to " + path + ": " + ec.message());
}

std::ifstream open_input(const std::string& path, const char* what) {
  if (path.empty()) throw Usage(std::string("--input is required (") + what + ")");
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  return in;
}

std::string fmt_complex(Complex z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.12f%+.12fi", z.real() == 0 ? 0.0 : z.real(), z.imag() == 0 ? 0.0 : z.imag());
  return buf;
}

std::string fmt_matrix(const MoebiusMap& m) {
  return "[[" + fmt_complex(m.a()) + ", " + fmt_complex(m.b()) + "], [" + fmt_complex(m.c()) + ", " +
         fmt_complex(m.d()) + "]]";
}

MarkedGroup load_marking(const RunConfig& c) {
  if (c.marking.empty()) return hw_marking();
  std::ifstream in(c.marking);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + c.marking);
  return parse_marking(in).group;
}

std::vector<Circline> load_seeds(const RunConfig& c) {
  if (c.seeds.empty()) return strip_gasket_seeds();
  std::ifstream in(c.seeds);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + c.seeds);
  return seeds_from_packing(read_packing(in));
}

DfsConfig dfs_config(const RunConfig& c) {
  DfsConfig d;
  d.epsilon = c.epsilon;
  d.max_depth = static_cast<std::size_t>(c.depth);
  d.seeds = load_seeds(c);
  d.threads = static_cast<unsigned>(c.threads);
  return d;
}

int cmd_solve(const RunConfig& c) {
  const auto s = solve_parabolic_commutator();
  std::ostringstream os;
  os << header(c);
  os << "a = " << fmt_matrix(s.group.image('a')) << "\n";
  os << "b = " << fmt_matrix(s.group.image('b')) << "\n";
  os << "c = " << fmt_complex(s.parameter) << "\n";
  for (std::size_t i = 0; i < s.roots.size(); ++i) os << "root" << i << " = " << fmt_complex(s.roots[i]) << "\n";
  os << "c^2+4 = " << fmt_complex(s.parameter * s.parameter + 4.0) << "\n";
  os << "tr(ABab) = " << fmt_complex(s.commutator_trace) << "\n";
  os << "tr(ABab)^2 = " << fmt_complex(s.commutator_trace * s.commutator_trace) << "\n";
  os << "fixed(ABab) = "
     << (s.commutator_fixed_point.is_infinity() ? std::string("inf") : fmt_complex(s.commutator_fixed_point.value()))
     << "\n";
  write_atomic(c.out, os.str());
  return kPass;
}

int cmd_points(const RunConfig& c, bool fixed_only) {
  const auto g = load_marking(c);
  if (c.depth < 1) throw Error(ErrorCode::RangeError, "points needs depth >= 1");
  const auto cloud = limit_points_by_fixed_points(g, static_cast<std::size_t>(c.depth), c.tol,
                                                  fixed_only ? CloudMode::FixedPoints : CloudMode::OrbitClosed);
  std::ostringstream os;
  os << header(c) << "# points=" << cloud.size() << "\n# re im word_length word\n";
  write_cloud(os, cloud, g.alphabet());
  write_atomic(c.out, os.str());
  return kPass;
}

std::string dfs_stats_text(const DfsStats& s) {
  std::ostringstream os;
  os << "words_visited=" << s.words_visited << "\n"
     << "branches_pruned=" << s.branches_pruned << "\n"
     << "circles_emitted=" << s.circles_emitted << "\n"
     << "depth_exhausted=" << s.depth_exhausted << "\n"
     << "max_depth_reached=" << s.max_depth_reached << "\n";
  return os.str();
}

int cmd_dfs(const RunConfig& c) {
  const auto g = load_marking(c);
  const auto r = limit_set_dfs(g, dfs_config(c));
  const std::string h = header(c);

  CirclePacking circles;
  for (const auto& e : r.circles) {
    circles.circles.push_back(Circle::from_circline(e.circle));
    const std::string w = e.word.to_string(g.alphabet());
    circles.provenance.push_back((w.empty() ? "1" : w) + (e.resolved ? "/resolved" : "/exhausted"));
  }
  std::ostringstream cs;
  cs << h << "# circles=" << circles.size() << "\n";
  write_packing(cs, circles);

  std::ostringstream ps;
  ps << h << "# points=" << r.cloud.size() << "\n";
  write_cloud(ps, r.cloud, g.alphabet());

  std::ostringstream st;
  st << h << dfs_stats_text(r.stats);

  std::vector<Circline> drawn;
  for (const auto& e : r.circles) drawn.push_back(e.circle);
  std::string hn;
  for (const auto& line : echo_config(c)) hn += line + "\n";
  const auto img = render(r.cloud, drawn, c.window, static_cast<std::size_t>(c.resolution), hn);

  if (c.out.empty()) {
    std::cout << cs.str();
  } else {
    write_atomic(c.out + ".circles", cs.str());
    write_atomic(c.out + ".points", ps.str());
    write_atomic(c.out + ".stats", st.str());
    write_atomic(c.out + ".ppm", img.ppm);
    write_atomic(c.out + ".svg", img.svg);
  }
  std::cerr << dfs_stats_text(r.stats) << "wall_time_s=" << r.stats.wall_time.count() << "\n";
  return kPass;
}

nlohmann::json report_json(const GasketReport& r, std::size_t circles) {
  nlohmann::json j;
  j["pass"] = r.pass;
  j["verdict"] = r.pass ? "pass" : "fail";
  j["circles"] = circles;
  j["connected"] = r.connected;
  j["components"] = r.components;
  j["edges"] = r.edges;
  j["triangles"] = r.triangles;
  j["open_triangles"] = r.open_triangles;
  j["quadruples"] = r.quadruples;
  j["worst_residual"] = r.worst_residual;
  j["worst_relative_residual"] = r.worst_relative_residual;
  j["worst_quadruple"] = r.worst_quadruple;
  j["crossings"] = r.crossings.size();
  j["offenders"] = r.offenders;
  return j;
}

int cmd_verify_gasket(const RunConfig& c, bool normalize) {
  nlohmann::json j;
  GasketReport r;
  std::size_t n = 0;
  if (!c.input.empty()) {
    auto in = open_input(c.input, "packing file");
    auto p = read_packing(in);
    if (normalize) p = transform(p, normalize_to_standard_gasket(p, c.tol));
    r = is_apollonian_like(p, c.tol);
    n = p.size();
    j["source"] = "file";
  } else {
    const auto g = load_marking(c);
    const auto chk = check_gasket_family(gasket_family(limit_set_dfs(g, dfs_config(c)), c.window), c.tol);
    r = chk.report;
    n = chk.normalized.size();
    j["source"] = "dfs";
    const auto& m = chk.normalizer;
    j["normalizer"] = {fmt_complex(m.a()), fmt_complex(m.b()), fmt_complex(m.c()), fmt_complex(m.d())};
  }
  j["report"] = report_json(r, n);
  j["config"] = echo_config(c);
  write_atomic(c.out, j.dump(2) + "\n");
  return r.pass ? kPass : kFail;
}

int cmd_validate_gog(const RunConfig& c) {
  auto in = open_input(c.input, "graph of groups file");
  const auto g = read_graph_of_groups(in);
  const auto r = validate_bowditch(g);
  std::ostringstream os;
  os << header(c) << (r.pass ? "pass" : "fail") << "\n";
  os << "vertices=" << g.vertices.size() << " edges=" << g.edges.size() << "\n";
  for (const auto& v : r.violations) {
    os << "clause " << clause_name(v.clause) << ":";
    for (std::size_t i = 0; i < v.ids.size(); ++i) os << (i ? "," : " ") << v.ids[i];
    os << ": " << v.message << "\n";
  }
  write_atomic(c.out, os.str());
  return r.pass ? kPass : kFail;
}

int cmd_tree_limit(const RunConfig& c) {
  auto in = open_input(c.input, "tree system file");
  const auto L = tree_system_limit(read_tree_system(in));
  std::ostringstream os;
  os << header(c) << "# points=" << L.space.size() << " diameter=" << format_rational(L.space.diameter()) << "\n";
  write_metric_space(os, L.space);
  write_atomic(c.out, os.str());
  return kPass;
}

int cmd_cuts(const RunConfig& c) {
  auto in = open_input(c.input, "edge list");
  const auto g = read_simple_graph(in);
  std::ostringstream os;
  os << header(c) << "# vertex <label> cut_valency=<n> local_valency=<n at radius>\n";
  for (std::size_t v = 0; v < g.size(); ++v)
    os << "vertex " << g.label(v) << " cut_valency=" << local_cut_valency(g, v)
       << " local_valency=" << local_valency(g, v, static_cast<std::size_t>(c.radius)) << "\n";
  if (g.size() >= 4 && g.connected()) {
    for (const auto& p : cut_pairs(g))
      os << "pair " << g.label(p.x) << " " << g.label(p.y) << " components=" << p.components
         << " flagged=" << (p.flagged ? "true" : "false") << "\n";
  } else {
    os << "# cut pairs need a connected graph on at least 4 vertices\n";
  }
  write_atomic(c.out, os.str());
  return kPass;
}

int cmd_bench(const RunConfig& c) {
  const auto g = load_marking(c);
  const auto cfg = dfs_config(c);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = limit_set_dfs(g, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double rate = secs > 0 ? static_cast<double>(r.stats.words_visited) / secs : 0;
  std::ostringstream os;
  os << header(c) << dfs_stats_text(r.stats) << "wall_time_s=" << secs << "\n"
     << "words_per_second=" << static_cast<std::uint64_t>(rate) << "\n"
     << "target_words_per_second=100000 met=" << (rate >= 1e5 ? "yes" : "no") << "\n";
  write_atomic(c.out, os.str());
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limit sets of Moebius groups, gasket verification and splitting checks"};
  app.require_subcommand(1);

  std::map<std::string, std::string> values;
  std::string config_path;
  bool fixed_only = false, normalize = false;

  const std::vector<std::pair<std::string, std::string>> knobs{
      {"epsilon", "DFS size cutoff (chordal diameter)"},
      {"depth", "word length bound"},
      {"window", "x0,y0,x1,y1"},
      {"resolution", "image width in pixels"},
      {"tol", "tangency / dedup tolerance"},
      {"preset", "named preset (hw-gasket)"},
      {"out", "output path (prefix for dfs)"},
      {"marking", "marking file (default H_W)"},
      {"seeds", "seed circles in packing format"},
      {"input", "input file"},
      {"threads", "DFS worker threads"},
      {"radius", "ball radius for local valency"},
  };
  struct Sub {
    const char* name;
    const char* help;
  };
  const std::vector<Sub> subs{
      {"solve", "solve for the parabolic commutator and print H_W"},
      {"points", "limit point cloud from fixed points"},
      {"dfs", "circle images by depth-first search"},
      {"verify-gasket", "Apollonian verdict as JSON"},
      {"validate-gog", "check a graph of groups against the splitting clauses"},
      {"tree-limit", "limit of a finite tree system"},
      {"cuts", "valency and cut pairs of a graph"},
      {"bench", "DFS throughput"},
  };
  std::vector<CLI::App*> apps;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    for (const auto& [k, help] : knobs) sub->add_option("--" + k, values[k], help);
    sub->add_option("--config", config_path, "key=value configuration file");
    if (std::string(s.name) == "points") sub->add_flag("--fixed-only", fixed_only, "fixed points of words only");
    if (std::string(s.name) == "verify-gasket")
      sub->add_flag("--normalize", normalize, "normalize an input packing first");
    apps.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  CLI::App* chosen = nullptr;
  for (auto* a : apps)
    if (a->parsed()) chosen = a;

  try {
    std::vector<std::pair<std::string, std::string>> file, overrides;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw Error(ErrorCode::IoError, "cannot read " + config_path);
      file = read_config_pairs(in);
    }
    for (const auto& [k, help] : knobs)
      if (chosen->get_option("--" + k)->count() > 0) overrides.emplace_back(k, values[k]);
    const RunConfig c = merge_config(file, overrides, chosen->get_name());

    const std::string cmd = c.command;
    if (cmd == "solve") return cmd_solve(c);
    if (cmd == "points") return cmd_points(c, fixed_only);
    if (cmd == "dfs") return cmd_dfs(c);
    if (cmd == "verify-gasket") return cmd_verify_gasket(c, normalize);
    if (cmd == "validate-gog") return cmd_validate_gog(c);
    if (cmd == "tree-limit") return cmd_tree_limit(c);
    if (cmd == "cuts") return cmd_cuts(c);
    if (cmd == "bench") return cmd_bench(c);
    throw Usage("unknown command " + cmd);
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << "\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kUsage;
}
