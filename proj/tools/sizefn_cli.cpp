// sizefn: command-line driver for size functions of discretized shapes.
//
// Exit codes: 0 success, 1 I/O or parse error, 2 invariant or usage error,
// 3 unexplained cornerpoint coordinates (verify).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sizefn/critical.hpp"
#include "sizefn/errors.hpp"
#include "sizefn/foliation.hpp"
#include "sizefn/matching.hpp"
#include "sizefn/plot.hpp"
#include "sizefn/shapes.hpp"
#include "sizefn/size_pair.hpp"
#include "sizefn/sublevel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sizefn;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitUnexplained = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Range {
  double lo = 0.0, hi = 0.0;
};

struct RunConfig {
  std::string input, input2, values, values2, series;
  std::string pairs;
  std::optional<std::size_t> sample;
  std::uint64_t seed = 0;
  std::optional<std::string> strategy;  // default: grid for k = 2, random otherwise
  std::optional<double> offset_range;
  std::size_t k = 2;
  std::size_t grid = 200;
  std::optional<std::string> s_range, t_range;
  double tau_match = 0.05;
  double tau_0 = 1e-6;
  double tau_i = 1e-6;
  double tau_s = 0.5;
  std::string rho;
  std::string out = ".";
  std::string format = "json";
  // mesh generator
  std::string shape = "sphere";
  unsigned subdiv = 4;
  std::string function = "absxz";
};

Range parse_range(const std::string& text, const std::string& flag) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError(flag + ": expected a:b");
  try {
    std::size_t used = 0;
    Range r;
    r.lo = std::stod(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("trailing");
    const auto rest = text.substr(colon + 1);
    r.hi = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("trailing");
    if (!(r.lo < r.hi)) throw UsageError(flag + ": need a < b");
    return r;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError(flag + ": expected a:b with numeric a, b");
  }
}

bool has_extension(const std::string& path, const std::string& ext) {
  return fs::path(path).extension() == ext;
}

// OFF meshes take their values from --values or from the .csv next to them.
SizeGraph load_input(const std::string& path, const std::string& values) {
  if (path.empty()) throw UsageError("missing --input");
  if (has_extension(path, ".off")) {
    const std::string vals = values.empty() ? fs::path(path).replace_extension(".csv").string() : values;
    return load_mesh_pair(path, vals);
  }
  return load_size_graph(path);
}

void check_tolerances(const RunConfig& c) {
  if (!(c.tau_match >= 0.0)) throw UsageError("--tau-match must be >= 0");
  if (!(c.tau_0 > 0.0)) throw UsageError("--tau-0 must be positive");
  if (!(c.tau_i > 0.0)) throw UsageError("--tau-i must be positive");
  if (!(c.tau_s > 0.0)) throw UsageError("--tau-s must be positive");
  if (c.grid < 2) throw UsageError("--grid must be >= 2");
}

CriticalTolerances tolerances(const RunConfig& c) {
  CriticalTolerances t;
  t.tau_I = c.tau_i;
  t.tau_0 = c.tau_0;
  t.tau_s = c.tau_s;
  return t;
}

SampleStrategy strategy_for(const RunConfig& c, std::size_t k) {
  if (c.strategy) return parse_strategy(*c.strategy);
  return k == 2 ? SampleStrategy::grid : SampleStrategy::random;
}

// Pairs from --pairs or --sample; otherwise `default_n` sampled pairs (the
// identity pair when k = 1).
std::vector<AdmissiblePair> resolve_pairs(const RunConfig& c, const SizeGraph& g, std::size_t default_n) {
  std::vector<AdmissiblePair> pairs;
  if (!c.pairs.empty()) {
    pairs = load_pairs(c.pairs);
  } else {
    const std::size_t n = c.sample.value_or(default_n);
    if (n < 1) throw UsageError("--sample must be >= 1");
    const double range = c.offset_range.value_or(g.k() >= 2 ? std::max(max_abs_value(g), 1e-9) : 1.0);
    pairs = sample_admissible(g.k(), n, strategy_for(c, g.k()), c.seed, range);
  }
  for (const auto& p : pairs) require_dimension(g, p);
  return pairs;
}

AdmissiblePair single_pair(const std::vector<AdmissiblePair>& pairs) {
  if (pairs.size() != 1)
    throw UsageError("this command needs exactly one admissible pair, got " + std::to_string(pairs.size()));
  return pairs.front();
}

fs::path prepare_out(const RunConfig& c) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + c.out + ": " + ec.message());
  return dir;
}

void write_json(const fs::path& path, const json& j) { detail::write_text(path.string(), j.dump(2) + "\n"); }

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return json(v).dump();
}

std::string series_csv(const FormalSeries& s) {
  std::string out = "x,y,mult\n";
  for (const auto& p : s.points())
    out += num(p.x) + "," + num(p.y) + "," + std::to_string(p.multiplicity) + "\n";
  return out;
}

void print_series_summary(const FormalSeries& s) {
  double lo = kInfinity, hi = -kInfinity;
  for (const auto& p : s.points()) {
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.is_cornerline() ? p.x : p.y);
  }
  std::cout << "entries " << s.size() << ", cornerlines " << s.cornerline_multiplicity() << ", proper "
            << s.proper_multiplicity();
  if (!s.empty()) std::cout << ", min " << num(lo) << ", max finite " << num(hi);
  std::cout << "\n";
}

FormalSeries series_for(const SizeGraph& g, const AdmissiblePair& p) {
  return cornerpoints(g, reduce_measuring(g, p));
}

// ---------------------------------------------------------------------------

int cmd_corners(const RunConfig& c) {
  const auto g = load_input(c.input, c.values);
  const auto p = single_pair(resolve_pairs(c, g, 1));
  const auto s = series_for(g, p);
  const auto dir = prepare_out(c);
  if (c.format == "csv") {
    detail::write_text((dir / "series.csv").string(), series_csv(s));
  } else {
    auto j = to_json(s);
    j["pair"] = to_json(p);
    write_json(dir / "series.json", j);
  }
  print_series_summary(s);
  return 0;
}

int cmd_match(const RunConfig& c) {
  const auto g1 = load_input(c.input, c.values);
  if (c.input2.empty()) throw UsageError("match needs --input2");
  const auto g2 = load_input(c.input2, c.values2);
  if (g1.k() != g2.k())
    throw InvariantError("dimension mismatch: k=" + std::to_string(g1.k()) + " vs k=" + std::to_string(g2.k()));
  const auto pairs = resolve_pairs(c, g1, 1);
  ExtendedReal worst = 0.0;
  json per_pair = json::array();
  std::string csv = "pair,d_match\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto r = matching_distance_with_witness(series_for(g1, pairs[i]), series_for(g2, pairs[i]));
    worst = max(worst, r.distance);
    auto j = to_json(r);
    j["pair"] = to_json(pairs[i]);
    per_pair.push_back(std::move(j));
    csv += std::to_string(i) + "," + num(r.distance.value()) + "\n";
  }
  const auto dir = prepare_out(c);
  if (c.format == "csv")
    detail::write_text((dir / "match.csv").string(), csv);
  else
    write_json(dir / "match.json", json{{"pairs", per_pair}, {"max", extended_to_json(worst)}});
  std::cout << "pairs " << pairs.size() << ", max d_match " << num(worst.value()) << "\n";
  return 0;
}

int cmd_reduce(const RunConfig& c) {
  const auto g = load_input(c.input, c.values);
  const auto p = single_pair(resolve_pairs(c, g, 1));
  const auto f = reduce_measuring(g, p);
  const auto dir = prepare_out(c);
  if (c.format == "csv") {
    std::string csv = "vertex,F\n";
    for (std::size_t v = 0; v < f.size(); ++v) csv += std::to_string(v) + "," + num(f[v]) + "\n";
    detail::write_text((dir / "reduced.csv").string(), csv);
  } else {
    write_json(dir / "reduced.json", json{{"pair", to_json(p)}, {"values", f.values()}});
  }
  std::cout << "vertices " << f.size() << ", min " << num(f.min()) << ", max " << num(f.max()) << "\n";
  return 0;
}

int cmd_sample_pairs(const RunConfig& c) {
  std::vector<AdmissiblePair> pairs;
  if (!c.input.empty()) {
    const auto g = load_input(c.input, c.values);
    pairs = resolve_pairs(c, g, 20);
  } else {
    if (c.k < 1) throw UsageError("--k must be >= 1");
    pairs = sample_admissible(c.k, c.sample.value_or(20), strategy_for(c, c.k), c.seed,
                              c.offset_range.value_or(1.0));
  }
  const auto dir = prepare_out(c);
  if (c.format == "csv") {
    std::string csv;
    const auto k = pairs.front().dimension();
    for (std::size_t i = 0; i < k; ++i) csv += "l" + std::to_string(i) + ",";
    for (std::size_t i = 0; i < k; ++i) csv += "b" + std::to_string(i) + (i + 1 < k ? "," : "\n");
    for (const auto& p : pairs) {
      for (std::size_t i = 0; i < k; ++i) csv += num(p.l()[i]) + ",";
      for (std::size_t i = 0; i < k; ++i) csv += num(p.b()[i]) + (i + 1 < k ? "," : "\n");
    }
    detail::write_text((dir / "pairs.csv").string(), csv);
  } else {
    write_json(dir / "pairs.json", to_json(pairs));
  }
  std::cout << "pairs " << pairs.size() << "\n";
  return 0;
}

std::vector<std::size_t> parse_rho(const std::string& text, std::size_t k) {
  std::vector<std::size_t> idx;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(tok, &used);
      if (used != tok.size() || v < 0) throw std::invalid_argument("bad");
      idx.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw UsageError("--rho: expected comma-separated component indices");
    }
  }
  return ProjectionIndex(idx, k).indices();
}

int cmd_pseudocrit(const RunConfig& c) {
  check_tolerances(c);
  const auto g = load_input(c.input, c.values);
  const auto tol = tolerances(c);
  const MeshCalculus calc(g);
  std::vector<json> reports;
  std::size_t flagged = 0;
  std::string csv = "pair,vertex,residual,value\n";
  if (!c.rho.empty()) {
    const auto rep = pseudocritical_projection(calc, ProjectionIndex(parse_rho(c.rho, g.k()), g.k()), tol);
    auto j = to_json(rep);
    j["rho"] = parse_rho(c.rho, g.k());
    reports.push_back(std::move(j));
    flagged += rep.pseudocritical.size();
    for (const auto& w : rep.pseudocritical)
      csv += "0," + std::to_string(w.vertex) + "," + num(w.residual) + "," + num(w.value.front()) + "\n";
  } else {
    const auto pairs = resolve_pairs(c, g, 1);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto rep = lb_pseudocritical(calc, pairs[i], tol);
      auto j = to_json(rep);
      j["pair"] = to_json(pairs[i]);
      reports.push_back(std::move(j));
      flagged += rep.pseudocritical.size();
      for (const auto& w : rep.pseudocritical)
        csv += std::to_string(i) + "," + std::to_string(w.vertex) + "," + num(w.residual) + "," +
               num(w.value.front()) + "\n";
    }
  }
  const auto dir = prepare_out(c);
  if (c.format == "csv")
    detail::write_text((dir / "pseudocritical.csv").string(), csv);
  else
    write_json(dir / "pseudocritical.json", reports.size() == 1 ? reports.front() : json(reports));
  std::cout << "reports " << reports.size() << ", flagged vertices " << flagged << "\n";
  return 0;
}

int cmd_verify(const RunConfig& c) {
  check_tolerances(c);
  const auto g = load_input(c.input, c.values);
  const auto pairs = resolve_pairs(c, g, 20);
  const LocalizationContext ctx(g, tolerances(c));
  json reports = json::array();
  json unexplained = json::array();
  std::size_t total = 0;
  std::string csv = "pair,entry,role,value,distance\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto rep = check_discontinuity_localization(ctx, pairs[i], c.tau_match);
    for (const auto& cc : rep.coordinates) {
      ++total;
      if (cc.explained) continue;
      unexplained.push_back(json{{"pair", i},
                                 {"entry", cc.entry},
                                 {"role", cc.is_birth ? "birth" : "death"},
                                 {"value", cc.value}});
      csv += std::to_string(i) + "," + std::to_string(cc.entry) + "," + (cc.is_birth ? "birth" : "death") +
             "," + num(cc.value) + "," + num(cc.distance) + "\n";
    }
    reports.push_back(to_json(rep));
  }
  const auto dir = prepare_out(c);
  if (c.format == "csv") {
    detail::write_text((dir / "unexplained.csv").string(), csv);
  } else {
    write_json(dir / "verify.json", json{{"tau_match", c.tau_match},
                                         {"pairs", pairs.size()},
                                         {"coordinates", total},
                                         {"unexplained", unexplained},
                                         {"reports", reports}});
  }
  std::cout << "pairs " << pairs.size() << ", coordinates " << total << ", unexplained " << unexplained.size()
            << "\n";
  return unexplained.empty() ? 0 : kExitUnexplained;
}

int cmd_dd(const RunConfig& c) {
  check_tolerances(c);
  const auto g1 = load_input(c.input, c.values);
  if (c.input2.empty()) throw UsageError("dd needs --input2");
  const auto g2 = load_input(c.input2, c.values2);
  if (g1.k() != g2.k())
    throw InvariantError("dimension mismatch: k=" + std::to_string(g1.k()) + " vs k=" + std::to_string(g2.k()));
  const auto pairs = resolve_pairs(c, g1, 1);
  std::optional<GridSpec> fixed;
  if (c.s_range || c.t_range) {
    if (!c.s_range || !c.t_range) throw UsageError("--s-range and --t-range go together");
    const auto s = parse_range(*c.s_range, "--s-range");
    const auto t = parse_range(*c.t_range, "--t-range");
    fixed = GridSpec{s.lo, s.hi, t.lo, t.hi, c.grid};
  }
  json per_pair = json::array();
  double worst = 0.0;
  std::string csv = "pair,d_D\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double d = hausdorff_dd(g1, g2, std::span(&pairs[i], 1), c.grid, fixed);
    worst = std::max(worst, d);
    per_pair.push_back(json{{"pair", to_json(pairs[i])}, {"d_D", extended_to_json(d)}});
    csv += std::to_string(i) + "," + num(d) + "\n";
  }
  const auto dir = prepare_out(c);
  if (c.format == "csv")
    detail::write_text((dir / "dd.csv").string(), csv);
  else
    write_json(dir / "dd.json", json{{"grid", c.grid}, {"pairs", per_pair}, {"d_D", extended_to_json(worst)}});
  std::cout << "pairs " << pairs.size() << ", d_D " << num(worst) << "\n";
  return 0;
}

int cmd_plot(const RunConfig& c) {
  FormalSeries s;
  if (!c.series.empty()) {
    const auto text = detail::read_text(c.series);
    try {
      s = series_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
      throw ParseError(c.series + ": " + e.what());
    }
  } else {
    const auto g = load_input(c.input, c.values);
    s = series_for(g, single_pair(resolve_pairs(c, g, 1)));
  }
  PlotWindow w = default_window(s);
  if (c.s_range) {
    const auto r = parse_range(*c.s_range, "--s-range");
    w.lo = r.lo;
    w.hi = r.hi;
  }
  w.n = std::min<std::size_t>(c.grid, 400);
  const auto dir = prepare_out(c);
  detail::write_text((dir / "regions.svg").string(), region_plot_svg(s, w));
  detail::write_text((dir / "diagram.svg").string(), diagram_svg(s, w));
  std::cout << "wrote " << (dir / "regions.svg").string() << " and " << (dir / "diagram.svg").string() << "\n";
  return 0;
}

int cmd_mesh(const RunConfig& c) {
  TriangleMesh mesh;
  if (c.shape == "sphere")
    mesh = icosphere(c.subdiv);
  else if (c.shape == "cube")
    mesh = cube_surface(c.subdiv);
  else
    throw UsageError("--shape must be sphere or cube");
  SizeGraph g = c.function == "absxz" ? abs_xz_graph(mesh)
                : c.function == "xz"  ? xz_graph(mesh)
                                      : throw UsageError("--function must be absxz or xz");
  const auto dir = prepare_out(c);
  write_off(mesh, (dir / (c.shape + ".off")).string());
  write_values_csv(g, (dir / (c.shape + ".csv")).string());
  std::cout << "vertices " << g.vertex_count() << ", triangles " << g.triangles().size() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

void add_input(CLI::App* cmd, RunConfig& c, bool second) {
  cmd->add_option("--input", c.input, "size-graph JSON or OFF mesh");
  cmd->add_option("--values", c.values, "CSV values for an OFF --input (default: same stem .csv)");
  if (second) {
    cmd->add_option("--input2", c.input2, "second size-graph JSON or OFF mesh");
    cmd->add_option("--values2", c.values2, "CSV values for an OFF --input2");
  }
}

void add_pairs(CLI::App* cmd, RunConfig& c) {
  auto* pairs = cmd->add_option("--pairs", c.pairs, "admissible pair(s) JSON file");
  auto* sample = cmd->add_option("--sample", c.sample, "number of sampled admissible pairs");
  pairs->excludes(sample);
  cmd->add_option("--seed", c.seed, "sampling seed");
  cmd->add_option("--strategy", c.strategy, "grid|random (default: grid when k = 2)")->check(CLI::IsMember({"grid", "random"}));
  cmd->add_option("--offset-range", c.offset_range, "sampled offsets lie in [-A, A] (default: max |phi|)");
}

void add_tolerances(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--tau-match", c.tau_match, "localization tolerance");
  cmd->add_option("--tau-0", c.tau_0, "relative residual tolerance of the convex-hull test");
  cmd->add_option("--tau-i", c.tau_i, "relative active-set tolerance");
  cmd->add_option("--tau-s", c.tau_s, "gradient disagreement threshold for special vertices");
}

void add_output(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--format", c.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
}

void add_grid(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--grid", c.grid, "lattice nodes per axis");
  cmd->add_option("--s-range", c.s_range, "a:b");
  cmd->add_option("--t-range", c.t_range, "a:b");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Size functions of discretized shapes"};
  app.require_subcommand(1);
  RunConfig c;

  auto* corners = app.add_subcommand("corners", "cornerpoints of the (reduced) size function");
  add_input(corners, c, false);
  add_pairs(corners, c);
  add_output(corners, c);

  auto* match = app.add_subcommand("match", "matching distance per admissible pair");
  add_input(match, c, true);
  add_pairs(match, c);
  add_output(match, c);

  auto* reduce = app.add_subcommand("reduce", "reduced measuring function F_(l,b)");
  add_input(reduce, c, false);
  add_pairs(reduce, c);
  add_output(reduce, c);

  auto* sample = app.add_subcommand("sample-pairs", "sample admissible pairs");
  add_input(sample, c, false);
  add_pairs(sample, c);
  sample->add_option("--k", c.k, "arity when no --input is given");
  add_output(sample, c);

  auto* pseudo = app.add_subcommand("pseudocrit", "pseudocritical and special vertices");
  add_input(pseudo, c, false);
  add_pairs(pseudo, c);
  add_tolerances(pseudo, c);
  pseudo->add_option("--rho", c.rho, "projection indices, e.g. 0,1 (Fritz John test instead of (l,b))");
  add_output(pseudo, c);

  auto* verify = app.add_subcommand("verify", "check that cornerpoint coordinates are explained");
  add_input(verify, c, false);
  add_pairs(verify, c);
  add_tolerances(verify, c);
  add_output(verify, c);

  auto* dd = app.add_subcommand("dd", "Hausdorff distance between discontinuity sets");
  add_input(dd, c, true);
  add_pairs(dd, c);
  add_grid(dd, c);
  add_tolerances(dd, c);
  add_output(dd, c);

  auto* plot = app.add_subcommand("plot", "SVG region plot and diagram");
  add_input(plot, c, false);
  plot->add_option("--series", c.series, "series JSON written by corners");
  add_pairs(plot, c);
  add_grid(plot, c);
  add_output(plot, c);

  auto* mesh = app.add_subcommand("mesh", "write a test mesh (OFF) with values (CSV)");
  mesh->add_option("--shape", c.shape, "sphere|cube");
  mesh->add_option("--subdiv", c.subdiv, "icosphere subdivisions or cube cells per edge");
  mesh->add_option("--function", c.function, "absxz|xz");
  add_output(mesh, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvariant;
  }

  try {
    if (*corners) return cmd_corners(c);
    if (*match) return cmd_match(c);
    if (*reduce) return cmd_reduce(c);
    if (*sample) return cmd_sample_pairs(c);
    if (*pseudo) return cmd_pseudocrit(c);
    if (*verify) return cmd_verify(c);
    if (*dd) return cmd_dd(c);
    if (*plot) return cmd_plot(c);
    if (*mesh) return cmd_mesh(c);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitInvariant;
}
