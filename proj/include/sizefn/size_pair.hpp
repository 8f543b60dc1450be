#pragma once

// Discretized size pairs: a finite graph (optionally a triangle mesh) whose
// vertices carry k-vectors of measuring values.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "sizefn/detail/union_find.hpp"
#include "sizefn/errors.hpp"

namespace sizefn {

using VertexId = std::uint32_t;
using Edge = std::array<VertexId, 2>;
using Triangle = std::array<VertexId, 3>;
using Point3 = std::array<double, 3>;

/// A size graph: vertices with k measuring values each, an edge list, and
/// optionally triangles plus vertex positions for gradient computations.
///
/// Construction never validates; call validate() or use the loaders, which
/// reject graphs with invariant violations. The object is immutable after
/// construction and safe to share between threads.
class SizeGraph {
 public:
  SizeGraph() = default;

  /// `values` holds vertex_count * k numbers, vertex-major.
  SizeGraph(std::size_t k, std::vector<double> values, std::vector<Edge> edges,
            std::vector<Triangle> triangles = {}, std::vector<Point3> positions = {})
      : k_(k),
        values_(std::move(values)),
        edges_(std::move(edges)),
        triangles_(std::move(triangles)),
        positions_(std::move(positions)) {
    if (k_ == 0) throw std::invalid_argument("measuring-function arity k must be >= 1");
    if (values_.size() % k_ != 0)
      throw std::invalid_argument("value count is not a multiple of k");
    build_adjacency();
  }

  std::size_t k() const { return k_; }
  std::size_t vertex_count() const { return k_ == 0 ? 0 : values_.size() / k_; }

  double value(VertexId v, std::size_t i) const { return values_[v * k_ + i]; }
  std::span<const double> values(VertexId v) const {
    return {values_.data() + static_cast<std::size_t>(v) * k_, k_};
  }
  std::span<const double> all_values() const { return values_; }

  /// Measuring component `i` as one value per vertex.
  std::vector<double> component(std::size_t i) const {
    std::vector<double> out(vertex_count());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = values_[v * k_ + i];
    return out;
  }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Point3>& positions() const { return positions_; }
  bool has_triangles() const { return !triangles_.empty(); }
  bool has_positions() const { return !positions_.empty(); }

  /// Neighbors through valid, non-loop edges.
  std::span<const VertexId> neighbors(VertexId v) const {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

 private:
  void build_adjacency() {
    const std::size_t n = vertex_count();
    offsets_.assign(n + 1, 0);
    auto usable = [n](const Edge& e) { return e[0] < n && e[1] < n && e[0] != e[1]; };
    for (const auto& e : edges_) {
      if (!usable(e)) continue;
      ++offsets_[e[0] + 1];
      ++offsets_[e[1] + 1];
    }
    for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
    adjacency_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      if (!usable(e)) continue;
      adjacency_[fill[e[0]]++] = e[1];
      adjacency_[fill[e[1]]++] = e[0];
    }
  }

  std::size_t k_ = 1;
  std::vector<double> values_;
  std::vector<Edge> edges_;
  std::vector<Triangle> triangles_;
  std::vector<Point3> positions_;
  std::vector<std::size_t> offsets_{0};
  std::vector<VertexId> adjacency_;
};

struct ValidationIssue {
  std::string code;
  std::string location;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;
  std::size_t connected_component_count = 0;

  bool ok() const { return errors.empty(); }
};

/// Component label (smallest vertex index of the component) for every vertex.
inline std::vector<VertexId> component_labels(const SizeGraph& g) {
  const auto n = static_cast<VertexId>(g.vertex_count());
  detail::UnionFind uf(n);
  for (VertexId v = 0; v < n; ++v)
    for (VertexId u : g.neighbors(v)) uf.unite(u, v);
  std::vector<VertexId> label(n);
  std::unordered_map<VertexId, VertexId> first;
  for (VertexId v = 0; v < n; ++v) label[v] = first.try_emplace(uf.find(v), v).first->second;
  return label;
}

inline std::size_t connected_component_count(const SizeGraph& g) {
  const auto labels = component_labels(g);
  std::size_t count = 0;
  for (VertexId v = 0; v < labels.size(); ++v) count += labels[v] == v;
  return count;
}

/// Exhaustive invariant check. Errors are report content, never exceptions.
inline ValidationReport validate(const SizeGraph& g) {
  ValidationReport report;
  const std::size_t n = g.vertex_count();
  auto error = [&](std::string code, std::string location, std::string message) {
    report.errors.push_back({std::move(code), std::move(location), std::move(message)});
  };

  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t i = 0; i < g.k(); ++i)
      if (!std::isfinite(g.value(static_cast<VertexId>(v), i)))
        error("non_finite_value", "vertices[" + std::to_string(v) + "]",
              "measuring value " + std::to_string(i) + " is not finite");

  std::set<Edge> seen_edges;
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const auto& edge = g.edges()[e];
    const std::string where = "edges[" + std::to_string(e) + "]";
    if (edge[0] >= n || edge[1] >= n) {
      error("index_out_of_range", where, "vertex index out of range");
      continue;
    }
    if (edge[0] == edge[1]) {
      error("self_loop", where, "self-loop on vertex " + std::to_string(edge[0]));
      continue;
    }
    Edge key{std::min(edge[0], edge[1]), std::max(edge[0], edge[1])};
    if (!seen_edges.insert(key).second)
      error("duplicate_edge", where,
            "duplicate edge {" + std::to_string(key[0]) + "," + std::to_string(key[1]) + "}");
  }

  std::set<Triangle> seen_triangles;
  for (std::size_t t = 0; t < g.triangles().size(); ++t) {
    Triangle tri = g.triangles()[t];
    const std::string where = "triangles[" + std::to_string(t) + "]";
    if (tri[0] >= n || tri[1] >= n || tri[2] >= n) {
      error("index_out_of_range", where, "vertex index out of range");
      continue;
    }
    std::sort(tri.begin(), tri.end());
    if (tri[0] == tri[1] || tri[1] == tri[2]) {
      error("degenerate_triangle", where, "triangle repeats a vertex");
      continue;
    }
    if (!seen_triangles.insert(tri).second) {
      error("duplicate_triangle", where, "duplicate triangle");
      continue;
    }
    for (auto [a, b] : {std::pair{tri[0], tri[1]}, {tri[0], tri[2]}, {tri[1], tri[2]}})
      if (!seen_edges.count(Edge{a, b}))
        error("missing_triangle_edge", where,
              "triangle edge {" + std::to_string(a) + "," + std::to_string(b) +
                  "} is not in the edge list");
  }

  if (g.has_positions()) {
    if (g.positions().size() != n) {
      error("position_count", "vertices", "positions given for some but not all vertices");
    } else {
      for (std::size_t v = 0; v < n; ++v)
        for (double c : g.positions()[v])
          if (!std::isfinite(c)) {
            error("non_finite_position", "vertices[" + std::to_string(v) + "]",
                  "position is not finite");
            break;
          }
    }
  }
  if (g.has_triangles() && !g.has_positions())
    report.warnings.push_back({"no_positions", "triangles", "triangles given without positions"});

  report.connected_component_count = connected_component_count(g);
  return report;
}

/// Throws InvariantError describing the first violation, if any.
inline void require_valid(const SizeGraph& g) {
  const auto report = validate(g);
  if (!report.ok()) {
    const auto& e = report.errors.front();
    throw InvariantError(e.location + ": " + e.message);
  }
}

/// Undirected 1-skeleton of a triangle list, sorted and deduplicated.
inline std::vector<Edge> edges_from_triangles(std::span<const Triangle> triangles) {
  std::vector<Edge> edges;
  edges.reserve(triangles.size() * 3);
  for (const auto& t : triangles)
    for (int i = 0; i < 3; ++i) {
      VertexId a = t[i], b = t[(i + 1) % 3];
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

// ---------------------------------------------------------------------------
// Size-graph JSON

namespace detail {

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path);
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failure on " + path);
}

inline double json_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

inline std::int64_t json_int(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
  return j.get<std::int64_t>();
}

}  // namespace detail

/// Builds a SizeGraph from the size-graph JSON document and validates it.
/// Edge and triangle entries refer to vertex ids; vertices keep file order.
inline SizeGraph size_graph_from_json(const nlohmann::json& doc) {
  using detail::json_int;
  using detail::json_number;
  if (!doc.is_object()) throw ParseError("size graph: top level must be an object");
  if (!doc.contains("k")) throw ParseError("size graph: missing field \"k\"");
  const auto k = json_int(doc["k"], "k");
  if (k < 1) throw InvariantError("k: must be >= 1");
  if (!doc.contains("vertices") || !doc["vertices"].is_array())
    throw ParseError("size graph: field \"vertices\" must be an array");

  const auto& verts = doc["vertices"];
  std::vector<double> values;
  values.reserve(verts.size() * static_cast<std::size_t>(k));
  std::vector<Point3> positions;
  std::unordered_map<std::int64_t, VertexId> index_of;
  bool any_pos = false;
  for (std::size_t v = 0; v < verts.size(); ++v) {
    const std::string where = "vertices[" + std::to_string(v) + "]";
    const auto& vj = verts[v];
    if (!vj.is_object()) throw ParseError(where + ": expected an object");
    const std::int64_t id = vj.contains("id") ? json_int(vj["id"], where + ".id")
                                              : static_cast<std::int64_t>(v);
    if (!index_of.emplace(id, static_cast<VertexId>(v)).second)
      throw InvariantError(where + ".id: duplicate vertex id " + std::to_string(id));
    if (!vj.contains("values") || !vj["values"].is_array())
      throw ParseError(where + ".values: expected an array of numbers");
    const auto& vals = vj["values"];
    if (vals.size() != static_cast<std::size_t>(k))
      throw InvariantError(where + ".values: expected " + std::to_string(k) + " values, got " +
                           std::to_string(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i)
      values.push_back(json_number(vals[i], where + ".values[" + std::to_string(i) + "]"));
    if (vj.contains("pos")) {
      const auto& p = vj["pos"];
      if (!p.is_array() || p.size() != 3) throw ParseError(where + ".pos: expected 3 numbers");
      if (v != 0 && !any_pos) throw InvariantError(where + ".pos: positions must be all or none");
      any_pos = true;
      positions.push_back({json_number(p[0], where + ".pos[0]"),
                           json_number(p[1], where + ".pos[1]"),
                           json_number(p[2], where + ".pos[2]")});
    } else if (any_pos) {
      throw InvariantError(where + ".pos: positions must be all or none");
    }
  }

  auto lookup = [&](const nlohmann::json& j, const std::string& where) -> VertexId {
    const auto id = json_int(j, where);
    auto it = index_of.find(id);
    if (it == index_of.end()) throw InvariantError(where + ": vertex index out of range");
    return it->second;
  };

  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw ParseError("edges: expected an array");
    for (std::size_t e = 0; e < doc["edges"].size(); ++e) {
      const auto& ej = doc["edges"][e];
      const std::string where = "edges[" + std::to_string(e) + "]";
      if (!ej.is_array() || ej.size() != 2) throw ParseError(where + ": expected [int,int]");
      edges.push_back({lookup(ej[0], where), lookup(ej[1], where)});
    }
  }
  std::vector<Triangle> triangles;
  if (doc.contains("triangles") && !doc["triangles"].is_null()) {
    if (!doc["triangles"].is_array()) throw ParseError("triangles: expected an array");
    for (std::size_t t = 0; t < doc["triangles"].size(); ++t) {
      const auto& tj = doc["triangles"][t];
      const std::string where = "triangles[" + std::to_string(t) + "]";
      if (!tj.is_array() || tj.size() != 3) throw ParseError(where + ": expected [int,int,int]");
      triangles.push_back({lookup(tj[0], where), lookup(tj[1], where), lookup(tj[2], where)});
    }
  }

  SizeGraph g(static_cast<std::size_t>(k), std::move(values), std::move(edges),
              std::move(triangles), std::move(positions));
  require_valid(g);
  return g;
}

inline SizeGraph load_size_graph(const std::string& path) {
  const std::string text = detail::read_text(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    return size_graph_from_json(doc);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError(path + ": " + e.what());
  }
}

inline nlohmann::json to_json(const SizeGraph& g) {
  nlohmann::json doc;
  doc["k"] = g.k();
  auto verts = nlohmann::json::array();
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    nlohmann::json vj;
    vj["id"] = v;
    auto vals = g.values(v);
    vj["values"] = std::vector<double>(vals.begin(), vals.end());
    if (g.has_positions()) vj["pos"] = g.positions()[v];
    verts.push_back(std::move(vj));
  }
  doc["vertices"] = std::move(verts);
  doc["edges"] = g.edges();
  if (g.has_triangles()) doc["triangles"] = g.triangles();
  return doc;
}

inline void save_size_graph(const SizeGraph& g, const std::string& path) {
  detail::write_text(path, to_json(g).dump(1) + "\n");
}

// ---------------------------------------------------------------------------
// OFF meshes and CSV measuring values

struct TriangleMesh {
  std::vector<Point3> positions;
  std::vector<Triangle> triangles;
};

namespace detail {

// Tokenizer for ASCII OFF that drops '#' comments and tracks line numbers.
class OffTokens {
 public:
  explicit OffTokens(const std::string& text) : in_(text) {}

  bool next(std::string& tok) {
    while (true) {
      if (ls_ >> tok) return true;
      std::string line;
      if (!std::getline(in_, line)) return false;
      ++line_;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      ls_.clear();
      ls_.str(line);
    }
  }
  // Drops whatever remains on the current line (e.g. face colors).
  void skip_line() { ls_.str(""); ls_.clear(); }
  int line() const { return line_; }

 private:
  std::istringstream in_;
  std::istringstream ls_;
  int line_ = 0;
};

inline double parse_double(const std::string& tok, const std::string& where) {
  char* end = nullptr;
  const double d = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size())
    throw ParseError(where + ": '" + tok + "' is not a number");
  return d;
}

inline long parse_long(const std::string& tok, const std::string& where) {
  char* end = nullptr;
  const long n = std::strtol(tok.c_str(), &end, 10);
  if (tok.empty() || end != tok.c_str() + tok.size())
    throw ParseError(where + ": '" + tok + "' is not an integer");
  return n;
}

}  // namespace detail

/// Reads an ASCII OFF triangle mesh. Faces with other than 3 vertices are rejected.
inline TriangleMesh read_off(const std::string& path) {
  detail::OffTokens toks(detail::read_text(path));
  auto where = [&] { return path + ":" + std::to_string(toks.line()); };
  std::string tok;
  if (!toks.next(tok) || tok.rfind("OFF", 0) != 0) throw ParseError(path + ": missing OFF header");
  if (tok != "OFF") throw ParseError(path + ": unsupported OFF variant '" + tok + "'");
  long counts[3];
  for (long& c : counts) {
    if (!toks.next(tok)) throw ParseError(where() + ": truncated header");
    c = detail::parse_long(tok, where());
    if (c < 0) throw ParseError(where() + ": negative count");
  }
  TriangleMesh mesh;
  mesh.positions.resize(static_cast<std::size_t>(counts[0]));
  for (auto& p : mesh.positions) {
    for (double& c : p) {
      if (!toks.next(tok)) throw ParseError(where() + ": truncated vertex list");
      c = detail::parse_double(tok, where());
    }
    toks.skip_line();
  }
  mesh.triangles.reserve(static_cast<std::size_t>(counts[1]));
  for (long f = 0; f < counts[1]; ++f) {
    if (!toks.next(tok)) throw ParseError(where() + ": truncated face list");
    const long arity = detail::parse_long(tok, where());
    if (arity != 3)
      throw ParseError(where() + ": face " + std::to_string(f) + " has " + std::to_string(arity) +
                       " vertices; only triangles are supported");
    Triangle t{};
    for (auto& idx : t) {
      if (!toks.next(tok)) throw ParseError(where() + ": truncated face");
      const long i = detail::parse_long(tok, where());
      if (i < 0 || i >= counts[0])
        throw InvariantError(where() + ": face " + std::to_string(f) +
                             " vertex index out of range");
      idx = static_cast<VertexId>(i);
    }
    toks.skip_line();
    mesh.triangles.push_back(t);
  }
  return mesh;
}

inline void write_off(const TriangleMesh& mesh, const std::string& path) {
  std::ostringstream out;
  out.precision(17);
  out << "OFF\n" << mesh.positions.size() << ' ' << mesh.triangles.size() << " 0\n";
  for (const auto& p : mesh.positions) out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  detail::write_text(path, out.str());
}

/// Headerless CSV; every non-blank row must have the same number of columns.
inline std::vector<std::vector<double>> read_values_csv(const std::string& path) {
  std::istringstream in(detail::read_text(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    const std::string where = path + ":" + std::to_string(lineno);
    while (std::getline(ls, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      row.push_back(detail::parse_double(b == std::string::npos ? "" : cell.substr(b, e - b + 1),
                                         where));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(where + ": expected " + std::to_string(rows.front().size()) +
                       " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_values_csv(const SizeGraph& g, const std::string& path) {
  std::ostringstream out;
  out.precision(17);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    for (std::size_t i = 0; i < g.k(); ++i) out << (i ? "," : "") << g.value(v, i);
    out << '\n';
  }
  detail::write_text(path, out.str());
}

/// Combines a mesh with per-vertex values; the 1-skeleton is derived from the triangles.
inline SizeGraph make_mesh_graph(TriangleMesh mesh, const std::vector<std::vector<double>>& rows) {
  if (rows.size() != mesh.positions.size())
    throw InvariantError("value row count mismatch: " + std::to_string(rows.size()) +
                         " rows for " + std::to_string(mesh.positions.size()) + " vertices");
  if (rows.empty()) throw InvariantError("mesh has no vertices");
  const std::size_t k = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * k);
  for (const auto& r : rows) values.insert(values.end(), r.begin(), r.end());
  auto edges = edges_from_triangles(mesh.triangles);
  SizeGraph g(k, std::move(values), std::move(edges), std::move(mesh.triangles),
              std::move(mesh.positions));
  require_valid(g);
  return g;
}

inline SizeGraph load_mesh_pair(const std::string& mesh_path, const std::string& values_path) {
  auto mesh = read_off(mesh_path);
  const auto rows = read_values_csv(values_path);
  try {
    return make_mesh_graph(std::move(mesh), rows);
  } catch (const InvariantError& e) {
    throw InvariantError(mesh_path + " + " + values_path + ": " + e.what());
  }
}

/// Replaces the measuring values of a graph while keeping its combinatorics.
inline SizeGraph with_values(const SizeGraph& g, std::size_t k, std::vector<double> values) {
  return SizeGraph(k, std::move(values), g.edges(), g.triangles(), g.positions());
}

}  // namespace sizefn
