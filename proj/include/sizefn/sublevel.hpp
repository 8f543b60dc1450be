#pragma once

// One-dimensional size functions on size graphs: sublevel component counting,
// cornerpoint extraction by the elder rule, and the finite-difference
// multiplicity oracle that the extraction is checked against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sizefn/detail/union_find.hpp"
#include "sizefn/errors.hpp"
#include "sizefn/size_pair.hpp"

namespace sizefn {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// One real value per vertex of an associated SizeGraph.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::vector<double> values) : values_(std::move(values)) {}
  ScalarField(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t v) const { return values_[v]; }
  std::span<const double> values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }

 private:
  std::vector<double> values_;
};

inline void check_field(const SizeGraph& g, const ScalarField& f) {
  if (f.size() != g.vertex_count())
    throw std::invalid_argument("scalar field has " + std::to_string(f.size()) +
                                " values for " + std::to_string(g.vertex_count()) + " vertices");
  for (double v : f)
    if (!std::isfinite(v)) throw std::invalid_argument("scalar field contains a non-finite value");
}

/// Field of one measuring component of `g`.
inline ScalarField component_field(const SizeGraph& g, std::size_t i) {
  return ScalarField(g.component(i));
}

/// A proper cornerpoint (finite y) or a cornerline (y == +inf).
struct Cornerpoint {
  double x = 0.0;
  double y = kInfinity;
  std::uint32_t multiplicity = 1;

  bool is_cornerline() const { return std::isinf(y); }
  friend bool operator==(const Cornerpoint&, const Cornerpoint&) = default;
};

/// Multiset of cornerpoints and cornerlines, kept sorted by (x, y) with
/// coincident entries merged.
class FormalSeries {
 public:
  FormalSeries() = default;
  explicit FormalSeries(std::vector<Cornerpoint> points) : points_(std::move(points)) {
    for (const auto& p : points_) {
      if (!(p.x < p.y) || std::isnan(p.x) || std::isinf(p.x))
        throw std::invalid_argument("cornerpoint must satisfy finite x < y");
      if (p.multiplicity == 0) throw std::invalid_argument("cornerpoint multiplicity must be >= 1");
    }
    std::sort(points_.begin(), points_.end(), [](const Cornerpoint& a, const Cornerpoint& b) {
      return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    std::vector<Cornerpoint> merged;
    for (const auto& p : points_) {
      if (!merged.empty() && merged.back().x == p.x && merged.back().y == p.y)
        merged.back().multiplicity += p.multiplicity;
      else
        merged.push_back(p);
    }
    points_ = std::move(merged);
  }
  FormalSeries(std::initializer_list<Cornerpoint> points)
      : FormalSeries(std::vector<Cornerpoint>(points)) {}

  const std::vector<Cornerpoint>& points() const { return points_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }

  std::size_t cornerline_multiplicity() const {
    std::size_t m = 0;
    for (const auto& p : points_) m += p.is_cornerline() ? p.multiplicity : 0;
    return m;
  }
  std::size_t proper_multiplicity() const {
    std::size_t m = 0;
    for (const auto& p : points_) m += p.is_cornerline() ? 0 : p.multiplicity;
    return m;
  }

  friend bool operator==(const FormalSeries&, const FormalSeries&) = default;

 private:
  std::vector<Cornerpoint> points_;
};

namespace detail {

inline void require_query(double x, double y) {
  if (!(x < y)) throw std::invalid_argument("size function query requires x < y");
}

// Vertex order by (value, index): the processing order of the filtration.
inline std::vector<VertexId> filtration_order(const ScalarField& f) {
  std::vector<VertexId> order(f.size());
  std::iota(order.begin(), order.end(), VertexId{0});
  std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    return f[a] < f[b] || (f[a] == f[b] && a < b);
  });
  return order;
}

}  // namespace detail

/// Number of connected components of the y-sublevel subgraph that contain a
/// vertex of the x-sublevel set. An edge belongs to the t-sublevel subgraph
/// when both endpoints do.
inline std::size_t size_function_1d(const SizeGraph& g, const ScalarField& f, double x, double y) {
  detail::require_query(x, y);
  check_field(g, f);
  const auto n = static_cast<VertexId>(g.vertex_count());
  detail::UnionFind uf(n);
  for (VertexId v = 0; v < n; ++v) {
    if (!(f[v] <= y)) continue;
    for (VertexId u : g.neighbors(v))
      if (u < v && f[u] <= y) uf.unite(u, v);
  }
  std::vector<char> counted(n, 0);
  std::size_t count = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (!(f[v] <= x)) continue;
    const auto r = uf.find(v);
    if (!counted[r]) {
      counted[r] = 1;
      ++count;
    }
  }
  return count;
}

/// Cornerpoints of the 1D size function of (g, f) by union-find over the
/// vertex filtration. When two components meet, the one with the later birth
/// dies (equal births: larger birth-vertex index dies) and, if it had positive
/// lifetime, contributes (birth, merge level). Every surviving component
/// contributes a cornerline at its minimum.
inline FormalSeries cornerpoints(const SizeGraph& g, const ScalarField& f) {
  check_field(g, f);
  const auto n = static_cast<VertexId>(g.vertex_count());
  const auto order = detail::filtration_order(f);
  std::vector<VertexId> rank(n);
  for (VertexId r = 0; r < n; ++r) rank[order[r]] = r;

  detail::UnionFind uf(n);
  // Birth vertex of each root; its rank orders components by age.
  std::vector<VertexId> birth(n);
  std::iota(birth.begin(), birth.end(), VertexId{0});
  std::vector<Cornerpoint> out;

  for (VertexId v : order) {
    const double level = f[v];
    for (VertexId u : g.neighbors(v)) {
      if (rank[u] > rank[v]) continue;
      const auto ru = uf.find(u);
      const auto rv = uf.find(v);
      if (ru == rv) continue;
      VertexId elder = birth[ru], younger = birth[rv];
      if (rank[younger] < rank[elder]) std::swap(elder, younger);
      if (f[younger] < level) out.push_back({f[younger], level, 1});
      const auto root = uf.unite(ru, rv);
      birth[root] = elder;
    }
  }
  for (VertexId v = 0; v < n; ++v)
    if (uf.find(v) == v) out.push_back({f[birth[v]], kInfinity, 1});
  return FormalSeries(std::move(out));
}

/// Value of the size function encoded by `s`: total multiplicity of entries
/// (x, y) with x <= xq and y > yq.
inline std::size_t evaluate_from_series(const FormalSeries& s, double xq, double yq) {
  detail::require_query(xq, yq);
  std::size_t total = 0;
  for (const auto& p : s.points())
    if (p.x <= xq && p.y > yq) total += p.multiplicity;
  return total;
}

/// Smallest positive difference between distinct field values; 1 when the
/// field takes fewer than two distinct values.
inline double min_value_gap(const ScalarField& f) {
  std::vector<double> v(f.begin(), f.end());
  std::sort(v.begin(), v.end());
  double gap = kInfinity;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) gap = std::min(gap, v[i] - v[i - 1]);
  return std::isinf(gap) ? 1.0 : gap;
}

/// Oracle step for proper cornerpoints located at field values: strictly below
/// half the value resolution, so x + eps < y - eps holds for any two distinct values.
inline double default_oracle_epsilon(const ScalarField& f) { return min_value_gap(f) / 3.0; }

/// Oracle step for cornerlines at abscissa `a`: below the value resolution and
/// small enough that 1/eps exceeds every field value.
inline double default_cornerline_epsilon(const ScalarField& f, double a) {
  const double bound = std::max({std::abs(f.max()), std::abs(f.min()), std::abs(a)}) + 1.0;
  return std::min(default_oracle_epsilon(f), 1.0 / (2.0 * bound));
}

/// Multiplicity of (x, y) straight from its definition: the minimum over the
/// supplied steps of the alternating four-corner sum of size-function values.
inline std::size_t multiplicity_proper(const SizeGraph& g, const ScalarField& f, double x,
                                       double y, std::span<const double> eps_list) {
  if (eps_list.empty()) throw std::invalid_argument("eps_list must not be empty");
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (double eps : eps_list) {
    if (!(eps > 0.0) || !(x + eps < y - eps))
      throw std::invalid_argument("each eps must be positive with x + eps < y - eps");
    auto l = [&](double a, double b) {
      return static_cast<std::int64_t>(size_function_1d(g, f, a, b));
    };
    const std::int64_t m =
        l(x + eps, y - eps) - l(x - eps, y - eps) - l(x + eps, y + eps) + l(x - eps, y + eps);
    best = std::min(best, m);
  }
  return static_cast<std::size_t>(std::max<std::int64_t>(best, 0));
}

inline std::size_t multiplicity_proper(const SizeGraph& g, const ScalarField& f, double x,
                                       double y) {
  const double eps = default_oracle_epsilon(f);
  return multiplicity_proper(g, f, x, y, std::span<const double>(&eps, 1));
}

/// Multiplicity of the cornerline x = a from its definition.
inline std::size_t multiplicity_infinity(const SizeGraph& g, const ScalarField& f, double a,
                                         std::span<const double> eps_list) {
  if (eps_list.empty()) throw std::invalid_argument("eps_list must not be empty");
  check_field(g, f);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (double eps : eps_list) {
    const double top = 1.0 / eps;
    if (!(eps > 0.0) || !(a + eps < top) || !(top > f.max()))
      throw std::invalid_argument("each eps must satisfy a + eps < 1/eps and 1/eps > max f");
    const std::int64_t m = static_cast<std::int64_t>(size_function_1d(g, f, a + eps, top)) -
                           static_cast<std::int64_t>(size_function_1d(g, f, a - eps, top));
    best = std::min(best, m);
  }
  return static_cast<std::size_t>(std::max<std::int64_t>(best, 0));
}

inline std::size_t multiplicity_infinity(const SizeGraph& g, const ScalarField& f, double a) {
  const double eps = default_cornerline_epsilon(f, a);
  return multiplicity_infinity(g, f, a, std::span<const double>(&eps, 1));
}

// ---------------------------------------------------------------------------
// Formal series JSON: {"cornerpoints": [{"x": .., "y": .. | "inf", "mult": ..}]}

inline nlohmann::json to_json(const FormalSeries& s) {
  auto pts = nlohmann::json::array();
  for (const auto& p : s.points()) {
    nlohmann::json pj;
    pj["x"] = p.x;
    if (p.is_cornerline())
      pj["y"] = "inf";
    else
      pj["y"] = p.y;
    pj["mult"] = p.multiplicity;
    pts.push_back(std::move(pj));
  }
  return nlohmann::json{{"cornerpoints", std::move(pts)}};
}

inline FormalSeries series_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("cornerpoints") || !doc["cornerpoints"].is_array())
    throw ParseError("formal series: expected {\"cornerpoints\": [...]}");
  std::vector<Cornerpoint> pts;
  for (std::size_t i = 0; i < doc["cornerpoints"].size(); ++i) {
    const auto& pj = doc["cornerpoints"][i];
    const std::string where = "cornerpoints[" + std::to_string(i) + "]";
    if (!pj.is_object() || !pj.contains("x") || !pj.contains("y"))
      throw ParseError(where + ": expected {x, y, mult}");
    Cornerpoint p;
    p.x = detail::json_number(pj["x"], where + ".x");
    if (pj["y"].is_string()) {
      if (pj["y"].get<std::string>() != "inf") throw ParseError(where + ".y: expected number or \"inf\"");
      p.y = kInfinity;
    } else {
      p.y = detail::json_number(pj["y"], where + ".y");
    }
    const auto mult = pj.contains("mult") ? detail::json_int(pj["mult"], where + ".mult") : 1;
    if (mult < 1) throw InvariantError(where + ".mult: must be >= 1");
    p.multiplicity = static_cast<std::uint32_t>(mult);
    if (!(p.x < p.y)) throw InvariantError(where + ": requires x < y");
    pts.push_back(p);
  }
  return FormalSeries(std::move(pts));
}

}  // namespace sizefn
