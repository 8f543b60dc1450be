#pragma once

// Gradient-based analysis of size pairs on triangle meshes: per-triangle
// gradients, special (non-smooth) vertices, Fritz John style pseudocritical
// vertices, and the checks that place the discontinuities of the size
// function at pseudocritical or special values.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sizefn/detail/min_norm_point.hpp"
#include "sizefn/foliation.hpp"
#include "sizefn/size_pair.hpp"
#include "sizefn/sublevel.hpp"

namespace sizefn {

using detail::Vec3;

/// Tangent-plane gradient of one measuring component on every triangle.
struct GradientField {
  std::vector<Vec3> per_triangle;
};

/// Precomputed mesh connectivity for vertex-star queries.
class MeshStars {
 public:
  static constexpr double kMinArea = 1e-12;

  explicit MeshStars(const SizeGraph& g) {
    if (!g.has_triangles() || !g.has_positions())
      throw std::invalid_argument("geometry required: graph has no triangles or positions");
    const auto n = g.vertex_count();
    const auto& tris = g.triangles();
    const auto& pos = g.positions();
    std::vector<std::size_t> count(n + 1, 0);
    for (const auto& t : tris)
      for (auto v : t) ++count[v + 1];
    for (std::size_t v = 0; v < n; ++v) count[v + 1] += count[v];
    offsets_ = count;
    incident_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    normals_.resize(tris.size());
    for (std::size_t t = 0; t < tris.size(); ++t) {
      const auto& tri = tris[t];
      const Vec3 nrm = detail::cross(detail::sub(pos[tri[1]], pos[tri[0]]),
                                     detail::sub(pos[tri[2]], pos[tri[0]]));
      const double twice_area = detail::norm(nrm);
      if (!(twice_area / 2.0 > kMinArea))
        throw std::invalid_argument("degenerate triangle " + std::to_string(t));
      normals_[t] = detail::scale(nrm, 1.0 / twice_area);
      for (auto v : tri) incident_[fill[v]++] = static_cast<std::uint32_t>(t);
    }
    vertex_normals_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      Vec3 acc{0.0, 0.0, 0.0};
      const auto star = incident(static_cast<VertexId>(v));
      for (auto t : star) {
        // Align orientations with the first incident triangle.
        const double sgn = detail::dot(normals_[t], normals_[star.front()]) < 0.0 ? -1.0 : 1.0;
        acc = detail::add(acc, detail::scale(normals_[t], sgn));
      }
      const double len = detail::norm(acc);
      vertex_normals_[v] = len > 0.0 ? detail::scale(acc, 1.0 / len) : Vec3{0.0, 0.0, 0.0};
    }
  }

  std::span<const std::uint32_t> incident(VertexId v) const {
    return {incident_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  const Vec3& triangle_normal(std::size_t t) const { return normals_[t]; }
  const Vec3& vertex_normal(VertexId v) const { return vertex_normals_[v]; }

  /// Component of `g` tangent to the surface at vertex v.
  Vec3 tangential(VertexId v, const Vec3& g) const {
    const auto& nrm = vertex_normals_[v];
    return detail::sub(g, detail::scale(nrm, detail::dot(g, nrm)));
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> incident_;
  std::vector<Vec3> normals_;
  std::vector<Vec3> vertex_normals_;
};

/// Gradient of the linear interpolant of `values` on each triangle: the vector
/// in the triangle plane whose inner product with every edge equals the value
/// difference along it.
inline GradientField triangle_gradients(const SizeGraph& g, std::span<const double> values) {
  if (!g.has_triangles() || !g.has_positions())
    throw std::invalid_argument("geometry required: graph has no triangles or positions");
  if (values.size() != g.vertex_count())
    throw std::invalid_argument("triangle_gradients: one value per vertex required");
  GradientField field;
  field.per_triangle.reserve(g.triangles().size());
  const auto& pos = g.positions();
  for (std::size_t t = 0; t < g.triangles().size(); ++t) {
    const auto& tri = g.triangles()[t];
    const Vec3 e1 = detail::sub(pos[tri[1]], pos[tri[0]]);
    const Vec3 e2 = detail::sub(pos[tri[2]], pos[tri[0]]);
    const double a = detail::dot(e1, e1), b = detail::dot(e1, e2), c = detail::dot(e2, e2);
    const double det = a * c - b * b;
    const double area = std::sqrt(std::max(det, 0.0)) / 2.0;
    if (!(area > MeshStars::kMinArea))
      throw std::invalid_argument("degenerate triangle " + std::to_string(t));
    const double d1 = values[tri[1]] - values[tri[0]];
    const double d2 = values[tri[2]] - values[tri[0]];
    const double alpha = (c * d1 - b * d2) / det;
    const double beta = (a * d2 - b * d1) / det;
    field.per_triangle.push_back(detail::add(detail::scale(e1, alpha), detail::scale(e2, beta)));
  }
  return field;
}

/// Gradients of measuring component j.
inline GradientField triangle_gradients(const SizeGraph& g, std::size_t j) {
  if (j >= g.k()) throw std::invalid_argument("component index out of range");
  const auto values = g.component(j);
  return triangle_gradients(g, std::span<const double>(values));
}

/// Vertices where incident-triangle gradients of component j disagree: some
/// pair differs by more than tau_s * (1 + largest incident gradient norm).
/// This is the piecewise-linear stand-in for the locus where the component is not C^1.
inline std::vector<VertexId> special_points(const SizeGraph& g, const MeshStars& stars,
                                            const GradientField& grad, double tau_s) {
  if (!(tau_s > 0.0)) throw std::invalid_argument("tau_s must be positive");
  std::vector<VertexId> out;
  if (std::isinf(tau_s)) return out;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto star = stars.incident(v);
    double max_norm = 0.0;
    for (auto t : star) max_norm = std::max(max_norm, detail::norm(grad.per_triangle[t]));
    const double threshold = tau_s * (1.0 + max_norm);
    bool flagged = false;
    for (std::size_t a = 0; a < star.size() && !flagged; ++a)
      for (std::size_t b = a + 1; b < star.size() && !flagged; ++b)
        flagged = detail::norm(detail::sub(grad.per_triangle[star[a]], grad.per_triangle[star[b]])) >
                  threshold;
    if (flagged) out.push_back(v);
  }
  return out;
}

inline std::vector<VertexId> special_points(const SizeGraph& g, std::size_t j, double tau_s) {
  const MeshStars stars(g);
  return special_points(g, stars, triangle_gradients(g, j), tau_s);
}

/// Outcome of testing whether the convex hull of some vectors contains 0.
struct HullTest {
  bool flag = false;
  std::vector<double> lambdas;  // convex coefficients realizing the residual
  double residual = 0.0;        // min over the simplex of |sum lambda_i v_i|
};

/// Minimum-norm point of the convex hull (Wolfe's algorithm); flag when its
/// norm is at most tau_0.
inline HullTest convex_hull_contains_zero(std::span<const Vec3> vectors, double tau_0) {
  if (vectors.empty()) throw std::invalid_argument("convex_hull_contains_zero: empty input");
  auto r = detail::min_norm_point(vectors);
  return {r.residual <= tau_0, std::move(r.weights), r.residual};
}

// ---------------------------------------------------------------------------
// Pseudocritical vertices

/// Index set of a coordinate projection rho(x) = (x_i1, ..., x_ih), 0-based.
class ProjectionIndex {
 public:
  ProjectionIndex(std::vector<std::size_t> indices, std::size_t k) : indices_(std::move(indices)) {
    if (indices_.empty()) throw std::invalid_argument("projection must keep at least one component");
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      if (indices_[i] >= k) throw std::invalid_argument("projection index out of range");
      if (i > 0 && indices_[i] <= indices_[i - 1])
        throw std::invalid_argument("projection indices must be strictly increasing");
    }
  }
  /// Components whose bits are set in `mask`.
  static ProjectionIndex from_mask(std::uint32_t mask, std::size_t k) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < k; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    return ProjectionIndex(std::move(idx), k);
  }
  static ProjectionIndex full(std::size_t k) { return from_mask((1u << k) - 1u, k); }

  const std::vector<std::size_t>& indices() const { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

struct PseudocriticalWitness {
  VertexId vertex = 0;
  std::vector<std::size_t> active;  // component indices whose gradients were tested
  std::vector<double> lambda;       // convex weight per active component (summed over triangles)
  double residual = 0.0;
  Vector value;                     // F(Q) as a 1-vector, or rho(phi(Q))
};

struct PseudocriticalReport {
  std::vector<PseudocriticalWitness> pseudocritical;
  std::vector<std::vector<VertexId>> special;  // special vertices per component
};

/// Thresholds for the vertex tests. Residual tolerances are relative: a
/// vertex passes when its residual is at most tau_0 * (1 + largest candidate
/// gradient norm).
struct CriticalTolerances {
  double tau_I = 1e-6;   // relative slack for components attaining the max in F
  double tau_0 = 1e-6;   // relative residual tolerance
  double tau_s = 0.5;    // gradient disagreement threshold for special vertices
  bool star_active = true;  // also activate components attaining the max at a neighbor
};

/// Gradients of every measuring component plus mesh stars; built once per graph.
class MeshCalculus {
 public:
  explicit MeshCalculus(const SizeGraph& g) : graph_(&g), stars_(g) {
    for (std::size_t j = 0; j < g.k(); ++j) gradients_.push_back(triangle_gradients(g, j));
  }

  const SizeGraph& graph() const { return *graph_; }
  const MeshStars& stars() const { return stars_; }
  const GradientField& gradient(std::size_t j) const { return gradients_[j]; }

  /// Tests whether 0 is a convex combination of the incident-triangle
  /// gradients (projected on the vertex tangent plane) of the given components.
  std::pair<HullTest, std::vector<double>> vertex_hull(VertexId v, std::span<const std::size_t> comps,
                                                       double tau_0_rel) const {
    std::vector<Vec3> vecs;
    std::vector<std::size_t> owner;
    double max_norm = 0.0;
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (auto t : stars_.incident(v)) {
        vecs.push_back(stars_.tangential(v, gradients_[comps[c]].per_triangle[t]));
        owner.push_back(c);
        max_norm = std::max(max_norm, detail::norm(vecs.back()));
      }
    if (vecs.empty()) return {HullTest{false, {}, kInfinity}, std::vector<double>(comps.size(), 0.0)};
    auto test = convex_hull_contains_zero(vecs, tau_0_rel * (1.0 + max_norm));
    std::vector<double> per_component(comps.size(), 0.0);
    for (std::size_t i = 0; i < vecs.size(); ++i) per_component[owner[i]] += test.lambdas[i];
    return {std::move(test), std::move(per_component)};
  }

  std::vector<std::vector<VertexId>> special_sets(double tau_s) const {
    std::vector<std::vector<VertexId>> out;
    for (std::size_t j = 0; j < graph_->k(); ++j)
      out.push_back(special_points(*graph_, stars_, gradients_[j], tau_s));
    return out;
  }

 private:
  const SizeGraph* graph_;
  MeshStars stars_;
  std::vector<GradientField> gradients_;
};

/// (l,b)-pseudocritical vertices: with Phi_i = (phi_i - b_i)/l_i and F = max_i Phi_i,
/// the active set I_Q holds every i with F(Q) - Phi_i(Q) <= tau_I (1 + |F(Q)|)
/// and, when star_active is set, every i attaining the max at a neighbor of Q.
/// Q is flagged when 0 lies (within tolerance) in the convex hull of the
/// incident-triangle gradients of phi_i, i in I_Q.
inline PseudocriticalReport lb_pseudocritical(const MeshCalculus& calc, const AdmissiblePair& p,
                                              const CriticalTolerances& tol = {}) {
  const auto& g = calc.graph();
  require_dimension(g, p);
  const auto f = reduce_measuring(g, p);
  const std::size_t k = g.k();
  auto reduced = [&](VertexId v, std::size_t i) { return (g.value(v, i) - p.b()[i]) / p.l()[i]; };
  auto argmax = [&](VertexId v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < k; ++i)
      if (reduced(v, i) > reduced(v, best)) best = i;
    return best;
  };

  PseudocriticalReport report;
  std::vector<char> active(k);
  std::vector<std::size_t> comps;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    std::fill(active.begin(), active.end(), 0);
    for (std::size_t i = 0; i < k; ++i)
      if (f[v] - reduced(v, i) <= tol.tau_I * (1.0 + std::abs(f[v]))) active[i] = 1;
    if (tol.star_active)
      for (VertexId u : g.neighbors(v)) active[argmax(u)] = 1;
    comps.clear();
    for (std::size_t i = 0; i < k; ++i)
      if (active[i]) comps.push_back(i);
    auto [test, lambda] = calc.vertex_hull(v, comps, tol.tau_0);
    if (test.flag)
      report.pseudocritical.push_back({v, comps, std::move(lambda), test.residual, {f[v]}});
  }
  report.special = calc.special_sets(tol.tau_s);
  return report;
}

inline PseudocriticalReport lb_pseudocritical(const SizeGraph& g, const AdmissiblePair& p,
                                              const CriticalTolerances& tol = {}) {
  return lb_pseudocritical(MeshCalculus(g), p, tol);
}

/// Pseudocritical vertices of rho o phi: 0 lies in the convex hull of the
/// incident-triangle gradients of the components kept by rho.
inline PseudocriticalReport pseudocritical_projection(const MeshCalculus& calc,
                                                      const ProjectionIndex& rho,
                                                      const CriticalTolerances& tol = {}) {
  const auto& g = calc.graph();
  for (auto i : rho.indices())
    if (i >= g.k()) throw std::invalid_argument("projection index out of range");
  PseudocriticalReport report;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    auto [test, lambda] = calc.vertex_hull(v, rho.indices(), tol.tau_0);
    if (!test.flag) continue;
    Vector value;
    for (auto i : rho.indices()) value.push_back(g.value(v, i));
    report.pseudocritical.push_back({v, rho.indices(), std::move(lambda), test.residual, value});
  }
  report.special = calc.special_sets(tol.tau_s);
  return report;
}

inline PseudocriticalReport pseudocritical_projection(const SizeGraph& g, const ProjectionIndex& rho,
                                                      const CriticalTolerances& tol = {}) {
  return pseudocritical_projection(MeshCalculus(g), rho, tol);
}

inline nlohmann::json to_json(const PseudocriticalReport& r) {
  auto pcs = nlohmann::json::array();
  for (const auto& w : r.pseudocritical) {
    nlohmann::json wj;
    wj["vertex"] = w.vertex;
    wj["I"] = w.active;
    wj["lambda"] = w.lambda;
    wj["residual"] = w.residual;
    if (w.value.size() == 1)
      wj["value"] = w.value.front();
    else
      wj["value"] = w.value;
    pcs.push_back(std::move(wj));
  }
  nlohmann::json special = nlohmann::json::object();
  for (std::size_t j = 0; j < r.special.size(); ++j) special[std::to_string(j)] = r.special[j];
  return nlohmann::json{{"pseudocritical", std::move(pcs)}, {"special", std::move(special)}};
}

// ---------------------------------------------------------------------------
// Discontinuities of the size function on a half-plane

struct GridSpec {
  double s_min = 0.0, s_max = 1.0;
  double t_min = 0.0, t_max = 1.0;
  std::size_t n = 100;
};

/// Lattice edge midpoints (s, t) across which the size function changes.
struct DiscontinuityCloud {
  std::vector<std::array<double, 2>> points;
  GridSpec grid;
};

/// Samples the size function encoded by `series` on an n x n lattice over
/// grid's ranges (only nodes with s < t) and emits the midpoint of every
/// lattice edge whose end values differ.
inline DiscontinuityCloud discontinuity_cloud(const FormalSeries& series, const GridSpec& grid) {
  if (grid.n < 2) throw std::invalid_argument("grid needs at least 2 nodes per axis");
  if (!(grid.s_min < grid.s_max) || !(grid.t_min < grid.t_max))
    throw std::invalid_argument("grid ranges must be nonempty");
  const std::size_t n = grid.n;
  auto s_at = [&](std::size_t i) {
    return grid.s_min + (grid.s_max - grid.s_min) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  auto t_at = [&](std::size_t j) {
    return grid.t_min + (grid.t_max - grid.t_min) * static_cast<double>(j) / static_cast<double>(n - 1);
  };
  constexpr std::size_t kInvalid = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> val(n * n, kInvalid);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (s_at(i) < t_at(j)) {
        val[i * n + j] = evaluate_from_series(series, s_at(i), t_at(j));
        any = true;
      }
  if (!any) throw std::invalid_argument("grid has no node with s < t");

  DiscontinuityCloud cloud;
  cloud.grid = grid;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto here = val[i * n + j];
      if (here == kInvalid) continue;
      if (i + 1 < n && val[(i + 1) * n + j] != kInvalid && val[(i + 1) * n + j] != here)
        cloud.points.push_back({(s_at(i) + s_at(i + 1)) / 2.0, t_at(j)});
      if (j + 1 < n && val[i * n + j + 1] != kInvalid && val[i * n + j + 1] != here)
        cloud.points.push_back({s_at(i), (t_at(j) + t_at(j + 1)) / 2.0});
    }
  return cloud;
}

inline DiscontinuityCloud discontinuity_cloud(const SizeGraph& g, const AdmissiblePair& p,
                                              const GridSpec& grid) {
  return discontinuity_cloud(cornerpoints(g, reduce_measuring(g, p)), grid);
}

/// Symmetric Hausdorff distance between point clouds in the (s, t) plane;
/// 0 if both are empty and +inf if exactly one is.
inline double hausdorff_distance(std::span<const std::array<double, 2>> a,
                                 std::span<const std::array<double, 2>> b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return kInfinity;
  auto directed = [](std::span<const std::array<double, 2>> from,
                     std::span<const std::array<double, 2>> to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = kInfinity;
      for (const auto& q : to) {
        const double d = std::hypot(p[0] - q[0], p[1] - q[1]);
        if (d < best) {
          best = d;
          if (best <= worst) break;
        }
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

/// Common lattice for two reduced functions: both axes span the union of
/// their value ranges widened by 10% on each side.
inline GridSpec shared_grid(const ScalarField& f1, const ScalarField& f2, std::size_t n) {
  const double lo = std::min(f1.min(), f2.min());
  const double hi = std::max(f1.max(), f2.max());
  const double margin = 0.1 * (hi - lo) + 1e-6;
  return {lo - margin, hi + margin, lo - margin, hi + margin, n};
}

/// Pseudodistance between size functions: maximum over the given half-planes
/// of the Hausdorff distance between their discontinuity clouds. When `grid`
/// is not supplied each half-plane uses shared_grid(F1, F2, n_grid).
inline double hausdorff_dd(const SizeGraph& g1, const SizeGraph& g2,
                           std::span<const AdmissiblePair> pairs, std::size_t n_grid = 200,
                           std::optional<GridSpec> grid = std::nullopt) {
  if (g1.k() != g2.k()) throw std::invalid_argument("dimension mismatch between graphs");
  if (pairs.empty()) throw std::invalid_argument("hausdorff_dd requires at least one pair");
  double worst = 0.0;
  for (const auto& p : pairs) {
    const auto f1 = reduce_measuring(g1, p);
    const auto f2 = reduce_measuring(g2, p);
    const auto lattice = grid ? *grid : shared_grid(f1, f2, n_grid);
    const auto c1 = discontinuity_cloud(cornerpoints(g1, f1), lattice);
    const auto c2 = discontinuity_cloud(cornerpoints(g2, f2), lattice);
    worst = std::max(worst, hausdorff_distance(c1.points, c2.points));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Localization of cornerpoint coordinates

struct CoordinateCheck {
  double value = 0.0;
  std::size_t entry = 0;       // index into the series
  bool is_birth = true;        // abscissa (birth) or ordinate (death)
  double distance = kInfinity; // to the nearest pseudocritical or special F-value
  std::optional<std::vector<std::size_t>> projection;  // rho explaining s*l + b
  bool explained = false;
};

struct LocalizationReport {
  AdmissiblePair pair;
  FormalSeries series;
  PseudocriticalReport pseudo;
  std::vector<CoordinateCheck> coordinates;

  std::vector<double> unexplained() const {
    std::vector<double> out;
    for (const auto& c : coordinates)
      if (!c.explained) out.push_back(c.value);
    return out;
  }
  bool all_explained() const {
    return std::all_of(coordinates.begin(), coordinates.end(),
                       [](const CoordinateCheck& c) { return c.explained; });
  }
};

/// Per-graph state for localization checks over many half-planes: gradients,
/// special sets, and the pseudocritical vertices of every projection rho o phi.
class LocalizationContext {
 public:
  static constexpr std::size_t kMaxArity = 8;

  LocalizationContext(const SizeGraph& g, CriticalTolerances tol)
      : calc_(g), tol_(tol), special_(calc_.special_sets(tol.tau_s)) {
    if (g.k() > kMaxArity) throw std::invalid_argument("projection search supports k <= 8");
    const std::uint32_t masks = (1u << g.k()) - 1u;
    for (std::uint32_t mask = 1; mask <= masks; ++mask) {
      const auto rho = ProjectionIndex::from_mask(mask, g.k());
      std::vector<VertexId> candidates;
      for (const auto& w : pseudocritical_projection(calc_, rho, tol_).pseudocritical)
        candidates.push_back(w.vertex);
      for (auto j : rho.indices())
        candidates.insert(candidates.end(), special_[j].begin(), special_[j].end());
      std::sort(candidates.begin(), candidates.end());
      candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
      projections_.push_back({rho, std::move(candidates)});
    }
  }

  const MeshCalculus& calculus() const { return calc_; }
  const CriticalTolerances& tolerances() const { return tol_; }
  const std::vector<std::vector<VertexId>>& special() const { return special_; }

  /// Smallest rho (in mask order) with a pseudocritical or special vertex Q of
  /// rho o phi such that |phi_i(Q) - x_i| <= tol for every kept i.
  std::optional<std::vector<std::size_t>> explaining_projection(std::span<const double> x,
                                                                double tol) const {
    const auto& g = calc_.graph();
    for (const auto& [rho, candidates] : projections_)
      for (auto v : candidates) {
        bool close = true;
        for (auto i : rho.indices()) close = close && std::abs(g.value(v, i) - x[i]) <= tol;
        if (close) return rho.indices();
      }
    return std::nullopt;
  }

 private:
  struct Projection {
    ProjectionIndex rho;
    std::vector<VertexId> candidates;
  };
  MeshCalculus calc_;
  CriticalTolerances tol_;
  std::vector<std::vector<VertexId>> special_;
  std::vector<Projection> projections_;
};

/// Checks every finite cornerpoint coordinate v of the size function of
/// F_(l,b) on two levels: v must lie within tau_match of an (l,b)-pseudocritical
/// value or of the F-value of a special vertex, and v*l + b must be explained by
/// some projection rho (see LocalizationContext::explaining_projection).
inline LocalizationReport check_discontinuity_localization(const LocalizationContext& ctx,
                                                           const AdmissiblePair& p,
                                                           double tau_match) {
  const auto& g = ctx.calculus().graph();
  require_dimension(g, p);
  if (!(tau_match >= 0.0)) throw std::invalid_argument("tau_match must be non-negative");
  const auto f = reduce_measuring(g, p);
  LocalizationReport report{p, cornerpoints(g, f), lb_pseudocritical(ctx.calculus(), p, ctx.tolerances()),
                            {}};

  std::vector<double> values;
  for (const auto& w : report.pseudo.pseudocritical) values.push_back(w.value.front());
  for (const auto& set : report.pseudo.special)
    for (auto v : set) values.push_back(f[v]);
  std::sort(values.begin(), values.end());

  auto nearest = [&](double v) {
    double best = kInfinity;
    auto it = std::lower_bound(values.begin(), values.end(), v);
    if (it != values.end()) best = std::min(best, *it - v);
    if (it != values.begin()) best = std::min(best, v - *std::prev(it));
    return best;
  };
  auto check = [&](double v, std::size_t entry, bool birth) {
    CoordinateCheck c;
    c.value = v;
    c.entry = entry;
    c.is_birth = birth;
    c.distance = nearest(v);
    Vector x(g.k());
    for (std::size_t i = 0; i < g.k(); ++i) x[i] = v * p.l()[i] + p.b()[i];
    c.projection = ctx.explaining_projection(x, tau_match);
    c.explained = c.distance <= tau_match && c.projection.has_value();
    report.coordinates.push_back(std::move(c));
  };
  for (std::size_t e = 0; e < report.series.points().size(); ++e) {
    const auto& cp = report.series.points()[e];
    check(cp.x, e, true);
    if (!cp.is_cornerline()) check(cp.y, e, false);
  }
  return report;
}

inline LocalizationReport check_discontinuity_localization(const SizeGraph& g,
                                                           const AdmissiblePair& p,
                                                           double tau_match,
                                                           const CriticalTolerances& tol = {}) {
  return check_discontinuity_localization(LocalizationContext(g, tol), p, tau_match);
}

inline nlohmann::json to_json(const LocalizationReport& r) {
  nlohmann::json j;
  j["pair"] = to_json(r.pair);
  j["series"] = to_json(r.series);
  auto coords = nlohmann::json::array();
  for (const auto& c : r.coordinates) {
    nlohmann::json cj;
    cj["value"] = c.value;
    cj["entry"] = c.entry;
    cj["role"] = c.is_birth ? "birth" : "death";
    cj["distance"] = std::isinf(c.distance) ? nlohmann::json("inf") : nlohmann::json(c.distance);
    cj["projection"] = c.projection ? nlohmann::json(*c.projection) : nlohmann::json(nullptr);
    cj["explained"] = c.explained;
    coords.push_back(std::move(cj));
  }
  j["coordinates"] = std::move(coords);
  j["unexplained"] = r.unexplained();
  const auto pseudo = to_json(r.pseudo);
  j["pseudocritical"] = pseudo["pseudocritical"];
  j["special"] = pseudo["special"];
  return j;
}

}  // namespace sizefn
