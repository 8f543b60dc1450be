#pragma once

// The foliation of {x < y} in R^k x R^k by half-planes indexed by admissible
// pairs (l, b), and the reduction of a k-dimensional size function to the 1D
// size function of F(P) = max_i (phi_i(P) - b_i) / l_i on each half-plane.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sizefn/detail/union_find.hpp"
#include "sizefn/errors.hpp"
#include "sizefn/size_pair.hpp"
#include "sizefn/sublevel.hpp"

namespace sizefn {

using Vector = std::vector<double>;

/// Direction l (positive entries, unit Euclidean norm) and offset b (zero sum).
class AdmissiblePair {
 public:
  static constexpr double kTolerance = 1e-12;

  AdmissiblePair(Vector l, Vector b) : l_(std::move(l)), b_(std::move(b)) {
    if (l_.empty() || l_.size() != b_.size())
      throw std::invalid_argument("admissible pair: l and b must be nonempty with equal length");
    double norm2 = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < l_.size(); ++i) {
      if (!(l_[i] > 0.0) || !std::isfinite(l_[i]))
        throw std::invalid_argument("admissible pair: non-positive component in l");
      if (!std::isfinite(b_[i])) throw std::invalid_argument("admissible pair: non-finite b");
      norm2 += l_[i] * l_[i];
      sum += b_[i];
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > kTolerance)
      throw std::invalid_argument("admissible pair: l is not a unit vector");
    if (std::abs(sum) > kTolerance) throw std::invalid_argument("admissible pair: sum of b is not 0");
  }

  std::size_t dimension() const { return l_.size(); }
  const Vector& l() const { return l_; }
  const Vector& b() const { return b_; }
  double min_l() const { return *std::min_element(l_.begin(), l_.end()); }

 private:
  Vector l_;
  Vector b_;
};

/// Normalizes l_raw to unit length and removes the mean of b_raw.
inline AdmissiblePair make_admissible(std::span<const double> l_raw, std::span<const double> b_raw) {
  if (l_raw.empty() || l_raw.size() != b_raw.size())
    throw std::invalid_argument("make_admissible: l and b must be nonempty with equal length");
  double norm2 = 0.0;
  for (double v : l_raw) {
    if (!(v > 0.0)) throw std::invalid_argument("make_admissible: non-positive component in l");
    norm2 += v * v;
  }
  const double norm = std::sqrt(norm2);
  double mean = 0.0;
  for (double v : b_raw) mean += v;
  mean /= static_cast<double>(b_raw.size());
  Vector l(l_raw.size()), b(b_raw.size());
  for (std::size_t i = 0; i < l.size(); ++i) {
    l[i] = l_raw[i] / norm;
    b[i] = b_raw[i] - mean;
  }
  return AdmissiblePair(std::move(l), std::move(b));
}

inline AdmissiblePair make_admissible(std::initializer_list<double> l_raw,
                                      std::initializer_list<double> b_raw) {
  return make_admissible(std::span<const double>(l_raw.begin(), l_raw.size()),
                         std::span<const double>(b_raw.begin(), b_raw.size()));
}

/// The only admissible pair for k = 1.
inline AdmissiblePair identity_pair() { return AdmissiblePair({1.0}, {0.0}); }

/// A point (s, t), s < t, of the half-plane of `pair`.
struct PlanePoint {
  PlanePoint(AdmissiblePair p, double s_, double t_) : pair(std::move(p)), s(s_), t(t_) {
    if (!(s < t)) throw std::invalid_argument("plane point requires s < t");
  }
  AdmissiblePair pair;
  double s;
  double t;
};

/// (x, y) = (s l + b, t l + b).
inline std::pair<Vector, Vector> plane_point(const PlanePoint& pp) {
  const auto& l = pp.pair.l();
  const auto& b = pp.pair.b();
  Vector x(l.size()), y(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) {
    x[i] = pp.s * l[i] + b[i];
    y[i] = pp.t * l[i] + b[i];
  }
  return {std::move(x), std::move(y)};
}

inline bool strictly_below(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] < y[i])) return false;
  return true;
}

/// The unique half-plane containing (x, y), x < y componentwise, and the
/// coordinates of (x, y) in it.
inline PlanePoint locate_half_plane(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || !strictly_below(x, y))
    throw std::invalid_argument("locate_half_plane requires x < y componentwise");
  const std::size_t k = x.size();
  Vector d(k);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    d[i] = y[i] - x[i];
    norm2 += d[i] * d[i];
  }
  const double norm = std::sqrt(norm2);
  Vector l(k);
  double sum_l = 0.0, sum_x = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    l[i] = d[i] / norm;
    sum_l += l[i];
    sum_x += x[i];
  }
  const double s = sum_x / sum_l;
  Vector b(k);
  for (std::size_t i = 0; i < k; ++i) b[i] = x[i] - s * l[i];
  // Re-center to cancel rounding in the zero-sum constraint.
  double mean = 0.0;
  for (double v : b) mean += v;
  mean /= static_cast<double>(k);
  for (double& v : b) v -= mean;
  return PlanePoint(AdmissiblePair(std::move(l), std::move(b)), s, s + norm);
}

inline void require_dimension(const SizeGraph& g, const AdmissiblePair& p) {
  if (g.k() != p.dimension())
    throw std::invalid_argument("dimension mismatch: graph has k=" + std::to_string(g.k()) +
                                ", admissible pair has k=" + std::to_string(p.dimension()));
}

/// Reduced measuring function F(P) = max_i (phi_i(P) - b_i) / l_i.
inline ScalarField reduce_measuring(const SizeGraph& g, const AdmissiblePair& p) {
  require_dimension(g, p);
  std::vector<double> out(g.vertex_count());
  for (VertexId v = 0; v < out.size(); ++v) {
    double best = -kInfinity;
    for (std::size_t i = 0; i < g.k(); ++i)
      best = std::max(best, (g.value(v, i) - p.b()[i]) / p.l()[i]);
    out[v] = best;
  }
  return ScalarField(std::move(out));
}

/// k-dimensional size function evaluated directly: components of the
/// y-sublevel subgraph (phi <= y componentwise) meeting the x-sublevel set.
inline std::size_t size_function_multi(const SizeGraph& g, std::span<const double> x,
                                       std::span<const double> y) {
  if (x.size() != g.k() || y.size() != g.k())
    throw std::invalid_argument("size_function_multi: query dimension differs from k");
  if (!strictly_below(x, y)) throw std::invalid_argument("size_function_multi requires x < y");
  const auto n = static_cast<VertexId>(g.vertex_count());
  auto below = [&](VertexId v, std::span<const double> level) {
    for (std::size_t i = 0; i < g.k(); ++i)
      if (!(g.value(v, i) <= level[i])) return false;
    return true;
  };
  std::vector<char> in_y(n);
  for (VertexId v = 0; v < n; ++v) in_y[v] = below(v, y);
  detail::UnionFind uf(n);
  for (VertexId v = 0; v < n; ++v) {
    if (!in_y[v]) continue;
    for (VertexId u : g.neighbors(v))
      if (u < v && in_y[u]) uf.unite(u, v);
  }
  std::vector<char> counted(n, 0);
  std::size_t count = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (!below(v, x)) continue;
    const auto r = uf.find(v);
    if (!counted[r]) {
      counted[r] = 1;
      ++count;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Power-mean approximations F_p of the reduced function

namespace detail {

inline double shifted_min(const SizeGraph& g, const AdmissiblePair& p) {
  double lo = kInfinity;
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    for (std::size_t i = 0; i < g.k(); ++i)
      lo = std::min(lo, (g.value(v, i) - p.b()[i]) / p.l()[i]);
  return lo;
}

}  // namespace detail

/// Default shift c = 1 + |min Phi|, so every Phi_i + c >= 1.
inline double default_fp_shift(const SizeGraph& g, const AdmissiblePair& p) {
  require_dimension(g, p);
  return 1.0 + std::abs(detail::shifted_min(g, p));
}

/// F_p = (sum_i (Phi_i + c)^p)^(1/p) - c with Phi_i = (phi_i - b_i) / l_i.
/// Evaluated as M * (sum_i ((Phi_i + c)/M)^p)^(1/p) - c, M = max_i (Phi_i + c),
/// so large p does not overflow.
inline ScalarField approx_Fp(const SizeGraph& g, const AdmissiblePair& p, int pexp, double c) {
  require_dimension(g, p);
  if (pexp < 1) throw std::invalid_argument("approx_Fp: exponent must be >= 1");
  if (!(detail::shifted_min(g, p) + c > 0.0))
    throw std::invalid_argument("approx_Fp: c must exceed -min Phi_i");
  std::vector<double> out(g.vertex_count());
  std::vector<double> shifted(g.k());
  for (VertexId v = 0; v < out.size(); ++v) {
    double top = 0.0;
    for (std::size_t i = 0; i < g.k(); ++i) {
      shifted[i] = (g.value(v, i) - p.b()[i]) / p.l()[i] + c;
      top = std::max(top, shifted[i]);
    }
    double sum = 0.0;
    for (double s : shifted) sum += std::pow(s / top, pexp);
    out[v] = top * std::pow(sum, 1.0 / pexp) - c;
  }
  return ScalarField(std::move(out));
}

/// Per-vertex bound max_i(Phi_i + c) * (k^(1/p) - 1) on |F - F_p|.
inline ScalarField fp_error_bound(const SizeGraph& g, const AdmissiblePair& p, int pexp, double c) {
  require_dimension(g, p);
  const double factor = std::pow(static_cast<double>(g.k()), 1.0 / pexp) - 1.0;
  const auto f = reduce_measuring(g, p);
  std::vector<double> out(g.vertex_count());
  for (VertexId v = 0; v < out.size(); ++v) out[v] = (f[v] + c) * factor;
  return ScalarField(std::move(out));
}

// ---------------------------------------------------------------------------
// Sampling admissible pairs

enum class SampleStrategy { grid, random };

inline SampleStrategy parse_strategy(const std::string& s) {
  if (s == "grid") return SampleStrategy::grid;
  if (s == "random") return SampleStrategy::random;
  throw std::invalid_argument("unknown sampling strategy '" + s + "'");
}

/// Largest sup-norm of a measuring value; the default offset range for sampling.
inline double max_abs_value(const SizeGraph& g) {
  double m = 0.0;
  for (double v : g.all_values()) m = std::max(m, std::abs(v));
  return m;
}

/// n admissible pairs for arity k.
///
/// grid (k = 2 only): l = (cos theta, sin theta) with theta at the midpoints of
/// n_theta equal slices of (0, pi/2), b = (a, -a) with a on n_a evenly spaced
/// values of [-offset_range, offset_range] (n_a odd, so a = 0 is included);
/// n_a is the largest odd number <= sqrt(n), n_theta = ceil(n / n_a), and the
/// theta-major product is truncated to n.
///
/// random: l from positive uniform draws normalized, b from uniform draws on
/// [-offset_range, offset_range] de-meaned; fully determined by `seed`.
///
/// For k = 1 the set of admissible pairs is a single point and one pair is returned.
inline std::vector<AdmissiblePair> sample_admissible(std::size_t k, std::size_t n,
                                                     SampleStrategy strategy, std::uint64_t seed,
                                                     double offset_range = 1.0) {
  if (k < 1 || n < 1) throw std::invalid_argument("sample_admissible requires k >= 1 and n >= 1");
  if (k == 1) return {identity_pair()};
  std::vector<AdmissiblePair> out;
  out.reserve(n);
  if (strategy == SampleStrategy::grid) {
    if (k != 2) throw std::invalid_argument("grid sampling is defined for k = 2 only");
    std::size_t n_a = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (n_a * n_a > n) --n_a;
    if (n_a % 2 == 0) --n_a;
    n_a = std::max<std::size_t>(n_a, 1);
    const std::size_t n_theta = (n + n_a - 1) / n_a;
    for (std::size_t j = 0; j < n_theta && out.size() < n; ++j) {
      const double theta = (static_cast<double>(j) + 0.5) * std::numbers::pi / 2.0 /
                           static_cast<double>(n_theta);
      for (std::size_t m = 0; m < n_a && out.size() < n; ++m) {
        const double a = n_a == 1 ? 0.0
                                  : -offset_range + 2.0 * offset_range * static_cast<double>(m) /
                                                        static_cast<double>(n_a - 1);
        const double l_raw[2] = {std::cos(theta), std::sin(theta)};
        const double b_raw[2] = {a, -a};
        out.push_back(make_admissible(l_raw, b_raw));
      }
    }
    return out;
  }
  // Explicit 53-bit mapping keeps the draws identical across standard libraries.
  std::mt19937_64 gen(seed);
  auto unit = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  Vector l_raw(k), b_raw(k);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < k; ++i) {
      l_raw[i] = 0.05 + 0.95 * unit();
      b_raw[i] = offset_range * (2.0 * unit() - 1.0);
    }
    out.push_back(make_admissible(l_raw, b_raw));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Admissible-pair JSON: {"l": [...], "b": [...]}; lists are arrays of those.

inline nlohmann::json to_json(const AdmissiblePair& p) {
  return nlohmann::json{{"l", p.l()}, {"b", p.b()}};
}

inline AdmissiblePair pair_from_json(const nlohmann::json& j, const std::string& where = "pair") {
  if (!j.is_object() || !j.contains("l") || !j.contains("b") || !j["l"].is_array() ||
      !j["b"].is_array())
    throw ParseError(where + ": expected {\"l\": [...], \"b\": [...]}");
  Vector l, b;
  for (const auto& v : j["l"]) l.push_back(detail::json_number(v, where + ".l"));
  for (const auto& v : j["b"]) b.push_back(detail::json_number(v, where + ".b"));
  try {
    return make_admissible(l, b);
  } catch (const std::invalid_argument& e) {
    throw InvariantError(where + ": " + e.what());
  }
}

/// Accepts a single pair object or an array of them.
inline std::vector<AdmissiblePair> pairs_from_json(const nlohmann::json& doc) {
  std::vector<AdmissiblePair> out;
  if (doc.is_array()) {
    for (std::size_t i = 0; i < doc.size(); ++i)
      out.push_back(pair_from_json(doc[i], "pairs[" + std::to_string(i) + "]"));
  } else {
    out.push_back(pair_from_json(doc));
  }
  if (out.empty()) throw InvariantError("pair list is empty");
  return out;
}

inline std::vector<AdmissiblePair> load_pairs(const std::string& path) {
  const auto text = detail::read_text(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return pairs_from_json(doc);
}

inline nlohmann::json to_json(const std::vector<AdmissiblePair>& pairs) {
  auto arr = nlohmann::json::array();
  for (const auto& p : pairs) arr.push_back(to_json(p));
  return arr;
}

}  // namespace sizefn
