#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace sizefn::detail {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Solves the (m+1)x(m+1) system [G 1; 1^T 0][mu; nu] = [0; 1] giving the
// point of minimum norm on the affine hull of the selected points. Returns
// false when the points are affinely dependent (numerically).
inline bool affine_min_norm(std::span<const Vec3> pts, std::span<const std::size_t> sel,
                            std::vector<double>& mu) {
  const std::size_t m = sel.size();
  const std::size_t n = m + 1;
  std::vector<double> a(n * (n + 1), 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * (n + 1) + c]; };
  double scale2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) at(i, j) = dot(pts[sel[i]], pts[sel[j]]);
    scale2 = std::max(scale2, at(i, i));
    at(i, m) = 1.0;
    at(m, i) = 1.0;
  }
  at(m, n) = 1.0;
  const double tiny = 1e-14 * std::max(scale2, 1e-300);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(at(r, c)) > std::abs(at(piv, c))) piv = r;
    if (std::abs(at(piv, c)) <= tiny) return false;
    if (piv != c)
      for (std::size_t k = 0; k <= n; ++k) std::swap(at(c, k), at(piv, k));
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = at(r, c) / at(c, c);
      if (f == 0.0) continue;
      for (std::size_t k = c; k <= n; ++k) at(r, k) -= f * at(c, k);
    }
  }
  mu.resize(m);
  for (std::size_t i = 0; i < m; ++i) mu[i] = at(i, n) / at(i, i);
  return true;
}

struct MinNormResult {
  std::vector<double> weights;  // convex coefficients, one per input point
  Vec3 point{0.0, 0.0, 0.0};
  double residual = 0.0;
  std::size_t iterations = 0;
};

// Wolfe's minimum-norm-point algorithm on the convex hull of `pts`.
// Finite active-set method: major cycles add the most violating point,
// minor cycles step back toward the current simplex when the affine
// minimizer leaves it.
inline MinNormResult min_norm_point(std::span<const Vec3> pts, std::size_t max_iterations = 10000) {
  MinNormResult out;
  const std::size_t n = pts.size();
  out.weights.assign(n, 0.0);
  if (n == 0) return out;

  double max_norm2 = 0.0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = dot(pts[i], pts[i]);
    max_norm2 = std::max(max_norm2, q);
    if (q < dot(pts[start], pts[start])) start = i;
  }
  const double tol_stop = 1e-12 * std::max(max_norm2, 1e-300);
  const double tol_weight = 1e-12;

  std::vector<std::size_t> active{start};
  std::vector<double> w{1.0};
  Vec3 x = pts[start];
  std::vector<double> mu;
  std::size_t last_added = n;

  auto recompute = [&] {
    x = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < active.size(); ++i) x = add(x, scale(pts[active[i]], w[i]));
  };

  for (std::size_t it = 0; it < max_iterations; ++it) {
    out.iterations = it + 1;
    const double xx = dot(x, x);
    if (xx <= tol_stop) break;
    std::size_t j = 0;
    double best = dot(x, pts[0]);
    for (std::size_t i = 1; i < n; ++i) {
      const double d = dot(x, pts[i]);
      if (d < best) {
        best = d;
        j = i;
      }
    }
    if (xx - best <= tol_stop) break;
    if (j == last_added || std::find(active.begin(), active.end(), j) != active.end()) break;
    last_added = j;
    active.push_back(j);
    w.push_back(0.0);

    for (std::size_t minor = 0; minor < max_iterations; ++minor) {
      if (!affine_min_norm(pts, active, mu)) {
        // Dependent set: drop the newest point and stop improving.
        active.pop_back();
        w.pop_back();
        recompute();
        it = max_iterations;
        break;
      }
      bool interior = true;
      for (double v : mu) interior = interior && v > tol_weight;
      if (interior) {
        w = mu;
        recompute();
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < active.size(); ++i)
        if (mu[i] <= tol_weight) theta = std::min(theta, w[i] / (w[i] - mu[i]));
      for (std::size_t i = 0; i < active.size(); ++i) w[i] = theta * mu[i] + (1.0 - theta) * w[i];
      std::size_t keep = 0;
      for (std::size_t i = 0; i < active.size(); ++i) {
        if (w[i] > tol_weight) {
          active[keep] = active[i];
          w[keep] = w[i];
          ++keep;
        }
      }
      active.resize(keep);
      w.resize(keep);
      double total = 0.0;
      for (double v : w) total += v;
      for (double& v : w) v /= total;
      recompute();
    }
  }

  double total = 0.0;
  for (double v : w) total += v;
  for (std::size_t i = 0; i < active.size(); ++i) out.weights[active[i]] = w[i] / total;
  out.point = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) out.point = add(out.point, scale(pts[i], out.weights[i]));
  out.residual = norm(out.point);
  return out;
}

}  // namespace sizefn::detail
