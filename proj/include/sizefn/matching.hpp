#pragma once

// Matching distance between formal series: bottleneck cost of the best
// bijection between the two cornerpoint multisets, each augmented with the
// diagonal at infinite multiplicity, under the pseudometric delta.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sizefn/sublevel.hpp"

namespace sizefn {

/// A real number or +inf. Differences follow the conventions
/// inf - y = y - inf = inf for finite y, inf - inf = 0, inf / 2 = inf.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT: implicit by intent
  static constexpr ExtendedReal infinity() { return ExtendedReal(kInfinity); }

  constexpr double value() const { return value_; }
  bool is_infinite() const { return std::isinf(value_); }

  constexpr ExtendedReal half() const { return ExtendedReal(value_ / 2.0); }

  /// |a - b| under the conventions above.
  static ExtendedReal abs_diff(ExtendedReal a, ExtendedReal b) {
    if (a.is_infinite() && b.is_infinite()) return 0.0;
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return std::abs(a.value_ - b.value_);
  }
  /// b - a with the same conventions.
  static ExtendedReal diff(ExtendedReal b, ExtendedReal a) {
    if (a.is_infinite() && b.is_infinite()) return 0.0;
    if (b.is_infinite() || a.is_infinite()) return infinity();
    return b.value_ - a.value_;
  }

  friend constexpr auto operator<=>(ExtendedReal a, ExtendedReal b) { return a.value_ <=> b.value_; }
  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) { return a.value_ == b.value_; }

 private:
  double value_ = 0.0;
};

inline ExtendedReal max(ExtendedReal a, ExtendedReal b) { return a < b ? b : a; }
inline ExtendedReal min(ExtendedReal a, ExtendedReal b) { return b < a ? b : a; }

/// delta((x,y),(x',y')) = min{ max{|x-x'|, |y-y'|}, max{(y-x)/2, (y'-x')/2} }.
/// Points on the diagonal (x == y) are allowed.
inline ExtendedReal delta(const Cornerpoint& p, const Cornerpoint& q) {
  const auto move = max(ExtendedReal::abs_diff(p.x, q.x), ExtendedReal::abs_diff(p.y, q.y));
  const auto both_to_diagonal =
      max(ExtendedReal::diff(p.y, p.x).half(), ExtendedReal::diff(q.y, q.x).half());
  return min(move, both_to_diagonal);
}

/// Cost of sending a proper point to the diagonal.
inline double diagonal_cost(const Cornerpoint& p) { return (p.y - p.x) / 2.0; }

/// One row per unit of multiplicity. `first`/`second` index entries of the
/// respective series; nullopt stands for the diagonal.
using MatchingPair = std::pair<std::optional<std::size_t>, std::optional<std::size_t>>;

struct MatchingResult {
  ExtendedReal distance;
  std::vector<MatchingPair> matching;  // empty when the distance is infinite
};

namespace detail {

struct ExpandedPoint {
  std::size_t entry;
  Cornerpoint point;
};

inline void expand(const FormalSeries& s, std::vector<ExpandedPoint>& proper,
                   std::vector<ExpandedPoint>& lines) {
  for (std::size_t e = 0; e < s.points().size(); ++e) {
    const auto& p = s.points()[e];
    auto& dst = p.is_cornerline() ? lines : proper;
    for (std::uint32_t m = 0; m < p.multiplicity; ++m) dst.push_back({e, p});
  }
}

// Hopcroft-Karp maximum matching on an explicit bipartite adjacency.
class BipartiteMatcher {
 public:
  BipartiteMatcher(std::size_t left, std::size_t right)
      : adj_(left), match_left_(left), match_right_(right), dist_(left) {}

  void add_edge(std::size_t u, std::size_t v) { adj_[u].push_back(static_cast<std::uint32_t>(v)); }

  std::size_t solve() {
    std::fill(match_left_.begin(), match_left_.end(), kFree);
    std::fill(match_right_.begin(), match_right_.end(), kFree);
    std::size_t size = 0;
    while (bfs())
      for (std::size_t u = 0; u < adj_.size(); ++u)
        if (match_left_[u] == kFree && dfs(static_cast<std::uint32_t>(u))) ++size;
    return size;
  }

  std::uint32_t partner_of_left(std::size_t u) const { return match_left_[u]; }
  static constexpr std::uint32_t kFree = std::numeric_limits<std::uint32_t>::max();

 private:
  bool bfs() {
    std::queue<std::uint32_t> q;
    bool reachable_free = false;
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      if (match_left_[u] == kFree) {
        dist_[u] = 0;
        q.push(static_cast<std::uint32_t>(u));
      } else {
        dist_[u] = kFree;
      }
    }
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (auto v : adj_[u]) {
        const auto w = match_right_[v];
        if (w == kFree) {
          reachable_free = true;
        } else if (dist_[w] == kFree) {
          dist_[w] = dist_[u] + 1;
          q.push(w);
        }
      }
    }
    return reachable_free;
  }

  bool dfs(std::uint32_t u) {
    for (auto v : adj_[u]) {
      const auto w = match_right_[v];
      if (w == kFree || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_left_[u] = v;
        match_right_[v] = u;
        return true;
      }
    }
    dist_[u] = kFree;
    return false;
  }

  std::vector<std::vector<std::uint32_t>> adj_;
  std::vector<std::uint32_t> match_left_;
  std::vector<std::uint32_t> match_right_;
  std::vector<std::uint32_t> dist_;
};

}  // namespace detail

/// Bottleneck matching distance with an optimal matching as witness.
///
/// Cornerlines can only be matched to cornerlines, so differing cornerline
/// totals give +inf; otherwise they are paired in abscissa order. Proper
/// points (multiplicities expanded) are matched by binary search over the
/// finite set of candidate costs {delta(p, q)} and {(y - x)/2}, testing each
/// threshold for a perfect matching of P1 + diag(P2) against P2 + diag(P1).
inline MatchingResult matching_distance_with_witness(const FormalSeries& s1, const FormalSeries& s2,
                                                     std::size_t max_expanded = 10000) {
  std::vector<detail::ExpandedPoint> p1, l1, p2, l2;
  detail::expand(s1, p1, l1);
  detail::expand(s2, p2, l2);
  if (p1.size() + p2.size() + l1.size() + l2.size() > max_expanded)
    throw std::length_error("matching_distance: expanded series exceed the size guard");

  MatchingResult result;
  if (l1.size() != l2.size()) {
    result.distance = ExtendedReal::infinity();
    return result;
  }
  auto by_abscissa = [](const detail::ExpandedPoint& a, const detail::ExpandedPoint& b) {
    return a.point.x < b.point.x || (a.point.x == b.point.x && a.entry < b.entry);
  };
  std::sort(l1.begin(), l1.end(), by_abscissa);
  std::sort(l2.begin(), l2.end(), by_abscissa);
  double line_cost = 0.0;
  for (std::size_t i = 0; i < l1.size(); ++i) {
    line_cost = std::max(line_cost, std::abs(l1[i].point.x - l2[i].point.x));
    result.matching.push_back({l1[i].entry, l2[i].entry});
  }

  const std::size_t n1 = p1.size(), n2 = p2.size();
  std::vector<double> cost(n1 * n2);
  std::vector<double> candidates;
  candidates.reserve(n1 * n2 + n1 + n2 + 1);
  candidates.push_back(0.0);
  for (std::size_t i = 0; i < n1; ++i) {
    candidates.push_back(diagonal_cost(p1[i].point));
    for (std::size_t j = 0; j < n2; ++j) {
      cost[i * n2 + j] = delta(p1[i].point, p2[j].point).value();
      candidates.push_back(cost[i * n2 + j]);
    }
  }
  for (const auto& q : p2) candidates.push_back(diagonal_cost(q.point));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  auto build = [&](double r) {
    // Left: p1[0..n1) then diagonal copies of p2; right: p2[0..n2) then diagonal copies of p1.
    detail::BipartiteMatcher m(n1 + n2, n2 + n1);
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j)
        if (cost[i * n2 + j] <= r) m.add_edge(i, j);
      if (diagonal_cost(p1[i].point) <= r) m.add_edge(i, n2 + i);
    }
    for (std::size_t j = 0; j < n2; ++j) {
      if (diagonal_cost(p2[j].point) <= r) m.add_edge(n1 + j, j);
      for (std::size_t i = 0; i < n1; ++i) m.add_edge(n1 + j, n2 + i);
    }
    return m;
  };

  std::size_t lo = 0, hi = candidates.size() - 1;  // the largest candidate is always feasible
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    auto m = build(candidates[mid]);
    if (m.solve() == n1 + n2)
      hi = mid;
    else
      lo = mid + 1;
  }
  const double proper_cost = candidates[lo];
  auto m = build(proper_cost);
  m.solve();
  for (std::size_t i = 0; i < n1; ++i) {
    const auto v = m.partner_of_left(i);
    if (v < n2)
      result.matching.push_back({p1[i].entry, p2[v].entry});
    else
      result.matching.push_back({p1[i].entry, std::nullopt});
  }
  for (std::size_t j = 0; j < n2; ++j)
    if (m.partner_of_left(n1 + j) == j) result.matching.push_back({std::nullopt, p2[j].entry});

  result.distance = std::max(line_cost, proper_cost);
  return result;
}

inline ExtendedReal matching_distance(const FormalSeries& s1, const FormalSeries& s2) {
  return matching_distance_with_witness(s1, s2).distance;
}

/// Exhaustive matching distance for small series: every assignment of the
/// proper points of s1 to distinct proper points of s2 or to the diagonal, and
/// every pairing of cornerlines.
inline ExtendedReal matching_distance_bruteforce(const FormalSeries& s1, const FormalSeries& s2) {
  std::vector<detail::ExpandedPoint> p1, l1, p2, l2;
  detail::expand(s1, p1, l1);
  detail::expand(s2, p2, l2);
  if (p1.size() > 6 || p2.size() > 6 || l1.size() > 6 || l2.size() > 6)
    throw std::length_error("matching_distance_bruteforce: at most 6 points of each kind per side");
  if (l1.size() != l2.size()) return ExtendedReal::infinity();

  std::vector<std::size_t> perm(l2.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  ExtendedReal best_lines = ExtendedReal::infinity();
  do {
    ExtendedReal worst = 0.0;
    for (std::size_t i = 0; i < l1.size(); ++i)
      worst = max(worst, delta(l1[i].point, l2[perm[i]].point));
    best_lines = min(best_lines, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<char> used(p2.size(), 0);
  ExtendedReal best_proper = ExtendedReal::infinity();
  auto search = [&](auto&& self, std::size_t i, ExtendedReal worst) -> void {
    if (!(worst < best_proper)) return;
    if (i == p1.size()) {
      for (std::size_t j = 0; j < p2.size(); ++j)
        if (!used[j]) worst = max(worst, diagonal_cost(p2[j].point));
      best_proper = min(best_proper, worst);
      return;
    }
    self(self, i + 1, max(worst, diagonal_cost(p1[i].point)));
    for (std::size_t j = 0; j < p2.size(); ++j) {
      if (used[j]) continue;
      used[j] = 1;
      self(self, i + 1, max(worst, delta(p1[i].point, p2[j].point)));
      used[j] = 0;
    }
  };
  search(search, 0, 0.0);
  return max(best_lines, best_proper);
}

// ---------------------------------------------------------------------------
// Distance JSON: {"d_match": float | "inf", "matching": [[p, q | "diag"], ...]}

inline nlohmann::json extended_to_json(ExtendedReal v) {
  if (v.is_infinite()) return "inf";
  return v.value();
}

inline nlohmann::json to_json(const MatchingResult& r) {
  auto rows = nlohmann::json::array();
  for (const auto& [a, b] : r.matching) {
    nlohmann::json row = nlohmann::json::array();
    row.push_back(a ? nlohmann::json(*a) : nlohmann::json("diag"));
    row.push_back(b ? nlohmann::json(*b) : nlohmann::json("diag"));
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"d_match", extended_to_json(r.distance)}, {"matching", std::move(rows)}};
}

}  // namespace sizefn
