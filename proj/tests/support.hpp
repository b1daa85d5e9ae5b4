#ifndef ERMR_TESTS_SUPPORT_HPP
#define ERMR_TESTS_SUPPORT_HPP

// Test-side oracles. These deliberately avoid the library's own helpers so
// that a bug in ermr cannot hide behind an identical bug in the check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace support {

using Vec = std::vector<double>;

inline double ip(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Class scores s_j = <w_j, x>, j = 0..k-1, from a row-major flat W.
inline Vec class_scores(const Vec& flat, const Vec& x, int k) {
  const std::size_t d = x.size();
  Vec s(static_cast<std::size_t>(k), 0.0);
  for (int j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < d; ++i) s[static_cast<std::size_t>(j)] += flat[static_cast<std::size_t>(j) * d + i] * x[i];
  }
  return s;
}

// Multi-class 0/1 loss, argmax formulation: 0 only if y (1-based) strictly
// beats every other class.
inline int argmax_mcl_loss(const Vec& flat, const Vec& x, int y, int k) {
  const Vec s = class_scores(flat, x, k);
  for (int j = 0; j < k; ++j) {
    if (j != y - 1 && s[static_cast<std::size_t>(j)] >= s[static_cast<std::size_t>(y - 1)]) return 1;
  }
  return 0;
}

// Complementary label y: loss 1 when y is (weakly) the top-scoring class.
inline int argmax_complementary_loss(const Vec& flat, const Vec& x, int y, int k) {
  const Vec s = class_scores(flat, x, k);
  for (int j = 0; j < k; ++j) {
    if (j != y - 1 && s[static_cast<std::size_t>(j)] > s[static_cast<std::size_t>(y - 1)]) return 0;
  }
  return 1;
}

// Top-1 ranking loss: 0 only if the target strictly beats every competitor.
inline int ranking_loss(const Vec& w, const std::vector<Vec>& items, std::size_t target) {
  const double t = ip(w, items[target]);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i != target && ip(w, items[i]) >= t) return 1;
  }
  return 0;
}

// Minimises a convex function over the box [-radius, radius]^dim by nested
// golden-section search: the partial minimum over trailing coordinates of a
// convex function is convex in the leading ones, so each level is unimodal.
inline double nested_golden_min(const std::function<double(const Vec&)>& f, std::size_t dim, double radius,
                                int iters = 80, Vec* argmin = nullptr) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  Vec point(dim, 0.0);
  std::function<double(std::size_t)> level = [&](std::size_t axis) -> double {
    if (axis == dim) return f(point);
    double lo = -radius, hi = radius;
    double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    point[axis] = a;
    double fa = level(axis + 1);
    point[axis] = b;
    double fb = level(axis + 1);
    for (int it = 0; it < iters; ++it) {
      if (fa <= fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - g * (hi - lo);
        point[axis] = a;
        fa = level(axis + 1);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + g * (hi - lo);
        point[axis] = b;
        fb = level(axis + 1);
      }
    }
    point[axis] = 0.5 * (lo + hi);
    return level(axis + 1);
  };
  const double best = level(0);
  // The last evaluation at every level sits at that level's midpoint, so
  // `point` now holds the minimiser.
  if (argmin != nullptr) *argmin = point;
  return best;
}

// 1/2 ||w||^2 + C sum max(0, 1 - y max_x <w, x>) written out longhand.
struct Bagged {
  std::vector<Vec> instances;
  int label;
};

inline double misvm_objective(const std::vector<Bagged>& sample, const Vec& w, double c) {
  double total = 0.5 * ip(w, w);
  for (const auto& b : sample) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& x : b.instances) m = std::max(m, ip(w, x));
    total += c * std::max(0.0, 1.0 - b.label * m);
  }
  return total;
}

}  // namespace support

#endif  // ERMR_TESTS_SUPPORT_HPP
