//
// Euclidean Bezier and B-spline evaluation. These are the flat-space
// reference for the manifold schemes and work on any point type with vector
// arithmetic (double, vec2, vec3).
//

#ifndef BSURF_BEZIER_HPP
#define BSURF_BEZIER_HPP

#include <algorithm>
#include <cmath>
#include <vector>

namespace bsurf {

inline double binomial(int n, int k) {
  auto r = 1.0;
  for (auto i = 1; i <= k; i++) r = r * (n - k + i) / i;
  return r;
}

// Bernstein basis B_i^k(t).
inline double bernstein(int k, int i, double t) {
  return binomial(k, i) * std::pow(t, i) * std::pow(1 - t, k - i);
}

// Bernstein-form evaluation of a Bezier curve.
template <typename T>
inline T euclidean_bezier_eval(const std::vector<T>& points, double t) {
  auto k = (int)points.size() - 1;
  auto p = points[0] * bernstein(k, 0, t);
  for (auto i = 1; i <= k; i++) p = p + points[i] * bernstein(k, i, t);
  return p;
}

// Euclidean De Casteljau evaluation.
template <typename T>
inline T euclidean_decasteljau(std::vector<T> points, double t) {
  for (auto r = (int)points.size() - 1; r > 0; r--)
    for (auto i = 0; i < r; i++)
      points[i] = points[i] * (1 - t) + points[i + 1] * t;
  return points[0];
}

// Euclidean de Boor evaluation of one B-spline segment from its k+1 control
// points and 2k local knots u_1..u_2k, with t in [u_k, u_k+1].
template <typename T>
inline T euclidean_deboor(
    std::vector<T> points, const std::vector<double>& knots, double t) {
  auto k = (int)points.size() - 1;
  for (auto r = 1; r <= k; r++)
    for (auto i = k; i >= r; i--) {
      auto lo = knots[i - 1], hi = knots[i + k - r];
      auto a  = hi > lo ? (t - lo) / (hi - lo) : 0.0;
      points[i] = points[i - 1] * (1 - a) + points[i] * a;
    }
  return points[k];
}

// -----------------------------------------------------------------------------
// OPEN-UNIFORM KNOTS
// -----------------------------------------------------------------------------

// Knot x of the open-uniform vector of degree k at subdivision level n: k+1
// zeros, the interior multiples of 2^-n, then k+1 ones.
inline double olr_knot(int k, int n, int x) {
  auto m = (double)(1 << n);
  return std::clamp((x - k) / m, 0.0, 1.0);
}

// The k knots u_i+1..u_i+k attached to control point i of level n.
inline std::vector<double> olr_point_knots(int k, int n, int i) {
  auto knots = std::vector<double>(k);
  for (auto j = 0; j < k; j++) knots[j] = olr_knot(k, n, i + 1 + j);
  return knots;
}

// The 2k local knots of segment j (points j..j+k) at level n.
inline std::vector<double> olr_segment_knots(int k, int n, int j) {
  auto knots = std::vector<double>(2 * k);
  for (auto x = 0; x < 2 * k; x++) knots[x] = olr_knot(k, n, j + 1 + x);
  return knots;
}

// Greville abscissa of control point i at level n.
inline double olr_greville(int k, int n, int i) {
  auto sum = 0.0;
  for (auto j = 1; j <= k; j++) sum += olr_knot(k, n, i + j);
  return sum / k;
}

}  // namespace bsurf

#endif
