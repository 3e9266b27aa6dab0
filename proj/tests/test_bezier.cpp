#include "oracles.hpp"

#include <bsurf/bezier.hpp>

#include <catch_amalgamated.hpp>

#include <random>

using namespace bsurf;
using Catch::Approx;
using std::vector;

TEST_CASE("bernstein weights sum to one") {
  for (auto k = 1; k <= 10; k++)
    for (auto t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      auto sum = 0.0;
      for (auto i = 0; i <= k; i++) sum += bernstein(k, i, t);
      CHECK(std::abs(sum - 1) < 1e-12);
    }
}

TEST_CASE("bernstein and de casteljau evaluation agree") {
  auto rng  = std::mt19937_64{1};
  auto dist = std::uniform_real_distribution<double>{-5, 5};
  for (auto trial = 0; trial < 200; trial++) {
    auto k      = 1 + trial % 6;
    auto points = vector<vec3>{};
    for (auto i = 0; i <= k; i++) points.push_back({dist(rng), dist(rng), dist(rng)});
    auto t = (dist(rng) + 5) / 10;
    CHECK(distance(euclidean_bezier_eval(points, t), euclidean_decasteljau(points, t)) < 1e-12);
    CHECK(distance(euclidean_bezier_eval(points, t), oracle::bezier(points, t)) < 1e-12);
  }
  auto cubic = vector<vec2>{{0, 0}, {0, 3}, {3, 3}, {3, 0}};
  CHECK(distance(euclidean_bezier_eval(cubic, 0.5), vec2{1.5, 2.25}) < 1e-15);
  CHECK(euclidean_bezier_eval(cubic, 0.0) == cubic[0]);
}

TEST_CASE("de boor matches the uniform cubic basis") {
  // Points 0, 6, 6, 0 on knots -2..3, evaluated at the middle of [0, 1].
  auto points = vector<double>{0, 6, 6, 0};
  auto knots  = vector<double>{-2, -1, 0, 1, 2, 3};
  auto t      = 0.5;
  auto b0 = std::pow(1 - t, 3) / 6, b1 = (3 * t * t * t - 6 * t * t + 4) / 6,
       b2 = (-3 * t * t * t + 3 * t * t + 3 * t + 1) / 6, b3 = t * t * t / 6;
  auto closed = b0 * 0 + b1 * 6 + b2 * 6 + b3 * 0;
  CHECK(closed == Approx(5.75));
  CHECK(std::abs(euclidean_deboor(points, knots, t) - closed) < 1e-12);
}

TEST_CASE("de boor matches cox-de boor on random knots") {
  auto rng  = std::mt19937_64{2};
  auto dist = std::uniform_real_distribution<double>{0, 1};
  for (auto trial = 0; trial < 100; trial++) {
    auto k     = 2 + trial % 3;
    auto knots = vector<double>{};
    for (auto i = 0; i < 2 * k; i++) knots.push_back(dist(rng));
    std::sort(knots.begin(), knots.end());
    if (knots[k] - knots[k - 1] < 1e-3) continue;
    auto points = vector<double>{};
    for (auto i = 0; i <= k; i++) points.push_back(dist(rng) * 10);
    // Full knot vector: pad the 2k local knots with one knot on each side.
    auto full = knots;
    full.insert(full.begin(), knots.front() - 1);
    full.push_back(knots.back() + 1);
    for (auto s = 0; s <= 10; s++) {
      auto t = knots[k - 1] + (knots[k] - knots[k - 1]) * s / 10.0 * 0.999;
      CHECK(std::abs(euclidean_deboor(points, knots, t) -
                     oracle::bspline(points, full, k, t)) < 1e-9);
    }
  }
}

TEST_CASE("open-uniform knots") {
  CHECK(olr_knot(3, 0, 0) == 0);
  CHECK(olr_knot(3, 0, 3) == 0);
  CHECK(olr_knot(3, 0, 4) == 1);
  CHECK(olr_knot(3, 2, 5) == 0.5);
  CHECK(olr_point_knots(3, 1, 0) == vector<double>{0, 0, 0});
  CHECK(olr_point_knots(3, 1, 2) == vector<double>{0, 0.5, 1});
  CHECK(olr_segment_knots(3, 1, 1) == vector<double>{0, 0, 0.5, 1, 1, 1});
  CHECK(olr_greville(3, 0, 1) == Approx(1.0 / 3));
  // Greville abscissae of level n are increasing and span [0, 1].
  for (auto k : {2, 3})
    for (auto n = 0; n < 6; n++) {
      auto count = (1 << n) + k;
      CHECK(olr_greville(k, n, 0) == 0);
      CHECK(olr_greville(k, n, count - 1) == Approx(1));
      for (auto i = 1; i < count; i++)
        CHECK(olr_greville(k, n, i) > olr_greville(k, n, i - 1));
    }
}

TEST_CASE("boehm refinement keeps the curve") {
  auto points = vector<vec2>{{0, 0}, {1, 3}, {4, 3}, {5, 0}};
  for (auto n = 0; n < 5; n++) {
    auto refined = oracle::refine(points, n);
    CHECK((int)refined.size() == (1 << n) + 3);
    auto knots = oracle::open_uniform(3, n);
    for (auto s = 0; s <= 20; s++) {
      auto t = s / 20.0;
      CHECK(distance(oracle::bspline(refined, knots, 3, t), oracle::bezier(points, t)) < 1e-12);
    }
  }
}
