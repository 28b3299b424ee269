#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "dpm/rng.hpp"
#include "dpm/splitting.hpp"

using namespace dpm;

TEST_CASE("candidate positions partition the range into equal intervals") {
  auto cands = generate_candidates({{0.0, 1.0}}, 0.25);
  REQUIRE(cands.size() == 4);
  double expected[] = {0.125, 0.375, 0.625, 0.875};
  for (int i = 0; i < 4; ++i) {
    CHECK(cands[i].position == doctest::Approx(expected[i]));
    CHECK(cands[i].dimension == 0);
    CHECK(cands[i].width == doctest::Approx(0.25));
  }
}

TEST_CASE("beta covering the range degenerates to the midpoint") {
  auto cands = generate_candidates({{0.0, 1.0}}, 1.0);
  REQUIRE(cands.size() == 1);
  CHECK(cands[0].position == doctest::Approx(0.5));

  auto wide = generate_candidates({{0.0, 1.0}}, 5.0);
  REQUIRE(wide.size() == 1);
  CHECK(wide[0].position == doctest::Approx(0.5));
}

TEST_CASE("candidates are generated per dimension") {
  auto cands = generate_candidates({{0.0, 1.0}, {0.0, 2.0}}, 0.5);
  CHECK(cands.size() == 6);
  int per_dim[2] = {0, 0};
  for (const auto& c : cands) ++per_dim[c.dimension];
  CHECK(per_dim[0] == 2);
  CHECK(per_dim[1] == 4);
}

TEST_CASE("emptiness arithmetic") {
  CHECK(emptiness(0, 100.0) == doctest::Approx(1.0));
  CHECK(emptiness(100, 100.0) == doctest::Approx(0.0));
  CHECK(emptiness(20, 100.0) == doctest::Approx(0.8));
  // unclamped when noise undershoots the true count
  CHECK(emptiness(20, 10.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(emptiness(1, 0.0), std::invalid_argument);
}

TEST_CASE("emptiness is strictly decreasing in the interval count") {
  double prev = emptiness(0, 50.0);
  for (std::size_t c = 1; c <= 50; ++c) {
    double e = emptiness(c, 50.0);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("centreness boundary values") {
  double n = 100.0, t = 0.4, q = 0.2;
  CHECK(centreness(n / 2.0, n, t, q) == doctest::Approx(1.0));
  CHECK(centreness(0.0, n, t, q) == doctest::Approx(0.0));
  CHECK(centreness(n, n, t, q) == doctest::Approx(0.0));
  // both quantile-boundary branches meet at t
  CHECK(centreness(n * q, n, t, q) == doctest::Approx(t));
  CHECK(centreness(n - n * q, n, t, q) == doctest::Approx(t));
}

TEST_CASE("centreness rejects degenerate quantile parameters") {
  CHECK_THROWS_AS(centreness(10.0, 100.0, 0.4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(centreness(10.0, 100.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(centreness(10.0, 100.0, 0.1, 0.2), std::invalid_argument);  // t < 2q
}

namespace {

double outer_branch(double r, double n, double t, double q) {
  double m = n / 2.0 - std::abs(r - n / 2.0);
  return m * t / (n * q);
}

double inner_branch(double r, double n, double t, double q) {
  double m = n / 2.0 - std::abs(r - n / 2.0);
  return (t - 2.0 * q) / (1.0 - 2.0 * q) + m * (1.0 - t) / (n / 2.0 - n * q);
}

}  // namespace

TEST_CASE("centreness branches agree at the quantile boundary over a parameter grid") {
  for (double n : {10.0, 50.0, 100.0, 333.0}) {
    for (double q : {0.05, 0.15, 0.25, 0.4}) {
      for (double t : {2.0 * q, 2.0 * q + 0.1, 0.8, 1.0}) {
        if (t > 1.0) continue;
        for (double r : {n * q, n - n * q}) {
          CAPTURE(n);
          CAPTURE(q);
          CAPTURE(t);
          CAPTURE(r);
          CHECK(std::abs(outer_branch(r, n, t, q) - inner_branch(r, n, t, q)) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("centreness symmetry and range over a grid") {
  SplitMix64 rng(8);
  for (int i = 0; i < 1000; ++i) {
    double n = rng.uniform(4.0, 500.0);
    double q = rng.uniform(0.01, 0.49);
    double t = rng.uniform(2.0 * q, 1.0);
    if (t > 1.0) continue;
    double r = rng.uniform(0.0, n);
    double c = centreness(r, n, t, q);
    double mirrored = centreness(n - r, n, t, q);
    CAPTURE(n);
    CAPTURE(q);
    CAPTURE(t);
    CAPTURE(r);
    CHECK(std::abs(c - mirrored) < 1e-9);
    CHECK(c >= -1e-12);
    CHECK(c <= 1.0 + 1e-12);
  }
}

TEST_CASE("score composes the weighted subscores") {
  CHECK(split_score(1.0, 1.0, 1.0) == doctest::Approx(2.0));
  CHECK(split_score(0.0, 0.0, 3.0) == doctest::Approx(0.0));
  // verified subscores: |s|=20, n=100 -> e=0.8; r=nq -> c=t
  double e = emptiness(20, 100.0);
  double c = centreness(20.0, 100.0, 0.4, 0.2);
  CHECK(split_score(e, c, 2.0) == doctest::Approx(2.0));
}

TEST_CASE("rank insertion semantics") {
  std::vector<double> values{1.0, 2.0, 3.0, 4.0};
  CHECK(rank_of(0.5, values) == doctest::Approx(0.0));
  CHECK(rank_of(9.0, values) == doctest::Approx(4.0));
  CHECK(rank_of(2.5, values) == doctest::Approx(2.0));
  // ties take the midpoint rank
  std::vector<double> ties{1.0, 2.0, 2.0, 3.0};
  CHECK(rank_of(2.0, ties) == doctest::Approx(2.0));
}

TEST_CASE("interval counting is closed on both ends") {
  std::vector<double> values{0.0, 0.25, 0.5, 0.75, 1.0};
  CHECK(count_within(0.5, 0.5, values) == 3);
  CHECK(count_within(0.0, 0.5, values) == 2);
}

TEST_CASE("score_candidates flags noise artifacts") {
  auto cands = generate_candidates({{0.0, 1.0}}, 0.5);
  std::vector<std::vector<double>> sorted{{0.1, 0.2, 0.3, 0.6, 0.9}};
  ScoringDiagnostics diag;
  score_candidates(cands, sorted, 2.0, {1.0, 0.4, 0.2, 0.5}, &diag);
  CHECK(diag.emptiness_clamp_violations > 0);  // 3 points in one beta-interval vs noisy 2

  ScoringDiagnostics floored;
  score_candidates(cands, sorted, 0.5, {1.0, 0.4, 0.2, 0.5}, &floored);
  CHECK(floored.noisy_count_floored == 1);
}
