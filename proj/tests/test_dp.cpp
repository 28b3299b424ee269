#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpm/dp.hpp"

using namespace dpm;

TEST_CASE("laplace sample median and tail") {
  SplitMix64 rng(1);
  const int n = 100000;
  std::vector<double> draws(n);
  int beyond = 0;
  double threshold = std::log(100.0);
  for (int i = 0; i < n; ++i) {
    draws[i] = sample_laplace(1.0, rng);
    if (std::abs(draws[i]) > threshold) ++beyond;
  }
  std::nth_element(draws.begin(), draws.begin() + n / 2, draws.end());
  CHECK(std::abs(draws[n / 2]) < 0.02);
  // Pr[|X| > m] = exp(-m/scale) = 1/100
  CHECK(std::abs(static_cast<double>(beyond) / n - 0.01) < 0.003);
}

TEST_CASE("laplace tail matches exp(-m) for several margins") {
  SplitMix64 rng(2);
  const int n = 100000;
  int beyond[3] = {0, 0, 0};
  double margins[3] = {1.0, 2.0, 4.0};
  for (int i = 0; i < n; ++i) {
    double x = std::abs(sample_laplace(1.0, rng));
    for (int m = 0; m < 3; ++m) {
      if (x > margins[m]) ++beyond[m];
    }
  }
  for (int m = 0; m < 3; ++m) {
    double expected = std::exp(-margins[m]);
    double tolerance = 3.5 * std::sqrt(expected * (1 - expected) / n) + 1e-4;
    CHECK(std::abs(static_cast<double>(beyond[m]) / n - expected) < tolerance);
  }
}

TEST_CASE("laplace draw is deterministic per generator state") {
  SplitMix64 a(77), b(77);
  CHECK(sample_laplace(2.5, a) == sample_laplace(2.5, b));
  CHECK_THROWS_AS(sample_laplace(0.0, a), std::invalid_argument);
}

TEST_CASE("noisy count offset formula") {
  CHECK(noisy_count_offset(1.0, 1.0, 100) == doctest::Approx(std::log(10.0)));
  CHECK_THROWS_AS(noisy_count_offset(1.0, 0.0, 100), std::invalid_argument);
}

TEST_CASE("noise vanishes at huge epsilon") {
  SplitMix64 rng(3);
  int within = 0;
  for (int i = 0; i < 1000; ++i) {
    NoisyCount nc = noisy_count(50, 1e6, 0.5, 100, rng);
    if (std::abs(nc.value - 50.0 - nc.offset) < 1e-4) ++within;
  }
  CHECK(within >= 999);
}

TEST_CASE("analytic divergence tail equals delta over two root n") {
  CHECK(noisy_count_tail_probability(1.0, 1.0, 100) == doctest::Approx(1.0 / (2.0 * 10.0)));
  CHECK(noisy_count_tail_probability(0.5, 0.1, 400) == doctest::Approx(0.1 / (2.0 * 20.0)));
}

TEST_CASE("equal scores are selected symmetrically") {
  ScoredCandidateSet set{{1.0, 1.0}, 0.5};
  SplitMix64 rng(4);
  int first = 0;
  for (int i = 0; i < 10000; ++i) {
    if (exponential_mechanism(set, 1.0, rng) == 0) ++first;
  }
  CHECK(std::abs(first / 10000.0 - 0.5) < 0.01);
}

TEST_CASE("epsilon zero selects uniformly") {
  ScoredCandidateSet set{{0.0, 5.0, 10.0}, 1.0};
  auto pmf = em_pmf(set, 0.0);
  for (double p : pmf) CHECK(p == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("two-candidate pmf matches the closed form") {
  // scores {0, delta_f}, eps = 2, halved exponent: pmf {1/(1+e), e/(1+e)}
  ScoredCandidateSet set{{0.0, 0.25}, 0.25};
  auto pmf = em_pmf(set, 2.0);
  double e = std::exp(1.0);
  CHECK(pmf[0] == doctest::Approx(1.0 / (1.0 + e)).epsilon(1e-12));
  CHECK(pmf[1] == doctest::Approx(e / (1.0 + e)).epsilon(1e-12));

  SplitMix64 rng(5);
  int second = 0;
  for (int i = 0; i < 10000; ++i) {
    if (sample_index(pmf, rng) == 1) ++second;
  }
  CHECK(std::abs(second / 10000.0 - e / (1.0 + e)) < 0.01);
}

TEST_CASE("dropping the halving doubles the exponent") {
  ScoredCandidateSet set{{0.0, 0.25}, 0.25};
  auto pmf = em_pmf(set, 1.0, false);
  double e = std::exp(1.0);
  CHECK(pmf[1] == doctest::Approx(e / (1.0 + e)).epsilon(1e-12));
}

TEST_CASE("pmf sums to one and survives extreme exponents") {
  ScoredCandidateSet set{{0.0, 1.0, 2.0}, 1e-4};
  auto pmf = em_pmf(set, 10.0);
  double sum = 0.0;
  for (double p : pmf) {
    CHECK(std::isfinite(p));
    sum += p;
  }
  CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("pmf invariant under constant score shifts") {
  ScoredCandidateSet base{{0.2, 0.9, 0.4, 0.7}, 0.3};
  ScoredCandidateSet shifted = base;
  for (double& s : shifted.scores) s += 123.0;
  auto a = em_pmf(base, 1.7);
  auto b = em_pmf(shifted, 1.7);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
}

TEST_CASE("raising a score strictly raises its selection probability") {
  ScoredCandidateSet base{{0.2, 0.9, 0.4, 0.7}, 0.3};
  auto before = em_pmf(base, 2.0);
  base.scores[2] += 0.1;
  auto after = em_pmf(base, 2.0);
  CHECK(after[2] > before[2]);
}

TEST_CASE("nan scores are rejected") {
  ScoredCandidateSet set{{0.0, std::nan("")}, 1.0};
  SplitMix64 rng(6);
  CHECK_THROWS_AS(exponential_mechanism(set, 1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(em_pmf({{}, 1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("utility gap formula") {
  // |W| = |W_opt| and omega = 0 leave only the kappa term.
  CHECK(em_utility_gap(10, 10, 0.0, 2.0, 1.0, 0.5) == doctest::Approx(2.0 * 0.5 / 1.0 * 2.0));
  // |W| = 100, |W_opt| = 1, kappa = 1, eps = 1, delta_f = 0.1
  CHECK(em_utility_gap(100, 1, 0.0, 1.0, 1.0, 0.1) == doctest::Approx(0.2 * (std::log(100.0) + 1.0)));
  CHECK_THROWS_AS(em_utility_gap(10, 0, 0.0, 1.0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(em_utility_gap(10, 11, 0.0, 1.0, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("budget composition rules") {
  std::vector<PrivacyParams> two{{1.0, 0.01}, {1.0, 0.01}};
  auto seq = compose_sequential(two);
  CHECK(seq.epsilon == doctest::Approx(2.0));
  CHECK(seq.delta == doctest::Approx(0.02));
  auto par = compose_parallel(two);
  CHECK(par.epsilon == doctest::Approx(1.0));
  CHECK(par.delta == doctest::Approx(0.01));
  auto empty = compose_sequential({});
  CHECK(empty.epsilon == 0.0);
  CHECK(empty.delta == 0.0);
}

TEST_CASE("ledger maxes within a group and sums across groups") {
  BudgetLedger ledger;
  ledger.spend(0, 0, {1.0, 0.01});
  ledger.spend(1, 0, {1.0, 0.01});  // disjoint subsets at the same stage
  ledger.spend(1, 0, {1.0, 0.01});
  ledger.spend(1, 1, {2.0, 0.0});
  auto total = ledger.total();
  CHECK(total.epsilon == doctest::Approx(4.0));
  CHECK(total.delta == doctest::Approx(0.02));
}
