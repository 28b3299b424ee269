#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "dpm/rng.hpp"

namespace dpm {

struct PrivacyParams {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Sequential composition sums both parameters; parallel composition over
// disjoint input subsets takes the maximum.
PrivacyParams compose_sequential(const std::vector<PrivacyParams>& ops);
PrivacyParams compose_parallel(const std::vector<PrivacyParams>& ops);

// Accounts mechanism invocations grouped by (stage, kind). Invocations inside
// one group ran on disjoint subsets and compose in parallel; groups compose
// sequentially.
class BudgetLedger {
 public:
  void spend(int stage, int kind, PrivacyParams p);
  PrivacyParams total() const;

 private:
  std::map<std::pair<int, int>, PrivacyParams> groups_;
};

// Laplace(0, scale) draw via inverse CDF; scale must be positive.
double sample_laplace(double scale, SplitMix64& rng);

struct NoisyCount {
  double value = 0.0;   // raw + Lap(1/eps) + offset, used as-is downstream
  double offset = 0.0;  // ln(sqrt(n_total)/delta) / eps
};

double noisy_count_offset(double epsilon, double delta, std::size_t n_total);
NoisyCount noisy_count(std::size_t raw, double epsilon, double delta, std::size_t n_total, SplitMix64& rng);

// Probability that the shifted noisy count exceeds raw + 2*offset, i.e. the
// noise itself exceeds the offset: 0.5 * exp(-eps * offset) = delta / (2 sqrt n).
double noisy_count_tail_probability(double epsilon, double delta, std::size_t n_total);

struct ScoredCandidateSet {
  std::vector<double> scores;
  double sensitivity = 1.0;  // Delta_f > 0
};

// Selection probabilities proportional to exp(eps * score / (2 * Delta_f)),
// stabilised by subtracting the maximum score before exponentiation. Setting
// halved_exponent = false drops the factor 2 from the denominator.
std::vector<double> em_pmf(const ScoredCandidateSet& set, double epsilon, bool halved_exponent = true);

std::size_t sample_index(const std::vector<double>& pmf, SplitMix64& rng);

std::size_t exponential_mechanism(const ScoredCandidateSet& set, double epsilon, SplitMix64& rng,
                                  bool halved_exponent = true);

// Score gap below the optimum that a selection exceeds except with
// probability e^-kappa: omega + (2*Delta_f/eps) * (ln(|W|/|W_opt|) + kappa).
// The guarantee reads Pr[score <= OPT - gap] <= e^-kappa.
double em_utility_gap(std::size_t n_candidates, std::size_t n_near_opt, double omega, double kappa,
                      double epsilon, double sensitivity);

}  // namespace dpm
