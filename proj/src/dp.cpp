#include "dpm/dp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpm {

PrivacyParams compose_sequential(const std::vector<PrivacyParams>& ops) {
  PrivacyParams out;
  for (const auto& p : ops) {
    out.epsilon += p.epsilon;
    out.delta += p.delta;
  }
  return out;
}

PrivacyParams compose_parallel(const std::vector<PrivacyParams>& ops) {
  PrivacyParams out;
  for (const auto& p : ops) {
    out.epsilon = std::max(out.epsilon, p.epsilon);
    out.delta = std::max(out.delta, p.delta);
  }
  return out;
}

void BudgetLedger::spend(int stage, int kind, PrivacyParams p) {
  auto& g = groups_[{stage, kind}];
  g.epsilon = std::max(g.epsilon, p.epsilon);
  g.delta = std::max(g.delta, p.delta);
}

PrivacyParams BudgetLedger::total() const {
  PrivacyParams out;
  for (const auto& [key, p] : groups_) {
    (void)key;
    out.epsilon += p.epsilon;
    out.delta += p.delta;
  }
  return out;
}

double sample_laplace(double scale, SplitMix64& rng) {
  if (!(scale > 0.0)) throw std::invalid_argument("sample_laplace: scale must be positive");
  double u = rng.next_open() - 0.5;  // (-1/2, 1/2)
  double mag = 1.0 - 2.0 * std::abs(u);
  return -scale * (u < 0.0 ? -1.0 : 1.0) * std::log(mag);
}

double noisy_count_offset(double epsilon, double delta, std::size_t n_total) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("noisy_count: epsilon must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("noisy_count: delta must lie in (0, 1] (delta = 0 makes the offset infinite)");
  }
  return std::log(std::sqrt(static_cast<double>(n_total)) / delta) / epsilon;
}

NoisyCount noisy_count(std::size_t raw, double epsilon, double delta, std::size_t n_total, SplitMix64& rng) {
  NoisyCount out;
  out.offset = noisy_count_offset(epsilon, delta, n_total);
  out.value = static_cast<double>(raw) + sample_laplace(1.0 / epsilon, rng) + out.offset;
  return out;
}

double noisy_count_tail_probability(double epsilon, double delta, std::size_t n_total) {
  return 0.5 * std::exp(-epsilon * noisy_count_offset(epsilon, delta, n_total));
}

std::vector<double> em_pmf(const ScoredCandidateSet& set, double epsilon, bool halved_exponent) {
  if (set.scores.empty()) throw std::invalid_argument("exponential_mechanism: candidate set must be nonempty");
  if (!(set.sensitivity > 0.0)) throw std::invalid_argument("exponential_mechanism: sensitivity must be positive");
  if (epsilon < 0.0) throw std::invalid_argument("exponential_mechanism: epsilon must be >= 0");
  for (double s : set.scores) {
    if (std::isnan(s)) throw std::invalid_argument("exponential_mechanism: NaN score");
  }
  double k = epsilon / ((halved_exponent ? 2.0 : 1.0) * set.sensitivity);
  double top = *std::max_element(set.scores.begin(), set.scores.end());
  std::vector<double> pmf(set.scores.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < set.scores.size(); ++i) {
    pmf[i] = std::exp((set.scores[i] - top) * k);
    sum += pmf[i];
  }
  for (double& p : pmf) p /= sum;
  return pmf;
}

std::size_t sample_index(const std::vector<double>& pmf, SplitMix64& rng) {
  double u = rng.next_double();
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    if (u < acc) return i;
  }
  return pmf.size() - 1;
}

std::size_t exponential_mechanism(const ScoredCandidateSet& set, double epsilon, SplitMix64& rng,
                                  bool halved_exponent) {
  return sample_index(em_pmf(set, epsilon, halved_exponent), rng);
}

double em_utility_gap(std::size_t n_candidates, std::size_t n_near_opt, double omega, double kappa,
                      double epsilon, double sensitivity) {
  if (n_near_opt < 1 || n_near_opt > n_candidates) {
    throw std::invalid_argument("em_utility_gap: need 1 <= |W_opt| <= |W|");
  }
  if (!(kappa > 0.0)) throw std::invalid_argument("em_utility_gap: kappa must be positive");
  return omega + (2.0 * sensitivity / epsilon) *
                     (std::log(static_cast<double>(n_candidates) / static_cast<double>(n_near_opt)) + kappa);
}

}  // namespace dpm
