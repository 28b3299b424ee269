#include "dpm/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpm {

void ScoreParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("score params: alpha must satisfy alpha > 0");
  if (!(q > 0.0 && q < 0.5)) throw std::invalid_argument("score params: q must satisfy 0 < q < 1/2");
  if (!(t >= 2.0 * q)) throw std::invalid_argument("score params: t must satisfy t >= 2q");
  if (!(t <= 1.0)) throw std::invalid_argument("score params: t must satisfy t <= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("score params: beta must satisfy beta > 0");
}

std::vector<SplitCandidate> generate_candidates(const std::vector<std::pair<double, double>>& bounds,
                                                double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("generate_candidates: beta must be positive");
  std::vector<SplitCandidate> out;
  for (std::size_t d = 0; d < bounds.size(); ++d) {
    auto [lo, hi] = bounds[d];
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      throw std::invalid_argument("generate_candidates: bounds[" + std::to_string(d) + "] must be finite with low < high");
    }
    double range = hi - lo;
    auto intervals = static_cast<std::size_t>(std::ceil(range / beta));
    if (intervals < 1) intervals = 1;
    double step = range / static_cast<double>(intervals);
    for (std::size_t i = 0; i < intervals; ++i) {
      SplitCandidate c;
      c.dimension = d;
      c.position = lo + (static_cast<double>(i) + 0.5) * step;
      c.width = beta;
      out.push_back(c);
    }
  }
  return out;
}

double emptiness(std::size_t count_in_interval, double noisy_n) {
  if (!(noisy_n > 0.0)) throw std::invalid_argument("emptiness: noisy_n must be positive (floor it first)");
  return 1.0 - static_cast<double>(count_in_interval) / noisy_n;
}

double centreness(double rank, double noisy_n, double t, double q) {
  if (!(noisy_n > 0.0)) throw std::invalid_argument("centreness: noisy_n must be positive");
  if (!(q > 0.0 && q < 0.5)) throw std::invalid_argument("centreness: q must satisfy 0 < q < 1/2");
  if (!(t >= 2.0 * q)) throw std::invalid_argument("centreness: t must satisfy t >= 2q");
  double half = noisy_n / 2.0;
  double nq = noisy_n * q;
  double m = half - std::abs(rank - half);
  bool outer = rank <= nq || rank >= noisy_n - nq;
  if (outer) return m * t / nq;
  return (t - 2.0 * q) / (1.0 - 2.0 * q) + m * (1.0 - t) / (half - nq);
}

double split_score(double emptiness_value, double centreness_value, double alpha) {
  return alpha * emptiness_value + centreness_value;
}

double rank_of(double position, const std::vector<double>& sorted_values) {
  auto lo = std::lower_bound(sorted_values.begin(), sorted_values.end(), position);
  auto hi = std::upper_bound(lo, sorted_values.end(), position);
  double below = static_cast<double>(lo - sorted_values.begin());
  double ties = static_cast<double>(hi - lo);
  return below + ties / 2.0;
}

std::size_t count_within(double position, double width, const std::vector<double>& sorted_values) {
  double a = position - width / 2.0;
  double b = position + width / 2.0;
  auto lo = std::lower_bound(sorted_values.begin(), sorted_values.end(), a);
  auto hi = std::upper_bound(lo, sorted_values.end(), b);
  return static_cast<std::size_t>(hi - lo);
}

void score_candidates(std::vector<SplitCandidate>& candidates,
                      const std::vector<std::vector<double>>& sorted_projections, double noisy_n,
                      const ScoreParams& params, ScoringDiagnostics* diag) {
  params.validate();
  double n = noisy_n;
  if (n < 1.0) {
    n = 1.0;
    if (diag) ++diag->noisy_count_floored;
  }
  for (auto& c : candidates) {
    const auto& values = sorted_projections.at(c.dimension);
    c.count_in_interval = count_within(c.position, c.width, values);
    c.rank = rank_of(c.position, values);
    c.emptiness_value = emptiness(c.count_in_interval, n);
    if (diag && (c.emptiness_value < 0.0 || c.emptiness_value > 1.0)) ++diag->emptiness_clamp_violations;
    c.centreness_value = centreness(c.rank, n, params.t, params.q);
    c.score = split_score(c.emptiness_value, c.centreness_value, params.alpha);
  }
}

}  // namespace dpm
