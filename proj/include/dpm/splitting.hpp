#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace dpm {

struct ScoreParams {
  double alpha = 1.0;  // emptiness weight, > 0
  double t = 0.4;      // centreness value at the quantile boundary, 2q <= t <= 1
  double q = 0.2;      // outer quantile width, 0 < q < 1/2
  double beta = 0.5;   // split interval size, > 0

  // Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

struct SplitCandidate {
  std::size_t dimension = 0;
  double position = 0.0;
  double width = 0.0;  // beta

  // Per-subset statistics, filled by score_candidates.
  std::size_t count_in_interval = 0;
  double rank = 0.0;
  double emptiness_value = 0.0;
  double centreness_value = 0.0;
  double score = 0.0;
};

// Counters for noise artifacts surfaced while scoring (emptiness leaving
// [0, 1] because the noisy count undershot, noisy counts floored at 1).
struct ScoringDiagnostics {
  std::size_t emptiness_clamp_violations = 0;
  std::size_t noisy_count_floored = 0;
};

// Divides each dimension's range into ceil(range/beta) equal intervals and
// emits the interval midpoints. beta >= range degenerates to a single
// candidate at the range midpoint.
std::vector<SplitCandidate> generate_candidates(const std::vector<std::pair<double, double>>& bounds,
                                                double beta);

// 1 - |s|/n_tilde, returned unclamped: noise can push it outside [0, 1] and
// downstream consumers track that as a diagnostic rather than hiding it.
double emptiness(std::size_t count_in_interval, double noisy_n);

// Piecewise-linear preference for ranks near the median. Outer quantile
// Q_O = [0, nq] u [n-nq, n] ramps from 0 to t; the inner quantile continues
// from t up to 1 at the median.
double centreness(double rank, double noisy_n, double t, double q);

double split_score(double emptiness_value, double centreness_value, double alpha);

// Rank of a position inserted into sorted values: strictly-smaller count plus
// half of the ties.
double rank_of(double position, const std::vector<double>& sorted_values);

// Number of values inside [position - width/2, position + width/2].
std::size_t count_within(double position, double width, const std::vector<double>& sorted_values);

// Fills per-subset statistics of every candidate from the subset's sorted
// per-dimension projections. noisy_n is floored at 1 before scoring.
void score_candidates(std::vector<SplitCandidate>& candidates,
                      const std::vector<std::vector<double>>& sorted_projections, double noisy_n,
                      const ScoreParams& params, ScoringDiagnostics* diag = nullptr);

}  // namespace dpm
