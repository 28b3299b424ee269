#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dpm/dataset.hpp"
#include "dpm/splitting.hpp"

namespace dpm {

// Split candidates classified by centreness: at most t_lo (these halt the
// recursion), strictly between t_lo and t_hi, and at least t_hi.
struct CandidateCounts {
  std::size_t halting = 0;
  std::size_t mid = 0;
  std::size_t central = 0;

  std::size_t total() const { return halting + mid + central; }
};

// Everything the closed-form halting bounds consume. Counts may be supplied
// abstractly or recounted per threshold from measured centreness values; both
// paths feed one formula code path.
struct BoundScenario {
  double n_tilde = 0.0;
  double tau_e = 0.0;
  double t = 0.4;
  double q = 0.2;
  double alpha = 1.0;
  double eps = 1.0;
  double delta_f = 1.0;
  double e_min = 0.0;  // minimum occurring emptiness over all candidates
  double e_qi = 0.0;   // maximum emptiness in the inner quantile
  CandidateCounts counts;
  double t_prime = 0.0;
  int levels = 0;

  // When nonempty, counts_at reclassifies these per threshold pair.
  std::vector<double> centreness_values;

  CandidateCounts counts_at(double t_lo, double t_hi) const;
};

BoundScenario scenario_from_json(const std::string& json_text);
std::string scenario_to_json(const BoundScenario& s);

// Classifies every split candidate of a concrete dataset by its centreness
// (computed at the deterministic noisy count n + offset), measuring e_min and
// e_qi along the way.
BoundScenario measure_scenario(const Dataset& data, const ScoreParams& params, std::size_t tau_e,
                               double eps_select, double eps_count, double delta,
                               std::optional<double> sensitivity = std::nullopt);

// Centreness evaluated at rank tau_e: every candidate below this threshold
// violates the minimum cluster size. Requires 2*tau_e <= n_tilde, otherwise
// no admissible split exists at all.
double centreness_threshold(double tau_e, double n_tilde, double t, double q);

// Base of the level-wise threshold evolution: the c_{2q,q} lower bound of
// the centreness threshold, 2*tau_e/n_tilde. Coincides with
// centreness_threshold at t = 2q.
double threshold_evolution_base(double tau_e, double n_tilde);

// Lower bound on the probability that the selected split halts the recursion
// immediately, evaluated at the given threshold (counts taken at (t_tau, t)).
double prob_halt_immediately_lower(const BoundScenario& s, double t_tau);
double prob_halt_immediately_lower(const BoundScenario& s);

// Lower bound on the probability that a t'-central split is selected, counts
// taken at (t_tau, t_prime). Requires t_tau < t_prime < t and at least one
// central candidate. proof_text_numerator switches the numerator exponent
// from t_tau to t_prime (the two readings the source admits).
double prob_central_split_lower(const BoundScenario& s, double t_tau, double t_prime,
                                bool proof_text_numerator = false);
double prob_central_split_lower(const BoundScenario& s);

// Lower bound on the probability that the selected split does not halt the
// recursion; when t_tau > t the mid class is empty by construction.
double prob_not_halt_lower(const BoundScenario& s, double t_tau);
double prob_not_halt_lower(const BoundScenario& s);

enum class EvolutionMode { TPrime, General };

// Per-level growth factor of the centreness threshold under t'-central
// splits. `defined` goes false when a case denominator vanishes or the factor
// is non-positive; `ratio_in_unit` reports whether the underlying partition
// ratio stayed inside (0, 1).
struct GrowthFactor {
  double value = 0.0;
  bool defined = false;
  bool ratio_in_unit = false;
};

GrowthFactor threshold_growth_factor(double t_prime, double t, double q);

// t_tau after `level` splits. TPrime mode applies the min(.,.)^level factor;
// General mode applies (n/(n - tau_e))^level, expressed through
// t_tau0 = 2*tau_e/n as 1/(1 - t_tau0/2).
double threshold_evolution(double t_tau0, int level, double t_prime, double t, double q,
                           EvolutionMode mode);

// t' reinterpreted as a centreness value of the origin set after `level`
// splits. Values >= 1 mean the evolution saturated.
double tprime_evolution(double t_prime, int level, double t, double q);

struct HaltBound {
  double raw = 0.0;
  double clamped = 0.0;
  bool saturated = false;  // t'-evolution left [0, 1) before reaching j
  int levels_used = 0;
  std::vector<double> immediate_terms;   // per-level immediate-halt bounds
  std::vector<double> progress_factors;  // per-level progression bounds
};

// Lower bound on the probability that the recursion halts within j levels:
// sum over i of (immediate bound at the level-i threshold) times (product of
// the progression bounds over levels below i) raised to 2^i.
HaltBound prob_halt_within(const BoundScenario& s, int levels_j, EvolutionMode mode,
                           bool proof_text_numerator = false);

// --- Gaussian split-level series ------------------------------------------

// Median shift after `level` halving splits of a standard Gaussian:
// Phi^-1(1 - 2^-(level+1)). Valid for 0 <= level <= 12.
double gaussian_median_shift(int level);

// Emptiness lower bound of the most central split at the given level:
// 1 - 2^level * (Phi(z + bos/2) - Phi(z - bos/2)).
double central_emptiness_at(double z, int level, double beta_over_sigma);
double central_emptiness(int level, double beta_over_sigma);

// Centreness threshold above which a halting candidate outscores the central
// split by margin m: (1 + (e_central - 1) * alpha + m) / 2^level.
double gaussian_halt_threshold(int level, double alpha, double m, double e_central);

// 4-significant-figure reference values of the median shift for levels 0..6.
// Reproduction tables evaluate the series at these alongside the
// full-precision chain, since the reference series was tabulated from them.
const std::array<double, 7>& reference_median_shifts();

struct GaussianSeriesRow {
  int level = 0;
  double z = 0.0;
  double z_reference = 0.0;
  double e_central = 0.0;
  double e_central_at_reference = 0.0;
};

std::vector<GaussianSeriesRow> gaussian_series(int max_level, double beta_over_sigma);

struct Fig4Row {
  int level = 0;
  double alpha = 0.0;
  double threshold = 0.0;               // full-precision chain
  double threshold_at_reference = 0.0;  // series evaluated at the reference shifts
};

std::vector<Fig4Row> reproduce_fig4(const std::vector<double>& alphas, double m, int max_level);

}  // namespace dpm
