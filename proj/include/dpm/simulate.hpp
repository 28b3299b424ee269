#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpm/dataset.hpp"
#include "dpm/engine.hpp"
#include "dpm/halting.hpp"

namespace dpm {

struct Wilson {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval for a binomial proportion at the given z.
Wilson wilson_interval(std::size_t successes, std::size_t trials, double z);

constexpr double kZ95 = 1.959963984540054;
constexpr double kZ99 = 2.5758293035489004;

// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Exact probability that the recursion halts via the minimum-size criterion
// within max_level levels, by enumerating every selection at every node with
// its exact selection pmf. Noisy counts are deterministic (raw + offset), so
// the only randomness enumerated is the exponential mechanism; run the Monte
// Carlo comparison with deterministic_counts set to match. Feasible for at
// most 12 candidates and 3 levels.
double exact_halt_probability(const Dataset& data, const DpmConfig& config, int max_level);

enum class TrialTarget { ImmediateHalt, NotHalt, CentralSplit, HaltWithin, EmUtility, NoisyCountTail };

enum class BoundKind { LowerBound, UpperBound, TwoSided };

struct TrialPlan {
  std::string name;
  TrialTarget target = TrialTarget::ImmediateHalt;
  std::size_t trials = 10000;
  std::uint64_t master_seed = 0;
  double slack = 0.0;

  // Engine-backed targets.
  Dataset dataset;
  DpmConfig config;
  int levels = 0;                              // HaltWithin
  double t_prime = 0.0;                        // CentralSplit / HaltWithin(t')
  EvolutionMode mode = EvolutionMode::TPrime;  // HaltWithin bound side
  bool proof_text_numerator = false;

  // EmUtility.
  std::vector<double> em_scores;
  double em_eps = 1.0;
  double em_delta_f = 0.1;
  double kappa = 1.0;
  double omega = 0.0;

  // NoisyCountTail.
  double nc_eps = 1.0;
  double nc_delta = 1.0;
  std::size_t nc_n = 100;
};

struct BoundReport {
  std::string name;
  std::string target;
  std::string mode_flags;
  BoundKind kind = BoundKind::LowerBound;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double empirical = 0.0;
  Wilson ci95, ci99;
  double bound = 0.0;      // the analytic value being validated
  double raw_bound = 0.0;  // unclamped where that differs
  bool loose = false;      // vacuous (<= 0) lower bound
  bool holds = false;
  double slack = 0.0;
  std::vector<std::pair<std::string, double>> extras;

  std::string to_json() const;
};

BoundReport run_plan(const TrialPlan& plan);

std::vector<BoundReport> sweep(const std::vector<TrialPlan>& plans);

std::string reports_to_csv(const std::vector<BoundReport>& reports);

TrialPlan plan_from_json(const std::string& json_text);

}  // namespace dpm
