#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dpm/dataset.hpp"
#include "dpm/dp.hpp"
#include "dpm/rng.hpp"
#include "dpm/splitting.hpp"

namespace dpm {

struct DpmConfig {
  ScoreParams score;
  std::size_t tau_e = 1;  // minimum cluster size, compared against noisy subset sizes
  std::size_t tau_s = 7;  // maximum recursion depth
  double eps_count = 1.0;
  double eps_select = 1.0;
  double eps_avg = 1.0;
  double delta = 0.01;
  double clip_bound = 1.0;

  // Score sensitivity for the selection step; unset derives (1 + alpha) / n_tilde
  // per node.
  std::optional<double> sensitivity;

  // Selection exponent eps/(2*Delta_f); false drops the 2.
  bool halved_exponent = true;

  // Replaces every noisy count by its mean (raw + offset). Used by the
  // bound-validation harness; flagged in the result.
  bool deterministic_counts = false;

  void validate() const;
};

DpmConfig config_from_json(const std::string& json_text);
std::string config_to_json(const DpmConfig& config);

enum class HaltReason { MinSizeViolated, MaxDepth };

struct TreeNode {
  std::vector<std::size_t> indices;  // subset, as indices into the dataset
  std::size_t depth = 0;
  double noisy_size = 0.0;

  bool is_leaf = true;
  HaltReason reason = HaltReason::MinSizeViolated;

  // Split applied at an internal node.
  std::size_t split_dimension = 0;
  double split_position = 0.0;
  std::unique_ptr<TreeNode> left;   // projected value <  position
  std::unique_ptr<TreeNode> right;  // projected value >= position

  const std::vector<std::size_t>& cluster_indices() const { return indices; }
};

struct ClusteringResult {
  std::shared_ptr<TreeNode> tree;
  std::vector<std::vector<std::size_t>> clusters;  // disjoint cover of the dataset
  std::vector<std::vector<double>> centers;        // DP averages per cluster
  std::vector<HaltReason> halt_reasons;
  PrivacyParams budget_spent;
  ScoringDiagnostics diagnostics;
  std::uint64_t seed = 0;
  DpmConfig config;

  std::size_t max_leaf_depth() const;
  bool all_leaves_min_size() const;
  std::string to_json() const;
};

// Recursive DP clustering: per node the subset size is counted noisily, all
// split candidates (generated once from the root bounds) are rescored on the
// subset and one is drawn by the exponential mechanism. If either side's
// noisy size falls below tau_e the node stays unsplit and becomes a cluster;
// otherwise both sides recurse until tau_s.
ClusteringResult run_dpm(const Dataset& data, const DpmConfig& config, std::uint64_t seed);

// Coordinate-wise clipped mean with Laplace(2 * clip * dim / (eps * count))
// noise per coordinate.
std::vector<double> dp_average(const std::vector<std::vector<double>>& points, double clip_bound,
                               double epsilon, SplitMix64& rng);

// Re-derives cluster memberships of a dataset from the stored split
// positions. Throws on dimension mismatch.
std::vector<std::vector<std::size_t>> replay(const TreeNode& tree, const Dataset& data);

}  // namespace dpm
