#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "dpm/dataset.hpp"

namespace dpm {

struct Clustering {
  const Dataset* data = nullptr;
  std::vector<int> assignment;  // point index -> cluster id in [0, k)
  int k = 0;

  void validate() const;
};

// Per-point silhouette: (inter - intra) / max(inter, intra) with intra the
// mean distance to the other members of the own cluster and inter the
// smallest mean distance to another cluster. Singleton clusters score 0.
// Requires k >= 2.
double silhouette_value(std::size_t point, const Clustering& clustering);
std::vector<double> silhouette_values(const Clustering& clustering);
double silhouette_score(const Clustering& clustering);

// Change classification for a point inside the subset being split. The
// distances are the point's mean distances to: the nearest other cluster C,
// the whole subset S0, and the two partitions. `improved` compares the
// silhouette value recomputed from these distances before and after;
// `condition_1` / `condition_2` report the two printed sufficient conditions.
struct SplitMemberChange {
  bool improved = false;
  bool condition_1 = false;  // d_C < d_other < d_S0
  bool condition_2 = false;  // d_C >= d_other and d_other - d_own > d_C - d_S0
  double before = 0.0;
  double after = 0.0;
};

enum class SplitSide { FirstPart, SecondPart };

SplitMemberChange classify_split_member(double d_c, double d_s0, double d_s0p, double d_s0pp,
                                        SplitSide side);

enum class ChangeDirection { Improved, Unchanged, Worsened };

// Change classification for a point outside the split subset; only the
// inter-distance can move. Cases: the split subset was nearest and both
// partitions ended up farther (1a) or another cluster took over (1b), a
// partition became nearest (2a), or nothing changed (2b).
struct OutsiderChange {
  ChangeDirection direction = ChangeDirection::Unchanged;
  int case_label = 0;  // 1 = 1a, 2 = 1b, 3 = 2a, 4 = 2b
  double inter_before = 0.0;
  double inter_after = 0.0;
};

OutsiderChange classify_outsider(double d_c, double d_s0, double d_s0p, double d_s0pp);

// Three isotropic Gaussian clusters: two of them d_split apart on one axis
// forming the subset S0, the third (C) at distance d_c_s0 from S0's centroid
// on the orthogonal axis. Clustering k=2 merges S0; k=3 applies the midpoint
// hyperplane split. Labels carry the generating component.
Dataset counterexample_dataset(double d_c_s0, double d_split, double sigma, std::size_t n_per_cluster,
                               std::uint64_t seed);
Clustering hyperplane_clustering(const Dataset& data, double d_c_s0, bool split_s0);

struct CounterexampleRow {
  double d_c_s0 = 0.0;
  double d_split = 0.0;
  double before_mean = 0.0;
  double after_mean = 0.0;
  double delta_mean = 0.0;
  double delta_std = 0.0;
  double frac_negative = 0.0;  // fraction of seeds with a strict drop
  std::size_t seeds = 0;
};

CounterexampleRow counterexample_cell(double d_c_s0, double d_split, double sigma,
                                      std::size_t n_per_cluster, const std::vector<std::uint64_t>& seeds);

// Full sweep over the two centre-distance parameters; one row per grid cell.
std::vector<CounterexampleRow> counterexample_experiment(const std::vector<double>& d_c_s0_grid,
                                                         const std::vector<double>& d_split_grid,
                                                         double sigma, std::size_t n_per_cluster,
                                                         const std::vector<std::uint64_t>& seeds);

// Headline configuration: d_split = 5 sigma, with d_c_s0 calibrated over a
// grid until the merged two-cluster score hits target_before within tol on
// the first seed, then evaluated over all seeds.
struct HeadlineResult {
  double d_c_s0 = 0.0;
  double d_split = 0.0;
  double calibration_error = 0.0;
  CounterexampleRow row;
};

HeadlineResult calibrated_headline(double target_before, double tol, double sigma,
                                   std::size_t n_per_cluster, const std::vector<std::uint64_t>& seeds);

}  // namespace dpm
