#include "dpm/silhouette.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpm/datagen.hpp"

namespace dpm {

void Clustering::validate() const {
  if (!data) throw std::invalid_argument("clustering: dataset reference missing");
  if (k < 1) throw std::invalid_argument("clustering: k must be >= 1");
  if (assignment.size() != data->size()) {
    throw std::invalid_argument("clustering: assignment size must equal dataset size");
  }
  for (int a : assignment) {
    if (a < 0 || a >= k) throw std::invalid_argument("clustering: assignment out of range");
  }
}

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double silhouette_from_distances(double inter, double intra) {
  double m = std::max(inter, intra);
  if (m == 0.0) return 0.0;
  return (inter - intra) / m;
}

}  // namespace

std::vector<double> silhouette_values(const Clustering& clustering) {
  clustering.validate();
  if (clustering.k < 2) throw std::invalid_argument("silhouette: needs at least two clusters");
  const auto& points = clustering.data->points;
  std::size_t n = points.size();
  std::size_t k = static_cast<std::size_t>(clustering.k);

  std::vector<std::size_t> cluster_size(k, 0);
  for (int a : clustering.assignment) ++cluster_size[static_cast<std::size_t>(a)];

  // Mean distance from each point to every cluster in one O(n^2) pass.
  std::vector<std::vector<double>> sums(n, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = distance(points[i], points[j]);
      sums[i][static_cast<std::size_t>(clustering.assignment[j])] += d;
      sums[j][static_cast<std::size_t>(clustering.assignment[i])] += d;
    }
  }

  std::vector<double> values(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto own = static_cast<std::size_t>(clustering.assignment[i]);
    if (cluster_size[own] <= 1) {
      values[i] = 0.0;  // singleton
      continue;
    }
    double intra = sums[i][own] / static_cast<double>(cluster_size[own] - 1);
    double inter = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own || cluster_size[c] == 0) continue;
      inter = std::min(inter, sums[i][c] / static_cast<double>(cluster_size[c]));
    }
    if (!std::isfinite(inter)) {
      values[i] = 0.0;  // every other cluster empty
      continue;
    }
    values[i] = silhouette_from_distances(inter, intra);
  }
  return values;
}

double silhouette_value(std::size_t point, const Clustering& clustering) {
  return silhouette_values(clustering).at(point);
}

double silhouette_score(const Clustering& clustering) {
  auto values = silhouette_values(clustering);
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

SplitMemberChange classify_split_member(double d_c, double d_s0, double d_s0p, double d_s0pp,
                                        SplitSide side) {
  if (d_c < 0.0 || d_s0 < 0.0 || d_s0p < 0.0 || d_s0pp < 0.0) {
    throw std::invalid_argument("classify_split_member: distances must be nonnegative");
  }
  double d_own = side == SplitSide::FirstPart ? d_s0p : d_s0pp;
  double d_other = side == SplitSide::FirstPart ? d_s0pp : d_s0p;

  SplitMemberChange out;
  out.before = silhouette_from_distances(d_c, d_s0);
  out.after = silhouette_from_distances(std::min(d_c, d_other), d_own);
  out.improved = out.after > out.before;
  out.condition_1 = d_c < d_other && d_other < d_s0;
  out.condition_2 = d_c >= d_other && (d_other - d_own) > (d_c - d_s0);
  return out;
}

OutsiderChange classify_outsider(double d_c, double d_s0, double d_s0p, double d_s0pp) {
  if (d_c < 0.0 || d_s0 < 0.0 || d_s0p < 0.0 || d_s0pp < 0.0) {
    throw std::invalid_argument("classify_outsider: distances must be nonnegative");
  }
  OutsiderChange out;
  out.inter_before = std::min(d_c, d_s0);
  double d_parts = std::min(d_s0p, d_s0pp);
  out.inter_after = std::min(d_c, d_parts);
  if (out.inter_after > out.inter_before) {
    out.direction = ChangeDirection::Improved;
  } else if (out.inter_after < out.inter_before) {
    out.direction = ChangeDirection::Worsened;
  } else {
    out.direction = ChangeDirection::Unchanged;
  }
  if (d_s0 < d_c) {
    out.case_label = d_parts < d_c ? 1 : 2;  // 1a: a partition stays nearest, 1b: C takes over
  } else {
    out.case_label = d_parts < d_c ? 3 : 4;  // 2a: a partition moves in, 2b: nothing changes
  }
  return out;
}

Dataset counterexample_dataset(double d_c_s0, double d_split, double sigma, std::size_t n_per_cluster,
                               std::uint64_t seed) {
  if (!(d_c_s0 > 0.0) || !(d_split > 0.0)) {
    throw std::invalid_argument("counterexample: cluster centre distances must be positive");
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("counterexample: sigma must be positive");
  if (n_per_cluster < 50) throw std::invalid_argument("counterexample: n_per_cluster must be >= 50");
  GaussianMixtureSpec spec;
  spec.seed = seed;
  // S0 = two clusters d_split apart on the second axis; C on the orthogonal
  // first axis through S0's centroid.
  spec.components.push_back({{0.0, d_split / 2.0}, sigma, n_per_cluster});
  spec.components.push_back({{0.0, -d_split / 2.0}, sigma, n_per_cluster});
  spec.components.push_back({{d_c_s0, 0.0}, sigma, n_per_cluster});
  return generate_gaussian_mixture(spec);
}

Clustering hyperplane_clustering(const Dataset& data, double d_c_s0, bool split_s0) {
  Clustering clustering;
  clustering.data = &data;
  clustering.assignment.resize(data.size());
  clustering.k = split_s0 ? 3 : 2;
  double c_boundary = d_c_s0 / 2.0;  // midpoint hyperplane between S0 centroid and C
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& p = data.points[i];
    if (p[0] >= c_boundary) {
      clustering.assignment[i] = 0;  // C
    } else if (!split_s0) {
      clustering.assignment[i] = 1;  // S0 whole
    } else {
      clustering.assignment[i] = p[1] >= 0.0 ? 1 : 2;  // S0' / S0''
    }
  }
  return clustering;
}

CounterexampleRow counterexample_cell(double d_c_s0, double d_split, double sigma,
                                      std::size_t n_per_cluster, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("counterexample: seed list must be nonempty");
  CounterexampleRow row;
  row.d_c_s0 = d_c_s0;
  row.d_split = d_split;
  row.seeds = seeds.size();
  std::vector<double> deltas;
  for (std::uint64_t seed : seeds) {
    Dataset data = counterexample_dataset(d_c_s0, d_split, sigma, n_per_cluster, seed);
    double before = silhouette_score(hyperplane_clustering(data, d_c_s0, false));
    double after = silhouette_score(hyperplane_clustering(data, d_c_s0, true));
    row.before_mean += before;
    row.after_mean += after;
    deltas.push_back(after - before);
    if (after < before) row.frac_negative += 1.0;
  }
  double n = static_cast<double>(seeds.size());
  row.before_mean /= n;
  row.after_mean /= n;
  for (double d : deltas) row.delta_mean += d;
  row.delta_mean /= n;
  for (double d : deltas) row.delta_std += (d - row.delta_mean) * (d - row.delta_mean);
  row.delta_std = seeds.size() > 1 ? std::sqrt(row.delta_std / (n - 1.0)) : 0.0;
  row.frac_negative /= n;
  return row;
}

std::vector<CounterexampleRow> counterexample_experiment(const std::vector<double>& d_c_s0_grid,
                                                         const std::vector<double>& d_split_grid,
                                                         double sigma, std::size_t n_per_cluster,
                                                         const std::vector<std::uint64_t>& seeds) {
  std::vector<CounterexampleRow> rows;
  for (double dc : d_c_s0_grid) {
    for (double ds : d_split_grid) {
      rows.push_back(counterexample_cell(dc, ds, sigma, n_per_cluster, seeds));
    }
  }
  return rows;
}

HeadlineResult calibrated_headline(double target_before, double tol, double sigma,
                                   std::size_t n_per_cluster, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("headline: seed list must be nonempty");
  const double d_split = 5.0 * sigma;
  std::vector<std::uint64_t> probe{seeds.front()};

  auto before_at = [&](double dc) {
    Dataset data = counterexample_dataset(dc, d_split, sigma, n_per_cluster, probe.front());
    return silhouette_score(hyperplane_clustering(data, dc, false));
  };

  double best_dc = 5.0 * sigma;
  double best_err = std::numeric_limits<double>::infinity();
  for (double dc = 5.0 * sigma; dc <= 16.0 * sigma; dc += 0.5 * sigma) {
    double err = std::abs(before_at(dc) - target_before);
    if (err < best_err) {
      best_err = err;
      best_dc = dc;
    }
  }
  for (double dc = best_dc - 0.5 * sigma; dc <= best_dc + 0.5 * sigma; dc += 0.1 * sigma) {
    if (dc <= 0.0) continue;
    double err = std::abs(before_at(dc) - target_before);
    if (err < best_err) {
      best_err = err;
      best_dc = dc;
    }
  }
  if (best_err > tol) {
    throw std::runtime_error("headline: calibration could not reach the target score");
  }
  HeadlineResult out;
  out.d_c_s0 = best_dc;
  out.d_split = d_split;
  out.calibration_error = best_err;
  out.row = counterexample_cell(best_dc, d_split, sigma, n_per_cluster, seeds);
  return out;
}

}  // namespace dpm
