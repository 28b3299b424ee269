#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace dpm {

// A point set with known per-dimension bounds. Bounds are part of the data
// contract: the clustering engine derives its split candidates from them and
// never inspects coordinates outside.
struct Dataset {
  std::vector<std::vector<double>> points;       // n rows, dim columns
  std::size_t dim = 0;
  std::vector<std::pair<double, double>> bounds; // per-dimension (low, high)
  std::vector<int> labels;                       // optional ground truth, empty if absent

  std::size_t size() const { return points.size(); }

  // Throws std::invalid_argument naming the offending field/point.
  void validate() const;

  // Recomputes bounds as the coordinate-wise min/max padded by 1% of the
  // range on each side (a degenerate zero range gets a small absolute pad).
  void fit_bounds();
};

// CSV with header row "x0,...,x{d-1}[,label]". The label column is optional
// and never fed to the clustering engine. Values are written with enough
// digits to round-trip within 1e-12 per coordinate.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& data, const std::string& path);

}  // namespace dpm
