#include "dpm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dpm {

void Dataset::validate() const {
  if (dim < 1) throw std::invalid_argument("dataset: dim must be >= 1");
  if (bounds.size() != dim) throw std::invalid_argument("dataset: bounds size must equal dim");
  for (std::size_t d = 0; d < dim; ++d) {
    if (!(bounds[d].first < bounds[d].second)) {
      throw std::invalid_argument("dataset: bounds[" + std::to_string(d) + "] must satisfy low < high");
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) {
      throw std::invalid_argument("dataset: point " + std::to_string(i) + " has wrong dimensionality");
    }
    for (std::size_t d = 0; d < dim; ++d) {
      if (points[i][d] < bounds[d].first || points[i][d] > bounds[d].second) {
        throw std::invalid_argument("dataset: point " + std::to_string(i) + " outside bounds in dimension " +
                                    std::to_string(d));
      }
    }
  }
  if (!labels.empty() && labels.size() != points.size()) {
    throw std::invalid_argument("dataset: labels size must equal number of points");
  }
}

void Dataset::fit_bounds() {
  bounds.assign(dim, {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  for (const auto& p : points) {
    for (std::size_t d = 0; d < dim; ++d) {
      bounds[d].first = std::min(bounds[d].first, p[d]);
      bounds[d].second = std::max(bounds[d].second, p[d]);
    }
  }
  for (auto& [lo, hi] : bounds) {
    double pad = 0.01 * (hi - lo);
    if (pad <= 0.0) pad = 1e-9;
    lo -= pad;
    hi += pad;
  }
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::runtime_error("csv parse error: non-numeric cell at row " + std::to_string(row) + ", column " +
                             std::to_string(col));
  }
  return value;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path);
  auto header = split_row(line);
  bool has_label = !header.empty() && header.back().rfind("label", 0) == 0;
  std::size_t dim = header.size() - (has_label ? 1 : 0);
  if (dim == 0) throw std::runtime_error("csv: header has no coordinate columns in " + path);

  Dataset data;
  data.dim = dim;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") {
      ++row;
      continue;
    }
    auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("csv parse error: row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " cells, expected " + std::to_string(header.size()));
    }
    std::vector<double> point(dim);
    for (std::size_t d = 0; d < dim; ++d) point[d] = parse_cell(cells[d], row, d);
    data.points.push_back(std::move(point));
    if (has_label) data.labels.push_back(static_cast<int>(parse_cell(cells[dim], row, dim)));
    ++row;
  }
  data.fit_bounds();
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write " + path);
  out.precision(17);
  for (std::size_t d = 0; d < data.dim; ++d) {
    out << (d ? "," : "") << "x" << d;
  }
  bool has_label = !data.labels.empty();
  if (has_label) out << ",label";
  out << "\n";
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    for (std::size_t d = 0; d < data.dim; ++d) {
      out << (d ? "," : "") << data.points[i][d];
    }
    if (has_label) out << "," << data.labels[i];
    out << "\n";
  }
}

}  // namespace dpm
