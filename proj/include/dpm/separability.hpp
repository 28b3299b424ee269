#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace dpm {

using Point = std::vector<double>;
using PointSet = std::vector<Point>;

// Open interval (a, b) on a projection axis together with its contained
// point count.
struct Gap1D {
  double a = 0.0;
  double b = 0.0;
  std::size_t xi_inside = 0;

  double width() const { return b - a; }
};

// Witness of a separation: a separator point whose radius-rho/2 ball contains
// at most xi points of the union, plus the partition it certifies. rho is the
// cross-pair bound established by the underlying construction (the gap
// width); rho_statement is the halved constant the separability statement
// quotes. Both are reported.
struct SeparabilityCertificate {
  double rho = 0.0;
  double rho_statement = 0.0;
  std::size_t xi = 0;
  Point separator;
  Point direction;
  std::vector<std::size_t> left;   // indices with projection <= gap start
  std::vector<std::size_t> right;  // indices with projection >= gap end

  std::string to_json() const;
};

double euclidean(const Point& a, const Point& b);

// Minimum pairwise distance between the two sides.
double cross_distance(const PointSet& x, const PointSet& y);

bool is_rho_separable(const PointSet& x, const PointSet& y, double rho);

// Smallest xi such that every radius-rho/2 ball around a point of X contains
// at most xi points of Y. One-sided by definition; call twice for both
// directions.
std::size_t xi_for_rho(const PointSet& x, const PointSet& y, double rho);

Point normalized(const Point& v);
double project_point(const Point& v, const Point& x);
std::vector<double> project(const Point& v, const PointSet& s);
std::size_t preimage_count(const Point& v, const Gap1D& gap, const PointSet& s);

// Empty projected gap implies an empty preimage.
bool check_lemma_rho_empty(const PointSet& data, const Point& v, const Gap1D& gap);

// Empty preimage of (a, b) yields a partition whose cross pairs are all at
// distance >= b - a; the certificate carries the witnessing separator (the
// midpoint of the projection-closest cross pair). Throws when the gap is not
// empty.
SeparabilityCertificate check_lemma_empty_rho(const PointSet& data, const Point& v, const Gap1D& gap);

// Relaxed variant: the xi points projecting into the gap are set aside, the
// remaining sides must be at cross distance >= gap width. Returns xi with the
// certificate.
std::pair<std::size_t, SeparabilityCertificate> check_lemma_rhoxi(const PointSet& s, const Point& v,
                                                                  const Gap1D& gap);

// Width-rho window over the projected values minimizing the contained count;
// ties are broken toward the window whose centre is closest to the median.
Gap1D best_gap_1d(const std::vector<double>& projected_values, double rho);

// 1 - xi/n_tilde: the emptiness of a width-rho split interval holding xi
// points, connecting gap counting to the split score.
double emptiness_xi_bridge(std::size_t xi, double n_tilde);

}  // namespace dpm
