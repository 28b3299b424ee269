#include "dpm/separability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace dpm {

double euclidean(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw std::invalid_argument("euclidean: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double cross_distance(const PointSet& x, const PointSet& y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("cross_distance: both sides must be nonempty");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : x) {
    for (const auto& b : y) best = std::min(best, euclidean(a, b));
  }
  return best;
}

bool is_rho_separable(const PointSet& x, const PointSet& y, double rho) {
  return cross_distance(x, y) >= rho;
}

std::size_t xi_for_rho(const PointSet& x, const PointSet& y, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("xi_for_rho: rho must be positive");
  std::size_t worst = 0;
  for (const auto& a : x) {
    std::size_t inside = 0;
    for (const auto& b : y) {
      if (euclidean(a, b) <= rho / 2.0) ++inside;
    }
    worst = std::max(worst, inside);
  }
  return worst;
}

Point normalized(const Point& v) {
  double norm = 0.0;
  for (double c : v) norm += c * c;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw std::invalid_argument("projection: direction must be nonzero");
  Point out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / norm;
  return out;
}

double project_point(const Point& v, const Point& x) {
  if (v.size() != x.size()) throw std::invalid_argument("projection: dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * x[i];
  return dot;
}

std::vector<double> project(const Point& v, const PointSet& s) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& x : s) out.push_back(project_point(v, x));
  return out;
}

std::size_t preimage_count(const Point& v, const Gap1D& gap, const PointSet& s) {
  std::size_t count = 0;
  for (const auto& x : s) {
    double p = project_point(v, x);
    if (p > gap.a && p < gap.b) ++count;
  }
  return count;
}

bool check_lemma_rho_empty(const PointSet& data, const Point& v, const Gap1D& gap) {
  auto projected = project(v, data);
  bool gap_clear = true;
  for (double p : projected) {
    if (p > gap.a && p < gap.b) gap_clear = false;
  }
  if (!gap_clear) return true;  // antecedent false, vacuously fine
  return preimage_count(v, gap, data) == 0;
}

namespace {

SeparabilityCertificate build_certificate(const PointSet& points, const Point& v, const Gap1D& gap,
                                          const std::vector<std::size_t>& left,
                                          const std::vector<std::size_t>& right, std::size_t xi) {
  double width = gap.width();
  SeparabilityCertificate cert;
  cert.rho = width;
  cert.rho_statement = width / 2.0;
  cert.xi = xi;
  cert.direction = v;
  cert.left = left;
  cert.right = right;
  if (left.empty() || right.empty()) {
    throw std::invalid_argument("separability: gap leaves one side empty, nothing to certify");
  }
  // Verify the proof-level cross-pair bound directly, and place the separator
  // at the midpoint of the cross pair closest in projection; its projection
  // is centred in the realised gap, so the radius-width/2 ball clears both
  // sides.
  double best_span = std::numeric_limits<double>::infinity();
  std::pair<std::size_t, std::size_t> best_pair{left.front(), right.front()};
  for (std::size_t li : left) {
    double pl = project_point(v, points[li]);
    for (std::size_t ri : right) {
      double pr = project_point(v, points[ri]);
      if (euclidean(points[li], points[ri]) < width - 1e-12) {
        throw std::runtime_error("separability: cross pair below the certified distance");
      }
      double span = std::abs(pr - pl);
      if (span < best_span) {
        best_span = span;
        best_pair = {li, ri};
      }
    }
  }
  const Point& a = points[best_pair.first];
  const Point& b = points[best_pair.second];
  cert.separator.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) cert.separator[i] = 0.5 * (a[i] + b[i]);
  return cert;
}

}  // namespace

SeparabilityCertificate check_lemma_empty_rho(const PointSet& data, const Point& v, const Gap1D& gap) {
  if (!(gap.a < gap.b)) throw std::invalid_argument("separability: gap requires a < b");
  if (preimage_count(v, gap, data) != 0) {
    throw std::invalid_argument("separability: gap preimage must be empty");
  }
  std::vector<std::size_t> left, right;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double p = project_point(v, data[i]);
    if (p >= gap.b) {
      right.push_back(i);
    } else {
      left.push_back(i);  // p <= a by emptiness of the gap
    }
  }
  return build_certificate(data, v, gap, left, right, 0);
}

std::pair<std::size_t, SeparabilityCertificate> check_lemma_rhoxi(const PointSet& s, const Point& v,
                                                                  const Gap1D& gap) {
  if (!(gap.a < gap.b)) throw std::invalid_argument("separability: gap requires a < b");
  std::vector<std::size_t> left, right, inside;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double p = project_point(v, s[i]);
    if (p > gap.a && p < gap.b) {
      inside.push_back(i);
    } else if (p >= gap.b) {
      right.push_back(i);
    } else {
      left.push_back(i);
    }
  }
  auto cert = build_certificate(s, v, gap, left, right, inside.size());
  return {inside.size(), cert};
}

Gap1D best_gap_1d(const std::vector<double>& projected_values, double rho) {
  if (projected_values.empty()) throw std::invalid_argument("best_gap_1d: input must be nonempty");
  if (!(rho > 0.0)) throw std::invalid_argument("best_gap_1d: rho must be positive");
  std::vector<double> values = projected_values;
  std::sort(values.begin(), values.end());
  double lo = values.front();
  double hi = values.back();

  auto count_open = [&](double center) {
    auto first = std::upper_bound(values.begin(), values.end(), center - rho / 2.0);
    auto last = std::lower_bound(values.begin(), values.end(), center + rho / 2.0);
    return static_cast<std::size_t>(last - first);
  };

  double median = values.size() % 2 == 1
                      ? values[values.size() / 2]
                      : 0.5 * (values[values.size() / 2 - 1] + values[values.size() / 2]);

  double center_lo = lo + rho / 2.0;
  double center_hi = hi - rho / 2.0;
  if (center_lo >= center_hi) {
    // rho spans the whole projected range; single centred window.
    double center = 0.5 * (lo + hi);
    return {center - rho / 2.0, center + rho / 2.0, count_open(center)};
  }

  // Count changes only where a window edge crosses a value; evaluate one
  // representative center per constant-count region.
  std::vector<double> events{center_lo, center_hi};
  for (double value : values) {
    for (double edge : {value - rho / 2.0, value + rho / 2.0}) {
      if (edge > center_lo && edge < center_hi) events.push_back(edge);
    }
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  std::size_t best_count = std::numeric_limits<std::size_t>::max();
  double best_center = center_lo;
  double best_median_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    double span = events[i + 1] - events[i];
    double inset = std::min(span * 1e-9, 1e-12);
    double probe = 0.5 * (events[i] + events[i + 1]);
    std::size_t count = count_open(probe);
    double center = std::clamp(median, events[i] + inset, events[i + 1] - inset);
    double median_gap = std::abs(center - median);
    if (count < best_count || (count == best_count && median_gap < best_median_gap)) {
      best_count = count;
      best_center = center;
      best_median_gap = median_gap;
    }
  }
  return {best_center - rho / 2.0, best_center + rho / 2.0, best_count};
}

double emptiness_xi_bridge(std::size_t xi, double n_tilde) {
  if (!(n_tilde > 0.0)) throw std::invalid_argument("emptiness_xi_bridge: n_tilde must be positive");
  return 1.0 - static_cast<double>(xi) / n_tilde;
}

std::string SeparabilityCertificate::to_json() const {
  nlohmann::json j{{"rho", rho},
                   {"rho_statement", rho_statement},
                   {"xi", xi},
                   {"separator", separator},
                   {"direction", direction},
                   {"left_size", left.size()},
                   {"right_size", right.size()}};
  return j.dump(2);
}

}  // namespace dpm
