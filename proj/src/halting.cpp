#include "dpm/halting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpm/dp.hpp"
#include "dpm/normal.hpp"
#include "json.hpp"

namespace dpm {

CandidateCounts BoundScenario::counts_at(double t_lo, double t_hi) const {
  if (centreness_values.empty()) return counts;
  CandidateCounts out;
  for (double c : centreness_values) {
    if (c <= t_lo) {
      ++out.halting;
    } else if (c >= t_hi) {
      ++out.central;
    } else {
      ++out.mid;
    }
  }
  return out;
}

BoundScenario scenario_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  BoundScenario s;
  s.n_tilde = j.at("n_tilde").get<double>();
  s.tau_e = j.at("tau_e").get<double>();
  s.t = j.value("t", s.t);
  s.q = j.value("q", s.q);
  s.alpha = j.value("alpha", s.alpha);
  s.eps = j.value("eps", s.eps);
  s.delta_f = j.value("delta_f", s.delta_f);
  s.e_min = j.value("e_min", s.e_min);
  s.e_qi = j.value("e_qi", s.e_qi);
  s.counts.halting = j.value("w_halt", s.counts.halting);
  s.counts.mid = j.value("w_mid", s.counts.mid);
  s.counts.central = j.value("w_central", s.counts.central);
  s.t_prime = j.value("t_prime", s.t_prime);
  s.levels = j.value("levels", s.levels);
  if (j.contains("centreness_values")) {
    s.centreness_values = j["centreness_values"].get<std::vector<double>>();
  }
  return s;
}

std::string scenario_to_json(const BoundScenario& s) {
  nlohmann::json j{{"n_tilde", s.n_tilde}, {"tau_e", s.tau_e},   {"t", s.t},
                   {"q", s.q},             {"alpha", s.alpha},   {"eps", s.eps},
                   {"delta_f", s.delta_f}, {"e_min", s.e_min},   {"e_qi", s.e_qi},
                   {"w_halt", s.counts.halting}, {"w_mid", s.counts.mid}, {"w_central", s.counts.central},
                   {"t_prime", s.t_prime}, {"levels", s.levels}};
  if (!s.centreness_values.empty()) j["centreness_values"] = s.centreness_values;
  return j.dump(2);
}

BoundScenario measure_scenario(const Dataset& data, const ScoreParams& params, std::size_t tau_e,
                               double eps_select, double eps_count, double delta,
                               std::optional<double> sensitivity) {
  data.validate();
  params.validate();
  double n_tilde = static_cast<double>(data.size()) + noisy_count_offset(eps_count, delta, data.size());

  std::vector<std::vector<double>> projections(data.dim);
  for (std::size_t d = 0; d < data.dim; ++d) {
    projections[d].reserve(data.size());
    for (const auto& p : data.points) projections[d].push_back(p[d]);
    std::sort(projections[d].begin(), projections[d].end());
  }
  auto candidates = generate_candidates(data.bounds, params.beta);
  score_candidates(candidates, projections, n_tilde, params);

  BoundScenario s;
  s.n_tilde = n_tilde;
  s.tau_e = static_cast<double>(tau_e);
  s.t = params.t;
  s.q = params.q;
  s.alpha = params.alpha;
  s.eps = eps_select;
  s.delta_f = sensitivity ? *sensitivity : (1.0 + params.alpha) / n_tilde;
  s.e_min = std::numeric_limits<double>::infinity();
  s.e_qi = -std::numeric_limits<double>::infinity();
  double nq = n_tilde * params.q;
  for (const auto& c : candidates) {
    s.e_min = std::min(s.e_min, c.emptiness_value);
    if (c.rank > nq && c.rank < n_tilde - nq) s.e_qi = std::max(s.e_qi, c.emptiness_value);
    s.centreness_values.push_back(c.centreness_value);
  }
  if (!std::isfinite(s.e_qi)) s.e_qi = s.e_min;  // inner quantile held no candidate
  double t_tau = centreness_threshold(s.tau_e, s.n_tilde, s.t, s.q);
  s.counts = s.counts_at(t_tau, s.t);
  return s;
}

double centreness_threshold(double tau_e, double n_tilde, double t, double q) {
  if (!(2.0 * tau_e <= n_tilde)) {
    throw std::invalid_argument("centreness_threshold: 2*tau_e must not exceed n_tilde (no admissible split)");
  }
  return centreness(tau_e, n_tilde, t, q);
}

double threshold_evolution_base(double tau_e, double n_tilde) {
  if (!(2.0 * tau_e <= n_tilde)) {
    throw std::invalid_argument("threshold_evolution_base: 2*tau_e must not exceed n_tilde (no admissible split)");
  }
  return 2.0 * tau_e / n_tilde;
}

namespace {

double exponent_scale(const BoundScenario& s) {
  if (!(s.delta_f > 0.0)) throw std::invalid_argument("scenario: delta_f must be positive");
  return s.eps / (2.0 * s.delta_f);
}

// log(sum count_i * exp(a_i)), stabilised; terms with count 0 are dropped.
double log_sum_exp(const std::vector<std::pair<std::size_t, double>>& terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& [count, a] : terms) {
    if (count > 0) top = std::max(top, a);
  }
  if (!std::isfinite(top)) throw std::invalid_argument("halting bound: all candidate counts are zero");
  double sum = 0.0;
  for (const auto& [count, a] : terms) {
    if (count > 0) sum += static_cast<double>(count) * std::exp(a - top);
  }
  return top + std::log(sum);
}

}  // namespace

double prob_halt_immediately_lower(const BoundScenario& s, double t_tau) {
  double k = exponent_scale(s);
  CandidateCounts c = s.counts_at(t_tau, s.t);
  if (c.total() == 0) throw std::invalid_argument("halting bound: all candidate counts are zero");
  if (c.halting == 0) return 0.0;
  double log_num = std::log(static_cast<double>(c.halting)) + s.e_min * k;
  double log_den = log_sum_exp({{c.halting, (t_tau + s.alpha) * k},
                                {c.central, (1.0 + s.alpha * s.e_qi) * k},
                                {c.mid, (s.t + s.alpha) * k}});
  return std::exp(log_num - log_den);
}

double prob_halt_immediately_lower(const BoundScenario& s) {
  return prob_halt_immediately_lower(s, centreness_threshold(s.tau_e, s.n_tilde, s.t, s.q));
}

double prob_central_split_lower(const BoundScenario& s, double t_tau, double t_prime,
                                bool proof_text_numerator) {
  if (!(t_tau < t_prime && t_prime < s.t)) {
    throw std::invalid_argument("central split bound: requires t_tau < t_prime < t");
  }
  CandidateCounts c = s.counts_at(t_tau, t_prime);
  if (c.central == 0) {
    throw std::invalid_argument("central split bound: requires at least one t_prime-central split");
  }
  double k = exponent_scale(s);
  double num_base = proof_text_numerator ? t_prime : t_tau;
  double log_num = (num_base + s.e_min * s.alpha) * k;
  double log_den = log_sum_exp({{c.halting, (t_tau + s.alpha) * k},
                                {c.central, (1.0 + s.alpha * s.e_qi) * k},
                                {c.mid, (t_prime + s.alpha) * k}});
  return std::exp(log_num - log_den);
}

double prob_central_split_lower(const BoundScenario& s) {
  return prob_central_split_lower(s, centreness_threshold(s.tau_e, s.n_tilde, s.t, s.q), s.t_prime);
}

double prob_not_halt_lower(const BoundScenario& s, double t_tau) {
  double k = exponent_scale(s);
  CandidateCounts c = s.counts_at(t_tau, s.t);
  if (t_tau > s.t) c.mid = 0;  // the two classes already cover every candidate
  if (c.halting == 0) return 1.0;
  double log_num = std::log(static_cast<double>(c.halting)) + (s.alpha + t_tau) * k;
  double log_den = log_sum_exp({{c.halting, s.e_min * s.alpha * k},
                                {c.mid, (s.e_min * s.alpha + t_tau) * k},
                                {c.central, (s.e_min * s.alpha + s.t) * k}});
  return 1.0 - std::exp(log_num - log_den);
}

double prob_not_halt_lower(const BoundScenario& s) {
  return prob_not_halt_lower(s, centreness_threshold(s.tau_e, s.n_tilde, s.t, s.q));
}

GrowthFactor threshold_growth_factor(double t_prime, double t, double q) {
  GrowthFactor out;
  double ratio;
  if (t_prime > t) {
    ratio = t_prime * q / t;
    if (ratio <= 0.0 || ratio >= 1.0) return out;  // 1/(1 - ratio) undefined or negative
    out.value = std::min(t / (t_prime * q), 1.0 / (1.0 - ratio));
  } else {
    if (t == 1.0) return out;
    ratio = (t - 2.0 * t_prime - 2.0 * q) / (2.0 * (t - 1.0));
    if (ratio <= 0.0 || ratio >= 1.0) {
      // The printed min(1/x, 1/(1-x)) needs x in (0, 1); report.
      out.ratio_in_unit = false;
      if (ratio > 0.0) {  // x > 1: 1/x is still positive, 1/(1-x) flips sign
        out.value = 1.0 / ratio;
        out.defined = out.value > 0.0;
      }
      return out;
    }
    out.value = std::min(1.0 / ratio, 1.0 / (1.0 - ratio));
  }
  out.ratio_in_unit = ratio > 0.0 && ratio < 1.0;
  out.defined = out.value > 0.0 && std::isfinite(out.value);
  return out;
}

double threshold_evolution(double t_tau0, int level, double t_prime, double t, double q,
                           EvolutionMode mode) {
  if (level < 0) throw std::invalid_argument("threshold_evolution: level must be >= 0");
  if (level == 0) return t_tau0;
  if (mode == EvolutionMode::General) {
    // t_tau0 = 2*tau_e/n, so n/(n - tau_e) = 1/(1 - t_tau0/2).
    double factor = 1.0 / (1.0 - t_tau0 / 2.0);
    return t_tau0 * std::pow(factor, level);
  }
  GrowthFactor f = threshold_growth_factor(t_prime, t, q);
  if (!f.defined) throw std::invalid_argument("threshold_evolution: growth factor undefined for these parameters");
  return t_tau0 * std::pow(f.value, level);
}

double tprime_evolution(double t_prime, int level, double t, double q) {
  if (level < 0) throw std::invalid_argument("tprime_evolution: level must be >= 0");
  if (level == 0) return t_prime;
  GrowthFactor f = threshold_growth_factor(t_prime, t, q);
  if (!f.defined) throw std::invalid_argument("tprime_evolution: growth factor undefined for these parameters");
  return t_prime * std::pow(f.value, level);
}

HaltBound prob_halt_within(const BoundScenario& s, int levels_j, EvolutionMode mode,
                           bool proof_text_numerator) {
  if (levels_j < 0) throw std::invalid_argument("prob_halt_within: levels must be >= 0");
  HaltBound out;
  // the printed evolution starts from the c_{2q,q} lower bound of the
  // threshold, not from the (t, q)-dependent value
  double t_tau0 = threshold_evolution_base(s.tau_e, s.n_tilde);

  // Precompute per-level thresholds and progression bounds, stopping at the
  // first level where the t'-evolution saturates past 1.
  std::vector<double> t_taus, progress;
  for (int level = 0; level <= levels_j; ++level) {
    double t_tau_l = threshold_evolution(t_tau0, level, s.t_prime, s.t, s.q, mode);
    if (mode == EvolutionMode::TPrime) {
      double tp_l = tprime_evolution(s.t_prime, level, s.t, s.q);
      if (tp_l >= 1.0 || t_tau_l >= 1.0 || !(t_tau_l < tp_l && tp_l < s.t)) {
        out.saturated = true;
        break;
      }
      t_taus.push_back(t_tau_l);
      progress.push_back(prob_central_split_lower(s, t_tau_l, tp_l, proof_text_numerator));
    } else {
      if (t_tau_l >= 1.0) {
        out.saturated = true;
        break;
      }
      t_taus.push_back(t_tau_l);
      progress.push_back(prob_not_halt_lower(s, t_tau_l));
    }
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < t_taus.size(); ++i) {
    double imm = prob_halt_immediately_lower(s, t_taus[i]);
    out.immediate_terms.push_back(imm);
    // Product of the progression bounds over the levels below i (empty at
    // i = 0), raised to 2^i, in log space. A non-positive progression bound
    // is vacuous: raising it to an even power would fabricate a large
    // positive "lower bound", so such terms contribute zero; the raw factor
    // values stay visible in progress_factors.
    double log_mag = 0.0;
    bool vacuous = false;
    for (std::size_t l = 0; l < i; ++l) {
      double p = progress[l];
      if (p <= 0.0) {
        vacuous = true;
        break;
      }
      log_mag += std::log(p);
    }
    if (imm <= 0.0 || vacuous) continue;
    sum += imm * std::exp(std::exp2(static_cast<double>(i)) * log_mag);
  }
  out.levels_used = static_cast<int>(t_taus.size());
  out.progress_factors = progress;
  out.raw = sum;
  out.clamped = std::clamp(sum, 0.0, 1.0);
  return out;
}

double gaussian_median_shift(int level) {
  if (level < 0 || level > 12) throw std::invalid_argument("gaussian_median_shift: level must lie in [0, 12]");
  return normal_quantile(1.0 - std::exp2(-static_cast<double>(level) - 1.0));
}

double central_emptiness_at(double z, int level, double beta_over_sigma) {
  if (level < 0) throw std::invalid_argument("central_emptiness: level must be >= 0");
  double half_width = beta_over_sigma / 2.0;
  double mass = normal_cdf(z + half_width) - normal_cdf(z - half_width);
  return 1.0 - std::exp2(static_cast<double>(level)) * mass;
}

double central_emptiness(int level, double beta_over_sigma) {
  return central_emptiness_at(gaussian_median_shift(level), level, beta_over_sigma);
}

double gaussian_halt_threshold(int level, double alpha, double m, double e_central) {
  if (level < 0) throw std::invalid_argument("gaussian_halt_threshold: level must be >= 0");
  return (1.0 + (e_central - 1.0) * alpha + m) / std::exp2(static_cast<double>(level));
}

const std::array<double, 7>& reference_median_shifts() {
  static const std::array<double, 7> table = {0.0, 0.6744, 1.15, 1.53, 1.86, 2.13, 2.41};
  return table;
}

std::vector<GaussianSeriesRow> gaussian_series(int max_level, double beta_over_sigma) {
  std::vector<GaussianSeriesRow> rows;
  for (int level = 0; level <= max_level; ++level) {
    GaussianSeriesRow row;
    row.level = level;
    row.z = gaussian_median_shift(level);
    row.e_central = central_emptiness_at(row.z, level, beta_over_sigma);
    if (level < static_cast<int>(reference_median_shifts().size())) {
      row.z_reference = reference_median_shifts()[level];
      row.e_central_at_reference = central_emptiness_at(row.z_reference, level, beta_over_sigma);
    } else {
      row.z_reference = row.z;
      row.e_central_at_reference = row.e_central;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<Fig4Row> reproduce_fig4(const std::vector<double>& alphas, double m, int max_level) {
  std::vector<Fig4Row> rows;
  auto series = gaussian_series(max_level, 0.5);
  for (double alpha : alphas) {
    for (const auto& srow : series) {
      Fig4Row row;
      row.level = srow.level;
      row.alpha = alpha;
      row.threshold = gaussian_halt_threshold(srow.level, alpha, m, srow.e_central);
      row.threshold_at_reference = gaussian_halt_threshold(srow.level, alpha, m, srow.e_central_at_reference);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace dpm
