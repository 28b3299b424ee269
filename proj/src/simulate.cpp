#include "dpm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dpm/datagen.hpp"
#include "dpm/dp.hpp"
#include "json.hpp"

namespace dpm {

Wilson wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: trials must be >= 1");
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double margin = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - margin), std::min(1.0, center + margin)};
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("spearman: need two equally sized series");
  }
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= rx.size();
  my /= ry.size();
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    cov += (rx[i] - mx) * (ry[i] - my);
    vx += (rx[i] - mx) * (rx[i] - mx);
    vy += (ry[i] - my) * (ry[i] - my);
  }
  if (vx == 0.0 || vy == 0.0) throw std::invalid_argument("spearman: constant series");
  return cov / std::sqrt(vx * vy);
}

namespace {

// Candidate statistics that do not depend on the noisy count; computed once
// per dataset and rescored cheaply per draw of n_tilde.
struct FrozenCandidates {
  std::vector<SplitCandidate> candidates;  // counts and ranks filled
  double offset = 0.0;
  std::size_t n = 0;
};

FrozenCandidates freeze_candidates(const Dataset& data, const DpmConfig& config) {
  FrozenCandidates out;
  out.n = data.size();
  out.offset = noisy_count_offset(config.eps_count, config.delta, data.size());
  out.candidates = generate_candidates(data.bounds, config.score.beta);
  std::vector<std::vector<double>> projections(data.dim);
  for (std::size_t d = 0; d < data.dim; ++d) {
    projections[d].reserve(data.size());
    for (const auto& p : data.points) projections[d].push_back(p[d]);
    std::sort(projections[d].begin(), projections[d].end());
  }
  for (auto& c : out.candidates) {
    const auto& values = projections[c.dimension];
    c.count_in_interval = count_within(c.position, c.width, values);
    c.rank = rank_of(c.position, values);
  }
  return out;
}

struct RootDraw {
  std::size_t pick = 0;
  double centreness_value = 0.0;
  double t_tau = 0.0;
  bool no_admissible_split = false;  // 2 tau_e > n_tilde
};

RootDraw root_selection(const FrozenCandidates& frozen, const DpmConfig& cfg, SplitMix64& rng) {
  double n_tilde = static_cast<double>(frozen.n) + frozen.offset;
  if (!cfg.deterministic_counts) n_tilde += sample_laplace(1.0 / cfg.eps_count, rng);
  double n_eff = std::max(n_tilde, 1.0);

  ScoredCandidateSet set;
  set.scores.reserve(frozen.candidates.size());
  std::vector<double> centrenesses;
  centrenesses.reserve(frozen.candidates.size());
  for (const auto& c : frozen.candidates) {
    double e = emptiness(c.count_in_interval, n_eff);
    double cen = centreness(c.rank, n_eff, cfg.score.t, cfg.score.q);
    centrenesses.push_back(cen);
    set.scores.push_back(split_score(e, cen, cfg.score.alpha));
  }
  set.sensitivity = cfg.sensitivity ? *cfg.sensitivity : (1.0 + cfg.score.alpha) / n_eff;

  RootDraw out;
  out.pick = exponential_mechanism(set, cfg.eps_select, rng, cfg.halved_exponent);
  out.centreness_value = centrenesses[out.pick];
  if (2.0 * static_cast<double>(cfg.tau_e) > n_eff) {
    out.no_admissible_split = true;
    out.t_tau = 1.0;
  } else {
    out.t_tau = centreness_threshold(static_cast<double>(cfg.tau_e), n_eff, cfg.score.t, cfg.score.q);
  }
  return out;
}

double exact_halt_recursive(const Dataset& data, const DpmConfig& cfg,
                            const std::vector<SplitCandidate>& candidates, double offset,
                            const std::vector<std::size_t>& subset, int levels_left) {
  double n_tilde = static_cast<double>(subset.size()) + offset;
  double n_eff = std::max(n_tilde, 1.0);

  std::vector<std::vector<double>> projections(data.dim);
  for (std::size_t d = 0; d < data.dim; ++d) {
    projections[d].reserve(subset.size());
    for (std::size_t idx : subset) projections[d].push_back(data.points[idx][d]);
    std::sort(projections[d].begin(), projections[d].end());
  }
  std::vector<SplitCandidate> scored = candidates;
  score_candidates(scored, projections, n_eff, cfg.score);

  ScoredCandidateSet set;
  set.scores.reserve(scored.size());
  for (const auto& c : scored) set.scores.push_back(c.score);
  set.sensitivity = cfg.sensitivity ? *cfg.sensitivity : (1.0 + cfg.score.alpha) / n_eff;
  auto pmf = em_pmf(set, cfg.eps_select, cfg.halved_exponent);

  double total = 0.0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    std::vector<std::size_t> left, right;
    for (std::size_t idx : subset) {
      if (data.points[idx][scored[i].dimension] < scored[i].position) {
        left.push_back(idx);
      } else {
        right.push_back(idx);
      }
    }
    double left_size = static_cast<double>(left.size()) + offset;
    double right_size = static_cast<double>(right.size()) + offset;
    bool violates = std::min(left_size, right_size) < static_cast<double>(cfg.tau_e);
    if (violates) {
      total += pmf[i];
    } else if (levels_left > 0) {
      total += pmf[i] * exact_halt_recursive(data, cfg, candidates, offset, left, levels_left - 1) *
               exact_halt_recursive(data, cfg, candidates, offset, right, levels_left - 1);
    }
  }
  // the pmf itself carries ~1e-12 of accumulation error; keep the recursion
  // inside [0, 1]
  return std::min(total, 1.0);
}

}  // namespace

double exact_halt_probability(const Dataset& data, const DpmConfig& config, int max_level) {
  data.validate();
  config.validate();
  auto candidates = generate_candidates(data.bounds, config.score.beta);
  if (candidates.size() > 12 || max_level > 3 || max_level < 0) {
    throw std::invalid_argument("exact_halt_probability: feasible only for <= 12 candidates and <= 3 levels");
  }
  double offset = noisy_count_offset(config.eps_count, config.delta, data.size());
  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) all[i] = i;
  return exact_halt_recursive(data, config, candidates, offset, all, max_level);
}

namespace {

std::string target_name(TrialTarget t) {
  switch (t) {
    case TrialTarget::ImmediateHalt: return "immediate_halt";
    case TrialTarget::NotHalt: return "not_halt";
    case TrialTarget::CentralSplit: return "central_split";
    case TrialTarget::HaltWithin: return "halt_within";
    case TrialTarget::EmUtility: return "em_utility";
    case TrialTarget::NoisyCountTail: return "noisy_count_tail";
  }
  return "unknown";
}

void finish_report(BoundReport& report) {
  report.empirical = static_cast<double>(report.successes) / static_cast<double>(report.trials);
  report.ci95 = wilson_interval(report.successes, report.trials, kZ95);
  report.ci99 = wilson_interval(report.successes, report.trials, kZ99);
  switch (report.kind) {
    case BoundKind::LowerBound:
      report.loose = report.raw_bound <= 0.0;
      report.holds = report.bound <= report.ci99.hi + report.slack;
      break;
    case BoundKind::UpperBound:
      report.holds = report.empirical <= report.bound + report.slack;
      break;
    case BoundKind::TwoSided:
      report.holds = report.bound >= report.ci99.lo - report.slack && report.bound <= report.ci99.hi + report.slack;
      break;
  }
}

}  // namespace

BoundReport run_plan(const TrialPlan& plan) {
  if (plan.trials < 1) throw std::invalid_argument("run_plan: trials must be >= 1");
  BoundReport report;
  report.name = plan.name;
  report.target = target_name(plan.target);
  report.trials = plan.trials;
  report.slack = plan.slack;

  switch (plan.target) {
    case TrialTarget::ImmediateHalt:
    case TrialTarget::NotHalt:
    case TrialTarget::CentralSplit: {
      plan.config.validate();
      auto frozen = freeze_candidates(plan.dataset, plan.config);
      BoundScenario scenario =
          measure_scenario(plan.dataset, plan.config.score, plan.config.tau_e, plan.config.eps_select,
                           plan.config.eps_count, plan.config.delta, plan.config.sensitivity);
      scenario.t_prime = plan.t_prime;
      for (std::size_t trial = 0; trial < plan.trials; ++trial) {
        SplitMix64 rng = derive_rng(plan.master_seed, trial);
        RootDraw draw = root_selection(frozen, plan.config, rng);
        bool success = false;
        if (plan.target == TrialTarget::ImmediateHalt) {
          success = draw.no_admissible_split || draw.centreness_value <= draw.t_tau;
        } else if (plan.target == TrialTarget::NotHalt) {
          success = !draw.no_admissible_split && draw.centreness_value > draw.t_tau;
        } else {
          success = draw.centreness_value >= plan.t_prime;
        }
        if (success) ++report.successes;
      }
      report.kind = BoundKind::LowerBound;
      if (plan.target == TrialTarget::ImmediateHalt) {
        report.bound = prob_halt_immediately_lower(scenario);
      } else if (plan.target == TrialTarget::NotHalt) {
        report.bound = prob_not_halt_lower(scenario);
      } else {
        report.bound = prob_central_split_lower(scenario);
        report.extras.emplace_back("t_prime", plan.t_prime);
      }
      report.raw_bound = report.bound;
      report.mode_flags = plan.config.deterministic_counts ? "deterministic_counts" : "real_noise";
      break;
    }
    case TrialTarget::HaltWithin: {
      DpmConfig cfg = plan.config;
      cfg.tau_s = static_cast<std::size_t>(plan.levels) + 1;
      cfg.validate();
      for (std::size_t trial = 0; trial < plan.trials; ++trial) {
        auto result = run_dpm(plan.dataset, cfg, mix_seed(plan.master_seed, trial));
        if (result.all_leaves_min_size()) ++report.successes;
      }
      BoundScenario scenario = measure_scenario(plan.dataset, cfg.score, cfg.tau_e, cfg.eps_select,
                                                cfg.eps_count, cfg.delta, cfg.sensitivity);
      scenario.t_prime = plan.t_prime;
      HaltBound hb = prob_halt_within(scenario, plan.levels, plan.mode, plan.proof_text_numerator);
      report.kind = BoundKind::LowerBound;
      report.bound = hb.clamped;
      report.raw_bound = hb.raw;
      report.extras.emplace_back("levels", plan.levels);
      report.extras.emplace_back("saturated", hb.saturated ? 1.0 : 0.0);
      report.mode_flags = std::string(plan.mode == EvolutionMode::TPrime ? "tprime" : "general") +
                          (cfg.deterministic_counts ? ",deterministic_counts" : ",real_noise");
      break;
    }
    case TrialTarget::EmUtility: {
      ScoredCandidateSet set{plan.em_scores, plan.em_delta_f};
      auto pmf = em_pmf(set, plan.em_eps);
      double opt = *std::max_element(plan.em_scores.begin(), plan.em_scores.end());
      std::size_t near_opt = 0;
      for (double s : plan.em_scores) {
        if (opt - s <= plan.omega) ++near_opt;
      }
      double gap = em_utility_gap(plan.em_scores.size(), near_opt, plan.omega, plan.kappa, plan.em_eps,
                                  plan.em_delta_f);
      double threshold = opt - gap;
      for (std::size_t trial = 0; trial < plan.trials; ++trial) {
        SplitMix64 rng = derive_rng(plan.master_seed, trial);
        std::size_t pick = sample_index(pmf, rng);
        if (plan.em_scores[pick] <= threshold) ++report.successes;
      }
      report.kind = BoundKind::UpperBound;
      report.bound = std::exp(-plan.kappa);
      report.raw_bound = report.bound;
      report.extras.emplace_back("kappa", plan.kappa);
      report.extras.emplace_back("omega", plan.omega);
      report.extras.emplace_back("shortfall_threshold", threshold);
      report.mode_flags = "synthetic_scores";
      break;
    }
    case TrialTarget::NoisyCountTail: {
      double offset = noisy_count_offset(plan.nc_eps, plan.nc_delta, plan.nc_n);
      for (std::size_t trial = 0; trial < plan.trials; ++trial) {
        SplitMix64 rng = derive_rng(plan.master_seed, trial);
        NoisyCount nc = noisy_count(plan.nc_n, plan.nc_eps, plan.nc_delta, plan.nc_n, rng);
        double divergence = nc.value - nc.offset - static_cast<double>(plan.nc_n);
        if (divergence > offset) ++report.successes;
      }
      report.kind = BoundKind::TwoSided;
      report.bound = noisy_count_tail_probability(plan.nc_eps, plan.nc_delta, plan.nc_n);
      report.raw_bound = report.bound;
      // The offset formula with delta = 1 gives this tail; reported alongside.
      report.extras.emplace_back("tail_at_delta_one", 0.5 / std::sqrt(static_cast<double>(plan.nc_n)));
      report.extras.emplace_back("offset", offset);
      report.mode_flags = "analytic_tail";
      break;
    }
  }
  finish_report(report);
  return report;
}

std::vector<BoundReport> sweep(const std::vector<TrialPlan>& plans) {
  std::vector<BoundReport> out;
  out.reserve(plans.size());
  for (const auto& plan : plans) out.push_back(run_plan(plan));
  return out;
}

std::string reports_to_csv(const std::vector<BoundReport>& reports) {
  std::ostringstream out;
  out.precision(10);
  out << "name,target,kind,mode,trials,successes,empirical,ci95_lo,ci95_hi,ci99_lo,ci99_hi,"
         "bound,raw_bound,loose,holds,slack,extras\n";
  for (const auto& r : reports) {
    out << r.name << ',' << r.target << ','
        << (r.kind == BoundKind::LowerBound ? "lower" : r.kind == BoundKind::UpperBound ? "upper" : "two_sided")
        << ',' << '"' << r.mode_flags << '"' << ',' << r.trials << ',' << r.successes << ',' << r.empirical
        << ',' << r.ci95.lo << ',' << r.ci95.hi << ',' << r.ci99.lo << ',' << r.ci99.hi << ',' << r.bound
        << ',' << r.raw_bound << ',' << (r.loose ? 1 : 0) << ',' << (r.holds ? 1 : 0) << ',' << r.slack << ",\"";
    for (std::size_t i = 0; i < r.extras.size(); ++i) {
      out << (i ? ";" : "") << r.extras[i].first << '=' << r.extras[i].second;
    }
    out << "\"\n";
  }
  return out.str();
}

std::string BoundReport::to_json() const {
  nlohmann::json j{{"name", name},
                   {"target", target},
                   {"kind", kind == BoundKind::LowerBound ? "lower" : kind == BoundKind::UpperBound ? "upper" : "two_sided"},
                   {"mode", mode_flags},
                   {"trials", trials},
                   {"successes", successes},
                   {"empirical", empirical},
                   {"ci95", {{"lo", ci95.lo}, {"hi", ci95.hi}}},
                   {"ci99", {{"lo", ci99.lo}, {"hi", ci99.hi}}},
                   {"bound", bound},
                   {"raw_bound", raw_bound},
                   {"loose", loose},
                   {"holds", holds},
                   {"slack", slack}};
  for (const auto& [key, value] : extras) j["extras"][key] = value;
  return j.dump(2);
}

TrialPlan plan_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  TrialPlan plan;
  plan.name = j.value("name", std::string("plan"));
  std::string target = j.at("target").get<std::string>();
  if (target == "immediate_halt") {
    plan.target = TrialTarget::ImmediateHalt;
  } else if (target == "not_halt") {
    plan.target = TrialTarget::NotHalt;
  } else if (target == "central_split") {
    plan.target = TrialTarget::CentralSplit;
  } else if (target == "halt_within") {
    plan.target = TrialTarget::HaltWithin;
  } else if (target == "em_utility") {
    plan.target = TrialTarget::EmUtility;
  } else if (target == "noisy_count_tail") {
    plan.target = TrialTarget::NoisyCountTail;
  } else {
    throw std::invalid_argument("plan: unknown target '" + target + "'");
  }
  plan.trials = j.value("trials", plan.trials);
  plan.master_seed = j.value("seed", plan.master_seed);
  plan.slack = j.value("slack", plan.slack);
  plan.levels = j.value("levels", plan.levels);
  plan.t_prime = j.value("t_prime", plan.t_prime);
  plan.kappa = j.value("kappa", plan.kappa);
  plan.omega = j.value("omega", plan.omega);
  if (j.contains("mode")) plan.mode = j["mode"] == "general" ? EvolutionMode::General : EvolutionMode::TPrime;
  plan.proof_text_numerator = j.value("proof_text_numerator", plan.proof_text_numerator);
  if (j.contains("config")) plan.config = config_from_json(j["config"].dump());
  if (j.contains("dataset")) {
    const auto& dj = j["dataset"];
    if (dj.contains("csv")) {
      plan.dataset = load_csv(dj["csv"].get<std::string>());
    } else if (dj.contains("uniform")) {
      const auto& uj = dj["uniform"];
      std::vector<std::pair<double, double>> bounds;
      for (const auto& b : uj.at("bounds")) bounds.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
      plan.dataset = generate_uniform(uj.at("dim").get<std::size_t>(), uj.at("n").get<std::size_t>(), bounds,
                                      uj.value("seed", 0ULL));
    } else if (dj.contains("mixture")) {
      plan.dataset = generate_gaussian_mixture(parse_mixture_spec(dj["mixture"].dump()));
    } else {
      throw std::invalid_argument("plan: dataset must specify csv, uniform, or mixture");
    }
  }
  if (j.contains("em_scores")) plan.em_scores = j["em_scores"].get<std::vector<double>>();
  plan.em_eps = j.value("em_eps", plan.em_eps);
  plan.em_delta_f = j.value("em_delta_f", plan.em_delta_f);
  plan.nc_eps = j.value("nc_eps", plan.nc_eps);
  plan.nc_delta = j.value("nc_delta", plan.nc_delta);
  plan.nc_n = j.value("nc_n", plan.nc_n);
  return plan;
}

}  // namespace dpm
