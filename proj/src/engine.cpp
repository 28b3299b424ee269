#include "dpm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace dpm {

void DpmConfig::validate() const {
  score.validate();
  if (tau_e < 1) throw std::invalid_argument("config: tau_e must satisfy tau_e >= 1");
  if (!(eps_count > 0.0)) throw std::invalid_argument("config: eps_count must satisfy eps_count > 0");
  if (!(eps_select > 0.0)) throw std::invalid_argument("config: eps_select must satisfy eps_select > 0");
  if (!(eps_avg > 0.0)) throw std::invalid_argument("config: eps_avg must satisfy eps_avg > 0");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("config: delta must satisfy 0 < delta <= 1");
  if (!(clip_bound > 0.0)) throw std::invalid_argument("config: clip_bound must satisfy clip_bound > 0");
  if (sensitivity && !(*sensitivity > 0.0)) {
    throw std::invalid_argument("config: sensitivity must satisfy sensitivity > 0 when given");
  }
}

DpmConfig config_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  DpmConfig c;
  c.score.alpha = j.value("alpha", c.score.alpha);
  c.score.t = j.value("t", c.score.t);
  c.score.q = j.value("q", c.score.q);
  c.score.beta = j.value("beta", c.score.beta);
  c.tau_e = j.value("tau_e", c.tau_e);
  c.tau_s = j.value("tau_s", c.tau_s);
  c.eps_count = j.value("eps_count", c.eps_count);
  c.eps_select = j.value("eps_select", c.eps_select);
  c.eps_avg = j.value("eps_avg", c.eps_avg);
  c.delta = j.value("delta", c.delta);
  c.clip_bound = j.value("clip_bound", c.clip_bound);
  if (j.contains("sensitivity") && !j["sensitivity"].is_null()) c.sensitivity = j["sensitivity"].get<double>();
  c.halved_exponent = j.value("halved_exponent", c.halved_exponent);
  c.deterministic_counts = j.value("deterministic_counts", c.deterministic_counts);
  c.validate();
  return c;
}

namespace {

nlohmann::json config_json(const DpmConfig& c) {
  nlohmann::json j{{"alpha", c.score.alpha},
                   {"t", c.score.t},
                   {"q", c.score.q},
                   {"beta", c.score.beta},
                   {"tau_e", c.tau_e},
                   {"tau_s", c.tau_s},
                   {"eps_count", c.eps_count},
                   {"eps_select", c.eps_select},
                   {"eps_avg", c.eps_avg},
                   {"delta", c.delta},
                   {"clip_bound", c.clip_bound},
                   {"halved_exponent", c.halved_exponent},
                   {"deterministic_counts", c.deterministic_counts}};
  if (c.sensitivity) j["sensitivity"] = *c.sensitivity;
  return j;
}

}  // namespace

std::string config_to_json(const DpmConfig& config) { return config_json(config).dump(2); }

namespace {

constexpr int kKindCount = 0;
constexpr int kKindSelect = 1;
constexpr int kKindAverage = 2;

struct EngineState {
  const Dataset* data = nullptr;
  const DpmConfig* config = nullptr;
  std::vector<SplitCandidate> candidates;  // generated once from the root bounds
  BudgetLedger ledger;
  ScoringDiagnostics diag;
  std::uint64_t seed = 0;
  std::vector<TreeNode*> leaves;
};

double draw_noisy_size(EngineState& st, std::size_t raw, std::size_t depth, std::uint64_t node_key) {
  const DpmConfig& cfg = *st.config;
  double offset = noisy_count_offset(cfg.eps_count, cfg.delta, st.data->size());
  st.ledger.spend(static_cast<int>(depth), kKindCount, {cfg.eps_count, cfg.delta});
  if (cfg.deterministic_counts) return static_cast<double>(raw) + offset;
  SplitMix64 rng = derive_rng(st.seed, mix_seed(node_key, 0xC0));
  return static_cast<double>(raw) + sample_laplace(1.0 / cfg.eps_count, rng) + offset;
}

void build(EngineState& st, TreeNode& node, std::uint64_t node_key) {
  const DpmConfig& cfg = *st.config;
  if (node.depth >= cfg.tau_s) {
    node.is_leaf = true;
    node.reason = HaltReason::MaxDepth;
    st.leaves.push_back(&node);
    return;
  }

  // Rescore the fixed candidate set on this subset.
  std::vector<std::vector<double>> projections(st.data->dim);
  for (std::size_t d = 0; d < st.data->dim; ++d) {
    projections[d].reserve(node.indices.size());
    for (std::size_t idx : node.indices) projections[d].push_back(st.data->points[idx][d]);
    std::sort(projections[d].begin(), projections[d].end());
  }
  std::vector<SplitCandidate> scored = st.candidates;
  score_candidates(scored, projections, node.noisy_size, cfg.score, &st.diag);

  ScoredCandidateSet set;
  set.scores.reserve(scored.size());
  for (const auto& c : scored) set.scores.push_back(c.score);
  set.sensitivity = cfg.sensitivity ? *cfg.sensitivity
                                    : (1.0 + cfg.score.alpha) / std::max(node.noisy_size, 1.0);
  SplitMix64 select_rng = derive_rng(st.seed, mix_seed(node_key, 0x5E));
  std::size_t pick = exponential_mechanism(set, cfg.eps_select, select_rng, cfg.halved_exponent);
  st.ledger.spend(static_cast<int>(node.depth), kKindSelect, {cfg.eps_select, 0.0});

  const SplitCandidate& split = scored[pick];
  std::vector<std::size_t> left_idx, right_idx;
  for (std::size_t idx : node.indices) {
    if (st.data->points[idx][split.dimension] < split.position) {
      left_idx.push_back(idx);
    } else {
      right_idx.push_back(idx);
    }
  }

  std::uint64_t left_key = mix_seed(node_key, 1);
  std::uint64_t right_key = mix_seed(node_key, 2);
  double left_size = draw_noisy_size(st, left_idx.size(), node.depth + 1, left_key);
  double right_size = draw_noisy_size(st, right_idx.size(), node.depth + 1, right_key);

  if (std::min(left_size, right_size) < static_cast<double>(cfg.tau_e)) {
    // The split would violate the minimum cluster size; keep the set whole.
    node.is_leaf = true;
    node.reason = HaltReason::MinSizeViolated;
    st.leaves.push_back(&node);
    return;
  }

  node.is_leaf = false;
  node.split_dimension = split.dimension;
  node.split_position = split.position;
  node.left = std::make_unique<TreeNode>();
  node.left->indices = std::move(left_idx);
  node.left->depth = node.depth + 1;
  node.left->noisy_size = left_size;
  node.right = std::make_unique<TreeNode>();
  node.right->indices = std::move(right_idx);
  node.right->depth = node.depth + 1;
  node.right->noisy_size = right_size;
  build(st, *node.left, left_key);
  build(st, *node.right, right_key);
}

void collect_leaves(const TreeNode& node, std::vector<const TreeNode*>& out) {
  if (node.is_leaf) {
    out.push_back(&node);
    return;
  }
  collect_leaves(*node.left, out);
  collect_leaves(*node.right, out);
}

}  // namespace

std::vector<double> dp_average(const std::vector<std::vector<double>>& points, double clip_bound,
                               double epsilon, SplitMix64& rng) {
  if (points.empty()) throw std::invalid_argument("dp_average: point list must be nonempty");
  if (!(clip_bound > 0.0)) throw std::invalid_argument("dp_average: clip_bound must be positive");
  std::size_t d = points.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto& p : points) {
    for (std::size_t i = 0; i < d; ++i) mean[i] += std::clamp(p[i], -clip_bound, clip_bound);
  }
  double count = static_cast<double>(points.size());
  double scale = 2.0 * clip_bound * static_cast<double>(d) / (epsilon * count);
  for (std::size_t i = 0; i < d; ++i) {
    mean[i] = mean[i] / count + sample_laplace(scale, rng);
  }
  return mean;
}

ClusteringResult run_dpm(const Dataset& data, const DpmConfig& config, std::uint64_t seed) {
  data.validate();
  config.validate();
  if (data.points.empty()) throw std::invalid_argument("run_dpm: dataset must be nonempty");

  EngineState st;
  st.data = &data;
  st.config = &config;
  st.seed = seed;
  st.candidates = generate_candidates(data.bounds, config.score.beta);

  auto root = std::make_shared<TreeNode>();
  root->indices.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) root->indices[i] = i;
  root->depth = 0;
  std::uint64_t root_key = mix_seed(seed, 0xD1);
  root->noisy_size = draw_noisy_size(st, data.size(), 0, root_key);
  build(st, *root, root_key);

  ClusteringResult result;
  result.tree = root;
  result.seed = seed;
  result.config = config;
  result.diagnostics = st.diag;

  std::vector<const TreeNode*> leaves;
  collect_leaves(*root, leaves);
  bool spent_avg = false;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    const TreeNode* leaf = leaves[li];
    result.clusters.push_back(leaf->indices);
    result.halt_reasons.push_back(leaf->reason);
    if (leaf->indices.empty()) {
      result.centers.emplace_back(data.dim, std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    std::vector<std::vector<double>> pts;
    pts.reserve(leaf->indices.size());
    for (std::size_t idx : leaf->indices) pts.push_back(data.points[idx]);
    SplitMix64 avg_rng = derive_rng(seed, mix_seed(0xA7, li));
    result.centers.push_back(dp_average(pts, config.clip_bound, config.eps_avg, avg_rng));
    spent_avg = true;
  }
  if (spent_avg) st.ledger.spend(-1, kKindAverage, {config.eps_avg, 0.0});
  result.budget_spent = st.ledger.total();
  return result;
}

std::vector<std::vector<std::size_t>> replay(const TreeNode& tree, const Dataset& data) {
  if (data.dim == 0) throw std::invalid_argument("replay: dataset has no dimensions");
  std::vector<std::vector<std::size_t>> clusters;
  struct Frame {
    const TreeNode* node;
    std::vector<std::size_t> indices;
  };
  std::vector<Frame> stack;
  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) all[i] = i;
  stack.push_back({&tree, std::move(all)});
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    if (frame.node->is_leaf) {
      clusters.push_back(std::move(frame.indices));
      continue;
    }
    if (frame.node->split_dimension >= data.dim) {
      throw std::invalid_argument("replay: split dimension exceeds dataset dimensionality");
    }
    std::vector<std::size_t> left, right;
    for (std::size_t idx : frame.indices) {
      if (data.points[idx][frame.node->split_dimension] < frame.node->split_position) {
        left.push_back(idx);
      } else {
        right.push_back(idx);
      }
    }
    stack.push_back({frame.node->right.get(), std::move(right)});
    stack.push_back({frame.node->left.get(), std::move(left)});
  }
  return clusters;
}

std::size_t ClusteringResult::max_leaf_depth() const {
  std::vector<const TreeNode*> leaves;
  collect_leaves(*tree, leaves);
  std::size_t depth = 0;
  for (const auto* leaf : leaves) depth = std::max(depth, leaf->depth);
  return depth;
}

bool ClusteringResult::all_leaves_min_size() const {
  for (HaltReason r : halt_reasons) {
    if (r != HaltReason::MinSizeViolated) return false;
  }
  return true;
}

namespace {

nlohmann::json tree_json(const TreeNode& node) {
  nlohmann::json j{{"depth", node.depth}, {"noisy_size", node.noisy_size}, {"size", node.indices.size()}};
  if (node.is_leaf) {
    j["leaf"] = true;
    j["halt_reason"] = node.reason == HaltReason::MinSizeViolated ? "min_size_violated" : "max_depth";
  } else {
    j["leaf"] = false;
    j["split_dimension"] = node.split_dimension;
    j["split_position"] = node.split_position;
    j["left"] = tree_json(*node.left);
    j["right"] = tree_json(*node.right);
  }
  return j;
}

}  // namespace

std::string ClusteringResult::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["config"] = config_json(config);
  j["tree"] = tree_json(*tree);
  j["clusters"] = clusters;
  nlohmann::json centers_json = nlohmann::json::array();
  for (const auto& c : centers) {
    nlohmann::json row = nlohmann::json::array();
    for (double v : c) {
      if (std::isnan(v)) {
        row.push_back(nullptr);
      } else {
        row.push_back(v);
      }
    }
    centers_json.push_back(row);
  }
  j["centers"] = centers_json;
  nlohmann::json reasons = nlohmann::json::array();
  for (HaltReason r : halt_reasons) {
    reasons.push_back(r == HaltReason::MinSizeViolated ? "min_size_violated" : "max_depth");
  }
  j["halt_reasons"] = reasons;
  j["budget_spent"] = {{"epsilon", budget_spent.epsilon}, {"delta", budget_spent.delta}};
  j["diagnostics"] = {{"emptiness_clamp_violations", diagnostics.emptiness_clamp_violations},
                      {"noisy_count_floored", diagnostics.noisy_count_floored}};
  return j.dump(2);
}

}  // namespace dpm
