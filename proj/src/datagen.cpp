#include "dpm/datagen.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dpm/normal.hpp"
#include "dpm/rng.hpp"
#include "json.hpp"

namespace dpm {

void GaussianMixtureSpec::validate() const {
  if (components.empty()) throw std::invalid_argument("mixture spec: components must be nonempty");
  std::size_t dim = components.front().center.size();
  for (std::size_t c = 0; c < components.size(); ++c) {
    const auto& comp = components[c];
    if (comp.center.size() != dim || dim == 0) {
      throw std::invalid_argument("mixture spec: component " + std::to_string(c) + " center has inconsistent dimension");
    }
    if (!(comp.sigma > 0.0)) {
      throw std::invalid_argument("mixture spec: component " + std::to_string(c) + " requires sigma > 0");
    }
    if (comp.count < 1) {
      throw std::invalid_argument("mixture spec: component " + std::to_string(c) + " requires count >= 1");
    }
  }
}

Dataset generate_uniform(std::size_t dim, std::size_t n,
                         const std::vector<std::pair<double, double>>& bounds,
                         std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("generate_uniform: dim must be >= 1");
  if (n < 1) throw std::invalid_argument("generate_uniform: n must be >= 1");
  if (bounds.size() != dim) throw std::invalid_argument("generate_uniform: bounds size must equal dim");
  for (std::size_t d = 0; d < dim; ++d) {
    if (!(bounds[d].first < bounds[d].second)) {
      throw std::invalid_argument("generate_uniform: bounds[" + std::to_string(d) + "] must satisfy low < high");
    }
  }
  Dataset data;
  data.dim = dim;
  data.bounds = bounds;
  data.points.reserve(n);
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> p(dim);
    for (std::size_t d = 0; d < dim; ++d) p[d] = rng.uniform(bounds[d].first, bounds[d].second);
    data.points.push_back(std::move(p));
  }
  return data;
}

Dataset generate_gaussian_mixture(const GaussianMixtureSpec& spec) {
  spec.validate();
  Dataset data;
  data.dim = spec.components.front().center.size();
  SplitMix64 rng(spec.seed);
  for (std::size_t c = 0; c < spec.components.size(); ++c) {
    const auto& comp = spec.components[c];
    for (std::size_t i = 0; i < comp.count; ++i) {
      std::vector<double> p(data.dim);
      for (std::size_t d = 0; d < data.dim; ++d) {
        p[d] = comp.center[d] + comp.sigma * sample_normal(rng);
      }
      data.points.push_back(std::move(p));
      data.labels.push_back(static_cast<int>(c));
    }
  }
  data.fit_bounds();
  return data;
}

GaussianMixtureSpec parse_mixture_spec(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  GaussianMixtureSpec spec;
  spec.seed = j.value("seed", 0ULL);
  for (const auto& cj : j.at("components")) {
    GaussianComponent comp;
    comp.center = cj.at("center").get<std::vector<double>>();
    comp.sigma = cj.at("sigma").get<double>();
    comp.count = cj.at("count").get<std::size_t>();
    spec.components.push_back(std::move(comp));
  }
  spec.validate();
  return spec;
}

GaussianMixtureSpec load_mixture_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("mixture spec: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mixture_spec(ss.str());
}

}  // namespace dpm
