#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpm/dataset.hpp"

namespace dpm {

struct GaussianComponent {
  std::vector<double> center;
  double sigma = 1.0;
  std::size_t count = 0;
};

struct GaussianMixtureSpec {
  std::vector<GaussianComponent> components;
  std::uint64_t seed = 0;

  void validate() const;
};

// n i.i.d. points, uniform per dimension within the given bounds. Identical
// (arguments, seed) always produce the bit-identical dataset.
Dataset generate_uniform(std::size_t dim, std::size_t n,
                         const std::vector<std::pair<double, double>>& bounds,
                         std::uint64_t seed);

// Isotropic Gaussian mixture; component index retained in labels (evaluation
// only, the clustering engine never sees it). Bounds fitted from the sample
// with a 1% pad, since the engine requires a finite range per dimension.
Dataset generate_gaussian_mixture(const GaussianMixtureSpec& spec);

// Mixture spec as a JSON document:
// {"seed": 7, "components": [{"center": [0,0], "sigma": 1.0, "count": 500}, ...]}
GaussianMixtureSpec load_mixture_spec(const std::string& path);
GaussianMixtureSpec parse_mixture_spec(const std::string& json_text);

}  // namespace dpm
