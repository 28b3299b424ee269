#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "dpm/datagen.hpp"
#include "dpm/dataset.hpp"

using namespace dpm;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("empty uniform dataset rejected") {
  CHECK_THROWS_AS(generate_uniform(1, 0, {{0.0, 1.0}}, 1), std::invalid_argument);
}

TEST_CASE("invalid bounds rejected") {
  CHECK_THROWS_AS(generate_uniform(1, 10, {{1.0, 1.0}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_uniform(1, 10, {{2.0, 1.0}}, 1), std::invalid_argument);
}

TEST_CASE("uniform sample means sit near the range midpoint") {
  auto data = generate_uniform(2, 1000, {{0.0, 1.0}, {0.0, 1.0}}, 7);
  for (std::size_t d = 0; d < 2; ++d) {
    double mean = 0.0;
    for (const auto& p : data.points) mean += p[d];
    mean /= 1000.0;
    CHECK(std::abs(mean - 0.5) < 0.05);
  }
}

TEST_CASE("same seed twice yields identical datasets") {
  auto a = generate_uniform(3, 200, {{0.0, 1.0}, {-1.0, 2.0}, {5.0, 6.0}}, 99);
  auto b = generate_uniform(3, 200, {{0.0, 1.0}, {-1.0, 2.0}, {5.0, 6.0}}, 99);
  CHECK(a.points == b.points);

  GaussianMixtureSpec spec;
  spec.seed = 13;
  spec.components.push_back({{0.0, 0.0}, 1.0, 100});
  CHECK(generate_gaussian_mixture(spec).points == generate_gaussian_mixture(spec).points);
}

TEST_CASE("uniform generator passes a chi-square uniformity check") {
  auto data = generate_uniform(1, 10000, {{0.0, 1.0}}, 3);
  int bins[10] = {0};
  for (const auto& p : data.points) {
    int b = std::min(9, static_cast<int>(p[0] * 10.0));
    ++bins[b];
  }
  double stat = 0.0;
  for (int b = 0; b < 10; ++b) {
    double diff = bins[b] - 1000.0;
    stat += diff * diff / 1000.0;
  }
  // chi-square, 9 dof, p = 0.001
  CHECK(stat < 27.877);
}

TEST_CASE("degenerate gaussian collapses onto its center") {
  GaussianMixtureSpec spec;
  spec.seed = 5;
  spec.components.push_back({{2.0, -3.0}, 1e-9, 100});
  auto data = generate_gaussian_mixture(spec);
  for (const auto& p : data.points) {
    CHECK(std::abs(p[0] - 2.0) < 1e-6);
    CHECK(std::abs(p[1] + 3.0) < 1e-6);
  }
}

TEST_CASE("two-component means land within 3 sigma of sqrt(n)") {
  GaussianMixtureSpec spec;
  spec.seed = 11;
  spec.components.push_back({{0.0, 0.0}, 1.0, 500});
  spec.components.push_back({{0.0, 5.0}, 1.0, 500});
  auto data = generate_gaussian_mixture(spec);
  REQUIRE(data.labels.size() == data.points.size());
  for (int c = 0; c < 2; ++c) {
    double mx = 0.0, my = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < data.points.size(); ++i) {
      if (data.labels[i] != c) continue;
      mx += data.points[i][0];
      my += data.points[i][1];
      ++n;
    }
    CHECK(n == 500);
    mx /= n;
    my /= n;
    CHECK(std::abs(mx - spec.components[c].center[0]) < 0.15);
    CHECK(std::abs(my - spec.components[c].center[1]) < 0.15);
  }
}

TEST_CASE("gaussian sample variance within 10 percent") {
  GaussianMixtureSpec spec;
  spec.seed = 21;
  spec.components.push_back({{0.0}, 2.0, 2000});
  auto data = generate_gaussian_mixture(spec);
  double mean = 0.0;
  for (const auto& p : data.points) mean += p[0];
  mean /= data.size();
  double var = 0.0;
  for (const auto& p : data.points) var += (p[0] - mean) * (p[0] - mean);
  var /= data.size() - 1;
  CHECK(std::abs(var - 4.0) / 4.0 < 0.10);
}

TEST_CASE("generated points respect fitted bounds") {
  GaussianMixtureSpec spec;
  spec.seed = 2;
  spec.components.push_back({{0.0, 1.0}, 1.5, 400});
  auto data = generate_gaussian_mixture(spec);
  CHECK_NOTHROW(data.validate());
}

TEST_CASE("csv round trip is exact") {
  Dataset data;
  data.dim = 2;
  data.points = {{0.25, -1.5}, {1e-11, 3.0}, {2.0, 0.1234567890123}};
  data.fit_bounds();
  auto path = temp_path("dpm_roundtrip.csv");
  save_csv(data, path);
  auto loaded = load_csv(path);
  REQUIRE(loaded.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t d = 0; d < 2; ++d) {
      CHECK(std::abs(loaded.points[i][d] - data.points[i][d]) < 1e-12);
    }
  }
  std::remove(path.c_str());
}

TEST_CASE("ragged csv row rejected with its location") {
  auto path = temp_path("dpm_ragged.csv");
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("x0,x1,x2\n1,2,3\n4,5\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("row 2"), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("non-numeric csv cell rejected with its location") {
  auto path = temp_path("dpm_badcell.csv");
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("x0,x1\n1,2\n3,oops\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("row 2"), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("large file loads quickly") {
  auto data = generate_uniform(2, 100000, {{0.0, 1.0}, {0.0, 1.0}}, 17);
  auto path = temp_path("dpm_large.csv");
  save_csv(data, path);
  auto start = std::chrono::steady_clock::now();
  auto loaded = load_csv(path);
  auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(loaded.size() == 100000);
  CHECK(elapsed < 2.0);
  std::remove(path.c_str());
}

TEST_CASE("mixture spec json parses and validates") {
  auto spec = parse_mixture_spec(R"({"seed": 4, "components": [
    {"center": [0, 0], "sigma": 1.0, "count": 10},
    {"center": [5, 5], "sigma": 0.5, "count": 20}]})");
  CHECK(spec.seed == 4);
  CHECK(spec.components.size() == 2);
  CHECK_THROWS_AS(parse_mixture_spec(R"({"components": [{"center": [0], "sigma": 0, "count": 3}]})"),
                  std::invalid_argument);
}
