#pragma once

// Seeded generators shared by the property tests and the acceptance runner.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "qlra/binary.hpp"
#include "qlra/contextual.hpp"

namespace qlra::testing {

inline constexpr double kPi = std::numbers::pi;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  int sign() { return integer(0, 1) == 0 ? -1 : 1; }

  // Two distinct outcomes, first one larger half of the time.
  std::array<double, 2> outcomes() {
    const double a = static_cast<double>(integer(-5, 5));
    double b = a;
    while (b == a) b = static_cast<double>(integer(-5, 5));
    return {a, b};
  }

  // Symmetric-conditioned pair with random outcomes and a random angle.
  ContextualModel binary_model() {
    const double pa1 = uniform(0.02, 0.98);
    const double theta = uniform(0.01, kPi - 0.01);
    auto m = generate_binary_model(pa1, theta);
    const auto a = outcomes();
    const auto b = outcomes();
    m.observables[0].outcomes = a;
    m.observables[1].outcomes = b;
    return m;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline ContextualDistribution dist(const std::string& label, double p1) {
  return ContextualDistribution{label, {p1, 1.0 - p1}};
}

inline TransitionMatrix half(const std::string& target, const std::string& given) {
  TransitionMatrix t;
  t.target = target;
  t.given = given;
  return t;
}

}  // namespace qlra::testing
