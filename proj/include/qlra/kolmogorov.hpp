#pragma once

// Finite classical probability spaces. Contextual models are obtained from them
// by conditioning on a context event; transition probabilities use the
// selection events {A = a}.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qlra/continuous.hpp"
#include "qlra/contextual.hpp"

namespace qlra {

using Event = std::vector<bool>;

struct FiniteSpace {
  std::vector<std::string> outcomes;
  std::vector<double> weights;
  std::map<std::string, std::vector<double>> variables;
  std::map<std::string, Event> events;

  std::size_t size() const { return weights.size(); }
  /// Throws InvalidModel on negative weights, weights not summing to 1 within
  /// 1e-12, or variables and events of the wrong length.
  void validate() const;

  double probability(const Event& e) const;
  Event everything() const { return Event(size(), true); }
  Event level_set(const std::string& variable, double value) const;
  const Event& event(const std::string& name) const;
  const std::vector<double>& variable(const std::string& name) const;
  /// Distinct values of a variable in increasing order.
  std::vector<double> values(const std::string& name) const;
};

Event intersect(const Event& f, const Event& g);

/// P(F|G) = P(F and G)/P(G). Throws ZeroConditioning when P(G) = 0.
double conditional_probability(const FiniteSpace& space, const Event& f,
                               const Event& g);

struct TotalProbabilityCheck {
  double residual = 0.0;
  std::vector<std::size_t> skipped;  // zero-probability cells
  std::vector<std::string> warnings;
};

/// |P(G) - sum_n P(G|F_n) P(F_n)|. Throws InvalidPartition unless the cells
/// are disjoint and cover the space.
TotalProbabilityCheck verify_total_probability(const FiniteSpace& space,
                                               const std::vector<Event>& partition,
                                               const Event& g);

/// Contextual model for the binary variables `labels` under the context
/// event. Distributions are P(. | context); each ordered pair (T, G) gets the
/// transition matrix P(T = t | G = g). Outcomes are listed in decreasing value
/// order. Throws ZeroConditioning for a null context or selection event and
/// InvalidModel for a variable that does not take exactly two values.
ContextualModel derive_contextual_model(const FiniteSpace& space,
                                        const std::vector<std::string>& labels,
                                        const Event& context,
                                        const std::string& context_label = "c");

/// P(T = t | G = g and context): rows follow values(target), columns
/// values(given), both increasing. Throws ZeroConditioning.
Eigen::MatrixXd contextual_transition(const FiniteSpace& space,
                                      const std::string& target,
                                      const std::string& given,
                                      const Event& context);

/// max_t |P_c(T = t) - sum_g P(T = t | G = g, c) P_c(G = g)|.
double contextual_total_probability_residual(const FiniteSpace& space,
                                             const std::string& target,
                                             const std::string& given,
                                             const Event& context);

/// Random space on `n` outcomes with weights k/2^10 and binary variables
/// A, B taking values +-1 plus a random context event "c" of positive
/// probability on which both values of A occur. Deterministic in the seed.
FiniteSpace random_space(std::uint64_t seed, std::size_t n = 8);

/// Uniform (A, B) pairs in {+1,-1}^2 split by a context bit z: cells
/// (a, b, z) with weights u(a,b)/64 for z = 1 and (16 - u(a,b))/64 for z = 0.
/// Every transition is 1/2 and the context "c" = {z = 1} deforms the
/// marginals. Resamples until both ordered pairs are trigonometric and the
/// supplementarity is nonzero.
FiniteSpace symmetric_space(std::uint64_t seed);

/// Piecewise-constant lift of integer-valued variables onto unit-spaced grids:
/// densities are probabilities divided by the trapezoid weight of the cell.
/// A, B, X, Y must take consecutive integer values on the space.
EmbeddingData lift_to_grid(const FiniteSpace& space, const Event& context,
                           const std::string& a, const std::string& b,
                           const std::string& x, const std::string& y);

}  // namespace qlra
