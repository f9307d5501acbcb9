#pragma once

// Contextual probability data for binary observables: distributions,
// transition matrices, supplementarity coefficients and probabilistic angles.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qlra/errors.hpp"

namespace qlra {

struct BinaryObservable {
  std::string label;
  std::array<double, 2> outcomes{};

  /// Throws InvalidModel when the two outcomes coincide.
  static BinaryObservable make(std::string label, double first, double second);
};

struct ContextualDistribution {
  std::string observable;
  std::array<double, 2> probs{};

  double sum() const { return probs[0] + probs[1]; }
  bool in_unit_interval() const;
  bool normalized(double tol = tol::kProbability) const;
  bool non_degenerate() const { return probs[0] > 0.0 && probs[1] > 0.0; }
};

/// P(target = row outcome | given = column outcome). Rows index the target
/// observable's outcomes, columns the conditioning observable's outcomes, both
/// in declaration order.
struct TransitionMatrix {
  std::string target;
  std::string given;
  Eigen::Matrix2d p = Eigen::Matrix2d::Constant(0.5);

  std::string key() const { return target + "|" + given; }
  bool entries_in_unit_interval() const;
  bool column_stochastic(double tol = tol::kProbability) const;
  bool doubly_stochastic(double tol = tol::kProbability) const;
  /// All entries equal 1/2: the binary form of symmetric conditioning used by
  /// the representation builders.
  bool uniform_half(double tol = tol::kProbability) const;
};

/// Symmetric conditioning P(b|a) = P(a|b). With the reverse matrix present the
/// comparison is entrywise against its transpose; without it the forward matrix
/// must have every entry equal to 1/2.
bool symmetric_conditioned(const TransitionMatrix& forward,
                           const TransitionMatrix* reverse,
                           double tol = tol::kProbability);

struct AngleSet {
  std::array<double, 2> delta{};
  std::array<double, 2> lambda{};
  std::array<double, 2> theta{};
  // exp(i theta[0]) == -exp(i theta[1]) by construction
  bool phase_opposed = false;
};

struct ContextualModel {
  std::string context = "c";
  std::vector<BinaryObservable> observables;
  std::map<std::string, ContextualDistribution> distributions;
  std::map<std::string, TransitionMatrix> transitions;  // keyed "B|A"

  const BinaryObservable& observable(const std::string& label) const;
  const ContextualDistribution& distribution(const std::string& label) const;
  const TransitionMatrix& transition(const std::string& target,
                                     const std::string& given) const;
  const TransitionMatrix* find_transition(const std::string& target,
                                          const std::string& given) const;
  bool has_observable(const std::string& label) const;
};

/// delta(b) = P_c^B(b) - sum_a P(b|a) P_c^A(a).
std::array<double, 2> supplementarity(const ContextualDistribution& target,
                                      const TransitionMatrix& transition,
                                      const ContextualDistribution& given);

/// delta / (2 sqrt(prod_a P(b|a) P_c^A(a))) for the target outcome at index
/// `outcome`.
double lambda_coefficient(double delta, const TransitionMatrix& transition,
                          const ContextualDistribution& given,
                          std::size_t outcome);

/// theta[0] = arccos(lambda[0]). When lambda[1] == -lambda[0] (within `tol`)
/// theta[1] = theta[0] - pi exactly; otherwise theta[1] = -arccos(lambda[1]),
/// which agrees with the former whenever the lambdas are opposite.
/// Overshoot up to `tol` beyond |lambda| = 1 is clamped.
AngleSet probabilistic_angles(const std::array<double, 2>& lambdas,
                              double tol = tol::kProbability);

/// Full delta -> lambda -> theta chain for the ordered pair (target, given).
AngleSet pair_angles(const ContextualModel& model, const std::string& target,
                     const std::string& given, double tol = tol::kProbability);

struct Check {
  std::string name;
  std::string subject;
  bool passed = false;
  double value = 0.0;
};

struct ValidationReport {
  std::vector<Check> checks;

  bool ok() const;
  bool failed(const std::string& name) const;
  void add(std::string name, std::string subject, bool passed,
           double value = 0.0);
};

/// Enumerates every invariant the representation builders rely on: ranges and
/// normalization, non-degeneracy, stochasticity, symmetric conditioning, double
/// stochasticity and, for each transition pair, the trigonometric condition.
ValidationReport validate_model(const ContextualModel& model,
                                double tol = tol::kProbability);

}  // namespace qlra
