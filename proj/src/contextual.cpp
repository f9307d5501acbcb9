#include "qlra/contextual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qlra {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidModel: return "invalid_model";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::ZeroDenominator: return "zero_denominator";
    case ErrorCode::NonTrigonometricContext: return "non_trigonometric";
    case ErrorCode::DegenerateContext: return "degenerate_context";
    case ErrorCode::SymmetricConditioningRequired:
      return "symmetric_conditioning_required";
    case ErrorCode::ConstraintViolated: return "constraint_violated";
    case ErrorCode::ZeroConditioning: return "zero_conditioning";
    case ErrorCode::InvalidPartition: return "invalid_partition";
    case ErrorCode::OracleFailure: return "oracle_failure";
    case ErrorCode::InvalidEmbedding: return "invalid_embedding";
    case ErrorCode::GridMismatch: return "grid_mismatch";
    case ErrorCode::BasisMismatch: return "basis_mismatch";
    case ErrorCode::InvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

BinaryObservable BinaryObservable::make(std::string label, double first,
                                        double second) {
  if (first == second) {
    throw Error(ErrorCode::InvalidModel,
                "observable " + label + ": outcomes must be distinct");
  }
  return BinaryObservable{std::move(label), {first, second}};
}

bool ContextualDistribution::in_unit_interval() const {
  return std::ranges::all_of(probs,
                             [](double p) { return p >= 0.0 && p <= 1.0; });
}

bool ContextualDistribution::normalized(double tol) const {
  return std::abs(sum() - 1.0) <= tol;
}

bool TransitionMatrix::entries_in_unit_interval() const {
  return (p.array() >= 0.0).all() && (p.array() <= 1.0).all();
}

bool TransitionMatrix::column_stochastic(double tol) const {
  const Eigen::RowVector2d sums = p.colwise().sum();
  return std::abs(sums(0) - 1.0) <= tol && std::abs(sums(1) - 1.0) <= tol;
}

bool TransitionMatrix::doubly_stochastic(double tol) const {
  const Eigen::Vector2d rows = p.rowwise().sum();
  return column_stochastic(tol) && std::abs(rows(0) - 1.0) <= tol &&
         std::abs(rows(1) - 1.0) <= tol;
}

bool TransitionMatrix::uniform_half(double tol) const {
  return ((p.array() - 0.5).abs() <= tol).all();
}

bool symmetric_conditioned(const TransitionMatrix& forward,
                           const TransitionMatrix* reverse, double tol) {
  if (reverse == nullptr) return forward.uniform_half(tol);
  return ((forward.p - reverse->p.transpose()).array().abs() <= tol).all();
}

const BinaryObservable& ContextualModel::observable(
    const std::string& label) const {
  for (const auto& o : observables) {
    if (o.label == label) return o;
  }
  throw Error(ErrorCode::InvalidModel, "unknown observable " + label);
}

bool ContextualModel::has_observable(const std::string& label) const {
  return std::ranges::any_of(observables,
                             [&](const auto& o) { return o.label == label; });
}

const ContextualDistribution& ContextualModel::distribution(
    const std::string& label) const {
  auto it = distributions.find(label);
  if (it == distributions.end()) {
    throw Error(ErrorCode::InvalidModel, "no distribution for " + label);
  }
  return it->second;
}

const TransitionMatrix* ContextualModel::find_transition(
    const std::string& target, const std::string& given) const {
  auto it = transitions.find(target + "|" + given);
  return it == transitions.end() ? nullptr : &it->second;
}

const TransitionMatrix& ContextualModel::transition(
    const std::string& target, const std::string& given) const {
  if (const auto* t = find_transition(target, given)) return *t;
  throw Error(ErrorCode::InvalidModel,
              "no transition matrix " + target + "|" + given);
}

std::array<double, 2> supplementarity(const ContextualDistribution& target,
                                      const TransitionMatrix& transition,
                                      const ContextualDistribution& given) {
  if (transition.target != target.observable ||
      transition.given != given.observable) {
    throw Error(ErrorCode::DimensionMismatch,
                "transition " + transition.key() + " does not map " +
                    given.observable + " onto " + target.observable);
  }
  std::array<double, 2> delta{};
  for (std::size_t b = 0; b < 2; ++b) {
    const double classical = transition.p(b, 0) * given.probs[0] +
                             transition.p(b, 1) * given.probs[1];
    delta[b] = target.probs[b] - classical;
  }
  return delta;
}

double lambda_coefficient(double delta, const TransitionMatrix& transition,
                          const ContextualDistribution& given,
                          std::size_t outcome) {
  if (outcome > 1) {
    throw Error(ErrorCode::DimensionMismatch, "binary outcome index out of range");
  }
  const double product = transition.p(outcome, 0) * given.probs[0] *
                         transition.p(outcome, 1) * given.probs[1];
  if (!(product > 0.0)) {
    throw Error(ErrorCode::ZeroDenominator,
                "degenerate context for " + transition.key() +
                    ": a transition or contextual probability vanishes");
  }
  return delta / (2.0 * std::sqrt(product));
}

namespace {

double checked_arccos(double lambda, double tol) {
  if (!(std::abs(lambda) <= 1.0 + tol)) {
    throw Error(ErrorCode::NonTrigonometricContext,
                "|lambda| = " + std::to_string(std::abs(lambda)) +
                    " exceeds 1: context is not trigonometric");
  }
  return std::acos(std::clamp(lambda, -1.0, 1.0));
}

}  // namespace

AngleSet probabilistic_angles(const std::array<double, 2>& lambdas,
                              double tol) {
  AngleSet angles;
  angles.lambda = lambdas;
  angles.theta[0] = checked_arccos(lambdas[0], tol);
  const double second = checked_arccos(lambdas[1], tol);
  if (std::abs(lambdas[0] + lambdas[1]) <= tol) {
    angles.theta[1] = angles.theta[0] - std::numbers::pi;
    angles.phase_opposed = true;
  } else {
    angles.theta[1] = -second;
  }
  return angles;
}

AngleSet pair_angles(const ContextualModel& model, const std::string& target,
                     const std::string& given, double tol) {
  const auto& t = model.transition(target, given);
  const auto& pb = model.distribution(target);
  const auto& pa = model.distribution(given);
  if (!pa.non_degenerate()) {
    throw Error(ErrorCode::DegenerateContext,
                "context is not " + given + "-non-degenerate");
  }
  const auto delta = supplementarity(pb, t, pa);
  const std::array<double, 2> lambdas{lambda_coefficient(delta[0], t, pa, 0),
                                      lambda_coefficient(delta[1], t, pa, 1)};
  AngleSet angles = probabilistic_angles(lambdas, tol);
  angles.delta = delta;
  return angles;
}

bool ValidationReport::ok() const {
  return std::ranges::all_of(checks, [](const Check& c) { return c.passed; });
}

bool ValidationReport::failed(const std::string& name) const {
  return std::ranges::any_of(
      checks, [&](const Check& c) { return c.name == name && !c.passed; });
}

void ValidationReport::add(std::string name, std::string subject, bool passed,
                           double value) {
  checks.push_back(Check{std::move(name), std::move(subject), passed, value});
}

ValidationReport validate_model(const ContextualModel& model, double tol) {
  ValidationReport report;

  for (const auto& obs : model.observables) {
    report.add("distinct_outcomes", obs.label,
               obs.outcomes[0] != obs.outcomes[1]);
    auto it = model.distributions.find(obs.label);
    report.add("has_distribution", obs.label, it != model.distributions.end());
    if (it == model.distributions.end()) continue;
    const auto& d = it->second;
    report.add("probability_range", obs.label, d.in_unit_interval());
    report.add("normalized", obs.label, d.normalized(tol), d.sum() - 1.0);
    report.add("non_degenerate", obs.label, d.non_degenerate(),
               std::min(d.probs[0], d.probs[1]));
  }

  for (const auto& [key, t] : model.transitions) {
    const bool known = model.has_observable(t.target) &&
                       model.has_observable(t.given) &&
                       key == t.key();
    report.add("transition_observables", key, known);
    if (!known) continue;

    report.add("transition_range", key, t.entries_in_unit_interval());
    const Eigen::RowVector2d cols = t.p.colwise().sum();
    report.add("stochastic", key, t.column_stochastic(tol),
               (cols.array() - 1.0).abs().maxCoeff());
    const Eigen::Vector2d rows = t.p.rowwise().sum();
    report.add("doubly_stochastic", key, t.doubly_stochastic(tol),
               (rows.array() - 1.0).abs().maxCoeff());
    const auto* reverse = model.find_transition(t.given, t.target);
    report.add("symmetric_conditioning", key,
               symmetric_conditioned(t, reverse, tol));

    const auto dt = model.distributions.find(t.target);
    const auto dg = model.distributions.find(t.given);
    if (dt == model.distributions.end() || dg == model.distributions.end()) {
      continue;
    }
    try {
      const auto delta = supplementarity(dt->second, t, dg->second);
      const double lam0 = lambda_coefficient(delta[0], t, dg->second, 0);
      const double lam1 = lambda_coefficient(delta[1], t, dg->second, 1);
      const double worst = std::max(std::abs(lam0), std::abs(lam1));
      report.add("trigonometric", key, worst <= 1.0 + tol, worst);
    } catch (const Error& e) {
      report.add("trigonometric", key, false,
                 std::numeric_limits<double>::quiet_NaN());
    }
  }
  return report;
}

}  // namespace qlra
