#include "qlra/binary.hpp"

#include <cmath>
#include <numbers>

namespace qlra {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void require_half_entries(const TransitionMatrix& t) {
  if (!t.uniform_half()) {
    throw Error(ErrorCode::SymmetricConditioningRequired,
                "transition " + t.key() +
                    " is not symmetric-conditioned (entries must be 1/2)");
  }
}

Complex phase(double angle) { return std::polar(1.0, angle); }

}  // namespace

double Basis2::orthonormality_residual() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const Complex ip = vectors[i].dot(vectors[j]);
      const double expected = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(ip - expected));
    }
  }
  return worst;
}

double Operator2::hermiticity_residual() const {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::Vector2d Operator2::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double ChangeOfBasis2::unitarity_residual() const {
  return (u.adjoint() * u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}

StateVector build_wavefunction(const TransitionMatrix& transition,
                               const ContextualDistribution& given,
                               const AngleSet& angles) {
  if (!given.non_degenerate()) {
    throw Error(ErrorCode::DegenerateContext,
                "wavefunction requires a non-degenerate " + given.observable);
  }
  StateVector psi;
  psi.basis = transition.target;
  for (std::size_t b = 0; b < 2; ++b) {
    const double x = std::sqrt(transition.p(b, 0) * given.probs[0]);
    const double y = std::sqrt(transition.p(b, 1) * given.probs[1]);
    psi.amp(b) = x + phase(angles.theta[b]) * y;
  }
  return psi;
}

Basis2 build_b_basis() {
  Basis2 basis;
  basis.label = "b";
  basis.vectors[0] << 1.0, 0.0;
  basis.vectors[1] << 0.0, 1.0;
  return basis;
}

Operator2 build_b_operator(const BinaryObservable& target) {
  Operator2 op;
  op.basis = target.label;
  op.m(0, 0) = target.outcomes[0];
  op.m(1, 1) = target.outcomes[1];
  return op;
}

Basis2 build_a_basis(const TransitionMatrix& transition, const AngleSet& angles,
                     double gauge) {
  require_half_entries(transition);
  const double shift = angles.theta[0] - gauge;
  Basis2 basis;
  basis.label = transition.given;
  basis.vectors[0] << kInvSqrt2, kInvSqrt2;
  basis.vectors[1] << kInvSqrt2, -kInvSqrt2;
  basis.vectors[1] *= phase(shift);
  basis.context_dependent = shift != 0.0;
  return basis;
}

ChangeOfBasis2 change_of_basis(const TransitionMatrix& transition,
                               const AngleSet& angles, double gauge) {
  const Basis2 a = build_a_basis(transition, angles, gauge);
  ChangeOfBasis2 u;
  u.source = transition.target;
  u.target = transition.given;
  u.u.row(0) = a.vectors[0].transpose();
  u.u.row(1) = a.vectors[1].transpose();
  return u;
}

ChangeOfBasis2 general_change_of_basis(const TransitionMatrix& transition,
                                       const AngleSet& angles) {
  ChangeOfBasis2 u;
  u.source = transition.target;
  u.target = transition.given;
  for (std::size_t b = 0; b < 2; ++b) {
    u.u(0, b) = std::sqrt(transition.p(b, 0));
    u.u(1, b) = phase(angles.theta[b]) * std::sqrt(transition.p(b, 1));
  }
  return u;
}

Operator2 build_a_operator(const BinaryObservable& given,
                           const TransitionMatrix& transition,
                           const AngleSet& /*angles*/, double /*gauge*/) {
  require_half_entries(transition);
  const double mean = 0.5 * (given.outcomes[0] + given.outcomes[1]);
  const double half_gap = 0.5 * (given.outcomes[0] - given.outcomes[1]);
  Operator2 op;
  op.basis = transition.target;
  op.m << mean, half_gap, half_gap, mean;
  return op;
}

Operator2 a_operator_by_product(const BinaryObservable& given,
                                const ChangeOfBasis2& u) {
  Eigen::Matrix2cd diag = Eigen::Matrix2cd::Zero();
  diag(0, 0) = given.outcomes[0];
  diag(1, 1) = given.outcomes[1];
  Operator2 op;
  op.basis = u.source;
  op.m = u.u.adjoint() * diag * u.u;
  return op;
}

StateVector express_state_in_a_basis(const StateVector& psi,
                                     const Basis2& basis) {
  StateVector out;
  out.basis = basis.label;
  for (std::size_t i = 0; i < 2; ++i) {
    out.amp(i) = basis.vectors[i].dot(psi.amp);
  }
  return out;
}

double expectation(const Operator2& op, const StateVector& psi,
                   double imag_tol) {
  if (op.basis != psi.basis) {
    throw Error(ErrorCode::BasisMismatch, "operator is expressed in basis " +
                                              op.basis + ", state in " +
                                              psi.basis);
  }
  const Complex value = psi.amp.dot(op.m * psi.amp);
  if (std::abs(value.imag()) > imag_tol) {
    throw Error(ErrorCode::InvalidArgument,
                "expectation has imaginary residue " +
                    std::to_string(value.imag()));
  }
  return value.real();
}

BinaryRepresentation represent_pair(const ContextualModel& model,
                                    const std::string& target,
                                    const std::string& given, double gauge,
                                    double tol) {
  const auto& t = model.transition(target, given);
  require_half_entries(t);

  BinaryRepresentation rep;
  rep.target = target;
  rep.given = given;
  rep.gauge = gauge;
  rep.angles = pair_angles(model, target, given, tol);
  rep.psi_b = build_wavefunction(t, model.distribution(given), rep.angles);
  rep.b_basis = build_b_basis();
  rep.a_basis = build_a_basis(t, rep.angles, gauge);
  rep.u = change_of_basis(t, rep.angles, gauge);
  rep.b_op = build_b_operator(model.observable(target));
  rep.a_op = build_a_operator(model.observable(given), t, rep.angles, gauge);
  rep.psi_a = express_state_in_a_basis(rep.psi_b, rep.a_basis);
  return rep;
}

ContextualModel generate_binary_model(double pa1, double theta,
                                      const std::string& a,
                                      const std::string& b) {
  if (!(pa1 > 0.0 && pa1 < 1.0)) {
    throw Error(ErrorCode::DegenerateContext, "P_c^A(a1) must lie strictly inside (0, 1)");
  }
  const double pb1 = 0.5 + std::sqrt(pa1 * (1.0 - pa1)) * std::cos(theta);
  ContextualModel m;
  m.observables = {BinaryObservable::make(a, 1.0, -1.0),
                   BinaryObservable::make(b, 1.0, -1.0)};
  m.distributions[a] = {a, {pa1, 1.0 - pa1}};
  m.distributions[b] = {b, {pb1, 1.0 - pb1}};
  m.transitions[b + "|" + a] = TransitionMatrix{b, a};
  m.transitions[a + "|" + b] = TransitionMatrix{a, b};
  return m;
}

double commutator_norm(const Operator2& a, const Operator2& b) {
  return (a.m * b.m - b.m * a.m).norm();
}

}  // namespace qlra
