#pragma once

// Two binary observables: state vector, |b> and |a> bases, change of basis,
// operators and the gauge freedom of the |a>-basis.

#include <array>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "qlra/contextual.hpp"

namespace qlra {

using Complex = std::complex<double>;

struct StateVector {
  Eigen::Vector2cd amp = Eigen::Vector2cd::Zero();
  std::string basis;

  double norm_squared() const { return amp.squaredNorm(); }
  double probability(std::size_t i) const { return std::norm(amp(i)); }
};

struct Basis2 {
  std::string label;
  // vectors[i] holds the components of the i-th basis vector in the |b>-basis
  std::array<Eigen::Vector2cd, 2> vectors{};
  bool context_dependent = false;

  /// max |<v_i|v_j> - delta_ij|
  double orthonormality_residual() const;
};

struct Operator2 {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  std::string basis;

  double hermiticity_residual() const;
  /// Sorted real eigenvalues (Hermitian solver).
  Eigen::Vector2d eigenvalues() const;
};

struct ChangeOfBasis2 {
  // rows are the target-basis vectors expressed in the source basis
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
  std::string source;
  std::string target;

  /// max-abs entry of U^dagger U - I
  double unitarity_residual() const;
};

/// psi(b) = sqrt(P(b|a1) P_c^A(a1)) + exp(i theta(b)) sqrt(P(b|a2) P_c^A(a2)),
/// expressed in the |b>-basis.
StateVector build_wavefunction(const TransitionMatrix& transition,
                               const ContextualDistribution& given,
                               const AngleSet& angles);

Basis2 build_b_basis();
Operator2 build_b_operator(const BinaryObservable& target);

/// |a1> = (1,1)/sqrt2, |a2> = exp(i(theta - gauge)) (1,-1)/sqrt2.
/// Requires the transition matrix to have all entries 1/2.
Basis2 build_a_basis(const TransitionMatrix& transition, const AngleSet& angles,
                     double gauge);

/// Rows are the |a>-basis vectors in the |b>-basis (gauge-adjusted form).
ChangeOfBasis2 change_of_basis(const TransitionMatrix& transition,
                               const AngleSet& angles, double gauge);

/// The unrestricted construction from the raw transition matrix and both
/// angles. Unitary iff the transition matrix is symmetric-conditioned; it is
/// used to demonstrate that equivalence, not to build representations.
ChangeOfBasis2 general_change_of_basis(const TransitionMatrix& transition,
                                       const AngleSet& angles);

/// A = U^dagger diag(a1, a2) U in the |b>-basis. The product collapses to
/// ((a1+a2)/2, (a1-a2)/2; (a1-a2)/2, (a1+a2)/2) for every theta and gauge, and
/// that closed form is what is returned.
Operator2 build_a_operator(const BinaryObservable& given,
                           const TransitionMatrix& transition,
                           const AngleSet& angles, double gauge);

/// The same operator evaluated as the explicit product U^dagger diag U. Used to
/// cross-check the closed form.
Operator2 a_operator_by_product(const BinaryObservable& given,
                                const ChangeOfBasis2& u);

/// Components <a_i'|psi> of a |b>-basis state in the gauge-adjusted |a>-basis.
StateVector express_state_in_a_basis(const StateVector& psi, const Basis2& basis);

/// <psi|op|psi>. Throws BasisMismatch for different basis labels and
/// InvalidArgument when the imaginary residue exceeds `imag_tol`.
double expectation(const Operator2& op, const StateVector& psi,
                   double imag_tol = tol::kRepresentation);

struct BinaryRepresentation {
  std::string target;  // B
  std::string given;   // A
  AngleSet angles;
  double gauge = 0.0;
  StateVector psi_b;
  StateVector psi_a;
  Basis2 b_basis;
  Basis2 a_basis;
  ChangeOfBasis2 u;
  Operator2 b_op;
  Operator2 a_op;
};

/// End-to-end pipeline for the ordered pair (target, given) of `model`.
BinaryRepresentation represent_pair(const ContextualModel& model,
                                    const std::string& target,
                                    const std::string& given, double gauge,
                                    double tol = tol::kProbability);

/// Symmetric-conditioned pair (A, B) with outcomes +-1, all transitions 1/2
/// and P_c^B(b1) = 1/2 + sqrt(pa1 (1 - pa1)) cos(theta), so that the pair's
/// probabilistic angle at b1 is theta.
ContextualModel generate_binary_model(double pa1, double theta,
                                      const std::string& a = "A",
                                      const std::string& b = "B");

/// Commutator norm ||[A, B]|| (Frobenius).
double commutator_norm(const Operator2& a, const Operator2& b);

}  // namespace qlra
