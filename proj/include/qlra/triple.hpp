#pragma once

// Three pairwise symmetric-conditioned binary observables A, B, C sharing one
// Hilbert space. The pairs are always oriented (B,A) and (C,A); the third
// operator is assembled from the product of the two changes of basis.

#include <cstdint>
#include <optional>
#include <string>

#include "qlra/binary.hpp"

namespace qlra {

struct TripleAngles {
  double theta = 0.0;  // (B,A) at b1
  double phi = 0.0;    // (C,A) at g1, sign branch resolved
  double chi = 0.0;    // (B,C) at b1
  int branch = 0;      // +1: theta - phi = +pi/2 (mod 2pi), -1: -pi/2
};

struct WMatrix {
  Complex w1;
  Complex w2;

  Eigen::Matrix2cd matrix() const;
  /// W is unitary for every theta - phi; this is kept as a sanity check.
  double unitarity_residual() const;
  /// | |w1|^2 - 1/2 |: zero iff the (B,C) transitions are all 1/2.
  double balance_residual() const;
};

/// w1 = (1 + exp(i(theta - phi)))/2, w2 = (1 - exp(i(theta - phi)))/2.
WMatrix build_w_matrix(double theta, double phi);
WMatrix build_w_matrix_from_difference(double theta_minus_phi);

struct ConstraintCheck {
  double w1_sq_minus_half = 0.0;
  double residual = 0.0;  // distance of theta - phi - pi/2 to the nearest multiple of pi
  int branch = 0;         // which of +-pi/2 (mod 2pi) the difference sits on
  bool satisfied = false;
};

ConstraintCheck check_angle_constraint(double theta, double phi,
                                       double tol = tol::kRepresentation);

/// |g1> = w1|b1> + w2|b2>, |g2> = w2|b1> + w1|b2>.
Basis2 gamma_basis(const WMatrix& w, double tol = tol::kRepresentation);

/// psi(g1,2) = (sqrt(P_c^A(a1)) +- sqrt(P_c^A(a2)) exp(i phi)) / sqrt2.
StateVector state_in_gamma_basis(const ContextualDistribution& given, double phi);

/// psi(b_j) = sum_k <b_j|g_k> psi(g_k) = sum_k W[k][j] psi(g_k).
StateVector state_in_beta_from_gamma(const WMatrix& w, const StateVector& psi_gamma);

/// C = sum_k g_k |g_k><g_k| = W^T diag(g1, g2) conj(W) in the |b>-basis, so the
/// gamma vectors (rows of W) are its eigenvectors.
Operator2 build_c_operator(const BinaryObservable& third, const WMatrix& w,
                           double tol = tol::kRepresentation);

/// Reads theta, phi and chi from the three pairs of `model`. phi is taken as
/// +-arccos(lambda_CA(g1)), whichever branch brings theta - phi closer to
/// +-pi/2; positive on ties.
TripleAngles resolve_triple_angles(const ContextualModel& model,
                                   const std::string& a, const std::string& b,
                                   const std::string& c,
                                   double tol = tol::kProbability);

struct ConsistencyReport {
  double cos_chi = 0.0;      // from the (B,C) data
  double predicted = 0.0;    // sqrt(PA1 PA2 / (PC1 PC2)) cos(theta)
  double residual = 0.0;     // |cos_chi - predicted| at b1
  double residual_b2 = 0.0;  // same condition evaluated at b2
  double decomposition_residual = 0.0;
  bool bc_trigonometric = true;
  bool consistent = false;
};

/// Compares cos(chi) extracted from the (B,C) pair against the value implied
/// by the (B,A) and (C,A) pairs. Never throws on inconsistent data; the
/// residual carries the verdict.
ConsistencyReport check_consistency(const ContextualModel& model,
                                    const std::string& a, const std::string& b,
                                    const std::string& c,
                                    const TripleAngles& angles,
                                    double tol = tol::kRepresentation);

struct TripleSpec {
  std::string a = "A";
  std::string b = "B";
  std::string c = "C";
  std::array<double, 2> a_outcomes{1.0, -1.0};
  std::array<double, 2> b_outcomes{1.0, -1.0};
  std::array<double, 2> c_outcomes{1.0, -1.0};
  std::string context = "c";
};

/// Runs the (B,A) and (C,A) amplitudes forward with phi = theta - sign*pi/2
/// and all transition matrices 1/2. Throws DegenerateContext when a derived
/// distribution has a vanishing probability.
ContextualModel generate_consistent_triple(const ContextualDistribution& pa,
                                           double theta, int sign,
                                           const TripleSpec& spec = {});

struct TripleRepresentation {
  TripleAngles angles;
  ConstraintCheck constraint;
  ConsistencyReport consistency;
  double gauge = 0.0;
  BinaryRepresentation ba;
  WMatrix w;
  Basis2 gamma;
  StateVector psi_gamma;
  Operator2 c_op;
  double amplitude_roundtrip = 0.0;  // max |psi(b) via W - psi(b) direct|
};

TripleRepresentation represent_triple(const ContextualModel& model,
                                      const std::string& a, const std::string& b,
                                      const std::string& c, double gauge,
                                      double tol = tol::kProbability);

struct SpinRepresentation {
  TripleRepresentation triple;
  double g = 0.0;  // |psi(b1)|
  double f = 0.0;  // arg psi(b2) - arg psi(b1), in [0, 2pi)
  Complex zeta;
  double zeta_residual = 0.0;  // max deviation of |g1>,|g2> from zeta|y+>, zeta*|y->
};

/// Spin model: outcomes +-1 for all three observables, theta - phi = -pi/2 and
/// gauge omega = theta on both pairs.
SpinRepresentation spin_representation(const ContextualDistribution& pa,
                                       double theta);

}  // namespace qlra
