#include <doctest.h>

#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "qlra/triple.hpp"
#include "support.hpp"

using namespace qlra;
using qlra::testing::dist;
using qlra::testing::Gen;
using qlra::testing::kPi;

namespace {

const Complex I(0.0, 1.0);

ContextualModel random_triple(Gen& g, double& theta, int& sign) {
  for (;;) {
    theta = g.uniform(0.05, kPi - 0.05);
    sign = g.sign();
    try {
      return generate_consistent_triple(dist("A", g.uniform(0.03, 0.97)), theta, sign);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateContext) throw;
    }
  }
}

}  // namespace

TEST_CASE("w matrix examples") {
  auto w = build_w_matrix_from_difference(-kPi / 2);
  CHECK(std::abs(w.w1 - Complex(0.5, -0.5)) < 1e-15);
  CHECK(std::abs(w.w2 - Complex(0.5, 0.5)) < 1e-15);
  CHECK(std::abs(std::norm(w.w1) - 0.5) < 1e-15);

  w = build_w_matrix(0.7, 0.7);
  CHECK(w.w1 == Complex(1.0, 0.0));
  CHECK(w.w2 == Complex(0.0, 0.0));
  CHECK(w.unitarity_residual() == 0.0);

  w = build_w_matrix_from_difference(kPi);
  CHECK(std::abs(w.w1) < 1e-15);
  CHECK(std::abs(w.w2 - 1.0) < 1e-15);
}

TEST_CASE("w matrix moduli follow the half-angle") {
  Gen g(301);
  for (int k = 0; k < 200; ++k) {
    const double th = g.uniform(-4, 4);
    const double ph = g.uniform(-4, 4);
    const auto w = build_w_matrix(th, ph);
    CHECK(std::abs(w.w1 + w.w2 - 1.0) < 1e-15);
    CHECK(std::abs(std::norm(w.w1) - std::pow(std::cos((th - ph) / 2), 2)) < 1e-14);
    CHECK(std::abs(std::norm(w.w2) - std::pow(std::sin((th - ph) / 2), 2)) < 1e-14);
    // W is always unitary; the constraint is the balance |w1|^2 = 1/2
    CHECK(w.unitarity_residual() <= 1e-15);
    CHECK((w.balance_residual() <= 1e-10) == check_angle_constraint(th, ph).satisfied);
  }
}

TEST_CASE("angle constraint accepts both branches") {
  auto c = check_angle_constraint(kPi / 2 + 0.3, 0.3);
  CHECK(c.satisfied);
  CHECK(c.branch == 1);
  c = check_angle_constraint(0.3, kPi / 2 + 0.3);
  CHECK(c.satisfied);
  CHECK(c.branch == -1);
  c = check_angle_constraint(0.3, 0.3);
  CHECK_FALSE(c.satisfied);
  CHECK(std::abs(c.w1_sq_minus_half - 0.5) < 1e-15);
}

TEST_CASE("gamma basis of the spin branch") {
  const auto basis = gamma_basis(build_w_matrix_from_difference(-kPi / 2));
  const Complex zeta = std::polar(1.0, -kPi / 4);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(basis.vectors[0](0) - zeta * r) < 1e-15);
  CHECK(std::abs(basis.vectors[0](1) - zeta * I * r) < 1e-15);
  CHECK(std::abs(basis.vectors[1](0) - std::conj(zeta) * r) < 1e-15);
  CHECK(std::abs(basis.vectors[1](1) + std::conj(zeta) * I * r) < 1e-15);
  CHECK(std::abs(basis.vectors[0].dot(basis.vectors[1])) < 1e-15);

  try {
    gamma_basis(build_w_matrix_from_difference(0.4));
    FAIL("unbalanced W accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConstraintViolated);
  }
}

TEST_CASE("gamma transition probabilities are all one half") {
  Gen g(302);
  for (int k = 0; k < 100; ++k) {
    const auto basis = gamma_basis(build_w_matrix_from_difference(g.sign() * kPi / 2 + 2 * kPi * g.integer(-2, 2)));
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) CHECK(std::abs(std::norm(basis.vectors[i](j)) - 0.5) < 1e-15);
    }
  }
}

TEST_CASE("state in the gamma basis") {
  const auto psi = state_in_gamma_basis(dist("A", 0.5), kPi / 2);
  CHECK(std::abs(psi.probability(0) - 0.5) < 1e-15);
  CHECK(std::abs(psi.norm_squared() - 1.0) < 1e-15);
  CHECK_THROWS_AS(state_in_gamma_basis(dist("A", 1.0), 0.0), Error);
}

TEST_CASE("c operator examples") {
  Eigen::Matrix2cd sy;
  sy << 0.0, -I, I, 0.0;
  auto c = build_c_operator(BinaryObservable::make("C", 1, -1), build_w_matrix_from_difference(-kPi / 2));
  CHECK((c.m - sy).cwiseAbs().maxCoeff() < 1e-15);

  c = build_c_operator(BinaryObservable::make("C", 1, 0), build_w_matrix_from_difference(kPi / 2));
  CHECK(std::abs(c.m(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(c.m(1, 1) - 0.5) < 1e-15);
  CHECK(std::abs(std::abs(c.m(0, 1)) - 0.5) < 1e-15);

  CHECK_THROWS_AS(build_c_operator(BinaryObservable::make("C", 1, -1), build_w_matrix_from_difference(1.0)), Error);
}

// Spectrum and eigenvectors of C from a Hermitian eigensolver.
TEST_CASE("c operator spectrum on random admissible angles") {
  Gen g(303);
  for (int k = 0; k < 200; ++k) {
    const auto o = g.outcomes();
    const auto w = build_w_matrix_from_difference(g.sign() * kPi / 2 + 2 * kPi * g.integer(-1, 1));
    const auto c = build_c_operator(BinaryObservable::make("C", o[0], o[1]), w);
    CHECK(c.hermiticity_residual() < 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(c.m);
    CHECK(std::abs(es.eigenvalues()(0) - std::min(o[0], o[1])) < 1e-12);
    CHECK(std::abs(es.eigenvalues()(1) - std::max(o[0], o[1])) < 1e-12);
    const auto basis = gamma_basis(w);
    for (int i = 0; i < 2; ++i) {
      CHECK((c.m * basis.vectors[i] - o[i] * basis.vectors[i]).cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK(std::abs(c.m(0, 1).imag()) > 0.0);
  }
}

TEST_CASE("generator examples") {
  CHECK_THROWS_AS(generate_consistent_triple(dist("A", 0.5), kPi / 2, 1), Error);

  const auto m = generate_consistent_triple(dist("A", 0.3), 2 * kPi / 3, 1);
  CHECK(validate_model(m).ok());
  const auto angles = resolve_triple_angles(m, "A", "B", "C");
  CHECK(check_consistency(m, "A", "B", "C", angles).consistent);

  const auto flipped = generate_consistent_triple(dist("A", 0.3), 2 * kPi / 3, -1);
  CHECK(validate_model(flipped).ok());
  CHECK(std::abs(flipped.distribution("C").probs[0] - m.distribution("C").probs[0]) > 1e-3);
  const auto fa = resolve_triple_angles(flipped, "A", "B", "C");
  CHECK(fa.branch == -angles.branch);
  const auto fr = represent_triple(flipped, "A", "B", "C", 0.0);
  const auto mr = represent_triple(m, "A", "B", "C", 0.0);
  CHECK((fr.c_op.m - mr.c_op.m.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("consistency with uniform A and C reduces to cos chi = cos theta") {
  const double theta = 1.2;
  ContextualModel m;
  m.observables = {BinaryObservable::make("A", 1, -1), BinaryObservable::make("B", 1, -1),
                   BinaryObservable::make("C", 1, -1)};
  m.distributions["A"] = dist("A", 0.5);
  m.distributions["C"] = dist("C", 0.5);
  m.distributions["B"] = dist("B", 0.5 + 0.5 * std::cos(theta));
  m.transitions["B|C"] = testing::half("B", "C");
  TripleAngles angles;
  angles.theta = theta;
  angles.phi = theta + kPi / 2;
  const auto r = check_consistency(m, "A", "B", "C", angles);
  CHECK(std::abs(r.predicted - std::cos(theta)) < 1e-15);
  CHECK(std::abs(r.cos_chi - std::cos(theta)) < 1e-15);
  CHECK(r.consistent);
}

// Generated triples: constraint, consistency, amplitude round-trip and
// the decomposition of P_c^B through C.
TEST_CASE("generated triples are consistent and perturbations are caught") {
  Gen g(304);
  for (int k = 0; k < 200; ++k) {
    double theta = 0;
    int sign = 0;
    auto m = random_triple(g, theta, sign);
    const auto rep = represent_triple(m, "A", "B", "C", g.uniform(0, 2 * kPi));
    CHECK(rep.constraint.residual <= 1e-10);
    CHECK(rep.consistency.residual <= 1e-10);
    CHECK(rep.consistency.residual_b2 <= 1e-10);
    CHECK(rep.consistency.decomposition_residual <= 1e-12);
    CHECK(rep.amplitude_roundtrip <= 1e-12);
    CHECK(std::abs(rep.angles.theta - theta) < 1e-9);

    auto& pb = m.distributions["B"].probs;
    pb[0] += 0.05;
    pb[1] -= 0.05;
    const auto r = check_consistency(m, "A", "B", "C", rep.angles);
    CHECK_FALSE(r.consistent);
    CHECK(std::max({r.residual, r.residual_b2, r.decomposition_residual}) >= 1e-3);
  }
}

TEST_CASE("spin representation") {
  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0.0, -I, I, 0.0;
  sz << 1, 0, 0, -1;
  Gen g(305);
  for (int k = 0; k < 50; ++k) {
    const double pa1 = g.uniform(0.05, 0.95);
    const double theta = g.uniform(0.1, kPi - 0.1);
    const auto s = spin_representation(dist("A", pa1), theta);
    CHECK((s.triple.ba.b_op.m - sz).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((s.triple.ba.a_op.m - sx).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((s.triple.c_op.m - sy).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(s.zeta_residual <= 1e-15);
    CHECK_FALSE(s.triple.ba.a_basis.context_dependent);
    const auto& psi = s.triple.ba.psi_b;
    CHECK(std::abs(std::abs(psi.amp(0)) - s.g) < 1e-15);
    CHECK(std::abs(std::abs(psi.amp(1)) - std::sqrt(1 - s.g * s.g)) < 1e-12);
    // gamma probabilities do not see the zeta phase
    for (int i = 0; i < 2; ++i) {
      const double p = std::norm(s.triple.gamma.vectors[i].dot(psi.amp));
      CHECK(std::abs(p - s.triple.psi_gamma.probability(i)) < 1e-12);
    }
  }
}
