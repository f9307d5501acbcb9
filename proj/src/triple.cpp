#include "qlra/triple.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qlra {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrt2 = 0.70710678118654752440;

double wrap_two_pi(double x) {
  double r = std::fmod(x, 2.0 * kPi);
  return r < 0.0 ? r + 2.0 * kPi : r;
}

ContextualDistribution distribution_from(const std::string& label,
                                         const StateVector& psi) {
  return ContextualDistribution{label, {psi.probability(0), psi.probability(1)}};
}

}  // namespace

Eigen::Matrix2cd WMatrix::matrix() const {
  Eigen::Matrix2cd m;
  m << w1, w2, w2, w1;
  return m;
}

double WMatrix::unitarity_residual() const {
  const Eigen::Matrix2cd m = matrix();
  return (m.adjoint() * m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
}

double WMatrix::balance_residual() const {
  return std::abs(std::norm(w1) - 0.5);
}

WMatrix build_w_matrix_from_difference(double theta_minus_phi) {
  const Complex e = std::polar(1.0, theta_minus_phi);
  return WMatrix{0.5 * (1.0 + e), 0.5 * (1.0 - e)};
}

WMatrix build_w_matrix(double theta, double phi) {
  return build_w_matrix_from_difference(theta - phi);
}

ConstraintCheck check_angle_constraint(double theta, double phi, double tol) {
  const double diff = theta - phi;
  const double offset = diff - 0.5 * kPi;
  const double k = std::round(offset / kPi);
  ConstraintCheck check;
  check.residual = std::abs(offset - k * kPi);
  // even multiples of pi sit on +pi/2 (mod 2pi), odd ones on -pi/2
  check.branch = std::fmod(std::abs(k), 2.0) == 0.0 ? +1 : -1;
  check.w1_sq_minus_half = std::norm(build_w_matrix_from_difference(diff).w1) - 0.5;
  check.satisfied = check.residual < tol;
  return check;
}

Basis2 gamma_basis(const WMatrix& w, double tol) {
  if (w.balance_residual() > tol) {
    throw Error(ErrorCode::ConstraintViolated,
                "|w1|^2 != 1/2: theta - phi is not +-pi/2 (mod 2pi)");
  }
  Basis2 basis;
  basis.label = "gamma";
  basis.vectors[0] << w.w1, w.w2;
  basis.vectors[1] << w.w2, w.w1;
  return basis;
}

StateVector state_in_gamma_basis(const ContextualDistribution& given,
                                 double phi) {
  if (!given.non_degenerate()) {
    throw Error(ErrorCode::DegenerateContext,
                "gamma amplitudes require a non-degenerate " + given.observable);
  }
  const double x = std::sqrt(given.probs[0]);
  const Complex y = std::sqrt(given.probs[1]) * std::polar(1.0, phi);
  StateVector psi;
  psi.basis = "gamma";
  psi.amp << kInvSqrt2 * (x + y), kInvSqrt2 * (x - y);
  return psi;
}

StateVector state_in_beta_from_gamma(const WMatrix& w,
                                     const StateVector& psi_gamma) {
  StateVector psi;
  psi.basis = "b";
  psi.amp(0) = w.w1 * psi_gamma.amp(0) + w.w2 * psi_gamma.amp(1);
  psi.amp(1) = w.w2 * psi_gamma.amp(0) + w.w1 * psi_gamma.amp(1);
  return psi;
}

Operator2 build_c_operator(const BinaryObservable& third, const WMatrix& w,
                           double tol) {
  if (w.balance_residual() > tol) {
    throw Error(ErrorCode::ConstraintViolated,
                "C operator requires theta - phi = +-pi/2 (mod 2pi)");
  }
  const double g1 = third.outcomes[0];
  const double g2 = third.outcomes[1];
  const double n1 = std::norm(w.w1);
  const double n2 = std::norm(w.w2);
  Operator2 op;
  op.m(0, 0) = n1 * g1 + n2 * g2;
  // sum_k g_k |g_k><g_k| with |g1> = (w1, w2), |g2> = (w2, w1)
  op.m(0, 1) = (g1 - g2) * w.w1 * std::conj(w.w2);
  op.m(1, 0) = (g1 - g2) * std::conj(w.w1) * w.w2;
  op.m(1, 1) = n2 * g1 + n1 * g2;
  return op;
}

TripleAngles resolve_triple_angles(const ContextualModel& model,
                                   const std::string& a, const std::string& b,
                                   const std::string& c, double tol) {
  TripleAngles angles;
  angles.theta = pair_angles(model, b, a, tol).theta[0];
  const double phi0 = pair_angles(model, c, a, tol).theta[0];

  const auto plus = check_angle_constraint(angles.theta, phi0);
  const auto minus = check_angle_constraint(angles.theta, -phi0);
  const bool use_minus = minus.residual < plus.residual;
  angles.phi = use_minus ? -phi0 : phi0;
  angles.branch = use_minus ? minus.branch : plus.branch;

  try {
    angles.chi = pair_angles(model, b, c, tol).theta[0];
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonTrigonometricContext) throw;
    angles.chi = std::numeric_limits<double>::quiet_NaN();
  }
  return angles;
}

ConsistencyReport check_consistency(const ContextualModel& model,
                                    const std::string& a, const std::string& b,
                                    const std::string& c,
                                    const TripleAngles& angles, double tol) {
  const auto& pa = model.distribution(a);
  const auto& pb = model.distribution(b);
  const auto& pc = model.distribution(c);
  const auto& t_bc = model.transition(b, c);

  const auto delta = supplementarity(pb, t_bc, pc);
  const double lam1 = lambda_coefficient(delta[0], t_bc, pc, 0);
  const double lam2 = lambda_coefficient(delta[1], t_bc, pc, 1);

  const double root_a = std::sqrt(pa.probs[0] * pa.probs[1]);
  const double ratio = root_a / std::sqrt(pc.probs[0] * pc.probs[1]);
  // -sin(theta - phi) is +1 on the -pi/2 branch and -1 on the +pi/2 branch
  const double orientation = -std::sin(angles.theta - angles.phi);
  const double interference = orientation * std::sin(angles.phi);

  ConsistencyReport report;
  report.cos_chi = lam1;
  report.predicted = ratio * interference;
  report.residual = std::abs(lam1 - report.predicted);
  report.residual_b2 = std::abs(lam2 + report.predicted);
  report.bc_trigonometric =
      std::abs(lam1) <= 1.0 + tol::kProbability &&
      std::abs(lam2) <= 1.0 + tol::kProbability;

  const double classical =
      t_bc.p(0, 0) * pc.probs[0] + t_bc.p(0, 1) * pc.probs[1];
  report.decomposition_residual =
      std::abs(pb.probs[0] - (classical + root_a * interference));

  report.consistent = report.bc_trigonometric && report.residual <= tol &&
                      report.residual_b2 <= tol;
  return report;
}

ContextualModel generate_consistent_triple(const ContextualDistribution& pa,
                                           double theta, int sign,
                                           const TripleSpec& spec) {
  if (!pa.non_degenerate() || !pa.normalized()) {
    throw Error(ErrorCode::DegenerateContext,
                "triple generator needs a normalized non-degenerate P_c^A");
  }
  if (!(theta > 0.0 && theta < kPi)) {
    throw Error(ErrorCode::InvalidArgument, "theta must lie in (0, pi)");
  }
  if (sign != 1 && sign != -1) {
    throw Error(ErrorCode::InvalidArgument, "sign must be +1 or -1");
  }
  const double phi = theta - sign * 0.5 * kPi;

  TransitionMatrix half;
  AngleSet angles;
  angles.theta = {theta, theta - kPi};
  half.target = spec.b;
  half.given = spec.a;
  const StateVector psi_b = build_wavefunction(half, pa, angles);
  const StateVector psi_g = state_in_gamma_basis(pa, phi);

  ContextualModel model;
  model.context = spec.context;
  model.observables = {
      BinaryObservable::make(spec.a, spec.a_outcomes[0], spec.a_outcomes[1]),
      BinaryObservable::make(spec.b, spec.b_outcomes[0], spec.b_outcomes[1]),
      BinaryObservable::make(spec.c, spec.c_outcomes[0], spec.c_outcomes[1])};
  ContextualDistribution a_dist = pa;
  a_dist.observable = spec.a;
  model.distributions[spec.a] = a_dist;
  model.distributions[spec.b] = distribution_from(spec.b, psi_b);
  model.distributions[spec.c] = distribution_from(spec.c, psi_g);

  for (const auto* label : {&spec.b, &spec.c}) {
    const auto& d = model.distributions[*label];
    if (!(std::min(d.probs[0], d.probs[1]) > tol::kProbability)) {
      throw Error(ErrorCode::DegenerateContext,
                  "derived distribution of " + *label +
                      " has a vanishing probability");
    }
  }

  const std::array<std::pair<std::string, std::string>, 6> pairs{{
      {spec.b, spec.a}, {spec.a, spec.b}, {spec.c, spec.a},
      {spec.a, spec.c}, {spec.b, spec.c}, {spec.c, spec.b}}};
  for (const auto& [target, given] : pairs) {
    TransitionMatrix t;
    t.target = target;
    t.given = given;
    model.transitions[t.key()] = t;
  }
  return model;
}

TripleRepresentation represent_triple(const ContextualModel& model,
                                      const std::string& a, const std::string& b,
                                      const std::string& c, double gauge,
                                      double tol) {
  for (const auto* pair : {&b, &c}) {
    if (!model.transition(*pair, a).uniform_half(tol)) {
      throw Error(ErrorCode::SymmetricConditioningRequired,
                  "transition " + *pair + "|" + a + " must have entries 1/2");
    }
  }
  if (!model.transition(b, c).uniform_half(tol)) {
    throw Error(ErrorCode::SymmetricConditioningRequired,
                "transition " + b + "|" + c + " must have entries 1/2");
  }

  TripleRepresentation rep;
  rep.gauge = gauge;
  rep.angles = resolve_triple_angles(model, a, b, c, tol);
  rep.constraint = check_angle_constraint(rep.angles.theta, rep.angles.phi);
  rep.consistency = check_consistency(model, a, b, c, rep.angles);
  rep.ba = represent_pair(model, b, a, gauge, tol);
  // both pairs take the same gauge shift, which cancels in theta - phi
  rep.w = build_w_matrix(rep.angles.theta - gauge, rep.angles.phi - gauge);
  rep.gamma = gamma_basis(rep.w);
  rep.psi_gamma = state_in_gamma_basis(model.distribution(a), rep.angles.phi);
  rep.c_op = build_c_operator(model.observable(c), rep.w);
  rep.c_op.basis = b;

  const StateVector back = state_in_beta_from_gamma(rep.w, rep.psi_gamma);
  rep.amplitude_roundtrip = (back.amp - rep.ba.psi_b.amp).cwiseAbs().maxCoeff();
  return rep;
}

SpinRepresentation spin_representation(const ContextualDistribution& pa,
                                       double theta) {
  ContextualDistribution given = pa;
  given.observable = "A";
  const ContextualModel model = generate_consistent_triple(given, theta, -1);

  SpinRepresentation spin;
  // omega = theta as read back from the data, so the a-basis is exactly fixed
  const double omega = pair_angles(model, "B", "A").theta[0];
  spin.triple = represent_triple(model, "A", "B", "C", omega);
  if (spin.triple.constraint.branch != -1 || !spin.triple.constraint.satisfied) {
    throw Error(ErrorCode::ConstraintViolated,
                "spin model requires theta - phi = -pi/2");
  }
  auto& rep = spin.triple;
  rep.w = build_w_matrix_from_difference(-0.5 * kPi);
  rep.gamma = gamma_basis(rep.w);
  rep.c_op = build_c_operator(model.observable("C"), rep.w);
  rep.c_op.basis = "B";

  const auto& psi = rep.ba.psi_b.amp;
  spin.g = std::abs(psi(0));
  spin.f = wrap_two_pi(std::arg(psi(1)) - std::arg(psi(0)));

  spin.zeta = std::polar(1.0, -0.25 * kPi);
  Eigen::Vector2cd y_plus;
  Eigen::Vector2cd y_minus;
  y_plus << kInvSqrt2, Complex(0.0, kInvSqrt2);
  y_minus << kInvSqrt2, Complex(0.0, -kInvSqrt2);
  spin.zeta_residual =
      std::max((rep.gamma.vectors[0] - spin.zeta * y_plus).cwiseAbs().maxCoeff(),
               (rep.gamma.vectors[1] - std::conj(spin.zeta) * y_minus)
                   .cwiseAbs()
                   .maxCoeff());
  return spin;
}

}  // namespace qlra
