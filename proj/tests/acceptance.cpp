// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qlra/continuous.hpp"
#include "qlra/kolmogorov.hpp"
#include "qlra/triple.hpp"
#include "support.hpp"

using namespace qlra;
using qlra::testing::dist;
using qlra::testing::Gen;
using qlra::testing::half;
using qlra::testing::kPi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Worst-case tracker: keeps the largest value and whether it met its bound.
struct Worst {
  double value = 0.0;
  double bound;
  explicit Worst(double b) : bound(b) {}
  void add(double v) { value = std::isnan(v) ? v : std::max(value, v); }
  bool ok() const { return value <= bound; }
};

std::string fmt(const char* name, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s=%.3g", name, v);
  return buf;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : " ") + p;
  return out;
}

const Complex I(0.0, 1.0);

Outcome pauli() {
  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0.0, -I, I, 0.0;
  sz << 1, 0, 0, -1;
  Worst op(1e-15), basis(1e-15);
  Gen g(1);
  for (int k = 0; k < 100; ++k) {
    const auto s = spin_representation(dist("A", g.uniform(0.02, 0.98)), g.uniform(0.05, kPi - 0.05));
    op.add((s.triple.ba.b_op.m - sz).cwiseAbs().maxCoeff());
    op.add((s.triple.ba.a_op.m - sx).cwiseAbs().maxCoeff());
    op.add((s.triple.c_op.m - sy).cwiseAbs().maxCoeff());
    const Complex zeta = std::polar(1.0, -kPi / 4);
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Vector2cd y_plus, y_minus;
    y_plus << zeta * r, zeta * I * r;
    y_minus << std::conj(zeta) * r, -std::conj(zeta) * I * r;
    basis.add((s.triple.gamma.vectors[0] - y_plus).cwiseAbs().maxCoeff());
    basis.add((s.triple.gamma.vectors[1] - y_minus).cwiseAbs().maxCoeff());
  }
  return {op.ok() && basis.ok(), join({fmt("operator_err", op.value), fmt("gamma_err", basis.value)})};
}

Outcome born() {
  Worst pb(1e-12), pa(1e-12), ex(1e-12);
  Gen g(2);
  for (int k = 0; k < 1000; ++k) {
    const auto m = g.binary_model();
    const auto rep = represent_pair(m, "B", "A", 0.0);
    const auto& a = m.distribution("A").probs;
    const auto& b = m.distribution("B").probs;
    for (int i = 0; i < 2; ++i) {
      pb.add(std::abs(rep.psi_b.probability(i) - b[i]));
      pa.add(std::abs(rep.psi_a.probability(i) - a[i]));
    }
    const auto& oa = m.observable("A").outcomes;
    const auto& ob = m.observable("B").outcomes;
    ex.add(std::abs(expectation(rep.a_op, rep.psi_b) - (oa[0] * a[0] + oa[1] * a[1])));
    ex.add(std::abs(expectation(rep.b_op, rep.psi_b) - (ob[0] * b[0] + ob[1] * b[1])));
  }
  return {pb.ok() && pa.ok() && ex.ok(),
          join({fmt("beta_err", pb.value), fmt("alpha_err", pa.value), fmt("expectation_err", ex.value)})};
}

// Half symmetric matrices [[p,1-p],[1-p,p]], half column-stochastic
// matrices with a reverse that cannot equal their transpose.
Outcome unitarity() {
  Gen g(3);
  int agree = 0, total = 0;
  double worst_sym = 0.0, least_asym = 1e300;
  for (int k = 0; k < 200; ++k) {
    const double lam = g.uniform(-1, 1);
    const auto angles = probabilistic_angles({lam, -lam});
    TransitionMatrix t = half("B", "A");
    const double p = g.uniform(0.02, 0.98);
    double q = 1.0 - p;
    if (k % 2 == 1) {
      do {
        q = g.uniform(0.02, 0.98);
      } while (std::abs(p + q - 1.0) < 0.02);
    }
    t.p << p, q, 1.0 - p, 1.0 - q;
    TransitionMatrix reverse = half("A", "B");
    reverse.p = t.p.transpose();
    const bool eq5 = reverse.column_stochastic() && symmetric_conditioned(t, &reverse);
    const double r = general_change_of_basis(t, angles).unitarity_residual();
    if (eq5) worst_sym = std::max(worst_sym, r);
    else least_asym = std::min(least_asym, r);
    const bool unitary = r <= 1e-10;
    const bool separated = eq5 ? unitary : r >= 1e-3;
    agree += (unitary == eq5 && separated) ? 1 : 0;
    ++total;
  }
  return {agree == total, join({"agree=" + std::to_string(agree) + "/" + std::to_string(total),
                                fmt("sym_max", worst_sym), fmt("asym_min", least_asym)})};
}

Outcome triple() {
  Worst constraint(1e-10), consistency(1e-10), roundtrip(1e-12);
  double least_perturbed = 1e300;
  Gen g(4);
  int made = 0;
  while (made < 200) {
    const double theta = g.uniform(0.05, kPi - 0.05);
    const int sign = g.sign();
    ContextualModel m;
    try {
      m = generate_consistent_triple(dist("A", g.uniform(0.03, 0.97)), theta, sign);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateContext) continue;
      throw;
    }
    ++made;
    const auto rep = represent_triple(m, "A", "B", "C", 0.0);
    constraint.add(rep.constraint.residual);
    consistency.add(std::max(rep.consistency.residual, rep.consistency.residual_b2));
    roundtrip.add(rep.amplitude_roundtrip);

    auto& pb = m.distributions["B"].probs;
    pb[0] += 0.05;
    pb[1] -= 0.05;
    // Angles from the perturbed data when its (B,A) pair is still
    // trigonometric; otherwise the unperturbed ones.
    TripleAngles angles = rep.angles;
    try {
      angles = resolve_triple_angles(m, "A", "B", "C");
    } catch (const Error&) {
    }
    const auto r = check_consistency(m, "A", "B", "C", angles);
    least_perturbed = std::min(least_perturbed, std::max({r.residual, r.residual_b2, r.decomposition_residual}));
  }
  const bool ok = constraint.ok() && consistency.ok() && roundtrip.ok() && least_perturbed >= 1e-3;
  return {ok, join({fmt("constraint", constraint.value), fmt("consistency", consistency.value),
                    fmt("roundtrip", roundtrip.value), fmt("perturbed_min", least_perturbed)})};
}

Outcome gauge() {
  Gen g(5);
  bool identical = true;
  Worst prob(1e-12);
  for (int k = 0; k < 50; ++k) {
    const auto m = g.binary_model();
    const auto base = represent_pair(m, "B", "A", 0.0);
    for (int s = 0; s < 8; ++s) {
      const double w = 2.0 * kPi * s / 8.0 + g.uniform(0.0, 0.1);
      const auto rep = represent_pair(m, "B", "A", w);
      identical = identical && (rep.a_op.m.array() == base.a_op.m.array()).all();
      for (int i = 0; i < 2; ++i) {
        prob.add(std::abs(rep.psi_a.probability(i) - base.psi_a.probability(i)));
        prob.add(std::abs(rep.psi_b.probability(i) - base.psi_b.probability(i)));
      }
    }
  }
  return {identical && prob.ok(),
          join({std::string("a_operator_bitwise=") + (identical ? "yes" : "no"), fmt("prob_change", prob.value)})};
}

double field_error(const PhaseField& got, const PhaseField& want) {
  double e = 0.0;
  for (std::size_t b = 0; b < got.size(); ++b) {
    e = std::max(e, (got.theta[b] - want.theta[b]).cwiseAbs().maxCoeff());
  }
  return e;
}

Outcome continuous() {
  const auto sm = synthetic_gaussian(64);
  const auto& m = sm.synthesis.model;
  const auto oracle = make_kernel_oracle(grid_amplitude_kernel(sm.grid, sm.kernel, sm.eta));
  const auto field = recover_phase_field(oracle, sm.amplitudes, m);
  const double err = field_error(field, phase_field_from_eta(sm.eta));
  const double eb = std::abs(b_matrix_elements(m, field).expectation(sm.amplitudes) - mean_b(m));

  // refinement with the continuum oracle (the grid oracle is exact to roundoff)
  double coarse = 0.0, fine = 0.0;
  for (std::size_t n : {64u, 128u}) {
    const auto s = synthetic_gaussian(n);
    const auto o = make_kernel_oracle(continuum_amplitude_kernel(s));
    const double e = field_error(recover_phase_field(o, s.amplitudes, s.synthesis.model, FdOptions{1e-4, 1e-3}),
                                 phase_field_from_eta(s.eta));
    (n == 64 ? coarse : fine) = e;
  }
  return {err <= 1e-4 && eb <= 1e-6 && fine < coarse,
          join({fmt("theta_err", err), fmt("mean_b_err", eb), fmt("continuum_err_64", coarse),
                fmt("continuum_err_128", fine)})};
}

Outcome appendix() {
  const auto sm = synthetic_gaussian(64);
  const auto& m = sm.synthesis.model;
  const auto oracle = make_kernel_oracle(grid_amplitude_kernel(sm.grid, sm.kernel, sm.eta));
  Gen g(7);
  Worst res(1e-4), anti(1e-12);
  for (int k = 0; k < 100; ++k) {
    const auto b = static_cast<std::size_t>(g.integer(0, 63));
    const auto i = static_cast<std::size_t>(g.integer(0, 63));
    auto j = i;
    while (j == i) j = static_cast<std::size_t>(g.integer(0, 63));
    const double theta = sm.eta(i, b) - sm.eta(j, b);
    res.add(verify_appendix_identity(oracle, sm.amplitudes, m, theta, b, i, j).residual);
  }
  anti.add(recover_phase_field(oracle, sm.amplitudes, m).antisymmetry_residual());
  return {res.ok() && anti.ok(), join({fmt("identity_residual", res.value), fmt("antisymmetry", anti.value)})};
}

Outcome two_point() {
  Gen g(8);
  const auto grid = Grid::make(-1.0, 1.0, 2);
  Worst amp(1e-10), op(1e-10), prob(1e-10);
  for (int k = 0; k < 200; ++k) {
    const double pa1 = g.uniform(0.02, 0.98);
    ContextualModel bm = generate_binary_model(pa1, g.uniform(0.02, kPi - 0.02));
    bm.observables[0].outcomes = {-1.0, 1.0};
    bm.observables[1].outcomes = {-1.0, 1.0};
    const auto rep = represent_pair(bm, "B", "A", 0.0);
    const std::vector<double> s{std::sqrt(pa1), std::sqrt(1.0 - pa1)};
    const Eigen::MatrixXd p = Eigen::MatrixXd::Constant(2, 2, 0.5);
    Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(2, 2);
    eta(1, 0) = -rep.angles.theta[0];
    eta(1, 1) = -rep.angles.theta[1];
    const auto syn = synthesize_model(grid, grid, s, p, eta);
    const auto beta = b_matrix_elements(syn.model, phase_field_from_eta(eta));
    for (int b = 0; b < 2; ++b) {
      amp.add(std::abs(syn.psi_b(b) - rep.psi_b.amp(b)));
      prob.add(std::abs(syn.model.rho_b[b] - bm.distribution("B").probs[b]));
    }
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        op.add(std::abs(beta.beta(i, j) - rep.a_basis.vectors[i].dot(rep.b_op.m * rep.a_basis.vectors[j])));
      }
    }
    prob.add(std::abs(beta.expectation(s) - expectation(rep.b_op, rep.psi_b)));
  }
  return {amp.ok() && op.ok() && prob.ok(),
          join({fmt("amplitude_err", amp.value), fmt("operator_err", op.value), fmt("probability_err", prob.value)})};
}

// Enumeration over elementary outcomes for both generator families.
Outcome kolmogorov() {
  Worst delta(1e-14), whole(1e-14), ltp(1e-14);
  double largest = 0.0;
  int spaces = 0;
  auto run = [&](const FiniteSpace& s) {
    const auto& c = s.event("c");
    auto sum = [&](const std::function<bool(std::size_t)>& f) {
      double v = 0.0;
      for (std::size_t k = 0; k < s.size(); ++k) if (f(k)) v += s.weights[k];
      return v;
    };
    const auto& A = s.variables.at("A");
    const auto& B = s.variables.at("B");
    const double pc = sum([&](std::size_t k) { return bool(c[k]); });
    ContextualModel m;
    try {
      m = derive_contextual_model(s, {"A", "B"}, c);
    } catch (const Error&) {
      return;
    }
    ++spaces;
    const auto d = supplementarity(m.distribution("B"), m.transition("B", "A"), m.distribution("A"));
    const auto all = derive_contextual_model(s, {"A", "B"}, s.everything());
    const auto d0 = supplementarity(all.distribution("B"), all.transition("B", "A"), all.distribution("A"));
    for (int i = 0; i < 2; ++i) {
      const double b = m.observable("B").outcomes[i];
      double classical = 0.0;
      for (double a : m.observable("A").outcomes) {
        const double sel = sum([&](std::size_t k) { return A[k] == a; });
        const double joint = sum([&](std::size_t k) { return A[k] == a && B[k] == b; });
        classical += joint / sel * sum([&](std::size_t k) { return c[k] && A[k] == a; }) / pc;
      }
      const double want = sum([&](std::size_t k) { return c[k] && B[k] == b; }) / pc - classical;
      delta.add(std::abs(d[i] - want));
      largest = std::max(largest, std::abs(want));
      whole.add(std::abs(d0[i]));
    }
    ltp.add(contextual_total_probability_residual(s, "B", "A", c));
    try {
      ltp.add(contextual_total_probability_residual(s, "A", "B", c));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroConditioning) throw;
    }
  };
  for (std::uint64_t seed = 0; seed < 500; ++seed) run(random_space(seed));
  for (std::uint64_t seed = 0; seed < 100; ++seed) run(symmetric_space(seed));
  const bool ok = delta.ok() && whole.ok() && ltp.ok() && largest >= 1e-3;
  return {ok, join({"spaces=" + std::to_string(spaces), fmt("delta_err", delta.value),
                    fmt("omega_context_delta", whole.value), fmt("ltp_residual", ltp.value),
                    fmt("max_abs_delta", largest)})};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 pauli reproduction", pauli},
      {"AC2 binary born round-trip", born},
      {"AC3 unitarity iff symmetric conditioning", unitarity},
      {"AC4 triple consistency", triple},
      {"AC5 gauge invariance", gauge},
      {"AC6 continuous recovery", continuous},
      {"AC7 appendix identity", appendix},
      {"AC8 two-point reduction", two_point},
      {"AC9 kolmogorov oracle", kolmogorov},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%s, %.2fs)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    failed += o.pass ? 0 : 1;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
