// qlra command-line tool. Exit codes: 0 success, 1 rejected by a theory-level
// check, 2 I/O, parse or usage failure.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "CLI11.hpp"

#include "qlra/binary.hpp"
#include "qlra/continuous.hpp"
#include "qlra/contextual.hpp"
#include "qlra/io.hpp"
#include "qlra/kolmogorov.hpp"
#include "qlra/triple.hpp"

#ifndef QLRA_VERSION
#define QLRA_VERSION "0.0.0"
#endif

namespace {

using qlra::io::Json;
constexpr double kPi = std::numbers::pi;

enum Exit { kOk = 0, kRejected = 1, kIoFailure = 2 };

struct RunConfig {
  std::string command;
  std::string in;
  std::string out;
  std::string gauge = "0";
  std::size_t grid_n = 64;
  double fd_step = 1e-4;
  std::string quadrature = "trapezoid";
  std::uint64_t seed = 42;
  std::string kind = "binary";
  std::string target;
  std::string given;
  double pa1 = 0.5;
  double theta = kPi / 3.0;
  double tol = qlra::tol::kProbability;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json config_json(const RunConfig& c) {
  return {{"command", c.command}, {"in", c.in},         {"out", c.out},
          {"gauge", c.gauge},     {"grid_n", c.grid_n}, {"fd_step", c.fd_step},
          {"quadrature", c.quadrature}, {"seed", c.seed}, {"kind", c.kind},
          {"tolerance", c.tol}};
}

Json header(const RunConfig& c) {
  Json j;
  j["tool"] = {{"name", "qlra"}, {"version", QLRA_VERSION}};
  j["config"] = config_json(c);
  return j;
}

void emit(const RunConfig& c, const Json& j) {
  const std::string text = j.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
  } else {
    qlra::io::write_text(c.out, text);
  }
}

Json error_json(const qlra::Error& e) {
  return {{"code", std::string(qlra::to_string(e.code()))}, {"message", e.what()}};
}

Json flags_of(const qlra::ValidationReport& r) {
  Json flags = Json::array();
  for (const auto& c : r.checks) {
    if (c.passed) continue;
    const std::string f = c.name == "trigonometric" ? "non_trigonometric" : c.name;
    if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
  }
  return flags;
}

double resolve_gauge(const std::string& gauge, double theta) {
  if (gauge == "theta") return theta;
  try {
    std::size_t used = 0;
    const double w = std::stod(gauge, &used);
    if (used != gauge.size() || !std::isfinite(w)) throw std::invalid_argument(gauge);
    return w;
  } catch (const std::exception&) {
    throw UsageError("--gauge must be a number or 'theta', got '" + gauge + "'");
  }
}

Json load(const RunConfig& c) {
  if (c.in.empty()) throw UsageError(c.command + " requires --in");
  return qlra::io::read_json(c.in);
}

double max_abs_diff(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------- validate

int cmd_validate(const RunConfig& c) {
  const Json doc = load(c);
  Json report = header(c);
  bool ok = false;
  if (doc.is_object() && doc.contains("a_grid")) {
    const auto m = qlra::io::continuous_from_json(doc);
    const auto v = qlra::validate_continuous(m);
    report["kind"] = "continuous";
    report["checks"] = qlra::io::to_json(v);
    report["flags"] = flags_of(v);
    ok = v.ok();
  } else if (doc.is_object() && doc.contains("observables")) {
    const auto m = qlra::io::model_from_json(doc);
    const auto v = qlra::validate_model(m, c.tol);
    report["kind"] = "discrete";
    report["checks"] = qlra::io::to_json(v);
    report["flags"] = flags_of(v);
    ok = v.ok();
  } else if (doc.is_object() && doc.contains("weights")) {
    const auto s = qlra::io::space_from_json(doc);
    report["kind"] = "space";
    try {
      s.validate();
      ok = true;
    } catch (const qlra::Error& e) {
      report["error"] = error_json(e);
    }
  } else {
    throw qlra::io::ParseError("document is neither a model, a continuous model nor a space");
  }
  report["ok"] = ok;
  emit(c, report);
  return ok ? kOk : kRejected;
}

// ---------------------------------------------------------------- represent2

int cmd_represent2(const RunConfig& c) {
  const auto m = qlra::io::model_from_json(load(c));
  Json report = header(c);
  const auto v = qlra::validate_model(m, c.tol);
  report["validation"] = {{"ok", v.ok()}, {"flags", flags_of(v)}};
  if (!v.ok()) {
    report["checks"] = qlra::io::to_json(v);
    emit(c, report);
    return kRejected;
  }
  if (m.observables.size() < 2) throw qlra::io::ParseError("represent2 needs two observables");
  const std::string target = c.target.empty() ? m.observables[1].label : c.target;
  const std::string given = c.given.empty() ? m.observables[0].label : c.given;

  const auto angles = qlra::pair_angles(m, target, given, c.tol);
  const double gauge = resolve_gauge(c.gauge, angles.theta[0]);
  const auto rep = qlra::represent_pair(m, target, given, gauge, c.tol);

  const auto& pb = m.distribution(target);
  const auto& pa = m.distribution(given);
  const auto& ob = m.observable(target);
  const auto& oa = m.observable(given);
  double born_b = 0.0;
  double born_a = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    born_b = std::max(born_b, std::abs(rep.psi_b.probability(k) - pb.probs[k]));
    born_a = std::max(born_a, std::abs(rep.psi_a.probability(k) - pa.probs[k]));
  }
  const double eb = qlra::expectation(rep.b_op, rep.psi_b);
  const double ea = qlra::expectation(rep.a_op, rep.psi_b);
  const auto product = qlra::a_operator_by_product(oa, rep.u);

  report["pair"] = {{"target", target}, {"given", given}, {"gauge", gauge}};
  report["angles"] = qlra::io::to_json(rep.angles);
  report["psi_b"] = qlra::io::to_json(rep.psi_b);
  report["psi_a"] = qlra::io::to_json(rep.psi_a);
  report["b_basis"] = qlra::io::to_json(rep.b_basis);
  report["a_basis"] = qlra::io::to_json(rep.a_basis);
  report["change_of_basis"] = qlra::io::to_json(rep.u);
  report["b_operator"] = qlra::io::to_json(rep.b_op);
  report["a_operator"] = qlra::io::to_json(rep.a_op);
  report["expectations"] = {{target, eb}, {given, ea}};
  report["residuals"] = {
      {"born_target", born_b},
      {"born_given", born_a},
      {"expectation_target", std::abs(eb - (ob.outcomes[0] * pb.probs[0] + ob.outcomes[1] * pb.probs[1]))},
      {"expectation_given", std::abs(ea - (oa.outcomes[0] * pa.probs[0] + oa.outcomes[1] * pa.probs[1]))},
      {"unitarity", rep.u.unitarity_residual()},
      {"orthonormality", rep.a_basis.orthonormality_residual()},
      {"hermiticity", std::max(rep.a_op.hermiticity_residual(), rep.b_op.hermiticity_residual())},
      {"a_operator_product", max_abs_diff(rep.a_op.m, product.m)}};
  emit(c, report);
  return kOk;
}

// ---------------------------------------------------------------- represent3

Json triple_json(const qlra::TripleRepresentation& rep) {
  const auto& k = rep.consistency;
  const double consistency_residual =
      std::max({k.residual, k.residual_b2, k.decomposition_residual});
  Json j;
  j["angles"] = {{"theta", rep.angles.theta}, {"phi", rep.angles.phi},
                 {"chi", std::isfinite(rep.angles.chi) ? Json(rep.angles.chi) : Json(nullptr)},
                 {"branch", rep.angles.branch}};
  j["constraint"] = {{"residual", rep.constraint.residual},
                     {"w1_sq_minus_half", rep.constraint.w1_sq_minus_half},
                     {"branch", rep.constraint.branch},
                     {"satisfied", rep.constraint.satisfied}};
  j["consistency"] = {{"cos_chi", k.cos_chi},
                      {"predicted", k.predicted},
                      {"residual_b1", k.residual},
                      {"residual_b2", k.residual_b2},
                      {"decomposition_residual", k.decomposition_residual},
                      {"bc_trigonometric", k.bc_trigonometric},
                      {"consistent", k.consistent}};
  j["consistency_residual"] = consistency_residual;
  j["gauge"] = rep.gauge;
  j["w_matrix"] = qlra::io::to_json(Eigen::MatrixXcd(rep.w.matrix()));
  j["psi_b"] = qlra::io::to_json(rep.ba.psi_b);
  j["psi_gamma"] = qlra::io::to_json(rep.psi_gamma);
  j["a_basis"] = qlra::io::to_json(rep.ba.a_basis);
  j["gamma_basis"] = qlra::io::to_json(rep.gamma);
  j["b_operator"] = qlra::io::to_json(rep.ba.b_op);
  j["a_operator"] = qlra::io::to_json(rep.ba.a_op);
  j["c_operator"] = qlra::io::to_json(rep.c_op);
  j["residuals"] = {{"amplitude_roundtrip", rep.amplitude_roundtrip},
                    {"w_unitarity", rep.w.unitarity_residual()},
                    {"gamma_orthonormality", rep.gamma.orthonormality_residual()},
                    {"c_hermiticity", rep.c_op.hermiticity_residual()}};
  return j;
}

int cmd_represent3(const RunConfig& c) {
  const auto m = qlra::io::model_from_json(load(c));
  Json report = header(c);
  const auto v = qlra::validate_model(m, c.tol);
  report["validation"] = {{"ok", v.ok()}, {"flags", flags_of(v)}};
  if (!v.ok()) {
    report["checks"] = qlra::io::to_json(v);
    emit(c, report);
    return kRejected;
  }
  if (m.observables.size() < 3) throw qlra::io::ParseError("represent3 needs three observables");
  const auto& a = m.observables[0].label;
  const auto& b = m.observables[1].label;
  const auto& cc = m.observables[2].label;
  const auto angles = qlra::pair_angles(m, b, a, c.tol);
  const double gauge = resolve_gauge(c.gauge, angles.theta[0]);
  const auto rep = qlra::represent_triple(m, a, b, cc, gauge, c.tol);
  report["observables"] = {a, b, cc};
  report.update(triple_json(rep));
  emit(c, report);
  return rep.consistency.consistent && rep.constraint.satisfied ? kOk : kRejected;
}

// ---------------------------------------------------------------- spin

int cmd_spin(const RunConfig& c) {
  qlra::ContextualDistribution pa{"A", {c.pa1, 1.0 - c.pa1}};
  double theta = c.theta;
  if (!c.in.empty()) {
    const auto m = qlra::io::model_from_json(load(c));
    if (m.observables.size() < 2) throw qlra::io::ParseError("spin input needs two observables");
    const auto& a = m.observables[0].label;
    const auto& b = m.observables[1].label;
    pa = m.distribution(a);
    theta = qlra::pair_angles(m, b, a, c.tol).theta[0];
  }
  const auto spin = qlra::spin_representation(pa, theta);

  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, qlra::Complex(0, -1), qlra::Complex(0, 1), 0;
  sz << 1, 0, 0, -1;
  const double ex = max_abs_diff(spin.triple.ba.a_op.m, sx);
  const double ey = max_abs_diff(spin.triple.c_op.m, sy);
  const double ez = max_abs_diff(spin.triple.ba.b_op.m, sz);
  const bool pauli = ex <= 1e-15 && ey <= 1e-15 && ez <= 1e-15;

  Json report = header(c);
  report["input"] = {{"pa", pa.probs}, {"theta", theta}};
  report.update(triple_json(spin.triple));
  report["sigma_z"] = qlra::io::to_json(Eigen::MatrixXcd(spin.triple.ba.b_op.m));
  report["sigma_x"] = qlra::io::to_json(Eigen::MatrixXcd(spin.triple.ba.a_op.m));
  report["sigma_y"] = qlra::io::to_json(Eigen::MatrixXcd(spin.triple.c_op.m));
  report["pauli"] = {{"sigma_x_error", ex}, {"sigma_y_error", ey}, {"sigma_z_error", ez}, {"exact", pauli}};
  report["g"] = spin.g;
  report["f"] = spin.f;
  report["zeta"] = qlra::io::to_json(spin.zeta);
  report["zeta_residual"] = spin.zeta_residual;
  emit(c, report);
  return pauli ? kOk : kRejected;
}

// ---------------------------------------------------------------- continuous

std::vector<double> flatten_field(const std::vector<Eigen::MatrixXd>& field, bool cosine) {
  std::vector<double> out;
  for (const auto& t : field) {
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      for (Eigen::Index j = 0; j < t.cols(); ++j) out.push_back(cosine ? std::cos(t(i, j)) : t(i, j));
    }
  }
  return out;
}

int cmd_continuous(const RunConfig& c) {
  if (c.quadrature != "trapezoid") throw UsageError("only --quadrature trapezoid is supported");
  if (c.grid_n < 2) throw UsageError("--grid-n must be at least 2");
  if (!(c.fd_step > 0.0)) throw UsageError("--fd-step must be positive");

  qlra::ContinuousModel m;
  std::vector<double> amplitudes;
  Json report = header(c);
  if (c.in.empty()) {
    auto s = qlra::synthetic_gaussian(c.grid_n);
    report["source"] = {{"synthetic", true}, {"kappa0", s.kappa0}};
    m = s.synthesis.model;
    amplitudes = s.amplitudes;
  } else {
    m = qlra::io::continuous_from_json(load(c));
    report["source"] = {{"synthetic", false}};
    for (double r : m.rho_a) amplitudes.push_back(std::sqrt(std::max(r, 0.0)));
  }

  const auto v = qlra::validate_continuous(m);
  report["validation"] = {{"ok", v.ok()}, {"flags", flags_of(v)}, {"checks", qlra::io::to_json(v)}};
  if (!v.ok()) {
    emit(c, report);
    return kRejected;
  }
  const auto omega = qlra::continuous_supplementarity(m);
  double max_omega = 0.0;
  for (double w : omega) max_omega = std::max(max_omega, std::abs(w));
  report["supplementarity"] = {{"max_abs", max_omega}, {"integral", qlra::integrate(m.b_grid, omega)}};

  if (!m.eta) {
    report["error"] = {{"code", "oracle_failure"},
                       {"message", "model carries no phase field; no density oracle is available"}};
    emit(c, report);
    return kRejected;
  }
  const auto oracle = qlra::make_kernel_oracle(qlra::grid_amplitude_kernel(m.a_grid, m.kernel, *m.eta));
  const auto field = qlra::recover_phase_field(oracle, amplitudes, m, {c.fd_step});
  const auto truth = qlra::phase_field_from_eta(*m.eta);
  double max_err = 0.0;
  for (std::size_t b = 0; b < field.size(); ++b) {
    max_err = std::max(max_err, (field.theta[b] - truth.theta[b]).cwiseAbs().maxCoeff());
  }
  const auto op = qlra::b_matrix_elements(m, field);
  const double eb = op.expectation(amplitudes);
  const double mean = qlra::mean_b(m);

  report["recovery"] = {{"theta_max_error", max_err},
                        {"antisymmetry_residual", field.antisymmetry_residual()},
                        {"diagonal_residual", field.diagonal_residual()}};
  report["expectation"] = {{"via_beta", eb}, {"via_rho_b", mean}, {"residual", std::abs(eb - mean)}};
  report["beta_hermiticity"] = op.hermiticity_residual();
  report["cos_theta"] = {{"a_grid", qlra::io::to_json(m.a_grid)},
                         {"b_grid", qlra::io::to_json(m.b_grid)},
                         {"layout", "b, a, a' row-major"},
                         {"values", flatten_field(field.theta, true)}};
  std::vector<double> re, im;
  for (Eigen::Index i = 0; i < op.beta.rows(); ++i) {
    for (Eigen::Index j = 0; j < op.beta.cols(); ++j) {
      re.push_back(op.beta(i, j).real());
      im.push_back(op.beta(i, j).imag());
    }
  }
  report["beta"] = {{"a_grid", qlra::io::to_json(m.a_grid)},
                    {"layout", "a, a' row-major"},
                    {"real", re},
                    {"imag", im}};
  emit(c, report);
  return kOk;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const RunConfig& c) {
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> pa_dist(0.2, 0.8);
  std::uniform_real_distribution<double> theta_dist(0.3, kPi - 0.3);
  Json out;
  if (c.kind == "binary") {
    out = qlra::io::to_json(qlra::generate_binary_model(pa_dist(rng), theta_dist(rng)));
  } else if (c.kind == "triple") {
    std::bernoulli_distribution coin(0.5);
    for (;;) {
      const double p = pa_dist(rng);
      const double t = theta_dist(rng);
      const int sign = coin(rng) ? 1 : -1;
      try {
        out = qlra::io::to_json(qlra::generate_consistent_triple({"A", {p, 1.0 - p}}, t, sign));
        break;
      } catch (const qlra::Error&) {
      }
    }
  } else if (c.kind == "kolmogorov") {
    const auto space = qlra::symmetric_space(c.seed);
    const auto& ctx = space.event("c");
    const auto m = qlra::derive_contextual_model(space, {"A", "B"}, ctx);
    out = qlra::io::to_json(m);
    Json deltas = Json::object();
    for (const auto& [key, t] : m.transitions) {
      deltas[key] = qlra::supplementarity(m.distribution(t.target), t, m.distribution(t.given));
    }
    out["supplementarity"] = deltas;
    out["space"] = qlra::io::to_json(space);
  } else if (c.kind == "continuous") {
    const auto s = qlra::synthetic_gaussian(c.grid_n);
    out = qlra::io::to_json(s.synthesis.model);
  } else {
    throw UsageError("unknown --kind " + c.kind);
  }
  out["generator"] = {{"tool", "qlra"}, {"version", QLRA_VERSION}, {"kind", c.kind}, {"seed", c.seed}};
  emit(c, out);
  return kOk;
}

double tolerance_from_env() {
  const char* env = std::getenv("QLRA_TOL");
  if (env == nullptr || *env == '\0') return qlra::tol::kProbability;
  try {
    std::size_t used = 0;
    const std::string s(env);
    const double t = std::stod(s, &used);
    if (used == s.size() && t > 0.0 && std::isfinite(t)) return t;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("QLRA_TOL must be a positive number, got '") + env + "'");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Quantum-like representations of contextual probability data"};
  app.set_version_flag("--version", QLRA_VERSION);
  app.require_subcommand(1);

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--in", cfg.in, "input JSON file");
    sub->add_option("--out", cfg.out, "report file (stdout when omitted)");
  };
  auto* validate = app.add_subcommand("validate", "check a model, continuous model or space file");
  add_io(validate);
  auto* rep2 = app.add_subcommand("represent2", "representation of one ordered pair");
  add_io(rep2);
  rep2->add_option("--gauge", cfg.gauge, "gauge omega of the a-basis, or 'theta'");
  rep2->add_option("--target", cfg.target, "target observable (default: second)");
  rep2->add_option("--given", cfg.given, "conditioning observable (default: first)");
  auto* rep3 = app.add_subcommand("represent3", "representation of three observables");
  add_io(rep3);
  rep3->add_option("--gauge", cfg.gauge, "gauge omega, or 'theta'");
  auto* spin = app.add_subcommand("spin", "spin-1/2 reconstruction");
  add_io(spin);
  spin->add_option("--pa1", cfg.pa1, "P_c^A(a1) when no --in is given");
  spin->add_option("--theta", cfg.theta, "angle of the (B,A) pair when no --in is given");
  auto* cont = app.add_subcommand("continuous", "continuous phase-field recovery");
  add_io(cont);
  cont->add_option("--grid-n", cfg.grid_n, "grid points of the synthetic model");
  cont->add_option("--fd-step", cfg.fd_step, "finite-difference step on amplitudes");
  cont->add_option("--quadrature", cfg.quadrature, "quadrature rule (trapezoid)");
  auto* gen = app.add_subcommand("generate", "deterministic model generator");
  gen->add_option("--out", cfg.out, "model file (stdout when omitted)");
  gen->add_option("--kind", cfg.kind, "binary|triple|kolmogorov|continuous");
  gen->add_option("--seed", cfg.seed, "generator seed");
  gen->add_option("--grid-n", cfg.grid_n, "grid points for kind=continuous");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kIoFailure;
  }

  try {
    cfg.tol = tolerance_from_env();
    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command == "validate") return cmd_validate(cfg);
    if (cfg.command == "represent2") return cmd_represent2(cfg);
    if (cfg.command == "represent3") return cmd_represent3(cfg);
    if (cfg.command == "spin") return cmd_spin(cfg);
    if (cfg.command == "continuous") return cmd_continuous(cfg);
    return cmd_generate(cfg);
  } catch (const qlra::io::ParseError& e) {
    std::cerr << "qlra: " << e.what() << "\n";
    return kIoFailure;
  } catch (const UsageError& e) {
    std::cerr << "qlra: " << e.what() << "\n";
    return kIoFailure;
  } catch (const qlra::Error& e) {
    Json report = header(cfg);
    report["error"] = error_json(e);
    try {
      emit(cfg, report);
    } catch (const qlra::io::ParseError& w) {
      std::cerr << "qlra: " << w.what() << "\n";
      return kIoFailure;
    }
    std::cerr << "qlra: " << qlra::to_string(e.code()) << ": " << e.what() << "\n";
    return kRejected;
  }
}
