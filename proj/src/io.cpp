#include "qlra/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qlra::io {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

template <class T>
T as(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("field '") + what + "' has the wrong type");
  }
}

std::array<double, 2> pair_of(const Json& j, const char* what) {
  const auto v = as<std::vector<double>>(j, what);
  if (v.size() != 2) throw ParseError(std::string("field '") + what + "' needs 2 entries");
  return {v[0], v[1]};
}

Grid grid_from(const Json& j, const char* what) {
  try {
    return Grid::make(as<double>(field(j, "lower"), what), as<double>(field(j, "upper"), what),
                      as<std::size_t>(field(j, "n"), what));
  } catch (const Error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

Eigen::MatrixXd row_major(const Json& j, std::size_t rows, std::size_t cols, const char* what) {
  const auto v = as<std::vector<double>>(j, what);
  if (v.size() != rows * cols) {
    throw ParseError(std::string("field '") + what + "' needs " + std::to_string(rows * cols) +
                     " entries");
  }
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = v[r * cols + c];
  }
  return m;
}

std::vector<double> flatten(const Eigen::MatrixXd& m) {
  std::vector<double> v;
  v.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) v.push_back(m(r, c));
  }
  return v;
}

// JSON has no NaN or infinity; they are written as null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << text;
  if (!out) throw ParseError("write failed for " + path.string());
}

ContextualModel model_from_json(const Json& j) {
  ContextualModel m;
  if (j.is_object() && j.contains("context")) m.context = as<std::string>(j.at("context"), "context");
  const auto& obs = field(j, "observables");
  if (!obs.is_array()) throw ParseError("field 'observables' must be an array");
  for (const auto& o : obs) {
    m.observables.push_back(BinaryObservable{as<std::string>(field(o, "label"), "label"),
                                             pair_of(field(o, "outcomes"), "outcomes")});
  }
  const auto& dists = field(j, "distributions");
  if (!dists.is_object()) throw ParseError("field 'distributions' must be an object");
  for (const auto& [label, probs] : dists.items()) {
    m.distributions[label] = ContextualDistribution{label, pair_of(probs, "distributions")};
  }
  if (j.contains("transitions")) {
    const auto& ts = j.at("transitions");
    if (!ts.is_object()) throw ParseError("field 'transitions' must be an object");
    for (const auto& [key, rows] : ts.items()) {
      const auto bar = key.find('|');
      if (bar == std::string::npos || bar == 0 || bar + 1 == key.size()) {
        throw ParseError("transition key '" + key + "' must read TARGET|GIVEN");
      }
      TransitionMatrix t{key.substr(0, bar), key.substr(bar + 1)};
      if (!rows.is_array() || rows.size() != 2) throw ParseError("transition " + key + " needs 2 rows");
      for (std::size_t r = 0; r < 2; ++r) {
        const auto row = pair_of(rows[r], "transitions");
        t.p(r, 0) = row[0];
        t.p(r, 1) = row[1];
      }
      m.transitions[key] = t;
    }
  }
  return m;
}

Json to_json(const ContextualModel& m) {
  Json j;
  j["context"] = m.context;
  j["observables"] = Json::array();
  for (const auto& o : m.observables) {
    j["observables"].push_back({{"label", o.label}, {"outcomes", o.outcomes}});
  }
  j["distributions"] = Json::object();
  for (const auto& [label, d] : m.distributions) j["distributions"][label] = d.probs;
  j["transitions"] = Json::object();
  for (const auto& [key, t] : m.transitions) {
    j["transitions"][key] = {{t.p(0, 0), t.p(0, 1)}, {t.p(1, 0), t.p(1, 1)}};
  }
  return j;
}

Json to_json(const Grid& g) {
  return {{"lower", g.lower}, {"upper", g.upper}, {"n", g.n}};
}

ContinuousModel continuous_from_json(const Json& j) {
  ContinuousModel m;
  m.a_grid = grid_from(field(j, "a_grid"), "a_grid");
  m.b_grid = grid_from(field(j, "b_grid"), "b_grid");
  m.rho_a = as<std::vector<double>>(field(j, "rho_a"), "rho_a");
  m.rho_b = as<std::vector<double>>(field(j, "rho_b"), "rho_b");
  if (m.rho_a.size() != m.a_grid.n) throw ParseError("rho_a length does not match a_grid");
  if (m.rho_b.size() != m.b_grid.n) throw ParseError("rho_b length does not match b_grid");
  m.kernel = row_major(field(j, "kernel"), m.a_grid.n, m.b_grid.n, "kernel");
  if (j.contains("eta") && !j.at("eta").is_null()) {
    m.eta = row_major(j.at("eta"), m.a_grid.n, m.b_grid.n, "eta");
  }
  return m;
}

Json to_json(const ContinuousModel& m) {
  Json j;
  j["a_grid"] = to_json(m.a_grid);
  j["b_grid"] = to_json(m.b_grid);
  j["rho_a"] = m.rho_a;
  j["rho_b"] = m.rho_b;
  j["kernel"] = flatten(m.kernel);
  if (m.eta) j["eta"] = flatten(*m.eta);
  return j;
}

FiniteSpace space_from_json(const Json& j) {
  FiniteSpace s;
  s.outcomes = as<std::vector<std::string>>(field(j, "outcomes"), "outcomes");
  s.weights = as<std::vector<double>>(field(j, "weights"), "weights");
  if (s.outcomes.size() != s.weights.size()) throw ParseError("outcomes and weights differ in length");
  if (j.contains("variables")) {
    for (const auto& [name, v] : j.at("variables").items()) {
      s.variables[name] = as<std::vector<double>>(v, "variables");
      if (s.variables[name].size() != s.size()) throw ParseError("variable " + name + " has wrong length");
    }
  }
  if (j.contains("events")) {
    for (const auto& [name, members] : j.at("events").items()) {
      Event e(s.size(), false);
      for (const auto& who : as<std::vector<std::string>>(members, "events")) {
        auto it = std::find(s.outcomes.begin(), s.outcomes.end(), who);
        if (it == s.outcomes.end()) throw ParseError("event " + name + " names unknown outcome " + who);
        e[static_cast<std::size_t>(it - s.outcomes.begin())] = true;
      }
      s.events[name] = e;
    }
  }
  return s;
}

Json to_json(const FiniteSpace& s) {
  Json j;
  j["outcomes"] = s.outcomes;
  j["weights"] = s.weights;
  j["variables"] = Json::object();
  for (const auto& [name, v] : s.variables) j["variables"][name] = v;
  j["events"] = Json::object();
  for (const auto& [name, e] : s.events) {
    Json members = Json::array();
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i]) members.push_back(s.outcomes[i]);
    }
    j["events"][name] = members;
  }
  return j;
}

Json to_json(const Complex& z) { return Json::array({number(z.real()), number(z.imag())}); }

Json to_json(const Eigen::MatrixXcd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(Complex(m(r, c))));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const StateVector& s) {
  return {{"basis", s.basis},
          {"amplitudes", {to_json(Complex(s.amp(0))), to_json(Complex(s.amp(1)))}},
          {"probabilities", {s.probability(0), s.probability(1)}}};
}

Json to_json(const Basis2& b) {
  Json vs = Json::array();
  for (const auto& v : b.vectors) vs.push_back({to_json(Complex(v(0))), to_json(Complex(v(1)))});
  return {{"label", b.label}, {"vectors", vs}, {"context_dependent", b.context_dependent}};
}

Json to_json(const Operator2& op) {
  return {{"basis", op.basis}, {"matrix", to_json(Eigen::MatrixXcd(op.m))}};
}

Json to_json(const ChangeOfBasis2& u) {
  return {{"source", u.source}, {"target", u.target}, {"matrix", to_json(Eigen::MatrixXcd(u.u))}};
}

Json to_json(const AngleSet& a) {
  return {{"delta", {number(a.delta[0]), number(a.delta[1])}},
          {"lambda", {number(a.lambda[0]), number(a.lambda[1])}},
          {"theta", {number(a.theta[0]), number(a.theta[1])}},
          {"phase_opposed", a.phase_opposed}};
}

Json to_json(const ValidationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"subject", c.subject}, {"passed", c.passed},
                      {"value", number(c.value)}});
  }
  return checks;
}

}  // namespace qlra::io
