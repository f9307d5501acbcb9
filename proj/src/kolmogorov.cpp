#include "qlra/kolmogorov.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace qlra {

namespace {

void require_length(std::size_t got, std::size_t want, const std::string& what) {
  if (got != want) {
    throw Error(ErrorCode::InvalidModel, what + " has " + std::to_string(got) +
                                             " entries, space has " +
                                             std::to_string(want));
  }
}

std::string outcome_name(std::size_t i) { return "w" + std::to_string(i + 1); }

}  // namespace

void FiniteSpace::validate() const {
  if (weights.empty()) throw Error(ErrorCode::InvalidModel, "space has no outcomes");
  if (!outcomes.empty()) require_length(outcomes.size(), size(), "outcome list");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidModel, "negative outcome weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol::kProbability) {
    throw Error(ErrorCode::InvalidModel, "weights sum to " + std::to_string(sum));
  }
  for (const auto& [name, v] : variables) require_length(v.size(), size(), "variable " + name);
  for (const auto& [name, e] : events) require_length(e.size(), size(), "event " + name);
}

double FiniteSpace::probability(const Event& e) const {
  require_length(e.size(), size(), "event");
  double p = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (e[i]) p += weights[i];
  }
  return p;
}

const std::vector<double>& FiniteSpace::variable(const std::string& name) const {
  auto it = variables.find(name);
  if (it == variables.end()) throw Error(ErrorCode::InvalidModel, "unknown variable " + name);
  return it->second;
}

const Event& FiniteSpace::event(const std::string& name) const {
  auto it = events.find(name);
  if (it == events.end()) throw Error(ErrorCode::InvalidModel, "unknown event " + name);
  return it->second;
}

Event FiniteSpace::level_set(const std::string& name, double value) const {
  const auto& v = variable(name);
  Event e(size());
  for (std::size_t i = 0; i < size(); ++i) e[i] = v[i] == value;
  return e;
}

std::vector<double> FiniteSpace::values(const std::string& name) const {
  const auto& v = variable(name);
  const std::set<double> distinct(v.begin(), v.end());
  return {distinct.begin(), distinct.end()};
}

Event intersect(const Event& f, const Event& g) {
  if (f.size() != g.size()) throw Error(ErrorCode::DimensionMismatch, "events of different length");
  Event out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] && g[i];
  return out;
}

double conditional_probability(const FiniteSpace& space, const Event& f, const Event& g) {
  const double pg = space.probability(g);
  if (!(pg > 0.0)) throw Error(ErrorCode::ZeroConditioning, "conditioning event has probability 0");
  return space.probability(intersect(f, g)) / pg;
}

TotalProbabilityCheck verify_total_probability(const FiniteSpace& space,
                                               const std::vector<Event>& partition,
                                               const Event& g) {
  std::vector<int> cover(space.size(), 0);
  for (const auto& cell : partition) {
    if (cell.size() != space.size()) throw Error(ErrorCode::InvalidPartition, "cell of wrong length");
    for (std::size_t i = 0; i < cell.size(); ++i) cover[i] += cell[i] ? 1 : 0;
  }
  if (!std::ranges::all_of(cover, [](int c) { return c == 1; })) {
    throw Error(ErrorCode::InvalidPartition, "cells must be disjoint and cover the space");
  }
  TotalProbabilityCheck check;
  double sum = 0.0;
  for (std::size_t n = 0; n < partition.size(); ++n) {
    const double pf = space.probability(partition[n]);
    if (!(pf > 0.0)) {
      check.skipped.push_back(n);
      check.warnings.push_back("cell " + std::to_string(n) + " has probability 0; skipped");
      continue;
    }
    sum += conditional_probability(space, g, partition[n]) * pf;
  }
  check.residual = std::abs(space.probability(g) - sum);
  return check;
}

namespace {

std::array<double, 2> binary_values(const FiniteSpace& space, const std::string& name) {
  const auto v = space.values(name);
  if (v.size() != 2) {
    throw Error(ErrorCode::InvalidModel, "variable " + name + " takes " +
                                             std::to_string(v.size()) + " values, expected 2");
  }
  return {v[1], v[0]};
}

}  // namespace

ContextualModel derive_contextual_model(const FiniteSpace& space,
                                        const std::vector<std::string>& labels,
                                        const Event& context,
                                        const std::string& context_label) {
  if (!(space.probability(context) > 0.0)) {
    throw Error(ErrorCode::ZeroConditioning, "context has probability 0");
  }
  ContextualModel model;
  model.context = context_label;
  std::map<std::string, std::array<double, 2>> outcomes;
  for (const auto& label : labels) {
    const auto vals = binary_values(space, label);
    outcomes[label] = vals;
    model.observables.push_back(BinaryObservable::make(label, vals[0], vals[1]));
    ContextualDistribution d{label, {}};
    for (std::size_t k = 0; k < 2; ++k) {
      d.probs[k] = conditional_probability(space, space.level_set(label, vals[k]), context);
    }
    model.distributions[label] = d;
  }
  for (const auto& target : labels) {
    for (const auto& given : labels) {
      if (target == given) continue;
      TransitionMatrix t{target, given, Eigen::Matrix2d::Zero()};
      for (std::size_t g = 0; g < 2; ++g) {
        const Event sel = space.level_set(given, outcomes[given][g]);
        if (!(space.probability(sel) > 0.0)) {
          throw Error(ErrorCode::ZeroConditioning, "selection event {" + given + " = " +
                                                       std::to_string(outcomes[given][g]) +
                                                       "} has probability 0");
        }
        for (std::size_t r = 0; r < 2; ++r) {
          t.p(r, g) = conditional_probability(space, space.level_set(target, outcomes[target][r]), sel);
        }
      }
      model.transitions[t.key()] = t;
    }
  }
  return model;
}

Eigen::MatrixXd contextual_transition(const FiniteSpace& space, const std::string& target,
                                      const std::string& given, const Event& context) {
  const auto tv = space.values(target);
  const auto gv = space.values(given);
  Eigen::MatrixXd p(tv.size(), gv.size());
  for (std::size_t g = 0; g < gv.size(); ++g) {
    const Event cond = intersect(space.level_set(given, gv[g]), context);
    if (!(space.probability(cond) > 0.0)) {
      throw Error(ErrorCode::ZeroConditioning,
                  "joint event {" + given + " = " + std::to_string(gv[g]) + "} and context has probability 0");
    }
    for (std::size_t t = 0; t < tv.size(); ++t) {
      p(t, g) = conditional_probability(space, space.level_set(target, tv[t]), cond);
    }
  }
  return p;
}

double contextual_total_probability_residual(const FiniteSpace& space,
                                             const std::string& target,
                                             const std::string& given,
                                             const Event& context) {
  const auto p = contextual_transition(space, target, given, context);
  const auto tv = space.values(target);
  const auto gv = space.values(given);
  double worst = 0.0;
  for (std::size_t t = 0; t < tv.size(); ++t) {
    double sum = 0.0;
    for (std::size_t g = 0; g < gv.size(); ++g) {
      sum += p(t, g) * conditional_probability(space, space.level_set(given, gv[g]), context);
    }
    const double pt = conditional_probability(space, space.level_set(target, tv[t]), context);
    worst = std::max(worst, std::abs(pt - sum));
  }
  return worst;
}

namespace {

constexpr int kDyadic = 1024;

std::vector<double> dyadic_weights(std::mt19937_64& rng, std::size_t n) {
  // n - 1 cut points in [0, 1024]; positive gaps are forced for all but
  // occasional zero cells.
  std::uniform_int_distribution<int> cut(0, kDyadic);
  std::vector<int> cuts{0, kDyadic};
  for (std::size_t i = 0; i + 1 < n; ++i) cuts.push_back(cut(rng));
  std::ranges::sort(cuts);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = static_cast<double>(cuts[i + 1] - cuts[i]) / kDyadic;
  }
  return w;
}

}  // namespace

FiniteSpace random_space(std::uint64_t seed, std::size_t n) {
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "random spaces need at least 4 outcomes");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    FiniteSpace s;
    s.weights = dyadic_weights(rng, n);
    for (std::size_t i = 0; i < n; ++i) s.outcomes.push_back(outcome_name(i));
    auto& a = s.variables["A"];
    auto& b = s.variables["B"];
    Event c(n);
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(coin(rng) ? 1.0 : -1.0);
      b.push_back(coin(rng) ? 1.0 : -1.0);
      c[i] = coin(rng);
    }
    s.events["c"] = c;
    const bool ok = [&] {
      for (double v : {1.0, -1.0}) {
        if (!(s.probability(s.level_set("A", v)) > 0.0)) return false;
        if (!(s.probability(s.level_set("B", v)) > 0.0)) return false;
        if (!(s.probability(intersect(s.level_set("A", v), c)) > 0.0)) return false;
      }
      return true;
    }();
    if (ok) return s;
  }
}

FiniteSpace symmetric_space(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> units(1, 15);
  const std::array<double, 2> pm{1.0, -1.0};
  for (;;) {
    FiniteSpace s;
    auto& a = s.variables["A"];
    auto& b = s.variables["B"];
    Event c;
    for (double av : pm) {
      for (double bv : pm) {
        const int u = units(rng);
        for (int z : {1, 0}) {
          s.outcomes.push_back("a" + std::string(av > 0 ? "+" : "-") + "b" +
                               std::string(bv > 0 ? "+" : "-") + "z" + std::to_string(z));
          s.weights.push_back(static_cast<double>(z == 1 ? u : 16 - u) / 64.0);
          a.push_back(av);
          b.push_back(bv);
          c.push_back(z == 1);
        }
      }
    }
    s.events["c"] = c;
    const auto model = derive_contextual_model(s, {"A", "B"}, c);
    try {
      const auto angles = pair_angles(model, "B", "A");
      pair_angles(model, "A", "B");
      if (std::abs(angles.delta[0]) >= 1e-3) return s;
    } catch (const Error&) {
    }
  }
}

EmbeddingData lift_to_grid(const FiniteSpace& space, const Event& context,
                           const std::string& a, const std::string& b,
                           const std::string& x, const std::string& y) {
  auto grid_of = [&](const std::string& name) {
    const auto v = space.values(name);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] != v.front() + static_cast<double>(i)) {
        throw Error(ErrorCode::InvalidModel, "variable " + name + " must take consecutive integer values");
      }
    }
    return Grid::make(v.front(), v.back(), v.size());
  };
  auto density = [&](const std::string& name, const Grid& g) {
    const auto w = g.weights();
    std::vector<double> rho(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
      rho[i] = conditional_probability(space, space.level_set(name, g.point(i)), context) / w[i];
    }
    return rho;
  };
  auto transition = [&](const std::string& target, const Grid& tg, const std::string& given,
                        const Event& ctx) {
    Eigen::MatrixXd p = contextual_transition(space, target, given, ctx);
    const auto w = tg.weights();
    for (Eigen::Index r = 0; r < p.rows(); ++r) p.row(r) /= w[r];
    return p;
  };

  EmbeddingData e;
  e.a_grid = grid_of(a);
  e.b_grid = grid_of(b);
  e.x_grid = grid_of(x);
  e.y_grid = grid_of(y);
  e.rho_a = density(a, e.a_grid);
  e.rho_b = density(b, e.b_grid);
  e.rho_x = density(x, e.x_grid);
  e.rho_y = density(y, e.y_grid);
  e.p_x_given_a = transition(x, e.x_grid, a, context);
  e.p_b_given_x = transition(b, e.b_grid, x, context);
  e.p_y_given_a = transition(y, e.y_grid, a, context);
  e.p_b_given_y = transition(b, e.b_grid, y, context);
  // p(a|b) from the selection events, outside the context
  e.kernel = transition(a, e.a_grid, b, space.everything());
  return e;
}

}  // namespace qlra
