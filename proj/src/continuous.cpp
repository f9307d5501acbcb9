#include "qlra/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace qlra {

namespace {

constexpr double kPi = std::numbers::pi;

void require_size(std::size_t got, std::size_t want, const std::string& what) {
  if (got != want) {
    throw Error(ErrorCode::GridMismatch,
                what + ": expected " + std::to_string(want) + " values, got " +
                    std::to_string(got));
  }
}

double clamped_arccos(double value, double clamp) {
  if (!(std::abs(value) <= 1.0 + clamp)) {
    throw Error(ErrorCode::NonTrigonometricContext,
                "normalized derivative " + std::to_string(value) +
                    " lies outside [-1, 1]");
  }
  return std::acos(std::clamp(value, -1.0, 1.0));
}

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double b = kk / std::sqrt(4.0 * kk * kk - 1.0);
    j(k, k - 1) = b;
    j(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(j);
  x.resize(n);
  w.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = solver.eigenvalues()(k);
    const double v = solver.eigenvectors()(0, k);
    w[k] = 2.0 * v * v;
  }
}

}  // namespace

Grid Grid::make(double lower, double upper, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points");
  if (!(upper > lower)) {
    throw Error(ErrorCode::InvalidArgument, "grid upper bound must exceed lower");
  }
  return Grid{lower, upper, n};
}

double Grid::point(std::size_t i) const {
  if (i + 1 == n) return upper;
  return lower + static_cast<double>(i) * spacing();
}

std::vector<double> Grid::points() const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = point(i);
  return out;
}

std::vector<double> Grid::weights() const {
  std::vector<double> w(n, spacing());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double integrate(const Grid& grid, std::span<const double> values) {
  require_size(values.size(), grid.n, "integrand");
  const auto w = grid.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) sum += w[i] * values[i];
  return sum;
}

ValidationReport validate_continuous(const ContinuousModel& m, double tol) {
  ValidationReport r;
  const std::size_t na = m.a_grid.n;
  const std::size_t nb = m.b_grid.n;
  const bool shapes = m.rho_a.size() == na && m.rho_b.size() == nb &&
                      static_cast<std::size_t>(m.kernel.rows()) == na &&
                      static_cast<std::size_t>(m.kernel.cols()) == nb;
  r.add("grid_shapes", "model", shapes);
  if (m.eta) {
    r.add("eta_shape", "eta",
          static_cast<std::size_t>(m.eta->rows()) == na &&
              static_cast<std::size_t>(m.eta->cols()) == nb);
  }
  if (!shapes) return r;

  auto nonneg = [](std::span<const double> v) {
    return std::ranges::all_of(v, [](double x) { return x >= 0.0; });
  };
  r.add("nonnegative", "rho_a", nonneg(m.rho_a));
  r.add("nonnegative", "rho_b", nonneg(m.rho_b));
  r.add("nonnegative", "kernel", (m.kernel.array() >= 0.0).all());

  const double ia = integrate(m.a_grid, m.rho_a) - 1.0;
  const double ib = integrate(m.b_grid, m.rho_b) - 1.0;
  r.add("normalized", "rho_a", std::abs(ia) <= tol, ia);
  r.add("normalized", "rho_b", std::abs(ib) <= tol, ib);

  const auto wa = m.a_grid.weights();
  double worst = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    double s = 0.0;
    for (std::size_t a = 0; a < na; ++a) s += wa[a] * m.kernel(a, b);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  r.add("kernel_normalized", "kernel", worst <= tol, worst);

  if (m.a_grid == m.b_grid) {
    const double asym = (m.kernel - m.kernel.transpose()).cwiseAbs().maxCoeff();
    r.add("symmetric_conditioning", "kernel", asym <= tol, asym);
  } else {
    r.add("symmetric_conditioning", "kernel", false,
          std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

std::vector<double> continuous_supplementarity(const ContinuousModel& m) {
  require_size(m.rho_a.size(), m.a_grid.n, "rho_a");
  require_size(m.rho_b.size(), m.b_grid.n, "rho_b");
  if (static_cast<std::size_t>(m.kernel.rows()) != m.a_grid.n ||
      static_cast<std::size_t>(m.kernel.cols()) != m.b_grid.n) {
    throw Error(ErrorCode::GridMismatch, "kernel shape does not match the grids");
  }
  const auto wa = m.a_grid.weights();
  std::vector<double> omega(m.b_grid.n);
  for (std::size_t b = 0; b < m.b_grid.n; ++b) {
    double classical = 0.0;
    for (std::size_t a = 0; a < m.a_grid.n; ++a) {
      classical += wa[a] * m.kernel(a, b) * m.rho_a[a];
    }
    omega[b] = m.rho_b[b] - classical;
  }
  return omega;
}

AmplitudeKernel grid_amplitude_kernel(const Grid& a_grid,
                                      const Eigen::MatrixXd& kernel,
                                      const Eigen::MatrixXd& eta) {
  if (static_cast<std::size_t>(kernel.rows()) != a_grid.n ||
      kernel.rows() != eta.rows() || kernel.cols() != eta.cols()) {
    throw Error(ErrorCode::GridMismatch, "kernel and eta shapes differ");
  }
  const auto w = a_grid.weights();
  AmplitudeKernel m(kernel.cols(), kernel.rows());
  for (Eigen::Index b = 0; b < kernel.cols(); ++b) {
    for (Eigen::Index a = 0; a < kernel.rows(); ++a) {
      m(b, a) = w[a] * std::sqrt(kernel(a, b)) * std::polar(1.0, -eta(a, b));
    }
  }
  return m;
}

Synthesis synthesize_model(const Grid& a_grid, const Grid& b_grid,
                           std::span<const double> amplitudes,
                           const Eigen::MatrixXd& kernel,
                           const Eigen::MatrixXd& eta) {
  require_size(amplitudes.size(), a_grid.n, "amplitudes");
  if (static_cast<std::size_t>(kernel.cols()) != b_grid.n) {
    throw Error(ErrorCode::GridMismatch, "kernel columns do not match the b-grid");
  }
  const AmplitudeKernel m = grid_amplitude_kernel(a_grid, kernel, eta);
  const Eigen::Map<const Eigen::VectorXd> s(amplitudes.data(),
                                            static_cast<Eigen::Index>(amplitudes.size()));

  Synthesis out;
  out.psi_b = m * s.cast<Complex>();
  auto& model = out.model;
  model.a_grid = a_grid;
  model.b_grid = b_grid;
  model.kernel = kernel;
  model.eta = eta;
  model.rho_a.resize(a_grid.n);
  for (std::size_t a = 0; a < a_grid.n; ++a) model.rho_a[a] = s(a) * s(a);
  model.rho_b.resize(b_grid.n);
  for (std::size_t b = 0; b < b_grid.n; ++b) model.rho_b[b] = std::norm(out.psi_b(b));
  out.normalization_residual = std::abs(integrate(b_grid, model.rho_b) - 1.0);
  out.normalizable = out.normalization_residual <= 1e-6;
  return out;
}

DensityOracle make_kernel_oracle(AmplitudeKernel m) {
  return [m = std::move(m)](std::span<const double> s) {
    if (static_cast<Eigen::Index>(s.size()) != m.cols()) {
      throw Error(ErrorCode::OracleFailure, "oracle received a field of wrong size");
    }
    // extended accumulation keeps the four-point difference clear of
    // summation noise
    std::vector<double> rho(m.rows());
    for (Eigen::Index b = 0; b < m.rows(); ++b) {
      long double re = 0.0L;
      long double im = 0.0L;
      for (Eigen::Index a = 0; a < m.cols(); ++a) {
        re += static_cast<long double>(m(b, a).real()) * s[a];
        im += static_cast<long double>(m(b, a).imag()) * s[a];
      }
      rho[b] = static_cast<double>(re * re + im * im);
    }
    return rho;
  };
}

std::vector<double> mixed_derivative(const DensityOracle& oracle,
                                     std::span<const double> base,
                                     const Grid& a_grid, std::size_t i,
                                     std::size_t j, double step) {
  require_size(base.size(), a_grid.n, "base amplitudes");
  if (i >= a_grid.n || j >= a_grid.n) {
    throw Error(ErrorCode::InvalidArgument, "grid index out of range");
  }
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "FD step must be positive");

  std::vector<double> s(base.begin(), base.end());
  auto eval = [&](double di, double dj) {
    s[i] += di;
    s[j] += dj;
    auto rho = oracle(s);
    s.assign(base.begin(), base.end());
    for (double v : rho) {
      if (!std::isfinite(v)) throw Error(ErrorCode::OracleFailure, "oracle returned a non-finite value");
    }
    return rho;
  };
  const auto pp = eval(step, step);
  const auto pm = eval(step, -step);
  const auto mp = eval(-step, step);
  const auto mm = eval(-step, -step);
  if (pp.size() != pm.size() || pp.size() != mp.size() || pp.size() != mm.size()) {
    throw Error(ErrorCode::OracleFailure, "oracle output size changed between calls");
  }
  const auto w = a_grid.weights();
  const double scale = 1.0 / (4.0 * step * step * w[i] * w[j]);
  std::vector<double> d(pp.size());
  for (std::size_t b = 0; b < d.size(); ++b) {
    d[b] = (pp[b] - pm[b] - mp[b] + mm[b]) * scale;
  }
  return d;
}

namespace {

double normalized_cos(const ContinuousModel& m, double derivative, std::size_t b,
                      std::size_t i, std::size_t j) {
  const double denom = 2.0 * std::sqrt(m.kernel(i, b) * m.kernel(j, b));
  if (!(denom > 0.0)) {
    throw Error(ErrorCode::ZeroDenominator, "kernel vanishes at b index " + std::to_string(b));
  }
  return derivative / denom;
}

}  // namespace

double theta_from_oracle(const DensityOracle& oracle, std::span<const double> base,
                         const ContinuousModel& model, std::size_t b,
                         std::size_t i, std::size_t j, FdOptions opts) {
  if (i == j) return 0.0;
  if (b >= model.b_grid.n) throw Error(ErrorCode::InvalidArgument, "b index out of range");
  const auto d = mixed_derivative(oracle, base, model.a_grid, i, j, opts.step);
  require_size(d.size(), model.b_grid.n, "oracle output");
  return clamped_arccos(normalized_cos(model, d[b], b, i, j), opts.clamp);
}

double PhaseField::antisymmetry_residual() const {
  double worst = 0.0;
  for (const auto& t : theta) worst = std::max(worst, (t + t.transpose()).cwiseAbs().maxCoeff());
  return worst;
}

double PhaseField::diagonal_residual() const {
  double worst = 0.0;
  for (const auto& t : theta) worst = std::max(worst, t.diagonal().cwiseAbs().maxCoeff());
  return worst;
}

PhaseField recover_phase_field(const DensityOracle& oracle, std::span<const double> base,
                               const ContinuousModel& model, FdOptions opts) {
  const std::size_t na = model.a_grid.n;
  const std::size_t nb = model.b_grid.n;
  PhaseField field;
  field.theta.assign(nb, Eigen::MatrixXd::Zero(na, na));
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = i + 1; j < na; ++j) {
      const auto d = mixed_derivative(oracle, base, model.a_grid, i, j, opts.step);
      require_size(d.size(), nb, "oracle output");
      for (std::size_t b = 0; b < nb; ++b) {
        const double t = clamped_arccos(normalized_cos(model, d[b], b, i, j), opts.clamp);
        field.theta[b](i, j) = t;
        field.theta[b](j, i) = -t;
      }
    }
  }
  return field;
}

PhaseField phase_field_from_eta(const Eigen::MatrixXd& eta) {
  const Eigen::Index na = eta.rows();
  PhaseField field;
  field.theta.resize(eta.cols());
  for (Eigen::Index b = 0; b < eta.cols(); ++b) {
    auto& t = field.theta[b];
    t.resize(na, na);
    for (Eigen::Index i = 0; i < na; ++i) {
      for (Eigen::Index j = 0; j < na; ++j) t(i, j) = eta(i, b) - eta(j, b);
    }
  }
  return field;
}

double KernelOperator::hermiticity_residual() const {
  return (beta - beta.adjoint()).cwiseAbs().maxCoeff();
}

double KernelOperator::expectation(std::span<const double> s) const {
  require_size(s.size(), a_grid.n, "amplitudes");
  const auto w = a_grid.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < a_grid.n; ++i) {
    for (std::size_t j = 0; j < a_grid.n; ++j) {
      sum += w[i] * w[j] * s[i] * s[j] * beta(i, j).real();
    }
  }
  return sum;
}

KernelOperator b_matrix_elements(const ContinuousModel& model, const PhaseField& field) {
  const std::size_t na = model.a_grid.n;
  const std::size_t nb = model.b_grid.n;
  require_size(field.size(), nb, "phase field");
  const auto wb = model.b_grid.weights();
  KernelOperator op;
  op.a_grid = model.a_grid;
  op.beta = Eigen::MatrixXcd::Zero(na, na);
  for (std::size_t b = 0; b < nb; ++b) {
    const double x = model.b_grid.point(b);
    const auto& t = field.theta[b];
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < na; ++j) {
        op.beta(i, j) += wb[b] * x * std::sqrt(model.kernel(i, b) * model.kernel(j, b)) *
                         std::polar(1.0, t(i, j));
      }
    }
  }
  return op;
}

double mean_b(const ContinuousModel& model) {
  std::vector<double> f(model.b_grid.n);
  for (std::size_t b = 0; b < f.size(); ++b) f[b] = model.b_grid.point(b) * model.rho_b[b];
  return integrate(model.b_grid, f);
}

AppendixCheck verify_appendix_identity(const DensityOracle& oracle,
                                       std::span<const double> base,
                                       const ContinuousModel& model, double theta,
                                       std::size_t b, std::size_t i, std::size_t j,
                                       FdOptions opts) {
  if (i == j) {
    throw Error(ErrorCode::InvalidArgument, "identity holds only for distinct grid points");
  }
  const auto wa = model.a_grid.weights();
  DensityOracle omega = [&](std::span<const double> s) {
    auto rho = oracle(s);
    for (std::size_t bb = 0; bb < rho.size(); ++bb) {
      double classical = 0.0;
      for (std::size_t a = 0; a < s.size(); ++a) classical += wa[a] * model.kernel(a, bb) * s[a] * s[a];
      rho[bb] -= classical;
    }
    return rho;
  };
  const auto d = mixed_derivative(omega, base, model.a_grid, i, j, opts.step);
  AppendixCheck c;
  c.derivative = d.at(b);
  c.predicted = 2.0 * std::sqrt(model.kernel(i, b) * model.kernel(j, b)) * std::cos(theta);
  c.residual = std::abs(c.derivative - c.predicted);
  return c;
}

double embedding_ltp_residual(const EmbeddingData& e) {
  auto push = [](const Eigen::MatrixXd& p, const Grid& from, std::span<const double> rho) {
    const auto w = from.weights();
    std::vector<double> out(p.rows(), 0.0);
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.cols(); ++c) out[r] += w[c] * p(r, c) * rho[c];
    }
    return out;
  };
  auto diff = [](const std::vector<double>& a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    return worst;
  };
  require_size(static_cast<std::size_t>(e.p_x_given_a.rows()), e.x_grid.n, "p(x|a) rows");
  require_size(static_cast<std::size_t>(e.p_x_given_a.cols()), e.a_grid.n, "p(x|a) columns");
  require_size(static_cast<std::size_t>(e.p_b_given_x.rows()), e.b_grid.n, "p(b|x) rows");
  require_size(static_cast<std::size_t>(e.p_b_given_x.cols()), e.x_grid.n, "p(b|x) columns");
  require_size(static_cast<std::size_t>(e.p_y_given_a.rows()), e.y_grid.n, "p(y|a) rows");
  require_size(static_cast<std::size_t>(e.p_y_given_a.cols()), e.a_grid.n, "p(y|a) columns");
  require_size(static_cast<std::size_t>(e.p_b_given_y.rows()), e.b_grid.n, "p(b|y) rows");
  require_size(static_cast<std::size_t>(e.p_b_given_y.cols()), e.y_grid.n, "p(b|y) columns");
  double worst = 0.0;
  worst = std::max(worst, diff(push(e.p_x_given_a, e.a_grid, e.rho_a), e.rho_x));
  worst = std::max(worst, diff(push(e.p_b_given_x, e.x_grid, e.rho_x), e.rho_b));
  worst = std::max(worst, diff(push(e.p_y_given_a, e.a_grid, e.rho_a), e.rho_y));
  worst = std::max(worst, diff(push(e.p_b_given_y, e.y_grid, e.rho_y), e.rho_b));
  return worst;
}

EmbeddingField theta_from_embedding(const EmbeddingData& e, double tol) {
  require_size(e.rho_a.size(), e.a_grid.n, "rho_a");
  require_size(e.rho_b.size(), e.b_grid.n, "rho_b");
  require_size(e.rho_x.size(), e.x_grid.n, "rho_x");
  require_size(e.rho_y.size(), e.y_grid.n, "rho_y");
  if (static_cast<std::size_t>(e.kernel.rows()) != e.a_grid.n ||
      static_cast<std::size_t>(e.kernel.cols()) != e.b_grid.n) {
    throw Error(ErrorCode::GridMismatch, "kernel shape does not match the grids");
  }

  EmbeddingField out;
  out.ltp_residual = embedding_ltp_residual(e);
  if (!(out.ltp_residual <= tol)) {
    throw Error(ErrorCode::InvalidEmbedding,
                "transition densities violate total probability by " +
                    std::to_string(out.ltp_residual));
  }

  const std::size_t na = e.a_grid.n;
  const auto wa = e.a_grid.weights();
  const auto wx = e.x_grid.weights();
  const auto wy = e.y_grid.weights();
  for (std::size_t b = 0; b < e.b_grid.n; ++b) {
    double classical = 0.0;
    for (std::size_t a = 0; a < na; ++a) classical += wa[a] * e.kernel(a, b) * e.rho_a[a];
    out.max_abs_omega = std::max(out.max_abs_omega, std::abs(e.rho_b[b] - classical));
  }
  out.degenerate = out.max_abs_omega <= tol;
  if (out.degenerate) return out;

  out.cos_theta.reserve(e.b_grid.n);
  Eigen::VectorXd ux(na), uy(na);
  for (std::size_t b = 0; b < e.b_grid.n; ++b) {
    if (!(e.rho_b[b] > 0.0)) {
      throw Error(ErrorCode::ZeroDenominator, "rho_B vanishes at b index " + std::to_string(b));
    }
    for (std::size_t a = 0; a < na; ++a) {
      double sx = 0.0;
      for (std::size_t x = 0; x < e.x_grid.n; ++x) sx += wx[x] * e.p_x_given_a(x, a) * e.p_b_given_x(b, x);
      double sy = 0.0;
      for (std::size_t y = 0; y < e.y_grid.n; ++y) sy += wy[y] * e.p_y_given_a(y, a) * e.p_b_given_y(b, y);
      ux(a) = sx;
      uy(a) = sy;
    }
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(na, na);
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < na; ++j) {
        if (i == j) continue;
        const double denom = 2.0 * std::sqrt(e.kernel(i, b) * e.kernel(j, b));
        if (!(denom > 0.0)) {
          throw Error(ErrorCode::ZeroDenominator, "kernel vanishes at b index " + std::to_string(b));
        }
        const double d = std::sqrt(e.rho_a[i] * e.rho_a[j]) / e.rho_b[b] *
                         (ux(i) * uy(j) + ux(j) * uy(i));
        c(i, j) = d / denom;
      }
    }
    out.cos_theta.push_back(std::move(c));
  }
  return out;
}

namespace {

struct SyntheticFunctions {
  SyntheticParams p;
  double kappa0 = 0.0;

  double length() const { return p.upper - p.lower; }
  double mode(double x) const { return std::cos(kPi * (x - p.lower) / length()); }
  double kernel(double a, double b) const {
    return (1.0 + p.epsilon * mode(a) * mode(b)) / length();
  }
  double ramp(double a) const {
    return p.alpha * (a - p.lower) / length() +
           (1.0 - p.alpha) * 0.5 * (1.0 + std::tanh(a / p.tau));
  }
  double kappa(double b) const {
    return kappa0 * (1.0 + p.wobble * std::sin(kPi * b / length()));
  }
  double eta(double a, double b) const { return -kappa(b) * ramp(a); }
  double gaussian(double a) const {
    const double z = (a - p.mean) / p.sigma;
    return std::exp(-0.5 * z * z);
  }
};

SyntheticModel assemble(const SyntheticFunctions& f, const Grid& grid) {
  SyntheticModel m;
  m.params = f.p;
  m.kappa0 = f.kappa0;
  m.grid = grid;
  const auto x = grid.points();
  std::vector<double> rho(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) rho[i] = f.gaussian(x[i]);
  const double z = integrate(grid, rho);
  m.amplitudes.resize(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) m.amplitudes[i] = std::sqrt(rho[i] / z);
  m.kernel.resize(grid.n, grid.n);
  m.eta.resize(grid.n, grid.n);
  for (std::size_t a = 0; a < grid.n; ++a) {
    for (std::size_t b = 0; b < grid.n; ++b) {
      m.kernel(a, b) = f.kernel(x[a], x[b]);
      m.eta(a, b) = f.eta(x[a], x[b]);
    }
  }
  m.synthesis = synthesize_model(grid, grid, m.amplitudes, m.kernel, m.eta);
  return m;
}

}  // namespace

SyntheticModel synthetic_gaussian(std::size_t n, SyntheticParams params) {
  const Grid grid = Grid::make(params.lower, params.upper, n);
  SyntheticFunctions f{params, 0.0};
  // The total mass of rho_B falls monotonically as the ramp dephases the
  // amplitudes; bisect for mass 1.
  auto mass = [&](double k) {
    f.kappa0 = k;
    const auto m = assemble(f, grid);
    return integrate(grid, m.synthesis.model.rho_b);
  };
  double lo = 0.0;
  double hi = 2.9;
  if (mass(lo) < 1.0 || mass(hi) > 1.0) {
    throw Error(ErrorCode::InvalidArgument,
                "synthetic parameters admit no normalizing ramp amplitude");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) > 1.0 ? lo : hi) = mid;
  }
  f.kappa0 = 0.5 * (lo + hi);
  return assemble(f, grid);
}

AmplitudeKernel continuum_amplitude_kernel(const SyntheticModel& model,
                                           std::size_t nodes_per_cell) {
  const SyntheticFunctions f{model.params, model.kappa0};
  const Grid& g = model.grid;
  const double h = g.spacing();
  std::vector<double> gx, gw;
  gauss_legendre(nodes_per_cell, gx, gw);

  AmplitudeKernel m = AmplitudeKernel::Zero(g.n, g.n);
  for (std::size_t b = 0; b < g.n; ++b) {
    const double xb = g.point(b);
    for (std::size_t cell = 0; cell + 1 < g.n; ++cell) {
      const double left = g.point(cell);
      for (std::size_t q = 0; q < nodes_per_cell; ++q) {
        const double t = 0.5 * (gx[q] + 1.0);  // position in the cell, [0,1]
        const double a = left + t * h;
        const Complex v = 0.5 * h * gw[q] * std::sqrt(f.kernel(a, xb)) *
                          std::polar(1.0, -f.eta(a, xb));
        m(b, cell) += (1.0 - t) * v;
        m(b, cell + 1) += t * v;
      }
    }
  }
  return m;
}

}  // namespace qlra
