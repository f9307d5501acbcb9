#pragma once

// Grid-discretized continuous observables. Integrals are trapezoidal on
// uniform grids; functional derivatives are central differences in the grid
// amplitudes s(a) = sqrt(rho_A(a)).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qlra/binary.hpp"
#include "qlra/contextual.hpp"

namespace qlra {

struct Grid {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t n = 2;

  /// Throws InvalidArgument unless n >= 2 and upper > lower.
  static Grid make(double lower, double upper, std::size_t n);

  double spacing() const { return (upper - lower) / static_cast<double>(n - 1); }
  double point(std::size_t i) const;
  std::vector<double> points() const;
  std::vector<double> weights() const;

  bool operator==(const Grid&) const = default;
};

double integrate(const Grid& grid, std::span<const double> values);

struct ContinuousModel {
  Grid a_grid;
  Grid b_grid;
  std::vector<double> rho_a;
  std::vector<double> rho_b;
  Eigen::MatrixXd kernel;              // p(a_i|b_j): rows a, columns b
  std::optional<Eigen::MatrixXd> eta;  // eta(a_i, b_j), same layout
};

ValidationReport validate_continuous(const ContinuousModel& model,
                                     double tol = tol::kDensity);

/// omega(b) = rho_B(b) - int p(a|b) rho_A(a) da.
std::vector<double> continuous_supplementarity(const ContinuousModel& model);

/// Linear map from grid amplitudes s(a_i) to psi(b_j) = sum_i M(j,i) s_i, so
/// that rho_B(b_j) = |psi(b_j)|^2. Rows b, columns a.
using AmplitudeKernel = Eigen::MatrixXcd;

/// M(j,i) = w_i sqrt(p(a_i|b_j)) exp(-i eta(a_i,b_j)), so <a|b> carries
/// exp(+i eta) and theta_b(a,a') = eta(a,b) - eta(a',b).
AmplitudeKernel grid_amplitude_kernel(const Grid& a_grid,
                                      const Eigen::MatrixXd& kernel,
                                      const Eigen::MatrixXd& eta);

struct Synthesis {
  ContinuousModel model;
  Eigen::VectorXcd psi_b;
  double normalization_residual = 0.0;  // |int rho_B db - 1|
  bool normalizable = true;             // residual <= 1e-6
};

/// rho_B(b) = |int sqrt(p(a|b) rho_A(a)) exp(-i eta(a,b)) da|^2 with the given
/// amplitudes; rho_B is stored as computed, never rescaled.
Synthesis synthesize_model(const Grid& a_grid, const Grid& b_grid,
                           std::span<const double> amplitudes,
                           const Eigen::MatrixXd& kernel,
                           const Eigen::MatrixXd& eta);

/// Maps a field of grid amplitudes to rho_B on the b-grid. Must be pure.
using DensityOracle =
    std::function<std::vector<double>(std::span<const double>)>;

DensityOracle make_kernel_oracle(AmplitudeKernel m);

struct FdOptions {
  double step = 1e-4;
  double clamp = tol::kClamp;
};

/// (1/(w_i w_j)) d^2 rho_B / ds_i ds_j for every b, from four oracle calls.
/// Perturbed fields are not renormalized.
std::vector<double> mixed_derivative(const DensityOracle& oracle,
                                     std::span<const double> base,
                                     const Grid& a_grid, std::size_t i,
                                     std::size_t j, double step);

/// theta_b(a_i, a_j) from the normalized mixed derivative. 0 for i == j
/// without calling the oracle; arccos branch (0 <= theta <= pi) otherwise.
double theta_from_oracle(const DensityOracle& oracle,
                         std::span<const double> base,
                         const ContinuousModel& model, std::size_t b,
                         std::size_t i, std::size_t j, FdOptions opts = {});

struct PhaseField {
  // theta[b](i, j) = theta_{b_b}(a_i, a_j)
  std::vector<Eigen::MatrixXd> theta;

  std::size_t size() const { return theta.size(); }
  double antisymmetry_residual() const;
  double diagonal_residual() const;
};

/// Recovers the whole field from the oracle. Entries with i < j take the
/// arccos branch, the lower triangle is filled by antisymmetry.
PhaseField recover_phase_field(const DensityOracle& oracle,
                               std::span<const double> base,
                               const ContinuousModel& model, FdOptions opts = {});

/// theta_b(a_i, a_j) = eta(a_i, b) - eta(a_j, b).
PhaseField phase_field_from_eta(const Eigen::MatrixXd& eta);

struct KernelOperator {
  Grid a_grid;
  Eigen::MatrixXcd beta;  // beta(a_i, a_j); weights are applied in expectation()

  double hermiticity_residual() const;
  /// Re sum_ij w_i w_j s_i s_j beta(i, j).
  double expectation(std::span<const double> amplitudes) const;
};

/// beta(a,a') = int b sqrt(p(a|b) p(a'|b)) exp(i theta_b(a,a')) db.
KernelOperator b_matrix_elements(const ContinuousModel& model,
                                 const PhaseField& field);

/// int b rho_B(b) db.
double mean_b(const ContinuousModel& model);

struct AppendixCheck {
  double derivative = 0.0;  // mixed FD derivative of omega, 1/(w w') scaled
  double predicted = 0.0;   // 2 sqrt(p p') cos theta
  double residual = 0.0;
};

/// Throws InvalidArgument for i == j.
AppendixCheck verify_appendix_identity(const DensityOracle& oracle,
                                       std::span<const double> base,
                                       const ContinuousModel& model,
                                       double theta, std::size_t b,
                                       std::size_t i, std::size_t j,
                                       FdOptions opts = {});

// Auxiliary observables X, Y with classical contextual transition densities.
struct EmbeddingData {
  Grid a_grid, b_grid, x_grid, y_grid;
  std::vector<double> rho_a, rho_b, rho_x, rho_y;
  Eigen::MatrixXd p_x_given_a;  // rows x, columns a
  Eigen::MatrixXd p_b_given_x;  // rows b, columns x
  Eigen::MatrixXd p_y_given_a;  // rows y, columns a
  Eigen::MatrixXd p_b_given_y;  // rows b, columns y
  Eigen::MatrixXd kernel;       // p(a|b): rows a, columns b
};

/// Worst violation of rho_X = int p(x|a) rho_A, rho_B = int p(b|x) rho_X and
/// the same pair for Y.
double embedding_ltp_residual(const EmbeddingData& data);

struct EmbeddingField {
  std::vector<Eigen::MatrixXd> cos_theta;  // per b, diagonal 1
  double ltp_residual = 0.0;
  double max_abs_omega = 0.0;
  bool degenerate = false;  // omega vanishes: no angle is defined
};

/// cos theta_b(a,a') from the closed-form derivatives composed through X and
/// Y. Throws InvalidEmbedding when the transition densities violate the total
/// probability laws above by more than `tol`, ZeroDenominator on a vanishing
/// rho_B(b) or p(a|b).
EmbeddingField theta_from_embedding(const EmbeddingData& data,
                                    double tol = tol::kDensity);

// Synthetic test family on [-5, 5]: narrow Gaussian rho_A, cosine-modulated
// symmetric kernel and a monotone phase ramp in a. The ramp amplitude kappa0
// is tuned on each grid so that rho_B integrates to 1.
struct SyntheticParams {
  double lower = -5.0;
  double upper = 5.0;
  double mean = 0.2;
  double sigma = 0.22;
  double epsilon = 0.5;  // kernel modulation
  double alpha = 0.5;    // linear share of the ramp
  double tau = 0.4;      // width of the tanh step
  double wobble = 0.1;   // b-dependence of kappa
};

struct SyntheticModel {
  SyntheticParams params;
  double kappa0 = 0.0;
  Grid grid;
  std::vector<double> amplitudes;
  Eigen::MatrixXd kernel;
  Eigen::MatrixXd eta;
  Synthesis synthesis;
};

SyntheticModel synthetic_gaussian(std::size_t n, SyntheticParams params = {});

/// Same continuum model, but the amplitude field is interpolated with hat
/// functions between grid points and the a-integral is done with Gauss-Legendre
/// sub-cell quadrature of the analytic kernel. Its FD-recovered angles differ
/// from the grid values by a discretization error that shrinks with the
/// spacing.
AmplitudeKernel continuum_amplitude_kernel(const SyntheticModel& model,
                                           std::size_t nodes_per_cell = 8);

}  // namespace qlra
