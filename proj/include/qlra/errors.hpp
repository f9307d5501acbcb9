#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qlra {

enum class ErrorCode {
  InvalidModel,
  DimensionMismatch,
  ZeroDenominator,
  NonTrigonometricContext,
  DegenerateContext,
  SymmetricConditioningRequired,
  ConstraintViolated,
  ZeroConditioning,
  InvalidPartition,
  OracleFailure,
  InvalidEmbedding,
  GridMismatch,
  BasisMismatch,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Typed failure raised by every module. The code is stable and is what the
/// CLI maps onto report fields and exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace tol {
// Probability normalization and discrete identity checks.
inline constexpr double kProbability = 1e-12;
// Hilbert-space invariants (orthonormality, hermiticity, unitarity).
inline constexpr double kRepresentation = 1e-10;
// Quadrature-level checks on continuous models.
inline constexpr double kDensity = 1e-8;
// arccos overshoot accepted (and clamped) for finite-difference estimates.
inline constexpr double kClamp = 1e-9;
}  // namespace tol

}  // namespace qlra
