#pragma once

#include <stdexcept>
#include <string>

namespace manifolds {

// Default numerical tolerances. Constructors and solvers take these as
// defaulted parameters, so callers can relax or tighten per call.
inline constexpr double kOrthTol = 1e-10;      // orthonormality / unitarity residual
inline constexpr double kRankTol = 1e-10;      // relative rank cutoff
inline constexpr double kProjectorTol = 1e-9;  // subspace equality
inline constexpr double kCutLocusTol = 1e-6;   // principal-angle distance to pi/2

// Shooting / iterative solvers report the best bound they reached when they
// give up, so a failed distance query still carries usable information.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double best_bound, double residual)
      : std::runtime_error(what), best_bound_(best_bound), residual_(residual) {}
  double best_bound() const { return best_bound_; }
  double residual() const { return residual_; }

 private:
  double best_bound_;
  double residual_;
};

// Log-map ambiguity: some principal angle is too close to pi/2.
class CutLocusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace manifolds
