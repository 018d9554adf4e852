#pragma once

// The scalar equation governing the general projection case:
//
//   psi(lambda) = -lambda ||w|| + <e, [(lambda + 1) z - ||w|| e]^->
//
// psi is convex and piecewise linear on [0, inf). When some z_i < ||w|| and
// sum_i z_i^- < ||w||, every subgradient -||w|| + <e, N(lambda) z> is
// strictly negative and psi has exactly one positive zero.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "esoc/core.hpp"

namespace esoc {

/// The data (z, ||w||) defining psi. Only the norm of w enters.
struct PsiProblem {
  Vector z;
  double wnorm = 0.0;

  /// Some z_i < wnorm and sum_i z_i^- < wnorm, with wnorm > 0 and all
  /// data finite.
  bool satisfies_case3() const;

  /// <e, |z|>
  double abs_sum() const;

  /// Picard's map is a contraction iff <e,|z|> < wnorm.
  bool picard_contracts() const { return abs_sum() < wnorm; }
};

enum class SolveMethod { automatic, newton, picard, bisection, enumeration };

std::string_view to_string(SolveMethod method);
/// Accepts auto|newton|picard|bisection|enumeration.
std::optional<SolveMethod> parse_method(std::string_view name);

struct SolverConfig {
  SolveMethod method = SolveMethod::automatic;
  double tol = 1e-12;  // on |psi|, scaled by (1 + wnorm)
  int max_iter = 200;
  double lambda0 = 1.0;

  /// Throws Error(invalid_argument) on tol <= 0, max_iter < 1 or lambda0 <= 0.
  void validate() const;
};

enum class SolveStatus { converged, max_iter_exceeded, contraction_violated, invalid_problem };

std::string_view to_string(SolveStatus status);

struct SolveStep {
  double lambda;
  double psi;
  double subgradient;
};

struct SolveTrace {
  SolveMethod method = SolveMethod::automatic;
  SolveStatus status = SolveStatus::invalid_problem;
  std::vector<SolveStep> iterates;  // iterates[0] is the starting point
  double solution = 0.0;
  int iterations = 0;
  /// Largest ratio of successive step lengths seen by Picard's iteration.
  std::optional<double> observed_rate;

  bool converged() const { return status == SolveStatus::converged; }
};

/// psi(lambda). Throws Error(negative_lambda) for lambda < 0.
double psi_eval(const PsiProblem& prob, double lambda);

/// The subgradient -wnorm + <e, N(lambda) z>, where N(lambda) is diagonal
/// with -1 on coordinates with (lambda + 1) z_i < wnorm and 0 elsewhere.
/// A coordinate exactly at its kink contributes 0.
double psi_subgradient(const PsiProblem& prob, double lambda);

/// Semi-smooth Newton:
///   [-wnorm + <e, N_k z>] lambda_{k+1} = -<e, N_k (z - wnorm e)>.
///
/// Stops once |psi| <= tol (1 + wnorm) or the iterate repeats. The iterate
/// count is the index k of the first lambda_k that is not improved upon, so
/// a confirming step that reproduces lambda_k is not counted. Finite
/// termination within 2^p steps holds on valid problems.
SolveTrace newton_solve(const PsiProblem& prob, const SolverConfig& cfg);

/// Fixed-point iteration lambda_{k+1} = phi(lambda_k) with
///   phi(lambda) = <e, [(lambda + 1) z - wnorm e]^-> / wnorm,
/// a contraction with constant c = <e,|z|>/wnorm. Stops once
/// |psi| <= tol (1 + wnorm) and the next step is at most (1 - c) tol (1 + lambda),
/// which bounds the error by tol (1 + lambda). Reports contraction_violated
/// when <e,|z|> >= wnorm.
SolveTrace picard_solve(const PsiProblem& prob, const SolverConfig& cfg);

/// Brackets the root by doubling from 1 until psi < 0, then bisects until
/// the bracket width is <= tol (1 + hi). Needs psi(0) > 0.
SolveTrace bisection_solve(const PsiProblem& prob, const SolverConfig& cfg);

/// Exhaustive search over the 2^p active sets A = {i : (lambda+1) z_i < wnorm}.
/// For each A the linear piece lambda wnorm = sum_{i in A} (wnorm - (lambda+1) z_i)
/// is solved and kept if lambda > 0 and lambda reproduces A.
///
/// Throws Error(invalid_argument) if p > max_p and
/// Error(no_consistent_pattern), naming the nearest miss, if no pattern fits.
double enumerate_solve(const PsiProblem& prob, std::size_t max_p = 20);

/// Runs the method selected in cfg. The automatic method is Newton with a
/// bisection fallback when Newton fails or meets a vanishing subgradient.
/// Enumeration failures are reported as invalid_problem.
SolveTrace solve(const PsiProblem& prob, const SolverConfig& cfg);

}  // namespace esoc
