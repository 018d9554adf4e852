#pragma once

// Exact metric projection onto the extended second order cone L and its
// dual M. A point (z, w) falls in one of three cases:
//
//   1. z^+ >= ||w|| e           P_L = (z^+, w),  P_M(-z,-w) = (z^-, 0)
//   2. <z^-, e> >= ||w||        P_L = (z^+, 0),  P_M(-z,-w) = (z^-, -w)
//   3. otherwise                P_L and P_M(-z,-w) follow from the unique
//                               positive zero lambda of psi (see psi.hpp)

#include <optional>
#include <string_view>

#include "esoc/core.hpp"
#include "esoc/psi.hpp"

namespace esoc {

enum class ProjectionCase {
  dual_w_zero = 1,    // w-part of P_M(-z,-w) vanishes
  primal_w_zero = 2,  // w-part of P_L(z,w) vanishes
  general = 3,
};

std::string_view to_string(ProjectionCase c);

inline constexpr double kDefaultCertificateTol = 1e-10;

struct ProjectionResult {
  ProjectionCase case_tag;
  AmbientPoint proj_L;      // P_L(z, w)
  AmbientPoint proj_M_neg;  // P_M(-z, -w)
  double lambda = 0.0;      // 0 outside the general case
  std::optional<SolveTrace> trace;
  MoreauCertificate certificate;
};

/// Case 1 if min_i z_i^+ >= ||w||, else case 2 if <z^-, e> >= ||w||, else
/// case 3. Exact comparisons.
ProjectionCase classify(const AmbientPoint& a);

struct ProjectionPair {
  AmbientPoint proj_L;
  AmbientPoint proj_M_neg;
};

/// Case-3 formulas for a given multiplier lambda > 0, with c = ||w||/(lambda+1):
///   P_L        = ([z - c e]^+ + c e,  w / (lambda+1))
///   P_M(-z,-w) = ([z - c e]^-,       -lambda w / (lambda+1))
ProjectionPair general_case_projection(const AmbientPoint& a, double lambda);

/// P_L(a) and P_M(-a) with a Moreau certificate that passes at cert_tol.
///
/// Throws Error(solver_failure) if the scalar solver does not converge, and
/// Error(internal_inconsistency) if no formula yields a passing certificate
/// after a retry with bisection and the neighbouring case formulas.
ProjectionResult project_L(const AmbientPoint& a, const SolverConfig& cfg = {},
                           double cert_tol = kDefaultCertificateTol);

struct DualProjectionResult {
  AmbientPoint proj_M;  // P_M(a)
  /// Diagnostics of project_L(-a), from which P_M(a) = a + P_L(-a).
  ProjectionResult of_negated;
};

DualProjectionResult project_M(const AmbientPoint& a, const SolverConfig& cfg = {},
                               double cert_tol = kDefaultCertificateTol);

/// Closed-form projection onto the second order cone (p = 1):
///   w != 0:  P_L = 1/2 (u + v, (v - u) w / ||w||),  u = [z - ||w||]^+, v = [z + ||w||]^+
///   w == 0:  P_L = (z^+, 0)
/// Throws Error(invalid_argument) if p != 1.
ProjectionResult project_soc(const AmbientPoint& a, double cert_tol = kDefaultCertificateTol);

}  // namespace esoc
