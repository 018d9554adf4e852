#include "esoc/projector.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace esoc {

std::string_view to_string(ProjectionCase c) {
  switch (c) {
    case ProjectionCase::dual_w_zero: return "case1";
    case ProjectionCase::primal_w_zero: return "case2";
    case ProjectionCase::general: return "case3";
  }
  return "unknown";
}

namespace {

Vector copy(std::span<const double> v) { return Vector(v.begin(), v.end()); }

// Restated general-case condition: some 0 <= z_i^+ < ||w|| and
// 0 <= sum_i z_i^- < ||w||.
[[maybe_unused]] bool general_case_restated(const AmbientPoint& a) {
  const double wn = a.w_norm();
  const Vector zp = pos_part(a.z());
  const bool some = std::any_of(zp.begin(), zp.end(), [&](double x) { return x < wn; });
  return some && sum(neg_part(a.z())) < wn;
}

ProjectionPair dual_w_zero_projection(const AmbientPoint& a) {
  return {AmbientPoint(pos_part(a.z()), copy(a.w())),
          AmbientPoint(neg_part(a.z()), Vector(a.w().size(), 0.0))};
}

ProjectionPair primal_w_zero_projection(const AmbientPoint& a) {
  Vector minus_w = copy(a.w());
  for (double& x : minus_w) x = -x;
  return {AmbientPoint(pos_part(a.z()), Vector(a.w().size(), 0.0)),
          AmbientPoint(neg_part(a.z()), std::move(minus_w))};
}

PsiProblem psi_problem(const AmbientPoint& a) {
  return {copy(a.z()), a.w_norm()};
}

ProjectionResult finish(const AmbientPoint& a, ProjectionCase tag, ProjectionPair pair,
                        double lambda, std::optional<SolveTrace> trace) {
  MoreauCertificate cert = moreau_certificate(a, pair.proj_L, pair.proj_M_neg);
  return ProjectionResult{tag,    std::move(pair.proj_L), std::move(pair.proj_M_neg),
                          lambda, std::move(trace),       cert};
}

std::optional<ProjectionResult> solve_general(const AmbientPoint& a, const SolverConfig& cfg) {
  SolveTrace trace = solve(psi_problem(a), cfg);
  if (!trace.converged()) return std::nullopt;
  const double lambda = trace.solution;
  return finish(a, ProjectionCase::general, general_case_projection(a, lambda), lambda,
                std::move(trace));
}

}  // namespace

ProjectionCase classify(const AmbientPoint& a) {
  const double wn = a.w_norm();
  const Vector zp = pos_part(a.z());
  if (*std::min_element(zp.begin(), zp.end()) >= wn) return ProjectionCase::dual_w_zero;
  if (sum(neg_part(a.z())) >= wn) return ProjectionCase::primal_w_zero;
  assert(general_case_restated(a));
  return ProjectionCase::general;
}

ProjectionPair general_case_projection(const AmbientPoint& a, double lambda) {
  const double shift = a.w_norm() / (lambda + 1.0);
  Vector x(a.z().size());
  Vector y(a.z().size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = a.z()[i] - shift;
    x[i] = (d > 0.0 ? d : 0.0) + shift;
    y[i] = d < 0.0 ? -d : 0.0;
  }
  Vector u(a.w().size());
  Vector v(a.w().size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    u[j] = a.w()[j] / (lambda + 1.0);
    v[j] = -lambda * a.w()[j] / (lambda + 1.0);
  }
  return {AmbientPoint(std::move(x), std::move(u)), AmbientPoint(std::move(y), std::move(v))};
}

ProjectionResult project_L(const AmbientPoint& a, const SolverConfig& cfg, double cert_tol) {
  cfg.validate();
  const ProjectionCase tag = classify(a);

  std::optional<ProjectionResult> result;
  switch (tag) {
    case ProjectionCase::dual_w_zero:
      result = finish(a, tag, dual_w_zero_projection(a), 0.0, std::nullopt);
      break;
    case ProjectionCase::primal_w_zero:
      result = finish(a, tag, primal_w_zero_projection(a), 0.0, std::nullopt);
      break;
    case ProjectionCase::general: {
      SolveTrace trace = solve(psi_problem(a), cfg);
      if (!trace.converged()) {
        throw Error(ErrorCode::solver_failure,
                    std::string(to_string(trace.method)) +
                        " solver did not converge: " + std::string(to_string(trace.status)));
      }
      const double lambda = trace.solution;
      result = finish(a, tag, general_case_projection(a, lambda), lambda, std::move(trace));
      break;
    }
  }
  if (result->certificate.passes(cert_tol)) return std::move(*result);

  // Near a case boundary rounding can pick the wrong branch. Try the other
  // formulas and keep the one with the smallest residual.
  std::vector<ProjectionResult> candidates;
  candidates.push_back(std::move(*result));
  SolverConfig fallback = cfg;
  fallback.method = SolveMethod::bisection;
  if (auto general = solve_general(a, fallback)) candidates.push_back(std::move(*general));
  candidates.push_back(finish(a, ProjectionCase::dual_w_zero, dual_w_zero_projection(a), 0.0,
                              std::nullopt));
  candidates.push_back(finish(a, ProjectionCase::primal_w_zero, primal_w_zero_projection(a),
                              0.0, std::nullopt));
  auto best = std::min_element(candidates.begin(), candidates.end(),
                               [](const ProjectionResult& l, const ProjectionResult& r) {
                                 return l.certificate.max_residual() <
                                        r.certificate.max_residual();
                               });
  if (!best->certificate.passes(cert_tol)) {
    throw Error(ErrorCode::internal_inconsistency,
                "no projection formula passes the Moreau certificate; max residual " +
                    std::to_string(best->certificate.max_residual()));
  }
  return std::move(*best);
}

DualProjectionResult project_M(const AmbientPoint& a, const SolverConfig& cfg, double cert_tol) {
  ProjectionResult of_negated = project_L(-a, cfg, cert_tol);
  AmbientPoint proj_M = a + of_negated.proj_L;
  return {std::move(proj_M), std::move(of_negated)};
}

ProjectionResult project_soc(const AmbientPoint& a, double cert_tol) {
  if (a.z().size() != 1) {
    throw Error(ErrorCode::invalid_argument,
                "second order cone projection needs p = 1, got p=" +
                    std::to_string(a.z().size()));
  }
  const double z = a.z()[0];
  const double wn = a.w_norm();
  const ProjectionCase tag = classify(a);

  Vector x(1);
  Vector u(a.w().size(), 0.0);
  if (wn == 0.0) {
    x[0] = std::max(z, 0.0);
  } else {
    const double lo = std::max(z - wn, 0.0);
    const double hi = std::max(z + wn, 0.0);
    x[0] = 0.5 * (lo + hi);
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = 0.5 * (hi - lo) * a.w()[j] / wn;
  }
  AmbientPoint proj_L(std::move(x), std::move(u));
  AmbientPoint proj_M_neg = proj_L - a;
  const double lambda = tag == ProjectionCase::general ? (wn - z) / (wn + z) : 0.0;

  MoreauCertificate cert = moreau_certificate(a, proj_L, proj_M_neg);
  if (!cert.passes(cert_tol)) {
    throw Error(ErrorCode::internal_inconsistency,
                "closed-form cone projection fails its certificate; max residual " +
                    std::to_string(cert.max_residual()));
  }
  return ProjectionResult{tag, std::move(proj_L), std::move(proj_M_neg), lambda, std::nullopt,
                          cert};
}

}  // namespace esoc
