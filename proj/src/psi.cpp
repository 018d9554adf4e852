#include "esoc/psi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace esoc {

namespace {

// Below this (relative to 1 + wnorm) a Newton denominator is treated as a
// floating-point breakdown of the strict negativity of the subgradient.
constexpr double kVanishingSubgradient = 1e-14;

bool all_finite(const PsiProblem& prob) {
  return std::isfinite(prob.wnorm) &&
         std::all_of(prob.z.begin(), prob.z.end(), [](double x) { return std::isfinite(x); });
}

void require_nonnegative(double lambda) {
  if (!(lambda >= 0.0)) {
    throw Error(ErrorCode::negative_lambda,
                "psi is defined on [0, inf), got lambda=" + std::to_string(lambda));
  }
}

double residual_tol(const PsiProblem& prob, const SolverConfig& cfg) {
  return cfg.tol * (1.0 + prob.wnorm);
}

SolveTrace start_trace(SolveMethod method) {
  SolveTrace trace;
  trace.method = method;
  trace.solution = std::numeric_limits<double>::quiet_NaN();
  return trace;
}

// phi(lambda) = <e, [(lambda + 1) z - wnorm e]^-> / wnorm, evaluated without
// cancellation so that it stays nonnegative.
double picard_map(const PsiProblem& prob, double lambda) {
  double sum = 0.0;
  for (double zi : prob.z) sum += std::max(prob.wnorm - (lambda + 1.0) * zi, 0.0);
  return sum / prob.wnorm;
}

SolveStep make_step(const PsiProblem& prob, double lambda) {
  return {lambda, psi_eval(prob, lambda), psi_subgradient(prob, lambda)};
}

}  // namespace

bool PsiProblem::satisfies_case3() const {
  if (z.empty() || !all_finite(*this) || !(wnorm > 0.0)) return false;
  const bool some_below = std::any_of(z.begin(), z.end(), [&](double x) { return x < wnorm; });
  return some_below && sum(neg_part(z)) < wnorm;
}

double PsiProblem::abs_sum() const {
  double s = 0.0;
  for (double x : z) s += std::abs(x);
  return s;
}

std::string_view to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::automatic: return "auto";
    case SolveMethod::newton: return "newton";
    case SolveMethod::picard: return "picard";
    case SolveMethod::bisection: return "bisection";
    case SolveMethod::enumeration: return "enumeration";
  }
  return "unknown";
}

std::optional<SolveMethod> parse_method(std::string_view name) {
  for (auto m : {SolveMethod::automatic, SolveMethod::newton, SolveMethod::picard,
                 SolveMethod::bisection, SolveMethod::enumeration}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter_exceeded: return "max_iter_exceeded";
    case SolveStatus::contraction_violated: return "contraction_violated";
    case SolveStatus::invalid_problem: return "invalid_problem";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be positive");
  if (max_iter < 1) throw Error(ErrorCode::invalid_argument, "max_iter must be >= 1");
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
    throw Error(ErrorCode::invalid_argument, "lambda0 must be positive and finite");
  }
}

double psi_eval(const PsiProblem& prob, double lambda) {
  require_nonnegative(lambda);
  double value = -lambda * prob.wnorm;
  for (double zi : prob.z) value += std::max(prob.wnorm - (lambda + 1.0) * zi, 0.0);
  return value;
}

double psi_subgradient(const PsiProblem& prob, double lambda) {
  require_nonnegative(lambda);
  double s = -prob.wnorm;
  for (double zi : prob.z) {
    if ((lambda + 1.0) * zi - prob.wnorm < 0.0) s -= zi;
  }
  return s;
}

SolveTrace newton_solve(const PsiProblem& prob, const SolverConfig& cfg) {
  cfg.validate();
  SolveTrace trace = start_trace(SolveMethod::newton);
  if (!prob.satisfies_case3()) return trace;

  const double tol = residual_tol(prob, cfg);
  double lambda = cfg.lambda0;
  trace.iterates.push_back(make_step(prob, lambda));

  for (int k = 0;; ++k) {
    const SolveStep& current = trace.iterates.back();
    if (std::abs(current.psi) <= tol) break;
    if (std::abs(current.subgradient) < kVanishingSubgradient * (1.0 + prob.wnorm)) {
      trace.solution = lambda;
      return trace;  // invalid_problem
    }
    if (k == cfg.max_iter) {
      trace.status = SolveStatus::max_iter_exceeded;
      trace.solution = lambda;
      return trace;
    }

    // Sum over the active set A = {i : (lambda+1) z_i < wnorm}.
    double numerator = 0.0;
    for (double zi : prob.z) {
      if ((lambda + 1.0) * zi - prob.wnorm < 0.0) numerator += prob.wnorm - zi;
    }
    const double next = numerator / -current.subgradient;

    // Exact repetition is the finite-termination signal. After the first
    // step the sequence is nondecreasing, so a decrease is rounding noise.
    if (next == lambda || (k > 0 && next < lambda)) break;

    lambda = next;
    trace.iterates.push_back(make_step(prob, lambda));
    ++trace.iterations;
  }

  trace.status = SolveStatus::converged;
  trace.solution = lambda;
  return trace;
}

SolveTrace picard_solve(const PsiProblem& prob, const SolverConfig& cfg) {
  cfg.validate();
  SolveTrace trace = start_trace(SolveMethod::picard);
  if (!(prob.wnorm > 0.0) || !all_finite(prob) || prob.z.empty()) return trace;
  if (!prob.picard_contracts()) {
    trace.status = SolveStatus::contraction_violated;
    return trace;
  }

  const double tol = residual_tol(prob, cfg);
  const double contraction = prob.abs_sum() / prob.wnorm;
  double lambda = cfg.lambda0;
  trace.iterates.push_back(make_step(prob, lambda));
  double previous_step = std::numeric_limits<double>::quiet_NaN();

  for (int k = 0; k < cfg.max_iter; ++k) {
    const double next = picard_map(prob, lambda);
    const double step = std::abs(next - lambda);
    if (previous_step > 0.0 && step > 1e-9 * (1.0 + lambda)) {
      const double ratio = step / previous_step;
      trace.observed_rate = std::max(trace.observed_rate.value_or(0.0), ratio);
    }
    previous_step = step;
    lambda = next;
    trace.iterates.push_back(make_step(prob, lambda));
    ++trace.iterations;

    // |lambda - lambda_*| <= |phi(lambda) - lambda| / (1 - c)
    const double psi = std::abs(trace.iterates.back().psi);
    const double next_step = std::abs(picard_map(prob, lambda) - lambda);
    const bool stalled = next_step >= step;  // rounding floor reached
    if (psi <= tol && (stalled || next_step <= (1.0 - contraction) * cfg.tol * (1.0 + lambda))) {
      trace.status = SolveStatus::converged;
      trace.solution = lambda;
      return trace;
    }
  }

  trace.status = SolveStatus::max_iter_exceeded;
  trace.solution = lambda;
  return trace;
}

SolveTrace bisection_solve(const PsiProblem& prob, const SolverConfig& cfg) {
  cfg.validate();
  SolveTrace trace = start_trace(SolveMethod::bisection);
  if (!(prob.wnorm > 0.0) || !all_finite(prob) || prob.z.empty()) return trace;

  double lo = 0.0;
  trace.iterates.push_back(make_step(prob, lo));
  if (!(trace.iterates.back().psi > 0.0)) return trace;  // invalid_problem

  double hi = 1.0;
  for (int doublings = 0;; ++doublings) {
    trace.iterates.push_back(make_step(prob, hi));
    ++trace.iterations;
    const double value = trace.iterates.back().psi;
    if (value < 0.0) break;
    if (value == 0.0) {
      lo = hi;
      break;
    }
    if (doublings + 1 >= cfg.max_iter) {
      trace.status = SolveStatus::max_iter_exceeded;
      trace.solution = hi;
      return trace;
    }
    lo = hi;
    hi *= 2.0;
  }

  while (hi - lo > cfg.tol * (1.0 + hi)) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    trace.iterates.push_back(make_step(prob, mid));
    ++trace.iterations;
    const double value = trace.iterates.back().psi;
    if (value > 0.0) {
      lo = mid;
    } else if (value < 0.0) {
      hi = mid;
    } else {
      lo = hi = mid;
    }
  }

  trace.status = SolveStatus::converged;
  trace.solution = lo + 0.5 * (hi - lo);
  return trace;
}

double enumerate_solve(const PsiProblem& prob, std::size_t max_p) {
  const std::size_t p = prob.z.size();
  if (p == 0 || p > max_p || p >= 63) {
    throw Error(ErrorCode::invalid_argument,
                "enumeration needs 1 <= p <= " + std::to_string(max_p) +
                    ", got p=" + std::to_string(p));
  }
  if (!(prob.wnorm > 0.0) || !all_finite(prob)) {
    throw Error(ErrorCode::invalid_argument, "enumeration needs finite data and wnorm > 0");
  }

  double zmax = 0.0;
  for (double zi : prob.z) zmax = std::max(zmax, std::abs(zi));

  struct Candidate {
    std::uint64_t pattern;
    double lambda;
    double violation;
  };
  std::optional<Candidate> best_accepted;
  std::optional<Candidate> nearest_miss;
  double lo_accepted = std::numeric_limits<double>::infinity();
  double hi_accepted = -std::numeric_limits<double>::infinity();

  const std::uint64_t patterns = std::uint64_t{1} << p;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double numerator = 0.0;
    double denominator = prob.wnorm;
    for (std::size_t i = 0; i < p; ++i) {
      if (mask >> i & 1U) {
        numerator += prob.wnorm - prob.z[i];
        denominator += prob.z[i];
      }
    }
    if (!(denominator > 0.0)) continue;
    const double lambda = numerator / denominator;

    const double slack = 1e-12 * (1.0 + prob.wnorm + (1.0 + std::abs(lambda)) * zmax);
    double violation = lambda > 0.0 ? 0.0 : slack - lambda;
    for (std::size_t i = 0; i < p; ++i) {
      const double r = (lambda + 1.0) * prob.z[i] - prob.wnorm;
      const bool active = mask >> i & 1U;
      violation = std::max(violation, active ? r : -r);
    }

    const Candidate candidate{mask, lambda, violation};
    if (lambda > 0.0 && violation <= slack) {
      lo_accepted = std::min(lo_accepted, lambda);
      hi_accepted = std::max(hi_accepted, lambda);
      if (!best_accepted || violation < best_accepted->violation) best_accepted = candidate;
    } else if (!nearest_miss || violation < nearest_miss->violation) {
      nearest_miss = candidate;
    }
  }

  auto describe = [p](std::uint64_t mask) {
    std::string bits(p, '0');
    for (std::size_t i = 0; i < p; ++i) {
      if (mask >> i & 1U) bits[i] = '1';
    }
    return bits;
  };

  if (!best_accepted) {
    std::ostringstream msg;
    msg << "no sign pattern is consistent with a positive root";
    if (nearest_miss) {
      msg << "; nearest miss A=" << describe(nearest_miss->pattern)
          << " lambda=" << nearest_miss->lambda << " violation=" << nearest_miss->violation;
    }
    throw Error(ErrorCode::no_consistent_pattern, msg.str());
  }
  if (hi_accepted - lo_accepted > 1e-9 * (1.0 + hi_accepted)) {
    std::ostringstream msg;
    msg << "consistent sign patterns disagree: lambda in [" << lo_accepted << ", "
        << hi_accepted << "]";
    throw Error(ErrorCode::no_consistent_pattern, msg.str());
  }
  return best_accepted->lambda;
}

SolveTrace solve(const PsiProblem& prob, const SolverConfig& cfg) {
  switch (cfg.method) {
    case SolveMethod::newton: return newton_solve(prob, cfg);
    case SolveMethod::picard: return picard_solve(prob, cfg);
    case SolveMethod::bisection: return bisection_solve(prob, cfg);
    case SolveMethod::enumeration: {
      cfg.validate();
      SolveTrace trace = start_trace(SolveMethod::enumeration);
      if (!prob.satisfies_case3()) return trace;
      try {
        trace.solution = enumerate_solve(prob);
      } catch (const Error&) {
        return trace;
      }
      trace.iterates.push_back(make_step(prob, trace.solution));
      trace.iterations = 1 << prob.z.size();  // patterns examined
      trace.status = SolveStatus::converged;
      return trace;
    }
    case SolveMethod::automatic: {
      SolveTrace trace = newton_solve(prob, cfg);
      if (trace.converged() || !prob.satisfies_case3()) return trace;
      return bisection_solve(prob, cfg);
    }
  }
  return start_trace(cfg.method);
}

}  // namespace esoc
