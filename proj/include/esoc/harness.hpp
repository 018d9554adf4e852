#pragma once

// Line-delimited JSON batch processing behind the `esoc` command line tool.
//
// Input record:   {"id": "...", "p": 2, "q": 1, "z": [..], "w": [..]}
// Output record:  input fields plus "case", "lambda", "PL", "PM_neg", "iters",
//                 "psi_residual", "cert" and "status".
//
// Output is emitted in input order; numbers are written with round-trip
// precision.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "esoc/core.hpp"
#include "esoc/projector.hpp"
#include "esoc/psi.hpp"

namespace esoc::harness {

struct InstanceRecord {
  std::string id;
  AmbientPoint point;
  std::optional<ProjectionCase> expected_case;
};

/// Parses one input line. Throws Error(invalid_argument) on malformed JSON or
/// missing keys and Error(dimension_mismatch) when z, w disagree with p, q.
/// `fallback_id` is used when the record carries no "id".
InstanceRecord parse_instance(std::string_view line, const std::string& fallback_id);

/// One output record for a projected instance.
std::string format_projection(const InstanceRecord& record, const ProjectionResult& result);

/// Projects every record. Returns 0 iff every record parsed, projected and
/// carries a passing certificate.
int run_project(std::istream& in, std::ostream& out, const SolverConfig& cfg,
                double cert_tol = kDefaultCertificateTol);

enum class CaseMix { uniform, case1, case2, case3 };

std::optional<CaseMix> parse_case_mix(std::string_view name);

struct GenOptions {
  std::size_t p = 2;
  std::size_t q = 2;
  std::size_t count = 10;
  CaseMix mix = CaseMix::uniform;
  std::uint64_t seed = 0;
  int attempt_budget = 1000;  // per record
};

/// Seeded instance stream. Every record is checked with classify() and
/// annotated with its case. Throws Error(invalid_argument) when a record
/// cannot be produced within the attempt budget.
void run_gen(const GenOptions& opts, std::ostream& out);

/// Draws one point of the requested case; exposed for tests.
class InstanceSampler {
 public:
  explicit InstanceSampler(std::uint64_t seed);

  std::optional<AmbientPoint> draw(const ConeDims& dims, ProjectionCase target);
  double uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

struct BenchRow {
  std::string id;
  SolveMethod method;
  std::string status;
  int iterations = 0;
  std::optional<double> lambda;
  std::optional<double> psi_residual;
  std::optional<double> certificate_max_residual;
  std::int64_t wall_time_ns = 0;
};

struct BenchOptions {
  std::vector<SolveMethod> methods = {SolveMethod::newton, SolveMethod::picard,
                                      SolveMethod::bisection, SolveMethod::enumeration};
  SolverConfig solver;
  double cert_tol = kDefaultCertificateTol;
};

/// One row per method. Solver precondition failures become a row status.
std::vector<BenchRow> bench_instance(const InstanceRecord& record, const BenchOptions& opts);

/// Emits one JSON row per (instance, method), then a summary line with the
/// maximum iteration count per method and the fraction of general-case
/// instances on which Picard's contraction condition holds. Returns nonzero
/// only for unreadable input.
int run_bench(std::istream& in, std::ostream& out, const BenchOptions& opts);

/// Recomputes the Moreau certificate of every projection record. Returns 0
/// iff every record passes at tol; failing records are listed.
int run_verify(std::istream& in, std::ostream& out, double tol = kDefaultCertificateTol);

}  // namespace esoc::harness
