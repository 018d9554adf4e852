#include "esoc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

namespace esoc::harness {

using Json = nlohmann::ordered_json;

namespace {

Vector read_vector(const Json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_array()) {
    throw Error(ErrorCode::invalid_argument, std::string("missing numeric array \"") + key + "\"");
  }
  Vector out;
  for (const Json& x : obj.at(key)) {
    if (!x.is_number()) {
      throw Error(ErrorCode::invalid_argument, std::string("non-numeric entry in \"") + key + "\"");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

std::size_t read_dim(const Json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_number_integer() || obj.at(key).get<long long>() < 1) {
    throw Error(ErrorCode::invalid_argument,
                std::string("\"") + key + "\" must be a positive integer");
  }
  return obj.at(key).get<std::size_t>();
}

Json parse_object(std::string_view line) {
  Json obj = Json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw Error(ErrorCode::invalid_argument, "line is not a JSON object");
  }
  return obj;
}

AmbientPoint read_point(const Json& obj, std::size_t p, std::size_t q, const char* what) {
  Vector z = read_vector(obj, "z");
  Vector w = read_vector(obj, "w");
  if (z.size() != p || w.size() != q) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": expected |z|=" + std::to_string(p) + " |w|=" +
                    std::to_string(q) + ", got |z|=" + std::to_string(z.size()) +
                    " |w|=" + std::to_string(w.size()));
  }
  return AmbientPoint(std::move(z), std::move(w));
}

Json to_json(std::span<const double> v) { return Json(Vector(v.begin(), v.end())); }

Json point_json(const AmbientPoint& a) {
  Json obj = Json::object();
  obj["z"] = to_json(a.z());
  obj["w"] = to_json(a.w());
  return obj;
}

Json certificate_json(const MoreauCertificate& cert) {
  Json obj = Json::object();
  obj["decomposition"] = cert.decomposition_residual;
  obj["orthogonality"] = cert.orthogonality_residual;
  obj["primal_feasibility"] = cert.primal_feasibility;
  obj["dual_feasibility"] = cert.dual_feasibility;
  return obj;
}

std::string error_record(std::size_t line_no, const std::string& id, const std::string& what) {
  Json obj = Json::object();
  obj["line"] = line_no;
  if (!id.empty()) obj["id"] = id;
  obj["status"] = "error";
  obj["error"] = what;
  return obj.dump();
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::optional<double> finite_or_empty(double x) {
  return std::isfinite(x) ? std::optional<double>(x) : std::nullopt;
}

Json optional_json(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

PsiProblem psi_problem(const AmbientPoint& a) { return {Vector(a.z().begin(), a.z().end()), a.w_norm()}; }

}  // namespace

InstanceRecord parse_instance(std::string_view line, const std::string& fallback_id) {
  const Json obj = parse_object(line);
  const std::size_t p = read_dim(obj, "p");
  const std::size_t q = read_dim(obj, "q");
  std::string id = fallback_id;
  if (obj.contains("id")) {
    id = obj.at("id").is_string() ? obj.at("id").get<std::string>() : obj.at("id").dump();
  }
  std::optional<ProjectionCase> expected;
  if (obj.contains("expected_case")) {
    const Json& c = obj.at("expected_case");
    if (!c.is_number_integer() || c.get<int>() < 1 || c.get<int>() > 3) {
      throw Error(ErrorCode::invalid_argument, "\"expected_case\" must be 1, 2 or 3");
    }
    expected = static_cast<ProjectionCase>(c.get<int>());
  }
  return {std::move(id), read_point(obj, p, q, "instance"), expected};
}

std::string format_projection(const InstanceRecord& record, const ProjectionResult& result) {
  const AmbientPoint& a = record.point;
  Json obj = Json::object();
  obj["id"] = record.id;
  obj["p"] = a.z().size();
  obj["q"] = a.w().size();
  obj["z"] = to_json(a.z());
  obj["w"] = to_json(a.w());
  obj["case"] = static_cast<int>(result.case_tag);
  obj["lambda"] = result.lambda;
  obj["PL"] = point_json(result.proj_L);
  obj["PM_neg"] = point_json(result.proj_M_neg);
  obj["iters"] = result.trace ? result.trace->iterations : 0;
  obj["psi_residual"] =
      result.case_tag == ProjectionCase::general ? std::abs(psi_eval(psi_problem(a), result.lambda))
                                                 : 0.0;
  obj["cert"] = certificate_json(result.certificate);
  obj["status"] = "ok";
  return obj.dump();
}

int run_project(std::istream& in, std::ostream& out, const SolverConfig& cfg, double cert_tol) {
  cfg.validate();
  int exit_code = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    std::string id;
    try {
      const InstanceRecord record = parse_instance(line, std::to_string(line_no));
      id = record.id;
      const ProjectionResult result = project_L(record.point, cfg, cert_tol);
      out << format_projection(record, result) << '\n';
    } catch (const Error& e) {
      out << error_record(line_no, id, std::string(to_string(e.code())) + ": " + e.what()) << '\n';
      exit_code = 1;
    }
  }
  return exit_code;
}

std::optional<CaseMix> parse_case_mix(std::string_view name) {
  if (name == "uniform") return CaseMix::uniform;
  if (name == "case1") return CaseMix::case1;
  if (name == "case2") return CaseMix::case2;
  if (name == "case3") return CaseMix::case3;
  return std::nullopt;
}

InstanceSampler::InstanceSampler(std::uint64_t seed) : engine_(seed) {}

double InstanceSampler::uniform(double lo, double hi) {
  // 53 random bits; std::mt19937_64 output is fully specified, so streams
  // are reproducible across standard libraries.
  const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

std::optional<AmbientPoint> InstanceSampler::draw(const ConeDims& dims, ProjectionCase target) {
  Vector z(dims.p());
  Vector w(dims.q());
  for (double& x : w) x = uniform(-1.0, 1.0);
  const double w_len = stable_norm(w);
  if (w_len == 0.0) return std::nullopt;

  switch (target) {
    case ProjectionCase::dual_w_zero:
      for (double& x : z) x = w_len + uniform(0.0, 1.0) * (1.0 + w_len);
      break;
    case ProjectionCase::primal_w_zero: {
      for (double& x : z) x = uniform(-1.0, 1.0);
      const double neg = sum(neg_part(z));
      if (neg == 0.0) return std::nullopt;
      const double target_norm = uniform(0.0, 1.0) * neg;
      for (double& x : w) x *= target_norm / w_len;
      break;
    }
    case ProjectionCase::general: {
      for (double& x : z) x = uniform(-1.0, 1.0);
      const double floor =
          std::max(sum(neg_part(z)), *std::min_element(z.begin(), z.end()));
      const double gap = uniform(0.0, 1.0);
      // Squared gap puts more mass near the case boundary.
      const double target_norm = std::max(floor, 0.0) + 2.0 * gap * gap;
      for (double& x : w) x *= target_norm / w_len;
      break;
    }
  }

  const double scale = std::pow(10.0, uniform(-1.0, 1.0));
  for (double& x : z) x *= scale;
  for (double& x : w) x *= scale;
  AmbientPoint point(std::move(z), std::move(w));
  if (classify(point) != target) return std::nullopt;
  return point;
}

void run_gen(const GenOptions& opts, std::ostream& out) {
  const ConeDims dims(opts.p, opts.q);
  if (opts.count < 1) throw Error(ErrorCode::invalid_argument, "count must be >= 1");
  InstanceSampler sampler(opts.seed);

  for (std::size_t k = 0; k < opts.count; ++k) {
    ProjectionCase target = ProjectionCase::general;
    switch (opts.mix) {
      case CaseMix::uniform:
        target = static_cast<ProjectionCase>(1 + std::min(2, static_cast<int>(sampler.uniform(0.0, 3.0))));
        break;
      case CaseMix::case1: target = ProjectionCase::dual_w_zero; break;
      case CaseMix::case2: target = ProjectionCase::primal_w_zero; break;
      case CaseMix::case3: target = ProjectionCase::general; break;
    }

    std::optional<AmbientPoint> point;
    for (int attempt = 0; attempt < opts.attempt_budget && !point; ++attempt) {
      point = sampler.draw(dims, target);
    }
    if (!point) {
      throw Error(ErrorCode::invalid_argument,
                  "could not sample a " + std::string(to_string(target)) + " instance within " +
                      std::to_string(opts.attempt_budget) + " attempts");
    }

    Json obj = Json::object();
    obj["id"] = "g" + std::to_string(k);
    obj["p"] = opts.p;
    obj["q"] = opts.q;
    obj["z"] = to_json(point->z());
    obj["w"] = to_json(point->w());
    obj["expected_case"] = static_cast<int>(target);
    out << obj.dump() << '\n';
  }
}

std::vector<BenchRow> bench_instance(const InstanceRecord& record, const BenchOptions& opts) {
  using Clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  const AmbientPoint& a = record.point;
  const ProjectionCase tag = classify(a);

  for (SolveMethod method : opts.methods) {
    BenchRow row;
    row.id = record.id;
    row.method = method;

    SolverConfig cfg = opts.solver;
    cfg.method = method;
    if (tag != ProjectionCase::general) {
      const auto start = Clock::now();
      const ProjectionResult result = project_L(a, cfg, opts.cert_tol);
      row.wall_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
      row.status = "closed_form";
      row.lambda = 0.0;
      row.psi_residual = 0.0;
      row.certificate_max_residual = result.certificate.max_residual();
      rows.push_back(std::move(row));
      continue;
    }

    const PsiProblem prob = psi_problem(a);
    const auto start = Clock::now();
    const SolveTrace trace = solve(prob, cfg);
    row.wall_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
    row.status = std::string(to_string(trace.status));
    row.iterations = trace.iterations;
    if (trace.converged()) {
      row.lambda = trace.solution;
      row.psi_residual = std::abs(psi_eval(prob, trace.solution));
      const ProjectionPair pair = general_case_projection(a, trace.solution);
      row.certificate_max_residual =
          moreau_certificate(a, pair.proj_L, pair.proj_M_neg).max_residual();
    } else {
      row.lambda = finite_or_empty(trace.solution);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_bench(std::istream& in, std::ostream& out, const BenchOptions& opts) {
  opts.solver.validate();
  int exit_code = 0;
  std::map<SolveMethod, int> max_iterations;
  std::map<SolveMethod, int> failures;
  std::size_t instances = 0;
  std::size_t general = 0;
  std::size_t picard_ok = 0;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      const InstanceRecord record = parse_instance(line, std::to_string(line_no));
      ++instances;
      if (classify(record.point) == ProjectionCase::general) {
        ++general;
        if (psi_problem(record.point).picard_contracts()) ++picard_ok;
      }
      for (const BenchRow& row : bench_instance(record, opts)) {
        Json obj = Json::object();
        obj["id"] = row.id;
        obj["method"] = to_string(row.method);
        obj["status"] = row.status;
        obj["iterations"] = row.iterations;
        obj["lambda"] = optional_json(row.lambda);
        obj["psi_residual"] = optional_json(row.psi_residual);
        obj["certificate_max_residual"] = optional_json(row.certificate_max_residual);
        obj["wall_time_ns"] = row.wall_time_ns;
        out << obj.dump() << '\n';

        int& best = max_iterations[row.method];
        best = std::max(best, row.iterations);
        if (row.status != "converged" && row.status != "closed_form") ++failures[row.method];
      }
    } catch (const Error& e) {
      out << error_record(line_no, "", std::string(to_string(e.code())) + ": " + e.what()) << '\n';
      exit_code = 1;
    }
  }

  Json summary = Json::object();
  summary["instances"] = instances;
  summary["general_case_instances"] = general;
  summary["picard_applicable_fraction"] =
      general > 0 ? static_cast<double>(picard_ok) / static_cast<double>(general) : 0.0;
  Json per_method = Json::object();
  for (SolveMethod m : opts.methods) {
    Json entry = Json::object();
    entry["max_iterations"] = max_iterations[m];
    entry["failures"] = failures[m];
    per_method[std::string(to_string(m))] = entry;
  }
  summary["methods"] = per_method;
  Json wrapped = Json::object();
  wrapped["summary"] = summary;
  out << wrapped.dump() << '\n';
  return exit_code;
}

int run_verify(std::istream& in, std::ostream& out, double tol) {
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    ++checked;
    Json report = Json::object();
    report["line"] = line_no;
    try {
      const Json obj = parse_object(line);
      if (obj.contains("id")) report["id"] = obj.at("id");
      if (obj.value("status", std::string("ok")) != "ok") {
        throw Error(ErrorCode::invalid_argument, "record carries an error status");
      }
      if (!obj.contains("PL") || !obj.contains("PM_neg")) {
        throw Error(ErrorCode::invalid_argument, "record lacks \"PL\" or \"PM_neg\"");
      }
      const std::size_t p = read_dim(obj, "p");
      const std::size_t q = read_dim(obj, "q");
      const AmbientPoint original = read_point(obj, p, q, "input");
      const AmbientPoint primal = read_point(obj.at("PL"), p, q, "PL");
      const AmbientPoint dual = read_point(obj.at("PM_neg"), p, q, "PM_neg");
      const MoreauCertificate cert = moreau_certificate(original, primal, dual);
      if (cert.passes(tol)) continue;
      report["status"] = "fail";
      report["cert"] = certificate_json(cert);
      report["max_residual"] = cert.max_residual();
      report["threshold"] = tol * (1.0 + cert.original_norm);
    } catch (const Error& e) {
      report["status"] = "error";
      report["error"] = std::string(to_string(e.code())) + ": " + e.what();
    }
    ++failed;
    out << report.dump() << '\n';
  }

  Json summary = Json::object();
  summary["checked"] = checked;
  summary["passed"] = checked - failed;
  summary["failed"] = failed;
  Json wrapped = Json::object();
  wrapped["summary"] = summary;
  out << wrapped.dump() << '\n';
  return failed == 0 ? 0 : 1;
}

}  // namespace esoc::harness
