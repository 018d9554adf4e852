// esoc: batch projection onto extended second order cones.
//
//   esoc gen --p 3 --q 2 --count 100 --mix case3 --seed 7 > inst.jsonl
//   esoc project --method newton < inst.jsonl > proj.jsonl
//   esoc verify < proj.jsonl
//   esoc bench --methods newton,picard,bisection < inst.jsonl

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "esoc/harness.hpp"

namespace {

struct SharedFlags {
  std::string method = "auto";
  double tol = 1e-12;
  double cert_tol = esoc::kDefaultCertificateTol;
  int max_iter = 200;
  double lambda0 = 1.0;
  std::uint64_t seed = 0;
  std::string input = "-";
  std::string output = "-";
};

void add_shared_flags(CLI::App* cmd, SharedFlags& flags) {
  cmd->add_option("--method", flags.method, "auto|newton|picard|bisection|enumeration")
      ->check(CLI::IsMember({"auto", "newton", "picard", "bisection", "enumeration"}));
  cmd->add_option("--tol", flags.tol, "residual tolerance of the scalar solver");
  cmd->add_option("--cert-tol", flags.cert_tol, "relative Moreau certificate tolerance");
  cmd->add_option("--max-iter", flags.max_iter, "iteration cap of the scalar solver");
  cmd->add_option("--lambda0", flags.lambda0, "initial multiplier for Newton and Picard");
  cmd->add_option("--seed", flags.seed, "random seed");
  cmd->add_option("--input", flags.input, "input path, '-' for stdin");
  cmd->add_option("--output", flags.output, "output path, '-' for stdout");
}

esoc::SolverConfig solver_config(const SharedFlags& flags) {
  esoc::SolverConfig cfg;
  cfg.method = *esoc::parse_method(flags.method);
  cfg.tol = flags.tol;
  cfg.max_iter = flags.max_iter;
  cfg.lambda0 = flags.lambda0;
  cfg.validate();
  return cfg;
}

class Streams {
 public:
  explicit Streams(const SharedFlags& flags) {
    if (flags.input != "-") {
      file_in_ = std::make_unique<std::ifstream>(flags.input);
      if (!*file_in_) throw std::runtime_error("cannot open input " + flags.input);
    }
    if (flags.output != "-") {
      file_out_ = std::make_unique<std::ofstream>(flags.output);
      if (!*file_out_) throw std::runtime_error("cannot open output " + flags.output);
    }
  }

  std::istream& in() { return file_in_ ? *file_in_ : std::cin; }
  std::ostream& out() { return file_out_ ? *file_out_ : std::cout; }

 private:
  std::unique_ptr<std::ifstream> file_in_;
  std::unique_ptr<std::ofstream> file_out_;
};

std::vector<esoc::SolveMethod> parse_methods(const std::string& list) {
  std::vector<esoc::SolveMethod> methods;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    auto m = esoc::parse_method(name);
    if (!m) throw std::runtime_error("unknown method '" + name + "'");
    methods.push_back(*m);
  }
  if (methods.empty()) throw std::runtime_error("--methods is empty");
  return methods;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection onto extended second order cones"};
  app.require_subcommand(1);

  SharedFlags flags;

  auto* project = app.add_subcommand("project", "project JSONL instances onto L and M");
  add_shared_flags(project, flags);

  esoc::harness::GenOptions gen_opts;
  std::string mix = "uniform";
  auto* gen = app.add_subcommand("gen", "generate random instances");
  add_shared_flags(gen, flags);
  gen->add_option("--p", gen_opts.p, "order block size")->check(CLI::PositiveNumber);
  gen->add_option("--q", gen_opts.q, "norm block size")->check(CLI::PositiveNumber);
  gen->add_option("--count", gen_opts.count, "number of records")->check(CLI::PositiveNumber);
  gen->add_option("--mix", mix, "uniform|case1|case2|case3")
      ->check(CLI::IsMember({"uniform", "case1", "case2", "case3"}));

  std::string methods = "newton,picard,bisection,enumeration";
  auto* bench = app.add_subcommand("bench", "compare scalar solvers per instance");
  add_shared_flags(bench, flags);
  bench->add_option("--methods", methods, "comma separated list of methods");

  double verify_tol = esoc::kDefaultCertificateTol;
  auto* verify = app.add_subcommand("verify", "re-check Moreau certificates of projections");
  verify->add_option("--tol", verify_tol, "relative certificate tolerance");
  verify->add_option("--input", flags.input, "input path, '-' for stdin");
  verify->add_option("--output", flags.output, "output path, '-' for stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    Streams io(flags);
    if (project->parsed()) {
      return esoc::harness::run_project(io.in(), io.out(), solver_config(flags), flags.cert_tol);
    }
    if (gen->parsed()) {
      gen_opts.mix = *esoc::harness::parse_case_mix(mix);
      gen_opts.seed = flags.seed;
      esoc::harness::run_gen(gen_opts, io.out());
      return 0;
    }
    if (bench->parsed()) {
      esoc::harness::BenchOptions opts;
      opts.methods = parse_methods(methods);
      opts.solver = solver_config(flags);
      opts.cert_tol = flags.cert_tol;
      return esoc::harness::run_bench(io.in(), io.out(), opts);
    }
    if (verify->parsed()) {
      return esoc::harness::run_verify(io.in(), io.out(), verify_tol);
    }
  } catch (const std::exception& e) {
    std::cerr << "esoc: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
