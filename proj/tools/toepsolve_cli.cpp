// Copyright 2026 The toepsolve Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver: generate | solve | bench | verify | spectrum.
// Links only the C interface of libtoepsolve.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "toepsolve/toepsolve.h"

namespace {

constexpr int kCsvSchemaVersion = 1;
constexpr int kReportSchemaVersion = 1;

enum Exit : int {
  kExitOk = 0,
  kExitFailure = 1,  // verification thresholds missed, numerical breakdown
  kExitInvalid = 2,
  kExitNoConvergence = 3,
  kExitOracleCap = 4,
  kExitIo = 5,
};

int exit_code(tps_status s) {
  switch (s) {
    case TPS_OK:
      return kExitOk;
    case TPS_ERR_INVALID_ARGUMENT:
    case TPS_ERR_DIMENSION_MISMATCH:
    case TPS_ERR_SHAPE:
    case TPS_ERR_MISSING_OFFSET:
    case TPS_ERR_BLOCK_SHAPE_MISMATCH:
    case TPS_ERR_INVALID_SPEC:
    case TPS_ERR_INDEX_OUT_OF_RANGE:
      return kExitInvalid;
    case TPS_ERR_NO_CONVERGENCE:
      return kExitNoConvergence;
    case TPS_ERR_TOO_LARGE_FOR_ORACLE:
      return kExitOracleCap;
    case TPS_ERR_IO:
    case TPS_ERR_FORMAT_VERSION:
    case TPS_ERR_CHECKSUM:
      return kExitIo;
    default:
      return kExitFailure;
  }
}

/// Thrown to unwind with a status; main() maps it to an exit code.
struct StatusError {
  tps_status status;
  std::string message;
};

void check(tps_status s, const std::string& context) {
  if (s != TPS_OK) throw StatusError{s, context + ": " + tps_last_error()};
}

struct ProblemDeleter {
  void operator()(tps_problem* p) const { tps_problem_free(p); }
};
struct SolutionDeleter {
  void operator()(tps_solution* s) const { tps_solution_free(s); }
};
using Problem = std::unique_ptr<tps_problem, ProblemDeleter>;
using Solution = std::unique_ptr<tps_solution, SolutionDeleter>;

// ---------------------------------------------------------------------------
// Problem selection shared by the subcommands

struct ProblemArgs {
  std::string input;
  std::size_t ny = 3;
  std::size_t nx = 3;
  std::size_t ne = 4;
  long long nb = -1;  // < 0: default 8 (nx + ny)
  std::uint64_t seed = 1;
  std::optional<double> wavenumber;
  std::optional<double> pitch;
  std::optional<double> regularization;
  std::optional<double> shift;
};

void add_grid_options(CLI::App* cmd, ProblemArgs& a) {
  cmd->add_option("--ne", a.ne, "unknowns per element")->capture_default_str();
  cmd->add_option("--nb", a.nb, "border unknowns (default 8 (nx + ny))");
  cmd->add_option("--seed", a.seed, "generator seed")->capture_default_str();
  cmd->add_option("--k", a.wavenumber, "wavenumber (default pi)");
  cmd->add_option("--pitch", a.pitch, "element spacing (default 1)");
  cmd->add_option("--a", a.regularization, "kernel smoothing length (default pitch / 10)");
  cmd->add_option("--shift", a.shift, "self-block diagonal shift (default 1)");
}

void add_problem_options(CLI::App* cmd, ProblemArgs& a, bool allow_input) {
  if (allow_input) cmd->add_option("-i,--input", a.input, "TBZ problem file");
  cmd->add_option("--ny", a.ny, "array rows")->capture_default_str();
  cmd->add_option("--nx", a.nx, "array columns")->capture_default_str();
  add_grid_options(cmd, a);
}

tps_problem_spec make_spec(const ProblemArgs& a, std::size_t ny, std::size_t nx) {
  tps_problem_spec s = tps_problem_spec_default(ny, nx, a.ne, a.seed);
  if (a.nb >= 0) s.nb = static_cast<std::size_t>(a.nb);
  if (a.wavenumber) s.wavenumber = *a.wavenumber;
  if (a.pitch) {
    s.pitch = *a.pitch;
    if (!a.regularization) s.regularization = *a.pitch / 10.0;
  }
  if (a.regularization) s.regularization = *a.regularization;
  if (a.shift) s.diagonal_shift = *a.shift;
  return s;
}

Problem generate(const tps_problem_spec& spec) {
  tps_problem* p = nullptr;
  check(tps_problem_generate(&spec, &p), "generate");
  return Problem(p);
}

Problem obtain_problem(const ProblemArgs& a) {
  if (!a.input.empty()) {
    tps_problem* p = nullptr;
    check(tps_problem_load(a.input.c_str(), &p), "load " + a.input);
    return Problem(p);
  }
  return generate(make_spec(a, a.ny, a.nx));
}

tps_problem_spec spec_of(const tps_problem* p) {
  tps_problem_spec s{};
  check(tps_problem_get_spec(p, &s), "spec");
  return s;
}

std::uint64_t generator_bytes(const tps_problem_spec& s) {
  return (2 * s.ny - 1) * (2 * s.nx - 1) * s.ne * s.ne * 16;
}

// ---------------------------------------------------------------------------
// Methods

struct Method {
  std::string tag;
  tps_method method;
  tps_precond precond;
  tps_rhs_mode mode;
  bool iterative;
};

const std::vector<Method>& bench_methods() {
  static const std::vector<Method> all = {
      {"dense", TPS_METHOD_DENSE, TPS_PRECOND_NONE, TPS_RHS_VECTORIZED, false},
      {"gmres-dense", TPS_METHOD_GMRES_DENSE, TPS_PRECOND_PK, TPS_RHS_VECTORIZED, true},
      {"rybicki", TPS_METHOD_RYBICKI, TPS_PRECOND_NONE, TPS_RHS_VECTORIZED, false},
      {"mlfft-pk-vec", TPS_METHOD_MLFFT, TPS_PRECOND_PK, TPS_RHS_VECTORIZED, true},
      {"mlfft-pz-vec", TPS_METHOD_MLFFT, TPS_PRECOND_PZ, TPS_RHS_VECTORIZED, true},
      {"mlfft-pk-seq", TPS_METHOD_MLFFT, TPS_PRECOND_PK, TPS_RHS_SEQUENTIAL, true},
  };
  return all;
}

const Method& find_method(const std::string& tag) {
  for (const auto& m : bench_methods())
    if (m.tag == tag) return m;
  throw StatusError{TPS_ERR_INVALID_ARGUMENT, "unknown method '" + tag + "'"};
}

const std::map<std::string, tps_precond> kPrecondNames = {
    {"none", TPS_PRECOND_NONE}, {"pk", TPS_PRECOND_PK},
    {"pz", TPS_PRECOND_PZ},     {"full", TPS_PRECOND_FULL}};

std::string precond_name(tps_precond p) {
  for (const auto& [name, value] : kPrecondNames)
    if (value == p) return name;
  return "?";
}

std::string method_tag(const tps_solve_options& o) {
  switch (o.method) {
    case TPS_METHOD_DENSE:
      return "dense";
    case TPS_METHOD_RYBICKI:
      return "rybicki";
    case TPS_METHOD_GMRES_DENSE:
      return "gmres-dense";
    case TPS_METHOD_MLFFT:
      return "mlfft-" + precond_name(o.precond) +
             (o.rhs_mode == TPS_RHS_SEQUENTIAL ? "-seq" : "-vec");
  }
  return "?";
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct RunOutcome {
  tps_status status = TPS_OK;
  std::string message;
  Solution solution;
  tps_report report{};
  std::vector<double> history;
  std::vector<double> column_residuals;
};

RunOutcome run_solve(const tps_problem* p, const tps_solve_options& o) {
  RunOutcome r;
  tps_solution* s = nullptr;
  r.status = tps_solve(p, &o, &s);
  r.solution.reset(s);
  if (r.status != TPS_OK) r.message = tps_last_error();
  if (r.solution) {
    check(tps_solution_report(s, &r.report), "report");
    r.history.resize(tps_solution_history(s, nullptr, 0));
    tps_solution_history(s, r.history.data(), r.history.size());
    r.column_residuals.resize(tps_solution_column_residuals(s, nullptr, 0));
    tps_solution_column_residuals(s, r.column_residuals.data(), r.column_residuals.size());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Output helpers

nlohmann::ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json report_json(const tps_problem_spec& spec, const tps_solve_options& o,
                           const RunOutcome& r) {
  const tps_report& rep = r.report;
  const bool iterative = o.method == TPS_METHOD_GMRES_DENSE || o.method == TPS_METHOD_MLFFT;
  nlohmann::ordered_json j = {
      {"schema_version", kReportSchemaVersion},
      {"library_version", tps_version()},
      {"status", tps_status_name(r.status)},
      {"method", method_tag(o)},
      {"grid", {{"ny", spec.ny}, {"nx", spec.nx}, {"ne", spec.ne}, {"nb", spec.nb}}},
      {"seed", spec.seed},
      {"unknowns", spec.ny * spec.nx * spec.ne + spec.nb},
      {"rhs_columns", rep.cols},
      {"tolerance", iterative ? nlohmann::ordered_json(o.tol) : nlohmann::ordered_json(nullptr)},
      {"construction_seconds", rep.construction_seconds},
      {"solve_seconds", rep.solve_seconds},
      {"matvec_seconds", rep.matvec_seconds},
      {"orthogonalization_seconds", rep.orthogonalization_seconds},
      {"iterations", iterative ? nlohmann::ordered_json(rep.iterations) : nlohmann::ordered_json(nullptr)},
      {"converged", rep.converged != 0},
      {"residual", iterative ? finite_or_null(rep.residual) : nlohmann::ordered_json(nullptr)},
      {"true_residual", finite_or_null(rep.true_residual)},
      {"memory_bytes",
       {{"generator", rep.mem_generator},
        {"dense_equivalent", rep.mem_dense_equivalent},
        {"krylov", rep.mem_krylov},
        {"preconditioner", rep.mem_preconditioner},
        {"level1", rep.mem_level1}}},
      {"residual_history", r.history},
      {"column_residuals", r.column_residuals},
  };
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw StatusError{TPS_ERR_IO, "cannot open " + path + " for writing"};
  out << text;
  if (!out) throw StatusError{TPS_ERR_IO, "write failed for " + path};
}

std::string fmt_double(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_seconds(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0 && y[i] > 0 && std::isfinite(y[i])) pts.emplace_back(std::log(x[i]), std::log(y[i]));
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (auto [a, b] : pts) mx += a, my += b;
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0, sxx = 0;
  for (auto [a, b] : pts) sxy += (a - mx) * (b - my), sxx += (a - mx) * (a - mx);
  return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  ProblemArgs problem;
  std::string output;
};

int cmd_generate(const GenerateArgs& a) {
  Problem p = generate(make_spec(a.problem, a.problem.ny, a.problem.nx));
  check(tps_problem_save(p.get(), a.output.c_str()), "save " + a.output);
  const tps_problem_spec s = spec_of(p.get());
  std::uint64_t sum = 0;
  check(tps_problem_checksum(p.get(), &sum), "checksum");
  std::printf("wrote %s: ny=%zu nx=%zu ne=%zu nb=%zu unknowns=%zu generator_bytes=%" PRIu64
              " checksum=%016" PRIx64 "\n",
              a.output.c_str(), s.ny, s.nx, s.ne, s.nb, tps_problem_dimension(p.get()),
              generator_bytes(s), sum);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  ProblemArgs problem;
  std::string method = "mlfft";
  std::string precond = "pk";
  std::string rhs_mode = "vec";
  std::string rhs = "all";
  double tol = 1e-3;
  std::size_t max_iter = 1000;
  std::size_t restart = 0;
  std::size_t feed = 0;
  std::size_t oracle_cap = 20000;
  std::string output;
  std::string report;
};

tps_solve_options solve_options(const SolveArgs& a) {
  tps_solve_options o = tps_solve_options_default();
  static const std::map<std::string, tps_method> methods = {
      {"dense", TPS_METHOD_DENSE},
      {"gmres-dense", TPS_METHOD_GMRES_DENSE},
      {"rybicki", TPS_METHOD_RYBICKI},
      {"mlfft", TPS_METHOD_MLFFT}};
  o.method = methods.at(a.method);
  o.precond = kPrecondNames.at(a.precond);
  o.rhs_mode = a.rhs_mode == "seq" ? TPS_RHS_SEQUENTIAL : TPS_RHS_VECTORIZED;
  o.tol = a.tol;
  o.max_iter = a.max_iter;
  o.restart = a.restart;
  o.feed_index = a.feed;
  o.oracle_cap = a.oracle_cap;
  if (a.rhs == "all") {
    o.rhs_index = -1;
  } else {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(a.rhs, &used);
      if (used != a.rhs.size() || v < 0) throw std::invalid_argument("rhs");
      o.rhs_index = v;
    } catch (const std::exception&) {
      throw StatusError{TPS_ERR_INVALID_ARGUMENT, "--rhs expects 'all' or an element index"};
    }
  }
  return o;
}

int cmd_solve(const SolveArgs& a) {
  Problem p = obtain_problem(a.problem);
  const tps_solve_options o = solve_options(a);
  RunOutcome r = run_solve(p.get(), o);
  if (!r.solution) throw StatusError{r.status, "solve: " + r.message};
  const tps_problem_spec spec = spec_of(p.get());
  if (!a.output.empty()) check(tps_solution_save(r.solution.get(), a.output.c_str()), "save");
  if (!a.report.empty()) write_text(a.report, report_json(spec, o, r).dump(2) + "\n");
  std::printf("%s: status=%s iterations=%zu residual=%s true_residual=%s construction=%.3es "
              "solve=%.3es\n",
              method_tag(o).c_str(), tps_status_name(r.status), r.report.iterations,
              fmt_double(r.report.residual).c_str(), fmt_double(r.report.true_residual).c_str(),
              r.report.construction_seconds, r.report.solve_seconds);
  if (r.status != TPS_OK) std::fprintf(stderr, "error: %s\n", r.message.c_str());
  return exit_code(r.status);
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  ProblemArgs problem;
  std::string sizes = "2x2,3x3,4x4";
  std::string methods = "dense,gmres-dense,rybicki,mlfft-pk-vec,mlfft-pz-vec,mlfft-pk-seq";
  std::string rhs = "all";
  double tol = 1e-3;
  std::size_t max_iter = 1000;
  std::size_t repeats = 1;
  std::size_t matvec_repeats = 20;
  std::size_t oracle_cap = 20000;
  std::string csv;
  std::string fit_csv;
};

struct GridSize {
  std::size_t ny;
  std::size_t nx;
};

GridSize parse_size(const std::string& text) {
  const auto bad = [&] {
    return StatusError{TPS_ERR_INVALID_ARGUMENT,
                       "size '" + text + "' is neither NyxNx nor a square element count"};
  };
  try {
    std::size_t used = 0;
    const auto x = text.find_first_of("xX");
    if (x != std::string::npos) {
      const std::string a = text.substr(0, x), b = text.substr(x + 1);
      const unsigned long ny = std::stoul(a, &used);
      if (used != a.size()) throw bad();
      const unsigned long nx = std::stoul(b, &used);
      if (used != b.size() || ny == 0 || nx == 0) throw bad();
      return {ny, nx};
    }
    const unsigned long m = std::stoul(text, &used);
    if (used != text.size()) throw bad();
    const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m))));
    if (n == 0 || n * n != m) throw bad();
    return {n, n};
  } catch (const std::logic_error&) {
    throw bad();
  }
}

const char* const kBenchColumns =
    "schema_version,method,ny,nx,ne,nb,elements,unknowns,rhs_columns,tolerance,"
    "construction_s,solve_s,total_s,matvec_s,iterations,converged,residual,true_residual,"
    "mem_generator,mem_dense_equivalent,mem_krylov,mem_preconditioner,mem_level1,status";

int cmd_bench(const BenchArgs& a) {
  std::vector<GridSize> sizes;
  for (const auto& s : split_list(a.sizes)) sizes.push_back(parse_size(s));
  if (sizes.empty()) throw StatusError{TPS_ERR_INVALID_ARGUMENT, "--sizes is empty"};
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i].ny * sizes[i].nx <= sizes[i - 1].ny * sizes[i - 1].nx)
      throw StatusError{TPS_ERR_INVALID_ARGUMENT, "--sizes must be strictly ascending"};
  }
  std::vector<const Method*> methods;
  for (const auto& m : split_list(a.methods)) methods.push_back(&find_method(m));
  if (a.repeats == 0) throw StatusError{TPS_ERR_INVALID_ARGUMENT, "--repeats must be >= 1"};

  SolveArgs base;
  base.rhs = a.rhs;
  base.tol = a.tol;
  base.max_iter = a.max_iter;
  base.oracle_cap = a.oracle_cap;
  const tps_solve_options defaults = solve_options(base);

  std::ostringstream csv;
  csv << kBenchColumns << "\n";
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> fits;
  std::map<std::string, std::vector<double>> totals;
  std::vector<double> matvec_m, matvec_t;

  for (const GridSize& g : sizes) {
    Problem p = generate(make_spec(a.problem, g.ny, g.nx));
    const tps_problem_spec spec = spec_of(p.get());
    const double elements = static_cast<double>(g.ny * g.nx);
    double matvec = std::numeric_limits<double>::quiet_NaN();
    check(tps_time_matvec(p.get(), a.matvec_repeats, &matvec), "matvec timing");
    matvec_m.push_back(elements);
    matvec_t.push_back(matvec);

    for (const Method* m : methods) {
      tps_solve_options o = defaults;
      o.method = m->method;
      o.precond = m->precond;
      o.rhs_mode = m->mode;
      RunOutcome first = run_solve(p.get(), o);
      double best_solve = first.report.solve_seconds;
      double best_total = first.report.construction_seconds + first.report.solve_seconds;
      double best_con = first.report.construction_seconds;
      for (std::size_t rep = 1; rep < a.repeats && first.solution; ++rep) {
        RunOutcome again = run_solve(p.get(), o);
        if (!again.solution) break;
        best_solve = std::min(best_solve, again.report.solve_seconds);
        best_con = std::min(best_con, again.report.construction_seconds);
        best_total = std::min(best_total,
                              again.report.construction_seconds + again.report.solve_seconds);
      }
      const bool have = static_cast<bool>(first.solution);
      const tps_report& r = first.report;
      const std::uint64_t gen = generator_bytes(spec);
      const std::size_t unknowns = tps_problem_dimension(p.get());
      const std::uint64_t dense_eq = static_cast<std::uint64_t>(unknowns) * unknowns * 16;
      csv << kCsvSchemaVersion << ',' << m->tag << ',' << spec.ny << ',' << spec.nx << ','
          << spec.ne << ',' << spec.nb << ',' << spec.ny * spec.nx << ',' << unknowns << ','
          << (have ? std::to_string(r.cols) : "") << ','
          << (m->iterative ? fmt_double(a.tol) : "") << ','
          << (have ? fmt_seconds(best_con) : "") << ',' << (have ? fmt_seconds(best_solve) : "")
          << ',' << (have ? fmt_seconds(best_total) : "") << ',' << fmt_seconds(matvec) << ','
          << (have && m->iterative ? std::to_string(r.iterations) : "") << ','
          << (have ? (r.converged ? "1" : "0") : "") << ','
          << (have && m->iterative ? fmt_double(r.residual) : "") << ','
          << (have ? fmt_double(r.true_residual) : "") << ',' << gen << ',' << dense_eq << ','
          << (have ? std::to_string(r.mem_krylov) : "") << ','
          << (have ? std::to_string(r.mem_preconditioner) : "") << ','
          << (have ? std::to_string(r.mem_level1) : "") << ',' << tps_status_name(first.status)
          << "\n";
      if (first.status == TPS_OK) {
        fits[m->tag].first.push_back(elements);
        fits[m->tag].second.push_back(best_solve);
        totals[m->tag].push_back(best_total);
      } else {
        std::fprintf(stderr, "bench: %s on %zux%zu: %s: %s\n", m->tag.c_str(), g.ny, g.nx,
                     tps_status_name(first.status), first.message.c_str());
      }
    }
  }

  std::ostringstream fit;
  fit << "schema_version,method,points,solve_exponent,total_exponent\n";
  for (const Method* m : methods) {
    const auto& [x, y] = fits[m->tag];
    fit << kCsvSchemaVersion << ',' << m->tag << ',' << x.size() << ','
        << fmt_double(loglog_slope(x, y)) << ',' << fmt_double(loglog_slope(x, totals[m->tag]))
        << "\n";
  }
  fit << kCsvSchemaVersion << ",matvec," << matvec_m.size() << ','
      << fmt_double(loglog_slope(matvec_m, matvec_t)) << ",\n";

  if (a.csv.empty() || a.csv == "-") {
    std::cout << csv.str();
    std::cerr << fit.str();
  } else {
    write_text(a.csv, csv.str());
    std::cout << fit.str();
  }
  if (!a.fit_csv.empty()) write_text(a.fit_csv, fit.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  ProblemArgs problem;
  double tol = 1e-3;
  std::size_t max_iter = 1000;
  std::size_t oracle_cap = 20000;
  std::string json;
};

int cmd_verify(const VerifyArgs& a) {
  Problem p = obtain_problem(a.problem);
  SolveArgs base;
  base.tol = a.tol;
  base.max_iter = a.max_iter;
  base.oracle_cap = a.oracle_cap;
  tps_solve_options o = solve_options(base);
  o.method = TPS_METHOD_DENSE;
  RunOutcome reference = run_solve(p.get(), o);
  if (reference.status != TPS_OK)
    throw StatusError{reference.status, "dense reference: " + reference.message};

  bool all_pass = true;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::printf("%-14s %-12s %-12s %-10s %s\n", "method", "deviation", "threshold", "status",
              "result");
  for (const Method& m : bench_methods()) {
    if (m.method == TPS_METHOD_DENSE) continue;
    o.method = m.method;
    o.precond = m.precond;
    o.rhs_mode = m.mode;
    RunOutcome r = run_solve(p.get(), o);
    double deviation = std::numeric_limits<double>::quiet_NaN();
    if (r.solution)
      check(tps_solution_compare(r.solution.get(), reference.solution.get(), &deviation),
            "compare");
    const double threshold = m.iterative ? 10.0 * a.tol : 1e-10;
    const bool pass = r.status == TPS_OK && deviation <= threshold;
    all_pass = all_pass && pass;
    std::printf("%-14s %-12.3e %-12.3e %-10s %s\n", m.tag.c_str(), deviation, threshold,
                tps_status_name(r.status), pass ? "PASS" : "FAIL");
    rows.push_back({{"method", m.tag},
                    {"deviation", finite_or_null(deviation)},
                    {"threshold", threshold},
                    {"status", tps_status_name(r.status)},
                    {"pass", pass}});
  }
  if (!a.json.empty()) {
    const tps_problem_spec s = spec_of(p.get());
    nlohmann::ordered_json j = {
        {"schema_version", kReportSchemaVersion},
        {"grid", {{"ny", s.ny}, {"nx", s.nx}, {"ne", s.ne}, {"nb", s.nb}}},
        {"seed", s.seed},
        {"tolerance", a.tol},
        {"methods", rows},
        {"pass", all_pass}};
    write_text(a.json, j.dump(2) + "\n");
  }
  std::printf("verify: %s\n", all_pass ? "PASS" : "FAIL");
  return all_pass ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// spectrum

struct SpectrumArgs {
  ProblemArgs problem;
  std::string precond = "pk";
  std::size_t count = 200;
  std::size_t oversample = 10;
  std::size_t power_iters = 2;
  std::uint64_t sketch_seed = 0;
  std::string csv;
};

int cmd_spectrum(const SpectrumArgs& a) {
  Problem p = obtain_problem(a.problem);
  std::ostringstream csv;
  csv << "schema_version,precond,rank,value\n";
  for (const auto& name : split_list(a.precond)) {
    const auto it = kPrecondNames.find(name);
    if (it == kPrecondNames.end())
      throw StatusError{TPS_ERR_INVALID_ARGUMENT, "unknown preconditioner '" + name + "'"};
    tps_spectrum_options o = tps_spectrum_options_default();
    o.precond = it->second;
    o.count = a.count;
    o.oversample = a.oversample;
    o.power_iters = a.power_iters;
    o.seed = a.sketch_seed;
    std::vector<double> values(a.count);
    check(tps_spectrum(p.get(), &o, values.data(), values.size()), "spectrum " + name);
    for (std::size_t i = 0; i < values.size(); ++i)
      csv << kCsvSchemaVersion << ',' << name << ',' << i + 1 << ',' << fmt_double(values[i])
          << "\n";
  }
  if (a.csv.empty() || a.csv == "-") {
    std::cout << csv.str();
  } else {
    write_text(a.csv, csv.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solvers and benchmarks for bordered two-level block-Toeplitz systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tps_version()));
  int threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (default: TOEPSOLVE_THREADS or all cores)");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write a synthetic problem as a TBZ file");
  add_problem_options(g, gen.problem, false);
  g->add_option("-o,--output", gen.output, "output TBZ path")->required();

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "solve a problem and write currents and a report");
  add_problem_options(s, solve.problem, true);
  s->add_option("--method", solve.method, "dense | gmres-dense | rybicki | mlfft")
      ->check(CLI::IsMember({"dense", "gmres-dense", "rybicki", "mlfft"}))
      ->capture_default_str();
  s->add_option("--precond", solve.precond, "none | pk | pz | full (iterative methods)")
      ->check(CLI::IsMember({"none", "pk", "pz", "full"}))
      ->capture_default_str();
  s->add_option("--rhs-mode", solve.rhs_mode, "vec (global Krylov) | seq (per column)")
      ->check(CLI::IsMember({"vec", "seq"}))
      ->capture_default_str();
  s->add_option("--rhs", solve.rhs, "'all' or the index of the excited element")
      ->capture_default_str();
  s->add_option("--tol", solve.tol, "relative residual target")->capture_default_str();
  s->add_option("--max-iter", solve.max_iter, "iteration cap")->capture_default_str();
  s->add_option("--restart", solve.restart, "GMRES restart length, 0 = none")
      ->capture_default_str();
  s->add_option("--feed", solve.feed, "feed unknown within an element")->capture_default_str();
  s->add_option("--oracle-cap", solve.oracle_cap, "unknowns above which dense methods refuse")
      ->capture_default_str();
  s->add_option("-o,--output", solve.output, "currents output (TBC1)");
  s->add_option("--report", solve.report, "JSON report path");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "time methods over a sweep of array sizes");
  add_grid_options(b, bench.problem);
  b->add_option("--sizes", bench.sizes, "ascending list of NyxNx or square element counts")
      ->capture_default_str();
  b->add_option("--methods", bench.methods, "comma-separated method tags")
      ->capture_default_str();
  b->add_option("--rhs", bench.rhs, "'all' or the index of the excited element")
      ->capture_default_str();
  b->add_option("--tol", bench.tol, "relative residual target")->capture_default_str();
  b->add_option("--max-iter", bench.max_iter, "iteration cap")->capture_default_str();
  b->add_option("--repeats", bench.repeats, "runs per cell; the fastest is reported")
      ->capture_default_str();
  b->add_option("--matvec-repeats", bench.matvec_repeats, "runs of the matvec timing")
      ->capture_default_str();
  b->add_option("--oracle-cap", bench.oracle_cap, "unknowns above which dense methods refuse")
      ->capture_default_str();
  b->add_option("--csv", bench.csv, "CSV output path (default stdout)");
  b->add_option("--fit-csv", bench.fit_csv, "scaling-exponent CSV output path");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "compare every method against dense LU");
  add_problem_options(v, verify.problem, true);
  v->add_option("--tol", verify.tol, "iterative tolerance")->capture_default_str();
  v->add_option("--max-iter", verify.max_iter, "iteration cap")->capture_default_str();
  v->add_option("--oracle-cap", verify.oracle_cap, "unknowns above which dense LU refuses")
      ->capture_default_str();
  v->add_option("--json", verify.json, "JSON summary path");

  SpectrumArgs spectrum;
  auto* sp = app.add_subcommand("spectrum", "leading singular values of the preconditioned system");
  add_problem_options(sp, spectrum.problem, true);
  sp->add_option("--precond", spectrum.precond, "comma-separated list of none | pk | pz | full")
      ->capture_default_str();
  sp->add_option("--count", spectrum.count, "number of singular values")->capture_default_str();
  sp->add_option("--oversample", spectrum.oversample, "extra sketch columns")
      ->capture_default_str();
  sp->add_option("--power-iters", spectrum.power_iters, "power iterations")
      ->capture_default_str();
  sp->add_option("--sketch-seed", spectrum.sketch_seed, "seed of the random sketch")
      ->capture_default_str();
  sp->add_option("--csv", spectrum.csv, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  if (threads > 0) tps_set_threads(threads);

  try {
    if (g->parsed()) return cmd_generate(gen);
    if (s->parsed()) return cmd_solve(solve);
    if (b->parsed()) return cmd_bench(bench);
    if (v->parsed()) return cmd_verify(verify);
    if (sp->parsed()) return cmd_spectrum(spectrum);
  } catch (const StatusError& e) {
    const std::string name = tps_status_name(e.status);
    if (e.message.find(name) == std::string::npos) {
      std::fprintf(stderr, "error: %s: %s\n", name.c_str(), e.message.c_str());
    } else {
      std::fprintf(stderr, "error: %s\n", e.message.c_str());
    }
    return exit_code(e.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitInvalid;
}
