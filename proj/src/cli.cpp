// SPDX-License-Identifier: Apache-2.0

#include "ncb/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "ncb/sdp_cache.hpp"
#include "ncb/suite.hpp"

namespace ncb {

namespace {

using io::Json;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kCacheEnv = "NCB_CACHE_DIR";

enum Exit { kOk = 0, kCriterion = 1, kInput = 2, kSolver = 3 };

struct Job {
  std::string command;
  std::string input;
  std::uint64_t seed = 0;
  int n_max = 0;
  int k_max = 2;
  double tol = -1.0;  // < 0: command default
  int restarts = 0;
  std::string cache_dir;
  bool no_cache = false;
  std::string out;
};

// A solver stopped without a certified answer; the partial results are kept.
struct SolverFailure : std::runtime_error {
  Json partial;
  SolverFailure(const std::string& what, Json p) : std::runtime_error(what), partial(std::move(p)) {}
};

struct Outcome {
  Json results;
  std::string summary;
  int code = kOk;
};

double tol_or(const Job& job, double fallback) { return job.tol >= 0.0 ? job.tol : fallback; }

GammaOptions gamma_options(const Job& job, const sdp::Settings& sdp) {
  GammaOptions o;
  o.seed = job.seed;
  if (job.restarts > 0) o.restarts = job.restarts;
  o.sdp = sdp;
  return o;
}

NcbOptions ncb_options(const Job& job, const sdp::Settings& sdp) {
  NcbOptions o;
  o.k_max = job.k_max;
  o.n_max = job.n_max;
  o.gamma = gamma_options(job, sdp);
  return o;
}

ConeOptions cone_options(const Job& job, const sdp::Settings& sdp) {
  ConeOptions o;
  if (job.n_max > 0) o.n_max = job.n_max;
  if (job.restarts > 0) o.restarts = job.restarts;
  o.seed = job.seed;
  o.sdp = sdp;
  return o;
}

const Json& need(const Json& j, const char* key) {
  if (!j.contains(key)) throw io::SchemaError(std::string("$.") + key, "missing");
  return j[key];
}

OperatorSpaceSpec space_of(const Json& j) { return io::parse_space(need(j, "space"), "$.space"); }

std::string verdict(bool ok) { return ok ? "pass" : "fail"; }

Outcome dispatch(const Job& job, const Json& in, const sdp::Settings& sdp) {
  Outcome o;
  const std::string& c = job.command;
  if (c == "norm") {
    const OperatorSpaceSpec v = space_of(in);
    const LevelElement x = io::parse_element(v, need(in, "element"), "$.element");
    const double n = level_norm(v, x);
    o.results = {{"level_norm", n}, {"k", x.k}};
    o.summary = "level norm " + std::to_string(n);
  } else if (c == "cbnorm") {
    const CbNormResult r = cb_norm(io::parse_map(need(in, "map"), "$.map"), sdp);
    o.results = {{"cb_norm", r.value}, {"verified", r.verified}, {"status", sdp::to_string(r.status)}};
    if (!r.verified) throw SolverFailure("cb-norm SDP did not converge", o.results);
    o.summary = "cb norm " + std::to_string(r.value);
  } else if (c == "gamma") {
    const OperatorSpaceSpec v = space_of(in);
    const LevelElement x = io::parse_element(v, need(in, "element"), "$.element");
    const GammaEstimate g = gamma(v, x, job.n_max, gamma_options(job, sdp));
    o.results = io::to_json(g);
    if (g.sdp_solves == 0 || g.witness.d == 0) throw SolverFailure("every seesaw restart failed", o.results);
    o.summary = "gamma " + std::to_string(g.value) + " (" + to_string(g.kind) + "), norm " +
                std::to_string(g.norm_bound);
  } else if (c == "ncb") {
    const NcbEstimate e = ncb_estimate(space_of(in), ncb_options(job, sdp));
    o.results = io::to_json(e);
    o.summary = "n_cb " + std::to_string(e.value) + " (" + to_string(e.kind) + ")";
  } else if (c == "nclassic") {
    NClassicOptions no;
    no.seed = job.seed;
    if (job.restarts > 0) no.restarts = job.restarts;
    const NClassicEstimate e = n_classic(io::parse_normed(need(in, "normed"), "$.normed"), no);
    o.results = {{"n", e.value}, {"witness_x", io::to_json(e.witness_x)}, {"evaluations", e.evaluations},
                 {"restarts", no.restarts}};
    o.summary = "n " + std::to_string(e.value);
  } else if (c == "cone-test") {
    const OperatorSpaceSpec v = space_of(in);
    const LevelElement x = io::parse_element(v, need(in, "element"), "$.element");
    const ConeVerdict r = has_unitary_realization(v) ? cone_membership_exact(v, x)
                                                     : cone_membership_sampled(v, x, cone_options(job, sdp));
    o.results = io::to_json(r);
    o.summary = std::string(r.member ? "member" : "not a member") + (r.exact ? " (exact)" : " (sampled)") +
                ", margin " + std::to_string(r.margin);
  } else if (c == "check-unital") {
    const OperatorSpaceSpec v = space_of(in);
    const int samples = in.contains("samples") ? in["samples"].get<int>() : 10;
    const double tol = tol_or(job, 1e-4);
    Rng rng = seeded_rng(job.seed, {0xc4u});
    double gap = 0.0;
    Json per = Json::array();
    for (int k = 1; k <= job.k_max; ++k)
      for (int s = 0; s < samples; ++s) {
        const LevelElement x = random_unit_element(v, k, rng);
        const GammaEstimate g = gamma(v, x, job.n_max, gamma_options(job, sdp));
        gap = std::max(gap, g.norm_bound - g.value);
        per.push_back({{"k", k}, {"gamma", g.value}, {"norm", g.norm_bound}, {"kind", to_string(g.kind)}});
      }
    const bool ok = gap <= tol;
    o.results = {{"max_gap", gap}, {"tol", tol}, {"samples", per}, {"passed", ok}};
    o.summary = "max norm − gamma " + std::to_string(gap) + ": " + verdict(ok);
    o.code = ok ? kOk : kCriterion;
  } else if (c == "check-ossys") {
    const OperatorSystemReport r = check_operator_system(space_of(in), ncb_options(job, sdp));
    Json basis = Json::array();
    for (const auto& b : r.cone_basis) basis.push_back(io::to_json(b));
    o.results = {{"ncb", io::to_json(r.ncb)}, {"span_ok", r.span_ok}, {"self_adjoint_dim", r.self_adjoint_dim},
                 {"cone_basis", basis},       {"approximate", r.approximate}, {"passed", r.passed}};
    o.summary = "operator system: " + verdict(r.passed) + " (span " + verdict(r.span_ok) + ")";
    o.code = r.passed ? kOk : kCriterion;
  } else if (c == "check-nonunital-ossys") {
    const OperatorSpaceSpec v = space_of(in);
    NonunitalOptions no;
    no.ncb = ncb_options(job, sdp);
    no.cone = cone_options(job, sdp);
    const NonunitalReport r = check_nonunital_ossys(v, io::parse_cones(v, need(in, "cones"), "$.cones"), no);
    o.results = {{"ncb_plus", io::to_json(r.ncb_plus)},
                 {"generators_in_k", r.generators_in_k},
                 {"generators_tested", r.generators_tested},
                 {"candidates_tested", r.candidates_tested},
                 {"one_sided", r.one_sided},
                 {"passed", r.passed}};
    if (r.counterexample) {
      o.results["counterexample"] = io::to_json(*r.counterexample);
      o.results["counterexample_distance"] = r.counterexample_distance;
    }
    o.summary = "non-unital operator system: " + verdict(r.passed) + ", n_cb^+ " + std::to_string(r.ncb_plus.value);
    o.code = r.passed ? kOk : kCriterion;
  } else if (c == "mproj-verify") {
    const OperatorSpaceSpec v = space_of(in);
    const CMat p = io::parse_projection(v, need(in, "projection"), "$.projection");
    const int samples = in.contains("samples") ? in["samples"].get<int>() : 200;
    const MProjectionReport r =
        verify_complete_m_projection(v, p, job.k_max > 0 ? job.k_max : 3, samples, job.seed, tol_or(job, 1e-8));
    o.results = {{"verified", r.verified}, {"projection", io::to_json(r.projection)}, {"statistical", true}};
    if (r.worst) o.results["worst"] = io::to_json(*r.worst);
    o.summary = "complete M-projection: " + verdict(r.verified) + ", residual " + std::to_string(r.worst_residual);
    o.code = r.verified ? kOk : kCriterion;
  } else if (c == "quotient") {
    const OperatorSpaceSpec v = space_of(in);
    const CMat p = io::parse_projection(v, need(in, "projection"), "$.projection");
    const MProjectionReport mp = verify_complete_m_projection(v, p, job.k_max > 0 ? job.k_max : 3, 200, job.seed);
    o.results = {{"projection", io::to_json(mp.projection)}, {"verified", mp.verified}};
    if (!mp.verified) {
      o.summary = "projection is not a complete M-projection";
      o.code = kCriterion;
      return o;
    }
    const QuotientSpace qs = quotient_by_msummand(v, mp.projection);
    o.results["quotient_space"] = io::to_json(qs.z);
    o.results["quotient_map"] = io::to_json(qs.q);
    bool ok = true;
    if (v.u) {
      QuotientUnitalityOptions qo;
      qo.ncb = ncb_options(job, sdp);
      qo.seed = job.seed;
      const QuotientUnitalityReport r = check_quotient_unitality(v, mp.projection, qo);
      o.results["unitality"] = {{"q_norm", r.q_norm},
                                {"u_norm", r.u_norm},
                                {"w_norm", r.w_norm},
                                {"ncb_v", io::to_json(r.ncb_v)},
                                {"ncb_quotient", io::to_json(r.ncb_quotient)},
                                {"psi_max_error", r.psi_max_error},
                                {"theorem_alarm", r.theorem_alarm},
                                {"passed", r.passed}};
      if (r.degeneracy)
        o.results["unitality"]["degeneracy_min_gamma"] = r.degeneracy->min_gamma;
      ok = r.passed;
      if (in.value("ossys", false)) {
        const QuotientOssysReport s =
            check_quotient_ossys(v, mp.projection, 50, job.seed, qo.ncb, cone_options(job, sdp));
        o.results["ossys"] = {{"source_passed", s.source.passed}, {"quotient_passed", s.quotient.passed},
                              {"min_image_margin", s.min_image_margin}, {"span_ok", s.span_ok},
                              {"passed", s.passed}};
        ok = ok && s.passed;
      }
    }
    o.summary = "quotient of dimension " + std::to_string(qs.z.dim()) + ": " + verdict(ok);
    o.code = ok ? kOk : kCriterion;
  } else if (c == "suite") {
    SuiteConfig sc;
    sc.seed = job.seed;
    sc.n_max = job.n_max;
    sc.restarts = job.restarts;
    sc.sdp = sdp;
    const SuiteReport r = run_suite(sc);
    o.results = r.body();
    for (const auto& cr : r.criteria)
      o.summary += std::string(cr.passed ? "PASS" : "FAIL") + " criterion " + std::to_string(cr.id) + " (" +
                   cr.title + "): " + cr.summary + "\n";
    o.summary += r.passed ? "all criteria pass" : "some criteria failed";
    o.code = r.passed ? kOk : kCriterion;
  }
  return o;
}

Json config_echo(const Job& job, const Json& input, bool cache_on) {
  return {{"command", job.command}, {"input", job.input},   {"input_document", input},
          {"seed", job.seed},       {"n_max", job.n_max},   {"k_max", job.k_max},
          {"tol", job.tol},         {"restarts", job.restarts}, {"cache", cache_on}};
}

void emit(const Job& job, const Json& report) {
  if (job.out.empty()) return;
  std::ofstream out(job.out);
  out << report.dump(2) << '\n';
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for matrix numerical radii and unital operator spaces"};
  Job job;
  const std::vector<std::string> commands{"norm",      "cbnorm",      "gamma",       "ncb",
                                          "nclassic",  "cone-test",   "check-unital", "check-ossys",
                                          "check-nonunital-ossys", "mproj-verify", "quotient", "suite"};
  app.add_option("command", job.command, "Command to run")->required()->check(CLI::IsMember(commands));
  app.add_option("input", job.input, "Job file (JSON, schema opspace/1)");
  app.add_option("--seed", job.seed, "Random seed");
  app.add_option("--nmax", job.n_max, "Largest witness size n (0: command default)");
  app.add_option("--kmax", job.k_max, "Largest matrix level k");
  app.add_option("--tol", job.tol, "Tolerance override");
  app.add_option("--restarts", job.restarts, "Restarts for randomized searches");
  app.add_option("--cache-dir", job.cache_dir, std::string("SDP cache directory (default: $") + kCacheEnv + ")");
  app.add_flag("--no-cache", job.no_cache, "Disable the SDP cache");
  app.add_option("--out", job.out, "Write the JSON report here");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  std::unique_ptr<sdp::SolutionCache> cache;
  if (!job.no_cache) {
    std::string dir = job.cache_dir;
    if (dir.empty())
      if (const char* env = std::getenv(kCacheEnv)) dir = env;
    if (!dir.empty()) cache = std::make_unique<sdp::SolutionCache>(dir);
  }
  sdp::Settings sdp;
  sdp.cache = cache.get();

  Json input = Json::object();
  Json report = {{"schema", io::kSchema}, {"command", job.command}, {"version", kVersion}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto finish = [&](int code, const std::string& summary) {
    report["config"] = config_echo(job, input, cache != nullptr);
    report["exit_code"] = code;
    Json runtime = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    if (cache) runtime["cache"] = {{"hits", cache->hits()}, {"misses", cache->misses()}, {"rejected", cache->rejected()}};
    report["runtime"] = runtime;
    emit(job, report);
    (code == kInput ? std::cerr : std::cout) << summary << '\n';
    return code;
  };

  try {
    if (job.command != "suite") {
      if (job.input.empty()) throw io::SchemaError("input", "a job file is required for " + job.command);
      input = io::read_file(job.input);
      io::check_schema(input);
    }
    const Outcome o = dispatch(job, input, sdp);
    report["results"] = o.results;
    return finish(o.code, o.summary);
  } catch (const io::SchemaError& e) {
    report["error"] = {{"kind", "input"}, {"path", e.path()}, {"message", e.what()}};
    return finish(kInput, std::string("input error at ") + e.what());
  } catch (const ContractViolation& e) {
    report["error"] = {{"kind", "input"}, {"message", e.what()}};
    return finish(kInput, std::string("input error: ") + e.what());
  } catch (const Json::exception& e) {
    report["error"] = {{"kind", "input"}, {"message", e.what()}};
    return finish(kInput, std::string("input error: ") + e.what());
  } catch (const SolverFailure& e) {
    report["results"] = e.partial;
    report["error"] = {{"kind", "solver"}, {"message", e.what()}};
    return finish(kSolver, std::string("solver failure: ") + e.what());
  } catch (const std::runtime_error& e) {
    report["error"] = {{"kind", "solver"}, {"message", e.what()}};
    return finish(kSolver, std::string("solver failure: ") + e.what());
  }
}

}  // namespace ncb
