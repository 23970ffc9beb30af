// Copyright 2026 The ncgopt Authors. All Rights Reserved.
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

// Command-line front end: run, sweep, certify, list-problems.
//
// Exit codes: 0 success (certificate passed or unavailable), 1 other
// errors, 2 certification failed, 3 iteration bound exceeded, divergence, or
// invalid constants, 64 usage error.

#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ncgopt/accel.hpp"
#include "ncgopt/core/registry.hpp"
#include "ncgopt/harness/report.hpp"

namespace ncgopt {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kCertificationFailed = 2;
inline constexpr int kBoundOrDivergence = 3;
inline constexpr int kUsage = 64;
}  // namespace exit_code

inline constexpr std::array<std::string_view, 9> kAlgorithms{
    "gd", "ncd", "ncg-a1", "ncg-a2", "ncg-b1", "ncg-b2", "ih-ncg-a", "sncg", "ncg-fixed"};

inline bool is_algorithm(std::string_view a) {
  return std::find(kAlgorithms.begin(), kAlgorithms.end(), a) != kAlgorithms.end();
}

/// Everything needed to reproduce one run, apart from the seed.
struct RunOptions {
  ProblemConfig problem;
  std::string algo = "ncg-a1";
  double eps1 = 1e-3;
  std::optional<double> eps2;
  std::optional<double> alpha;
  double delta = 0.1;
  std::optional<std::size_t> max_iters;
  std::optional<std::uint64_t> s1;
  std::optional<std::uint64_t> s2;
  std::string agd_smoothness = "safe";
  std::string surrogate = "exact";
  bool record_time = false;
};

struct RunOutcome {
  std::uint64_t seed = 0;
  std::optional<SolveReport> report;
  SmoothnessParams params;
  Eigen::Index dim = 0;
  std::string error_kind;  // empty on success
  std::string error_message;
  int exit_code = exit_code::kOk;
};

inline constexpr double kDefaultEps2 = 1e-2;

inline SolveConfig solve_config(const RunOptions& o, std::uint64_t seed) {
  SolveConfig cfg;
  cfg.eps1 = o.eps1;
  cfg.alpha = o.alpha;
  cfg.eps2 = o.eps2;
  if (!cfg.alpha && !cfg.eps2) cfg.eps2 = kDefaultEps2;
  cfg.delta = o.delta;
  cfg.max_iters = o.max_iters;
  cfg.seed = seed;
  cfg.record_time = o.record_time;
  return cfg;
}

/// Dispatches one algorithm on a fresh oracle. Throws on solver errors.
inline SolveReport solve(const RunOptions& o, Oracle& oracle, const Point& x0, std::uint64_t seed) {
  const SolveConfig cfg = solve_config(o, seed);
  const std::string& a = o.algo;
  if (a == "gd") return gd(oracle, x0, cfg.eps1, cfg);
  if (a == "ncd") return ncd(oracle, x0, cfg.eps2_value(), cfg.delta, cfg);
  if (a == "ncg-a1") return ncg_a1(oracle, x0, cfg);
  if (a == "ncg-a2") return ncg_a2(oracle, x0, cfg);
  if (a == "ncg-fixed") return ncg_fixed(oracle, x0, cfg);
  if (a == "ncg-b1" || a == "ncg-b2") {
    NcgBOptions bo;
    if (o.agd_smoothness == "paper") bo.agd_smoothness = AgdSmoothness::Paper;
    else if (o.agd_smoothness != "safe") throw ConfigError("agd-smoothness must be safe or paper");
    return a == "ncg-b1" ? ncg_b1(oracle, x0, cfg, bo) : ncg_b2(oracle, x0, cfg, bo);
  }
  if (a == "ih-ncg-a") {
    cfg.validate();
    const SmoothnessParams& p = oracle.params();
    const double eps2 = cfg.eps2_value();
    const double eps3 = eps2 / 12.0;
    const CounterRng root = CounterRng(seed).split(streams::kSurrogate);
    if (o.surrogate == "exact") return ih_ncg_a(oracle, exact_surrogate(), x0, cfg, 0.0);
    if (o.surrogate == "perturbed")
      return ih_ncg_a(oracle, perturbed_surrogate(oracle.dim(), eps3, root), x0, cfg, eps3);
    if (o.surrogate == "subsampled") {
      const double dp = ncg_delta_prime(p, cfg.delta, cfg.eps1, eps2, 24.0, 2.0);
      const std::uint64_t s2 = o.s2.value_or(hessian_sample_size(p.l1, eps3, dp, oracle.dim()));
      return ih_ncg_a(oracle, subsampled_surrogate(s2, root, eps3), x0, cfg, eps3);
    }
    throw ConfigError("surrogate must be exact, perturbed or subsampled");
  }
  if (a == "sncg") {
    std::uint64_t s1 = 0, s2 = 0;
    if (!o.s1 || !o.s2) {
      const SampleSizes th = sample_sizes(cfg, oracle.params(), oracle.dim());
      s1 = th.s1;
      s2 = th.s2;
    }
    return sncg(oracle, x0, cfg, o.s1.value_or(s1), o.s2.value_or(s2));
  }
  throw ConfigError("unknown algorithm '" + a + "'");
}

/// Runs one seed, mapping library errors to exit codes.
inline RunOutcome execute_run(const RunOptions& o, std::uint64_t seed) {
  RunOutcome out;
  out.seed = seed;
  auto fail = [&](const char* kind, const std::exception& e, int code) {
    out.error_kind = kind;
    out.error_message = e.what();
    out.exit_code = code;
  };
  try {
    if (!is_algorithm(o.algo)) throw ConfigError("unknown algorithm '" + o.algo + "'");
    if (!is_registered_problem(o.problem.name))
      throw ConfigError("unknown problem '" + o.problem.name + "'");
    const ProblemInstance inst = make_instance(o.problem, seed);
    out.params = inst.params;
    out.dim = inst.problem->dim();
    Oracle oracle(inst.problem, inst.params);
    out.report = solve(o, oracle, inst.x0, seed);
    if (out.report->certificate && !out.report->certificate->passed())
      out.exit_code = exit_code::kCertificationFailed;
  } catch (const ConfigError& e) {
    fail("ConfigError", e, exit_code::kUsage);
  } catch (const BoundExceededError& e) {
    fail("BoundExceededError", e, exit_code::kBoundOrDivergence);
  } catch (const DivergenceError& e) {
    fail("DivergenceError", e, exit_code::kBoundOrDivergence);
  } catch (const ConstantsError& e) {
    fail("ConstantsError", e, exit_code::kBoundOrDivergence);
  } catch (const std::exception& e) {
    fail("Error", e, exit_code::kError);
  }
  return out;
}

inline Json options_json(const RunOptions& o) {
  Json p{{"name", o.problem.name},
         {"dim", to_json(o.problem.dim)},
         {"amplitudes", o.problem.amplitudes},
         {"rank", o.problem.rank},
         {"domain_cap", to_json(o.problem.domain_cap)},
         {"n_samples", o.problem.n_samples},
         {"label_noise", o.problem.label_noise},
         {"data_seed", o.problem.data_seed},
         {"init_scale", to_json(o.problem.init_scale)},
         {"x0", o.problem.x0}};
  return Json{{"problem", p},
              {"algo", o.algo},
              {"eps1", o.eps1},
              {"eps2", to_json(o.eps2)},
              {"alpha", to_json(o.alpha)},
              {"delta", o.delta},
              {"max_iters", to_json(o.max_iters)},
              {"s1", to_json(o.s1)},
              {"s2", to_json(o.s2)},
              {"agd_smoothness", o.agd_smoothness},
              {"surrogate", o.surrogate}};
}

inline Json outcome_json(const RunOptions& o, const RunOutcome& r) {
  Json j{{"options", options_json(o)},
         {"seed", r.seed},
         {"exit_code", r.exit_code},
         {"error", r.error_kind.empty() ? Json(nullptr)
                                        : Json{{"kind", r.error_kind}, {"message", r.error_message}}},
         {"dim", r.dim},
         {"params", to_json(r.params)}};
  j["report"] = r.report ? to_json(*r.report) : Json(nullptr);
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  f << text;
}

/// Writes <prefix>.trace.csv (when a report exists) and <prefix>.report.json.
inline void write_outputs(const std::string& prefix, const RunOptions& o, const RunOutcome& r) {
  if (r.report) write_text(prefix + ".trace.csv", trace_csv(r.report->trace));
  write_text(prefix + ".report.json", outcome_json(o, r).dump(2) + "\n");
}

/// "1..30", "3", or "1,4,9" (ranges allowed inside lists).
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  try {
    while (std::getline(ss, part, ',')) {
      const auto dots = part.find("..");
      if (dots == std::string::npos) {
        seeds.push_back(std::stoull(part));
      } else {
        const std::uint64_t lo = std::stoull(part.substr(0, dots));
        const std::uint64_t hi = std::stoull(part.substr(dots + 2));
        if (hi < lo) throw ConfigError("empty seed range '" + part + "'");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    }
  } catch (const std::logic_error&) {
    throw ConfigError("bad seed list '" + text + "'");
  }
  if (seeds.empty()) throw ConfigError("no seeds given");
  return seeds;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ','))
    if (!part.empty()) out.push_back(part);
  return out;
}

/// Total HVPs (full and component) at the end of a run, as the trace reports it.
inline std::size_t final_hvp_cum(const SolveReport& r) {
  return r.trace.rows.empty() ? 0 : r.trace.rows.back().hvp_cum;
}

/// Per-algorithm means over completed runs; recomputable from the trace files.
inline Json aggregate_sweep(const std::vector<std::string>& algos,
                            const std::vector<std::vector<RunOutcome>>& outcomes) {
  Json per_algo = Json::object();
  std::vector<double> mean_hvp(algos.size(), 0.0);
  for (std::size_t a = 0; a < algos.size(); ++a) {
    std::size_t completed = 0, cert_total = 0, cert_passed = 0;
    double hvp = 0.0, grad = 0.0, iters = 0.0;
    std::map<std::string, std::size_t> errors;
    for (const RunOutcome& r : outcomes[a]) {
      if (!r.report) {
        ++errors[r.error_kind];
        continue;
      }
      ++completed;
      hvp += static_cast<double>(final_hvp_cum(*r.report));
      grad += static_cast<double>(r.report->trace.rows.back().grad_cum);
      iters += static_cast<double>(r.report->iters);
      if (r.report->certificate) {
        ++cert_total;
        if (r.report->certificate->passed()) ++cert_passed;
      }
    }
    const double n = completed ? static_cast<double>(completed) : 1.0;
    mean_hvp[a] = hvp / n;
    Json err = Json::object();
    for (const auto& [k, v] : errors) err[k] = v;
    per_algo[algos[a]] = Json{{"runs", outcomes[a].size()},
                              {"completed", completed},
                              {"errors", err},
                              {"mean_hvp_evals", hvp / n},
                              {"mean_grad_evals", grad / n},
                              {"mean_iters", iters / n},
                              {"certified_total", cert_total},
                              {"certified_passed", cert_passed}};
  }
  Json ratios = Json::object();
  for (std::size_t a = 1; a < algos.size(); ++a) {
    ratios[algos[0] + "/" + algos[a]] = mean_hvp[a] > 0.0 ? Json(mean_hvp[0] / mean_hvp[a]) : Json(nullptr);
  }
  Json runs = Json::array();
  for (std::size_t a = 0; a < algos.size(); ++a) {
    for (const RunOutcome& r : outcomes[a]) {
      Json row{{"algo", algos[a]}, {"seed", r.seed}, {"exit_code", r.exit_code}};
      if (r.report) {
        row["iters"] = r.report->iters;
        row["hvp_cum"] = final_hvp_cum(*r.report);
        row["grad_cum"] = r.report->trace.rows.back().grad_cum;
        row["f_final"] = r.report->f_final;
        row["certificate_passed"] =
            r.report->certificate ? Json(r.report->certificate->passed()) : Json(nullptr);
      } else {
        row["error"] = r.error_kind;
      }
      runs.push_back(row);
    }
  }
  return Json{{"algorithms", per_algo}, {"hvp_ratio", ratios}, {"runs", runs}};
}

/// Runs every (algorithm, seed) pair on `threads` workers. Results are
/// indexed by position, so output does not depend on scheduling.
inline std::vector<std::vector<RunOutcome>> run_sweep(const RunOptions& base,
                                                      const std::vector<std::string>& algos,
                                                      const std::vector<std::uint64_t>& seeds,
                                                      unsigned threads) {
  std::vector<std::vector<RunOutcome>> out(algos.size(), std::vector<RunOutcome>(seeds.size()));
  const std::size_t total = algos.size() * seeds.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < total; t = next++) {
      const std::size_t a = t / seeds.size();
      const std::size_t s = t % seeds.size();
      RunOptions o = base;
      o.algo = algos[a];
      out[a][s] = execute_run(o, seeds[s]);
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

inline Point read_point_from_report(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  const Json j = Json::parse(f);
  const Json& rep = j.contains("report") ? j.at("report") : j;
  if (rep.is_null() || !rep.contains("x_final")) throw ConfigError(path + " has no x_final");
  const auto xs = rep.at("x_final").get<std::vector<double>>();
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

namespace detail {

inline void add_problem_flags(CLI::App* app, ProblemConfig& p) {
  app->add_option("--problem", p.name, "Registered problem key")->capture_default_str();
  app->add_option("--dim", p.dim, "Problem dimension (trig d, matfac rows, sigmoid features)");
  app->add_option("--amplitudes", p.amplitudes, "trig amplitudes c_i")->delimiter(',');
  app->add_option("--rank", p.rank, "matfac rank r")->capture_default_str();
  app->add_option("--domain-cap", p.domain_cap, "matfac cap T on ||U||_2^2 (default 2 sigma_1(M))");
  app->add_option("--n-samples", p.n_samples, "finitesum-sigmoid components n")->capture_default_str();
  app->add_option("--label-noise", p.label_noise, "finitesum-sigmoid label flip rate")
      ->capture_default_str();
  app->add_option("--data-seed", p.data_seed, "Seed for problem data")->capture_default_str();
  app->add_option("--init-scale", p.init_scale, "x0 uniform in [-s, s]^d");
  app->add_option("--x0", p.x0, "Explicit starting point")->delimiter(',');
}

inline void add_solver_flags(CLI::App* app, RunOptions& o) {
  app->add_option("--eps1", o.eps1, "First-order target")->capture_default_str();
  auto* e2 = app->add_option("--eps2", o.eps2, "Second-order target (default 1e-2)");
  auto* al = app->add_option("--alpha", o.alpha, "Set eps2 = eps1^alpha");
  e2->excludes(al);
  app->add_option("--delta", o.delta, "Total failure probability")->capture_default_str();
  app->add_option("--max-iters", o.max_iters, "Iteration cap (default 2x theoretical bound)");
  app->add_option("--s1", o.s1, "SNCG gradient sample size (default: theoretical)");
  app->add_option("--s2", o.s2, "Hessian sample size for sncg / subsampled surrogate");
  app->add_option("--agd-smoothness", o.agd_smoothness, "Inner AGD smoothness: safe | paper")
      ->check(CLI::IsMember({"safe", "paper"}))
      ->capture_default_str();
  app->add_option("--surrogate", o.surrogate, "ih-ncg-a surrogate: exact | perturbed | subsampled")
      ->check(CLI::IsMember({"exact", "perturbed", "subsampled"}))
      ->capture_default_str();
  app->add_flag("--record-time", o.record_time, "Record wall-clock ns in traces");
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"ncgopt: noisy negative curvature optimizers"};
  app.set_config("--config", "", "TOML config file");
  app.require_subcommand(1);

  RunOptions run_opts;
  std::uint64_t seed = 0;
  std::string out_prefix = "ncgopt_run";
  CLI::App* run = app.add_subcommand("run", "Run one solver on one problem");
  detail::add_problem_flags(run, run_opts.problem);
  run->add_option("--algo", run_opts.algo, "Solver")->capture_default_str();
  detail::add_solver_flags(run, run_opts);
  run->add_option("--seed", seed, "Run seed")->capture_default_str();
  run->add_option("--out", out_prefix, "Output prefix")->capture_default_str();

  RunOptions sweep_opts;
  std::string algo_list = "ncg-a1,ncd";
  std::string seed_list = "1..30";
  std::string sweep_prefix = "ncgopt_sweep";
  unsigned threads = 1;
  CLI::App* sweep = app.add_subcommand("sweep", "Run algorithms over many seeds");
  detail::add_problem_flags(sweep, sweep_opts.problem);
  sweep->add_option("--algo", algo_list, "Comma-separated algorithms")->capture_default_str();
  detail::add_solver_flags(sweep, sweep_opts);
  sweep->add_option("--seeds", seed_list, "Seeds: a..b or a,b,c")->capture_default_str();
  sweep->add_option("--threads", threads, "Worker threads")->capture_default_str();
  sweep->add_option("--out", sweep_prefix, "Output prefix")->capture_default_str();

  ProblemConfig cert_problem;
  std::vector<double> cert_x;
  std::string cert_report;
  double cert_eps1 = 1e-3, cert_eps2 = 1e-2;
  CLI::App* cert = app.add_subcommand("certify", "Dense stationarity check at a point");
  detail::add_problem_flags(cert, cert_problem);
  auto* xo = cert->add_option("--x", cert_x, "Point to certify")->delimiter(',');
  auto* ro = cert->add_option("--report", cert_report, "Report JSON whose x_final is certified");
  xo->excludes(ro);
  cert->add_option("--eps1", cert_eps1, "First-order target")->capture_default_str();
  cert->add_option("--eps2", cert_eps2, "Second-order target")->capture_default_str();

  CLI::App* list = app.add_subcommand("list-problems", "List registered problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  try {
    if (*list) {
      for (const auto& p : kRegisteredProblems) out << p.key << '\t' << p.summary << '\n';
      return exit_code::kOk;
    }
    if (*run) {
      if (!is_algorithm(run_opts.algo)) {
        err << "unknown algorithm '" << run_opts.algo << "'\n";
        return exit_code::kUsage;
      }
      if (!is_registered_problem(run_opts.problem.name)) {
        err << "unknown problem '" << run_opts.problem.name << "'\n";
        return exit_code::kUsage;
      }
      const RunOutcome r = execute_run(run_opts, seed);
      write_outputs(out_prefix, run_opts, r);
      if (r.report) {
        out << r.report->algorithm << ": iters=" << r.report->iters
            << " f=" << format_double(r.report->f_final)
            << " hvp=" << final_hvp_cum(*r.report);
        if (r.report->certificate)
          out << " certificate=" << (r.report->certificate->passed() ? "passed" : "failed");
        out << '\n';
      } else {
        err << r.error_kind << ": " << r.error_message << '\n';
      }
      return r.exit_code;
    }
    if (*sweep) {
      const std::vector<std::string> algos = split_list(algo_list);
      if (algos.empty()) throw ConfigError("no algorithms given");
      for (const auto& a : algos) {
        if (!is_algorithm(a)) {
          err << "unknown algorithm '" << a << "'\n";
          return exit_code::kUsage;
        }
      }
      if (!is_registered_problem(sweep_opts.problem.name)) {
        err << "unknown problem '" << sweep_opts.problem.name << "'\n";
        return exit_code::kUsage;
      }
      const std::vector<std::uint64_t> seeds = parse_seeds(seed_list);
      const auto outcomes = run_sweep(sweep_opts, algos, seeds, threads);
      for (std::size_t a = 0; a < algos.size(); ++a) {
        for (const RunOutcome& r : outcomes[a]) {
          RunOptions o = sweep_opts;
          o.algo = algos[a];
          write_outputs(sweep_prefix + "." + algos[a] + ".seed" + std::to_string(r.seed), o, r);
        }
      }
      Json agg = aggregate_sweep(algos, outcomes);
      agg["options"] = options_json(sweep_opts);
      agg["seeds"] = seeds;
      write_text(sweep_prefix + ".aggregate.json", agg.dump(2) + "\n");
      for (const auto& a : algos) {
        out << a << ": mean_hvp_evals=" << format_double(agg["algorithms"][a]["mean_hvp_evals"].get<double>())
            << " completed=" << agg["algorithms"][a]["completed"].get<std::size_t>() << '/'
            << seeds.size() << '\n';
      }
      return exit_code::kOk;
    }
    if (*cert) {
      if (!is_registered_problem(cert_problem.name)) {
        err << "unknown problem '" << cert_problem.name << "'\n";
        return exit_code::kUsage;
      }
      auto problem = build_problem(cert_problem);
      Point x;
      if (!cert_report.empty()) {
        x = read_point_from_report(cert_report);
      } else if (!cert_x.empty()) {
        x = Eigen::Map<const Vector>(cert_x.data(), static_cast<Eigen::Index>(cert_x.size()));
      } else {
        err << "certify needs --x or --report\n";
        return exit_code::kUsage;
      }
      if (x.size() != problem->dim()) throw ConfigError("point has wrong dimension");
      Oracle oracle(problem, problem->base_params());
      const StationarityCertificate c = certify(oracle, x, cert_eps1, cert_eps2);
      out << to_json(c).dump(2) << '\n';
      return c.passed() ? exit_code::kOk : exit_code::kCertificationFailed;
    }
  } catch (const ConfigError& e) {
    err << "ConfigError: " << e.what() << '\n';
    return exit_code::kUsage;
  } catch (const CertificationUnavailable& e) {
    err << "CertificationUnavailable: " << e.what() << '\n';
    return exit_code::kCertificationFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kError;
  }
  return exit_code::kUsage;
}

}  // namespace ncgopt
