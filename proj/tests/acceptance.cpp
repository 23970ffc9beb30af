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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ncgopt/ncgopt.hpp"

namespace ncgopt {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double slack(double p, double n) { return 2.0 * std::sqrt(p * (1.0 - p) / n); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Vector uniform_point(CounterRng& rng, Eigen::Index d, double scale) {
  Vector x(d);
  for (Eigen::Index i = 0; i < d; ++i) x[i] = scale * (2.0 * rng.uniform() - 1.0);
  return x;
}

double tol(double f) { return 1e-9 * (1.0 + std::abs(f)); }

struct StepBench {
  std::string label;
  std::shared_ptr<const Problem> problem;
  double scale;
};

std::vector<StepBench> step_benches() {
  ProblemConfig t2, t10, mf;
  t2.dim = 2;
  t10.dim = 10;
  mf.name = "matfac";
  const double pi = std::acos(-1.0);
  return {{"trig d=2", build_problem(t2), pi},
          {"trig d=10", build_problem(t10), pi},
          {"matfac d=6 r=2", build_problem(mf), 0.5}};
}

// Draws a start inside the problem's valid region.
Vector start_point(const Problem& p, CounterRng& rng, double scale) {
  for (;;) {
    Vector x = uniform_point(rng, p.dim(), scale);
    if (p.in_domain(x)) return x;
  }
}

// 1000 steps per problem: 20 seeds x 50 fresh points.
template <class StepFn>
Outcome step_protocol(const std::string& name, StepFn step_fn) {
  Outcome o;
  std::size_t steps = 0, violations = 0, skipped = 0;
  for (const StepBench& b : step_benches()) {
    Oracle oracle(b.problem, b.problem->base_params());
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      CounterRng rng = CounterRng(seed).split(streams::kInit);
      const CounterRng lanczos = CounterRng(seed).split(streams::kCurvature);
      for (std::size_t k = 0; k < 50; ++k) {
        const Vector x = start_point(*b.problem, rng, b.scale);
        CounterRng lr = lanczos.split(k);
        const auto [observed, bound, x_next] = step_fn(oracle, x, lr, seed);
        if (!b.problem->in_domain(x_next)) {
          ++skipped;
          continue;
        }
        ++steps;
        if (observed < bound - tol(b.problem->value(x))) ++violations;
      }
    }
  }
  o.pass = violations == 0 && steps >= 900;
  o.detail = fmt("%s: %zu steps checked, %zu violations, %zu left the valid region", name.c_str(),
                 steps, violations, skipped);
  return o;
}

struct StepCheck {
  double observed;
  double bound;
  Vector x_next;
};

Outcome criterion1() {
  std::size_t positive_curvature = 0;
  Outcome o = step_protocol("NCG", [&](Oracle& oracle, const Vector& x, CounterRng& rng, std::uint64_t) {
    const SmoothnessParams& p = oracle.params();
    const double fx = oracle.value(x);
    const Vector g = oracle.gradient(x);
    const StepResult s = ncg_step(oracle, x, fx, g, std::max(1e-2, g.norm()) / 2.0, 0.1, rng);
    const double neg = std::max(0.0, -s.rayleigh);
    const double bound = std::max(2.0 * neg * neg * neg / (3.0 * p.l2 * p.l2), gradient_payoff(g.norm(), p.l1));
    const double literal = std::max(2.0 * std::pow(std::abs(s.rayleigh), 3) / (3.0 * p.l2 * p.l2),
                                    gradient_payoff(g.norm(), p.l1));
    if (s.observed_decrease < literal - tol(fx)) ++positive_curvature;
    return StepCheck{s.observed_decrease, bound, s.x_next};
  });
  o.detail += fmt("; curvature term uses [-v'Hv]_+ (%zu steps with v'Hv > 0 miss the |v'Hv| form)",
                  positive_curvature);
  return o;
}

Outcome criterion2() {
  const double eps2 = 0.1;
  auto ih = [&](bool perturbed) {
    return [=](Oracle& oracle, const Vector& x, CounterRng& rng, std::uint64_t seed) {
      const double fx = oracle.value(x);
      const Vector g = oracle.gradient(x);
      const SurrogateFactory factory =
          perturbed ? perturbed_surrogate(oracle.dim(), eps2 / 12.0, CounterRng(seed).split(streams::kSurrogate))
                    : exact_surrogate();
      const Surrogate h = factory(oracle, x, 0);
      const StepResult s =
          ih_ncg_step(oracle, h.op, x, fx, g, std::max(eps2, g.norm()) / 2.0, 0.1, eps2, rng);
      return StepCheck{s.observed_decrease, s.predicted_decrease, s.x_next};
    };
  };
  Outcome a = step_protocol("iH exact", ih(false));
  Outcome b = step_protocol("iH perturbed eps3=eps2/12", ih(true));

  // NCG-S with full-batch samples on the sigmoid finite sum.
  ProblemConfig sc;
  sc.name = "finitesum-sigmoid";
  auto problem = build_problem(sc);
  Oracle oracle(problem, problem->base_params());
  const SampleSet full = SampleSet::full(problem->n_components());
  const double e1 = 0.1, e2 = 0.3;
  std::size_t steps = 0, violations = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CounterRng rng = CounterRng(seed).split(streams::kInit);
    const CounterRng lanczos = CounterRng(seed).split(streams::kCurvature);
    for (std::size_t k = 0; k < 50; ++k) {
      const Vector x = uniform_point(rng, problem->dim(), 2.0);
      CounterRng lr = lanczos.split(k);
      const double fx = oracle.value(x);
      const Vector g = oracle.sampled_gradient(full, x);
      const StepResult s = ncg_s_step(oracle, x, fx, g, full, std::max(e2, g.norm()) / 2.0, 0.1, e1, e2, lr);
      ++steps;
      if (s.observed_decrease < s.predicted_decrease - tol(fx)) ++violations;
    }
  }
  Outcome o;
  o.pass = a.pass && b.pass && violations == 0;
  o.detail = a.detail + "; " + b.detail + fmt("; NCG-S full batch: %zu steps, %zu violations", steps, violations);
  return o;
}

SolveConfig a1_config(std::uint64_t seed) {
  SolveConfig c;
  c.eps1 = 1e-3;
  c.eps2 = 1e-2;
  c.seed = seed;
  return c;
}

Outcome criterion3() {
  ProblemConfig pc;
  std::size_t over_bound = 0, over_data = 0, errors = 0, worst = 0, bound = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const ProblemInstance inst = make_instance(pc, seed);
    Oracle oracle(inst.problem, inst.params);
    try {
      const SolveReport r = ncg_a1(oracle, inst.x0, a1_config(seed));
      bound = ncg_iteration_bound(inst.params, 1e-3, 1e-2);
      worst = std::max(worst, r.iters);
      if (r.iters > bound) ++over_bound;
      const double data = 1.0 + ncg_rate(inst.params, 1e-3, 1e-2) * (r.f_initial - r.f_final);
      if (static_cast<double>(r.iters) > data + 1e-9) ++over_data;
    } catch (const Error&) {
      ++errors;
    }
  }
  return {over_bound == 0 && over_data == 0 && errors == 0,
          fmt("30 runs on trig d=10: max iters %zu vs bound %zu; %zu over bound, %zu over the "
              "data-dependent bound, %zu errors", worst, bound, over_bound, over_data, errors)};
}

struct CertSweep {
  std::size_t runs = 0, first_fail = 0, second_fail = 0, errors = 0;
  std::size_t k_violations = 0, max_rounds = 0, k = 0;
};

std::size_t b1_k_violations = 0;
std::string b1_detail;

Outcome criterion4() {
  const double delta = 0.1;
  const double limit = delta + slack(delta, 50);
  struct Bench {
    const char* label;
    ProblemConfig pc;
    double eps2;
  };
  std::vector<Bench> benches(2);
  benches[0] = {"trig d=10", {}, 1e-2};
  benches[1] = {"matfac d=6 r=2", {}, 0.1};
  benches[1].pc.name = "matfac";
  std::string detail;
  bool pass = true;
  for (const Bench& b : benches) {
    const double eps1 = 1e-3;
    const double alpha = std::log(b.eps2) / std::log(eps1);
    detail += fmt("%s%s (eps1, eps2) = (%g, %g):", detail.empty() ? "" : "; ", b.label, eps1, b.eps2);
    for (const char* algo : {"ncg-a1", "ncg-a2", "ncg-b1", "ncg-b2"}) {
      CertSweep s;
      for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const ProblemInstance inst = make_instance(b.pc, seed);
        Oracle oracle(inst.problem, inst.params);
        SolveConfig c = a1_config(seed);
        c.eps2 = b.eps2;
        c.delta = delta;
        const std::string a = algo;
        if (a == "ncg-a2" || a == "ncg-b2") {
          c.eps2.reset();
          c.alpha = alpha;
        }
        try {
          SolveReport r = a == "ncg-a1"   ? ncg_a1(oracle, inst.x0, c)
                          : a == "ncg-a2" ? ncg_a2(oracle, inst.x0, c)
                          : a == "ncg-b1" ? ncg_b1(oracle, inst.x0, c)
                                          : ncg_b2(oracle, inst.x0, c);
          ++s.runs;
          // Dense check at the guaranteed level of each algorithm.
          const double level = a == "ncg-a1"   ? std::max(c.eps1, *c.eps2)
                               : a == "ncg-a2" ? std::pow(c.eps1, *c.alpha)
                                               : r.eps2;
          const StationarityCertificate cert = certify(oracle, r.x_final, c.eps1, level);
          if (!cert.passed_first_order) ++s.first_fail;
          if (!cert.passed_second_order) ++s.second_fail;
          if (a == "ncg-b1") {
            s.k = ncg_b_outer_bound(inst.params, c.eps1, *c.eps2);
            s.max_rounds = std::max(s.max_rounds, r.outer_rounds.size());
            if (r.outer_rounds.size() > s.k) ++s.k_violations;
          }
        } catch (const Error&) {
          ++s.errors;
        }
      }
      const double frac = static_cast<double>(s.second_fail + s.errors) / 50.0;
      pass = pass && s.first_fail == 0 && frac <= limit;
      detail += fmt(" %s %zu/50 first-order fails, second-order fail fraction %.3f, %zu errors;", algo,
                    s.first_fail, frac, s.errors);
      if (std::string(algo) == "ncg-b1") {
        b1_k_violations += s.k_violations + s.errors;
        b1_detail += fmt("%s%s: %zu B1 runs, max outer rounds %zu vs K = %zu, %zu over K, %zu errors",
                         b1_detail.empty() ? "" : "; ", b.label, s.runs, s.max_rounds, s.k,
                         s.k_violations, s.errors);
      }
    }
    detail.pop_back();
  }
  return {pass, detail + fmt("; fail-fraction limit %.3f", limit)};
}

Outcome criterion5() {
  const Eigen::Index d = 100;
  const double eps = 0.05, delta = 0.05;
  const double limit = delta + slack(delta, 200);
  CounterRng data(2024);
  double worst = 0.0;
  std::size_t hvp_over = 0, worst_budget = 0;
  for (int op = 0; op < 10; ++op) {
    Vector spectrum(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(d - 1);
      switch (op % 5) {
        case 0: spectrum[i] = -1.0 + 2.0 * t; break;                      // uniform
        case 1: spectrum[i] = i == 0 ? -0.5 : -0.5 + 0.01 + 1.49 * t; break;  // small gap
        case 2: spectrum[i] = 2.0 * data.uniform() - 1.0; break;          // random
        case 3: spectrum[i] = i < 5 ? -0.2 - 0.01 * static_cast<double>(i) : t; break;  // cluster
        default: spectrum[i] = 0.1 + 0.9 * t * t; break;                  // positive definite
      }
    }
    if (op >= 5) spectrum *= 0.7;
    Matrix g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) g(i, j) = data.normal();
    const Eigen::HouseholderQR<Matrix> qr(g);
    const Matrix q = qr.householderQ();
    Matrix h = q * spectrum.asDiagonal() * q.transpose();
    h = (0.5 * (h + h.transpose())).eval();
    const double l1 = symmetric_spectral_norm(h);
    const double lambda = dense_min_eig(h).lambda_min;
    const std::size_t budget = lanczos_budget(d, l1, eps, delta);
    worst_budget = std::max(worst_budget, budget);
    std::size_t fails = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      std::size_t calls = 0;
      CounterRng rng = CounterRng(static_cast<std::uint64_t>(op)).split(s);
      const CurvatureEstimate est = lanczos_min_eig(
          [&](const Vector& v) -> Vector {
            ++calls;
            return h * v;
          },
          d, l1, eps, delta, rng);
      if (lambda < est.rayleigh - eps) ++fails;
      if (calls > budget) ++hvp_over;
    }
    worst = std::max(worst, static_cast<double>(fails) / 200.0);
  }
  return {worst <= limit && hvp_over == 0,
          fmt("10 operators, d=100: worst failure rate %.3f (limit %.3f), %zu calls over budget "
              "(budget <= %zu)", worst, limit, hvp_over, worst_budget)};
}

Outcome criterion6() {
  std::vector<std::pair<std::string, ProblemConfig>> benches(2);
  benches[0].first = "trig d=10";
  benches[1].first = "matfac d=6 r=2";
  benches[1].second.name = "matfac";
  bool pass = true;
  std::string detail;
  std::size_t budget_checks = 0, budget_violations = 0;
  for (const auto& [label, pc] : benches) {
    double adaptive = 0.0, fixed = 0.0;
    std::size_t errors = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      const ProblemInstance inst = make_instance(pc, seed);
      try {
        Oracle oa(inst.problem, inst.params), of(inst.problem, inst.params);
        adaptive += static_cast<double>(ncg_a1(oa, inst.x0, a1_config(seed)).trace.rows.back().hvp_cum);
        fixed += static_cast<double>(ncg_fixed(of, inst.x0, a1_config(seed)).trace.rows.back().hvp_cum);

        SolveConfig c2 = a1_config(seed);
        c2.eps2.reset();
        c2.alpha = 2.0 / 3.0;
        Oracle o2(inst.problem, inst.params);
        const SolveReport r2 = ncg_a2(o2, inst.x0, c2);
        const double dp1 = ncg_delta_prime(inst.params, 0.1, 1e-3, 1e-2);
        const detail::NoiseRule a1_rule{1e-2, 1.0, true};
        const Eigen::Index d = inst.problem->dim();
        for (const TraceRow& row : r2.trace.rows) {
          if (row.grad_norm >= 1.0 || !row.noise_level) continue;
          ++budget_checks;
          const std::size_t b2 = lanczos_budget(d, inst.params.l1, *row.noise_level, r2.delta_prime);
          const std::size_t b1 = lanczos_budget(d, inst.params.l1, a1_rule(row.grad_norm), dp1);
          if (b2 > b1) ++budget_violations;
        }
      } catch (const Error&) {
        ++errors;
      }
    }
    adaptive /= 30.0;
    fixed /= 30.0;
    pass = pass && adaptive <= fixed && errors == 0;
    detail += fmt("%s: mean hvp A1 %.1f vs fixed-noise %.1f (ratio %.3f, %zu errors); ", label.c_str(),
                  adaptive, fixed, adaptive / fixed, errors);
  }
  pass = pass && budget_violations == 0;
  detail += fmt("A2 (alpha 2/3) budget above A1 on %zu of %zu iterations with ||g|| < 1",
                budget_violations, budget_checks);
  return {pass, detail};
}

Outcome criterion7() {
  return {b1_k_violations == 0 && !b1_detail.empty(), b1_detail};
}

ProblemConfig sncg_problem() {
  ProblemConfig pc;
  pc.name = "finitesum-sigmoid";
  pc.n_samples = 500;
  pc.dim = 10;
  return pc;
}

SolveConfig sncg_config(std::uint64_t seed) {
  SolveConfig c;
  c.eps1 = 0.1;
  c.eps2 = 0.3;
  c.delta = 0.03;
  c.seed = seed;
  return c;
}

Outcome criterion8() {
  const double delta = 0.03;
  const double need = 1.0 - 3.0 * delta - slack(delta, 30);
  const ProblemConfig pc = sncg_problem();
  std::size_t certified = 0, over_bound = 0, errors = 0;
  std::uint64_t s1 = 0, s2 = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const ProblemInstance inst = make_instance(pc, seed);
    Oracle oracle(inst.problem, inst.params);
    const SolveConfig c = sncg_config(seed);
    const SampleSizes th = sample_sizes(c, inst.params, inst.problem->dim());
    s1 = std::min<std::uint64_t>(th.s1, 500);
    s2 = std::min<std::uint64_t>(th.s2, 500);
    try {
      const SolveReport r = sncg(oracle, inst.x0, c, s1, s2);
      if (r.iters > ncg_iteration_bound(inst.params, 0.1, 0.3, 48.0, 8.0)) ++over_bound;
      if (r.certificate && r.certificate->passed()) ++certified;
    } catch (const Error&) {
      ++errors;
    }
  }
  const double frac = static_cast<double>(certified) / 30.0;
  return {frac >= need && over_bound == 0,
          fmt("n=500, d=10, |S1|=%llu, |S2|=%llu: certified fraction %.3f (need %.3f), %zu over "
              "the iteration bound, %zu errors", static_cast<unsigned long long>(s1),
              static_cast<unsigned long long>(s2), frac, need, over_bound, errors)};
}

Outcome criterion9() {
  const ProblemConfig pc = sncg_problem();
  const auto problem = build_problem(pc);
  const SmoothnessParams p = problem->base_params();
  Oracle oracle(problem, p);
  const Eigen::Index d = problem->dim();
  const std::size_t n = problem->n_components();
  const double eps1 = 0.1, eps2 = 0.3, dp = 0.1;
  const double eps3 = eps2 / 24.0;
  const std::uint64_t hs = hessian_sample_size(p.l1, eps3, dp, d);
  const std::uint64_t gs = sample_sizes_at(p, eps1, eps2, dp, d).s1;
  const double eps4 = sncg_gradient_accuracy(p, eps1, eps2);
  CounterRng rng(99);
  std::size_t h_ok = 0, g_ok = 0;
  for (int k = 0; k < 200; ++k) {
    const Vector x = uniform_point(rng, d, 1.0);
    CounterRng r = rng.split(static_cast<std::uint64_t>(k));
    CounterRng r1 = r.split(1), r2 = r.split(2);
    const SampleSet s2 = draw_uniform_sample(n, hs, r2);
    if (symmetric_spectral_norm(oracle.dense_sampled_hessian(s2, x) - oracle.dense_hessian(x)) <= eps3) ++h_ok;
    const SampleSet s1 = draw_uniform_sample(n, gs, r1);
    if ((oracle.sampled_gradient(s1, x) - problem->gradient(x)).norm() <= eps4) ++g_ok;
  }
  const double need_h = 1.0 - dp - slack(dp, 200);
  const double need_g = 1.0 - dp / 2.0 - slack(dp / 2.0, 200);
  const double fh = h_ok / 200.0, fg = g_ok / 200.0;
  return {fh >= need_h && fg >= need_g,
          fmt("delta'=%.2f: Hessian |S2|=%llu, eps3=%.4g, success %.3f (need %.3f); gradient |S1|=%llu, "
              "eps4=%.4g, success %.3f (need %.3f)", dp, static_cast<unsigned long long>(hs), eps3, fh,
              need_h, static_cast<unsigned long long>(gs), eps4, fg, need_g)};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome criterion10() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ncgopt_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::string> runs = {
      "--algo ncg-a1 --seed 5",
      "--algo ncg-b1 --problem matfac --eps2 0.1 --seed 5",
      "--algo ih-ncg-a --surrogate perturbed --seed 5",
      "--algo sncg --problem finitesum-sigmoid --eps1 0.1 --eps2 0.3 --s1 200 --s2 200 --seed 5"};
  std::size_t identical = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    std::string files[2];
    for (int rep = 0; rep < 2; ++rep) {
      const std::string prefix = (dir / ("r" + std::to_string(k) + "_" + std::to_string(rep))).string();
      const std::string cmd = std::string("\"") + NCGOPT_CLI_PATH + "\" run " + runs[k] + " --out " + prefix +
                              " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) break;
      files[rep] = slurp(prefix + ".trace.csv");
    }
    if (!files[0].empty() && files[0] == files[1]) ++identical;
  }
  fs::remove_all(dir);
  return {identical == runs.size(),
          fmt("%zu of %zu CLI configurations produced byte-identical traces", identical, runs.size())};
}

}  // namespace
}  // namespace ncgopt

int main() {
  using namespace ncgopt;
  struct Criterion {
    int id;
    double limit_s;  // runtime limit; 0 for none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, 10, criterion1},  {2, 20, criterion2},   {3, 60, criterion3}, {4, 300, criterion4},
      {5, 30, criterion5},  {6, 0, criterion6},    {7, 0, criterion7},  {8, 300, criterion8},
      {9, 60, criterion9},  {10, 0, criterion10}};
  int failed = 0;
  for (const Criterion& c : all) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt(" [over the %.0f s limit]", c.limit_s);
    }
    std::printf("criterion %2d: %s  %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed;
}
