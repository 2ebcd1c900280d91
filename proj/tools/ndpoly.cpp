// Copyright 2026 The ndpoly Authors
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

// Experiment runner for the heavy-tail polymer laboratory. Every leaf
// command validates its window first, writes CSV with full precision, and
// appends a JSONL run record carrying the config hash and diagnostics.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ndpoly/accept.hpp"
#include "ndpoly/elpp.hpp"
#include "ndpoly/entropy.hpp"
#include "ndpoly/env.hpp"
#include "ndpoly/io.hpp"
#include "ndpoly/limits.hpp"
#include "ndpoly/model.hpp"
#include "ndpoly/polymer.hpp"
#include "ndpoly/varprob.hpp"
#include "ndpoly/walk.hpp"

namespace {

using ndpoly::Vec;
namespace io = ndpoly::io;

constexpr int kExitValidation = 2;
constexpr int kExitDiagnostic = 3;

struct RunContext {
  io::Config config;
  std::string experiment;
  std::uint64_t seed = 0;
  std::string log_path = "runs.jsonl";
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::string>> diagnostics;
  bool diagnostic_failure = false;
  std::string started;

  RunContext(std::string name, std::uint64_t s) : experiment(std::move(name)), seed(s) {
    started = io::utc_now();
    config.set("experiment", experiment);
    config.set("seed", std::to_string(seed));
  }
  void param(const std::string& key, double v) { config.set(key, io::format_double(v)); }
  void param(const std::string& key, long long v) { config.set(key, std::to_string(v)); }
  void param(const std::string& key, const std::string& v) { config.set(key, v); }
  void diag(const std::string& key, const std::string& v) { diagnostics.emplace_back(key, v); }
  void flag_diag(const std::string& key, bool bad) {
    diagnostics.emplace_back(key, bad ? "fail" : "ok");
    if (bad) diagnostic_failure = true;
  }
  int finish() {
    io::RunRecord rec;
    rec.config_hash = config.hash();
    rec.experiment = experiment;
    rec.seed = seed;
    rec.started_utc = started;
    rec.finished_utc = io::utc_now();
    for (const auto& f : outputs) rec.output_digests.emplace_back(f, io::file_digest(f));
    rec.diagnostics = diagnostics;
    append_run_record(log_path, rec);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(rec.config_hash));
    std::cout << "run " << buf << " logged to " << log_path << "\n";
    return diagnostic_failure ? kExitDiagnostic : 0;
  }
};

std::vector<Vec> parse_points(const std::string& text, int d) {
  // "x1,y1;x2,y2" -> points
  std::vector<Vec> pts;
  std::istringstream outer(text);
  std::string chunk;
  while (std::getline(outer, chunk, ';')) {
    Vec v(d);
    std::istringstream inner(chunk);
    std::string num;
    int i = 0;
    while (std::getline(inner, num, ',')) {
      if (i >= d) throw CLI::ValidationError("points", "too many coordinates in '" + chunk + "'");
      v.c[i++] = std::stod(num);
    }
    if (i != d) throw CLI::ValidationError("points", "expected " + std::to_string(d) + " coords");
    pts.push_back(v);
  }
  return pts;
}

std::vector<long long> doubling_grid(long long lo, long long hi) {
  std::vector<long long> g;
  for (long long n = lo; n <= hi; n *= 2) g.push_back(n);
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heavy-tail non-directed polymer laboratory"};
  app.require_subcommand(1);
  app.set_config("--config")->configurable(false);
  app.allow_config_extras(false);

  std::uint64_t seed = 1;
  std::string out_path;
  std::string log_path = "runs.jsonl";
  app.add_option("--seed", seed, "master seed")->configurable(true);
  app.add_option("--out", out_path, "output CSV path");
  app.add_option("--log", log_path, "run-record JSONL path");

  int ret = 0;
  const auto guard = [&](const std::function<int()>& body) {
    try {
      ret = body();
    } catch (const std::invalid_argument& e) {
      std::cerr << "validation error: " << e.what() << "\n";
      ret = kExitValidation;
    } catch (const CLI::ValidationError& e) {
      std::cerr << "validation error: " << e.what() << "\n";
      ret = kExitValidation;
    }
  };

  // ---------------- model ----------------
  auto* model_cmd = app.add_subcommand("model", "phase diagram");
  {
    auto* classify = model_cmd->add_subcommand("classify", "region and wandering exponent");
    auto d = std::make_shared<int>(2);
    auto alpha = std::make_shared<double>(1.5);
    auto gamma = std::make_shared<double>(0.5);
    auto beta_hat = std::make_shared<double>(1.0);
    classify->add_option("--d", *d, "dimension");
    classify->add_option("--alpha", *alpha, "tail exponent");
    classify->add_option("--gamma", *gamma, "coupling decay");
    classify->add_option("--beta-hat", *beta_hat, "coupling amplitude");
    classify->callback([&, d, alpha, gamma, beta_hat] {
      guard([&]() -> int {
        ndpoly::model::ModelParams p;
        p.d = *d;
        p.alpha = *alpha;
        p.gamma = *gamma;
        p.beta_hat = *beta_hat;
        if (p.alpha > 1.0) p.mu = ndpoly::env::pareto_mean(p.alpha);
        const auto region = ndpoly::model::classify_regime(p);
        std::cout << "region " << to_string(region)
                  << "  xi = " << io::format_double(ndpoly::model::wandering_exponent(p)) << "\n";
        return 0;
      });
    });
  }

  // ---------------- env ----------------
  auto* env_cmd = app.add_subcommand("env", "environment sampling");
  {
    auto* sample = env_cmd->add_subcommand("sample", "order statistics of a lattice ball");
    auto d = std::make_shared<int>(2);
    auto radius = std::make_shared<double>(16.0);
    auto alpha = std::make_shared<double>(1.5);
    auto ell = std::make_shared<long long>(32);
    sample->add_option("--d", *d, "dimension");
    sample->add_option("--radius", *radius, "ball radius");
    sample->add_option("--alpha", *alpha, "tail exponent");
    sample->add_option("--ell", *ell, "top order statistics to emit");
    sample->callback([&, d, alpha, radius, ell] {
      guard([&]() -> int {
        RunContext ctx("env sample", seed);
        ctx.log_path = log_path;
        ctx.param("d", static_cast<long long>(*d));
        ctx.param("radius", *radius);
        ctx.param("alpha", *alpha);
        ctx.param("ell", *ell);
        const auto environment =
            *radius <= ndpoly::env::LatticeEnvironment::kDenseRadiusCap
                ? ndpoly::env::LatticeEnvironment::dense(*d, *radius, *alpha, seed)
                : ndpoly::env::LatticeEnvironment::lazy(*d, *radius, *alpha, seed);
        const auto os = environment.top_order_statistics(static_cast<std::size_t>(*ell));
        const std::string path = out_path.empty() ? "env_sample.csv" : out_path;
        std::vector<std::string> cols{"rank", "value"};
        for (int i = 0; i < *d; ++i) cols.push_back("x" + std::to_string(i));
        io::CsvWriter csv(path, cols);
        for (std::size_t i = 0; i < os.size(); ++i) {
          std::vector<double> row{static_cast<double>(i + 1), os.weight[i]};
          for (int c = 0; c < *d; ++c) row.push_back(os.site[i].c[c]);
          csv.row_values(row);
        }
        ctx.outputs.push_back(path);
        return ctx.finish();
      });
    });
  }

  // ---------------- walk ----------------
  auto* walk_cmd = app.add_subcommand("walk", "random-walk kernels");
  {
    auto* fcmd = walk_cmd->add_subcommand("f", "visit profile over a radius grid");
    auto d = std::make_shared<int>(2);
    auto rmin = std::make_shared<double>(0.1);
    auto rmax = std::make_shared<double>(4.0);
    auto n = std::make_shared<long long>(64);
    fcmd->add_option("--d", *d, "dimension");
    fcmd->add_option("--rmin", *rmin, "smallest radius");
    fcmd->add_option("--rmax", *rmax, "largest radius");
    fcmd->add_option("--n", *n, "grid size");
    fcmd->callback([&, d, rmin, rmax, n] {
      guard([&]() -> int {
        RunContext ctx("walk f", seed);
        ctx.log_path = log_path;
        ctx.param("d", static_cast<long long>(*d));
        ctx.param("rmin", *rmin);
        ctx.param("rmax", *rmax);
        ctx.param("n", *n);
        const std::string path = out_path.empty() ? "walk_f.csv" : out_path;
        io::CsvWriter csv(path, {"r", "f"});
        for (long long i = 0; i < *n; ++i) {
          const double r = *rmin + (*rmax - *rmin) * i / std::max<long long>(1, *n - 1);
          Vec x(*d);
          x.c[0] = r;
          csv.row_values({r, ndpoly::walk::f_profile(x, *d)});
        }
        ctx.outputs.push_back(path);
        return ctx.finish();
      });
    });

    auto* green = walk_cmd->add_subcommand("green", "lattice Green function");
    auto gd = std::make_shared<int>(3);
    auto gx = std::make_shared<std::string>("0,0,0");
    green->add_option("--d", *gd, "dimension (>= 3)");
    green->add_option("--x", *gx, "site, comma separated");
    green->callback([&, gd, gx] {
      guard([&]() -> int {
        const auto pts = parse_points(*gx, *gd);
        ndpoly::Site s(*gd);
        for (int i = 0; i < *gd; ++i) s.c[i] = static_cast<std::int32_t>(std::llround(pts[0].c[i]));
        std::cout << "G(x) = " << io::format_double(ndpoly::walk::green_function(s)) << "\n";
        std::cout << "escape probability = "
                  << io::format_double(ndpoly::walk::escape_probability(*gd)) << "\n";
        std::cout << "P(x in range ever) = "
                  << io::format_double(ndpoly::walk::hitting_probability_inf(s, *gd)) << "\n";
        return 0;
      });
    });

    auto* jn = walk_cmd->add_subcommand("jn", "range overlap sum");
    auto jd = std::make_shared<int>(3);
    auto jn_lo = std::make_shared<long long>(1024);
    auto jn_hi = std::make_shared<long long>(16384);
    auto reps = std::make_shared<long long>(4000);
    jn->add_option("--d", *jd, "dimension");
    jn->add_option("--n-min", *jn_lo, "smallest N (doubling grid)");
    jn->add_option("--n-max", *jn_hi, "largest N");
    jn->add_option("--reps", *reps, "replicas per N");
    jn->callback([&, jd, jn_lo, jn_hi, reps] {
      guard([&]() -> int {
        RunContext ctx("walk jn", seed);
        ctx.log_path = log_path;
        ctx.param("d", static_cast<long long>(*jd));
        ctx.param("n_min", *jn_lo);
        ctx.param("n_max", *jn_hi);
        ctx.param("reps", *reps);
        const std::string path = out_path.empty() ? "walk_jn.csv" : out_path;
        io::CsvWriter csv(path, {"N", "estimate", "stderr", "replicas", "seed"});
        for (long long N : doubling_grid(*jn_lo, *jn_hi)) {
          const auto res = ndpoly::walk::overlap_sum(N, *jd, false,
                                                     static_cast<std::uint64_t>(*reps), seed);
          csv.row_values({static_cast<double>(N), res.j_n, res.stderr_,
                          static_cast<double>(*reps), static_cast<double>(seed)});
        }
        ctx.outputs.push_back(path);
        return ctx.finish();
      });
    });

    auto* visit = walk_cmd->add_subcommand("visit", "ordered visit probability sweep");
    auto vd = std::make_shared<int>(2);
    auto vpts = std::make_shared<std::string>("3,0");
    auto vn_lo = std::make_shared<long long>(16);
    auto vn_hi = std::make_shared<long long>(256);
    auto vreps = std::make_shared<long long>(20000);
    visit->add_option("--d", *vd, "dimension");
    visit->add_option("--points", *vpts, "ordered targets 'x,y;x,y'");
    visit->add_option("--n-min", *vn_lo, "smallest N (doubling grid)");
    visit->add_option("--n-max", *vn_hi, "largest N");
    visit->add_option("--reps", *vreps, "replicas");
    visit->callback([&, vd, vpts, vn_lo, vn_hi, vreps] {
      guard([&]() -> int {
        RunContext ctx("walk visit", seed);
        ctx.log_path = log_path;
        ctx.param("d", static_cast<long long>(*vd));
        ctx.param("points", *vpts);
        ctx.param("n_min", *vn_lo);
        ctx.param("n_max", *vn_hi);
        ctx.param("reps", *vreps);
        const auto pts = parse_points(*vpts, *vd);
        std::vector<ndpoly::Site> delta;
        for (const auto& p : pts) delta.push_back(ndpoly::nearest_site(p));
        const auto grid = doubling_grid(*vn_lo, *vn_hi);
        const auto rows = ndpoly::walk::visit_probability_sweep(
            delta, grid, *vd, static_cast<std::uint64_t>(*vreps), seed);
        const std::string path = out_path.empty() ? "walk_visit.csv" : out_path;
        io::CsvWriter csv(path, {"N", "estimate", "stderr", "replicas", "seed"});
        bool zero = false;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          csv.row_values({static_cast<double>(grid[i]), rows[i].mean, rows[i].stderr_,
                          static_cast<double>(rows[i].replicas), static_cast<double>(seed)});
          zero = zero || rows[i].zero_hits;
        }
        ctx.outputs.push_back(path);
        ctx.flag_diag("zero_hits", zero);
        return ctx.finish();
      });
    });
  }

  // ---------------- entropy ----------------
  auto* ent_cmd = app.add_subcommand("entropy", "entropy functionals");
  {
    auto* eval = ent_cmd->add_subcommand("eval", "evaluate the functionals on a point tuple");
    auto d = std::make_shared<int>(2);
    auto pts_text = std::make_shared<std::string>("1,0");
    auto N = std::make_shared<double>(1.0);
    eval->add_option("--d", *d, "dimension");
    eval->add_option("--points", *pts_text, "ordered points 'x,y;x,y'");
    eval->add_option("--N", *N, "time horizon");
    eval->callback([&, d, pts_text, N] {
      guard([&]() -> int {
        const auto pts = parse_points(*pts_text, *d);
        std::cout << "ent        = " << io::format_double(ndpoly::entropy::ent(pts)) << "\n";
        std::cout << "ent_N      = " << io::format_double(ndpoly::entropy::ent_N(pts, *N).value)
                  << "\n";
        std::cout << "hat_ent_N  = "
                  << io::format_double(ndpoly::entropy::hat_ent_N(pts, *N).value) << "\n";
        const auto best = ndpoly::entropy::shortest_visit_length(pts);
        std::cout << "shortest visit length = " << io::format_double(best.length) << " order";
        for (int i : best.order) std::cout << ' ' << i;
        std::cout << "\n";
        return 0;
      });
    });
  }

  // ---------------- elpp ----------------
  auto* elpp_cmd = app.add_subcommand("elpp", "entropy-controlled last-passage percolation");
  {
    auto* solve = elpp_cmd->add_subcommand("solve", "one cloud, exact solution");
    auto m = std::make_shared<long long>(12);
    auto rr = std::make_shared<double>(1.0);
    auto B = std::make_shared<double>(1.0);
    auto d = std::make_shared<int>(2);
    auto lattice = std::make_shared<bool>(false);
    solve->add_option("--m", *m, "cloud size");
    solve->add_option("--r", *rr, "ball radius");
    solve->add_option("--B", *B, "entropy budget");
    solve->add_option("--d", *d, "dimension");
    solve->add_flag("--lattice", *lattice, "lattice cloud");
    solve->callback([&, m, rr, B, d, lattice] {
      guard([&]() -> int {
        const auto cloud =
            *lattice ? ndpoly::elpp::sample_cloud_lattice(*d, *rr, *m, seed)
                     : ndpoly::elpp::sample_cloud_continuum(*d, *rr, *m, seed);
        const auto res = ndpoly::elpp::elpp_exact(cloud, *B);
        std::cout << "k_max = " << res.k_max
                  << "  entropy used = " << io::format_double(res.entropy_used) << "\n";
        return 0;
      });
    });

    auto* tail = elpp_cmd->add_subcommand("tail", "tail table against the envelope");
    auto tm = std::make_shared<long long>(18);
    auto tr = std::make_shared<double>(1.0);
    auto tB = std::make_shared<double>(0.35);
    auto td = std::make_shared<int>(2);
    auto tkmax = std::make_shared<long long>(7);
    auto treps = std::make_shared<long long>(10000);
    auto tlattice = std::make_shared<bool>(false);
    tail->add_option("--m", *tm, "cloud size");
    tail->add_option("--r", *tr, "ball radius");
    tail->add_option("--B", *tB, "entropy budget");
    tail->add_option("--d", *td, "dimension");
    tail->add_option("--kmax", *tkmax, "largest k of the grid");
    tail->add_option("--reps", *treps, "replicas");
    tail->add_flag("--lattice", *tlattice, "lattice cloud");
    tail->callback([&, tm, tr, tB, td, tkmax, treps, tlattice] {
      guard([&]() -> int {
        RunContext ctx("elpp tail", seed);
        ctx.log_path = log_path;
        ctx.param("m", *tm);
        ctx.param("r", *tr);
        ctx.param("B", *tB);
        ctx.param("d", static_cast<long long>(*td));
        ctx.param("kmax", *tkmax);
        ctx.param("reps", *treps);
        ctx.param("lattice", static_cast<long long>(*tlattice ? 1 : 0));
        std::vector<int> k_grid;
        for (int k = 2; k <= *tkmax; ++k) k_grid.push_back(k);
        // constant calibrated on a disjoint stream, then held fixed
        const double c = ndpoly::elpp::calibrate_tail_constant(
            *tm, *tr, *tB, *td, k_grid, static_cast<std::uint64_t>(*treps),
            ndpoly::rng::derive_key(seed, "calibration"), *tlattice);
        const auto table = ndpoly::elpp::elpp_tail_experiment(
            *tm, *tr, *tB, *td, k_grid, static_cast<std::uint64_t>(*treps), seed, c, *tlattice);
        const std::string path = out_path.empty() ? "elpp_tail.csv" : out_path;
        io::CsvWriter csv(path,
                          {"k", "empirical", "wilson_lo", "wilson_hi", "bound", "c_d", "seed"});
        bool zero = false;
        for (const auto& row : table.rows) {
          csv.row_values({static_cast<double>(row.k), row.empirical, row.wilson_lo,
                          row.wilson_hi, row.bound, c, static_cast<double>(seed)});
          zero = zero || row.hits == 0;
        }
        ctx.outputs.push_back(path);
        ctx.diag("zero_hit_rows", zero ? "some" : "none");
        return ctx.finish();
      });
    });

    auto* volume = elpp_cmd->add_subcommand("volume", "entropy-ball volume estimate");
    auto vk = std::make_shared<long long>(2);
    auto vB = std::make_shared<double>(1.0);
    auto vd = std::make_shared<int>(2);
    auto vreps = std::make_shared<long long>(200000);
    volume->add_option("--k", *vk, "points");
    volume->add_option("--B", *vB, "entropy budget");
    volume->add_option("--d", *vd, "dimension");
    volume->add_option("--reps", *vreps, "replicas");
    volume->callback([&, vk, vB, vd, vreps] {
      guard([&]() -> int {
        const auto est = ndpoly::elpp::entropy_ball_volume(
            static_cast<int>(*vk), *vB, *vd, static_cast<std::uint64_t>(*vreps), seed);
        const double formula = ndpoly::elpp::entropy_ball_volume_formula(
            static_cast<int>(*vk), *vB, *vd);
        std::cout << "mc volume = " << io::format_double(est.mean) << " +- "
                  << io::format_double(est.stderr_) << "\n";
        std::cout << "product formula = " << io::format_double(formula)
                  << "  (known factor-2 mismatch at k=1, d=2: both reported)\n";
        return 0;
      });
    });
  }

  // ---------------- varprob ----------------
  auto* vp_cmd = app.add_subcommand("varprob", "energy-entropy variational problems");
  {
    auto* solve = vp_cmd->add_subcommand("solve", "solve one sampled continuum field");
    auto alpha = std::make_shared<double>(1.5);
    auto d = std::make_shared<int>(2);
    auto q = std::make_shared<double>(8.0);
    auto beta = std::make_shared<double>(1.0);
    auto ell = std::make_shared<long long>(12);
    auto kind = std::make_shared<std::string>("quadratic");
    solve->add_option("--alpha", *alpha, "tail exponent");
    solve->add_option("--d", *d, "dimension");
    solve->add_option("--q", *q, "ball radius");
    solve->add_option("--beta", *beta, "coupling");
    solve->add_option("--ell", *ell, "weights kept");
    solve->add_option("--kind", *kind, "quadratic | rate");
    solve->callback([&, alpha, d, q, beta, ell, kind] {
      guard([&]() -> int {
        const auto k = *kind == "rate" ? ndpoly::varprob::Kind::rate
                                       : ndpoly::varprob::Kind::quadratic;
        const auto sol = ndpoly::varprob::continuum_T_trunc(
            *q, *beta, static_cast<std::size_t>(*ell), *alpha, *d, seed, k);
        std::cout << "value = " << io::format_double(sol.value)
                  << "  energy = " << io::format_double(sol.energy)
                  << "  entropy = " << io::format_double(sol.entropy)
                  << "  |witness| = " << sol.witness.size() << "\n";
        return 0;
      });
    });

    auto* tail = vp_cmd->add_subcommand("tail", "tail table of the truncated problem");
    auto ta = std::make_shared<double>(1.5);
    auto td = std::make_shared<int>(2);
    auto tr = std::make_shared<double>(32.0);
    auto tN = std::make_shared<double>(1024.0);
    auto tbeta = std::make_shared<double>(0.0);
    auto tell = std::make_shared<long long>(10);
    auto treps = std::make_shared<long long>(20000);
    tail->add_option("--alpha", *ta, "tail exponent");
    tail->add_option("--d", *td, "dimension");
    tail->add_option("--r", *tr, "environment radius");
    tail->add_option("--N", *tN, "time horizon");
    tail->add_option("--beta", *tbeta, "coupling (0 picks r^{2/3}/N)");
    tail->add_option("--ell", *tell, "weights kept");
    tail->add_option("--reps", *treps, "replicas");
    tail->callback([&, ta, td, tr, tN, tbeta, tell, treps] {
      guard([&]() -> int {
        RunContext ctx("varprob tail", seed);
        ctx.log_path = log_path;
        const double beta_eff =
            *tbeta > 0.0 ? *tbeta : std::pow(*tr, 2.0 / 3.0) / *tN;
        ctx.param("alpha", *ta);
        ctx.param("d", static_cast<long long>(*td));
        ctx.param("r", *tr);
        ctx.param("N", *tN);
        ctx.param("beta", beta_eff);
        ctx.param("ell", *tell);
        ctx.param("reps", *treps);
        const std::vector<double> t_grid{1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
        const double c = ndpoly::varprob::calibrate_T_tail_constant(
            *ta, *td, *tr, *tN, beta_eff, static_cast<std::size_t>(*tell), t_grid,
            static_cast<std::uint64_t>(*treps), ndpoly::rng::derive_key(seed, "calibration"));
        const auto table = ndpoly::varprob::tail_experiment_T(
            *ta, *td, *tr, *tN, beta_eff, static_cast<std::size_t>(*tell), t_grid,
            static_cast<std::uint64_t>(*treps), seed, c);
        const std::string path = out_path.empty() ? "varprob_tail.csv" : out_path;
        io::CsvWriter csv(path, {"t", "empirical", "bound", "c", "slope", "seed"});
        bool zero = false;
        for (const auto& row : table.rows) {
          csv.row_values({row.t, row.empirical, row.bound, c, table.slope,
                          static_cast<double>(seed)});
          zero = zero || row.hits == 0;
        }
        ctx.outputs.push_back(path);
        ctx.diag("zero_hit_rows", zero ? "some" : "none");
        return ctx.finish();
      });
    });

    auto* betac = vp_cmd->add_subcommand("betac", "critical-coupling distribution");
    auto ba = std::make_shared<double>(1.5);
    auto bd = std::make_shared<int>(2);
    auto bq = std::make_shared<double>(8.0);
    auto bell = std::make_shared<long long>(16);
    auto bsamples = std::make_shared<long long>(500);
    auto bmin = std::make_shared<int>(-10);
    auto bmax = std::make_shared<int>(2);
    betac->add_option("--alpha", *ba, "tail exponent");
    betac->add_option("--d", *bd, "dimension");
    betac->add_option("--q", *bq, "field radius");
    betac->add_option("--ell", *bell, "weights kept");
    betac->add_option("--samples", *bsamples, "fields");
    betac->add_option("--log2-min", *bmin, "log2 of the smallest grid beta");
    betac->add_option("--log2-max", *bmax, "log2 of the largest grid beta");
    betac->callback([&, ba, bd, bq, bell, bsamples, bmin, bmax] {
      guard([&]() -> int {
        RunContext ctx("varprob betac", seed);
        ctx.log_path = log_path;
        ctx.param("alpha", *ba);
        ctx.param("d", static_cast<long long>(*bd));
        ctx.param("q", *bq);
        ctx.param("ell", *bell);
        ctx.param("samples", *bsamples);
        ctx.param("log2_min", static_cast<long long>(*bmin));
        ctx.param("log2_max", static_cast<long long>(*bmax));
        std::vector<double> grid;
        for (int e2 = *bmin; e2 <= *bmax; ++e2) grid.push_back(std::pow(2.0, e2));
        const auto table = ndpoly::varprob::beta_c_estimate(
            *ba, *bd, *bq, static_cast<std::size_t>(*bell), grid,
            static_cast<std::size_t>(*bsamples), seed);
        const std::string path = out_path.empty() ? "varprob_betac.csv" : out_path;
        io::CsvWriter csv(path, {"field", "beta_c_exact", "beta_c_grid", "censored"});
        for (std::size_t i = 0; i < table.samples.size(); ++i) {
          const auto& s = table.samples[i];
          csv.row_values({static_cast<double>(i), s.beta_c_exact, s.beta_c_grid,
                          s.censored ? 1.0 : 0.0});
        }
        std::cout << "fraction at/below grid minimum = "
                  << io::format_double(table.fraction_at_or_below_min)
                  << ", censored = " << io::format_double(table.fraction_censored) << "\n";
        ctx.outputs.push_back(path);
        ctx.diag("fraction_censored", io::format_double(table.fraction_censored));
        return ctx.finish();
      });
    });

    auto* scaling = vp_cmd->add_subcommand("scaling", "coupled scaling-relation samples");
    auto sa = std::make_shared<double>(1.5);
    auto sd = std::make_shared<int>(2);
    auto sq = std::make_shared<double>(8.0);
    auto sell = std::make_shared<long long>(12);
    auto sbeta = std::make_shared<double>(2.0);
    auto sn = std::make_shared<long long>(10000);
    scaling->add_option("--alpha", *sa, "tail exponent");
    scaling->add_option("--d", *sd, "dimension");
    scaling->add_option("--q", *sq, "field radius");
    scaling->add_option("--ell", *sell, "weights kept");
    scaling->add_option("--beta", *sbeta, "coupling");
    scaling->add_option("--n", *sn, "coupled samples");
    scaling->callback([&, sa, sd, sq, sell, sbeta, sn] {
      guard([&]() -> int {
        RunContext ctx("varprob scaling", seed);
        ctx.log_path = log_path;
        ctx.param("alpha", *sa);
        ctx.param("d", static_cast<long long>(*sd));
        ctx.param("q", *sq);
        ctx.param("ell", *sell);
        ctx.param("beta", *sbeta);
        ctx.param("n", *sn);
        const auto s = ndpoly::varprob::scaling_relation_samples(
            *sa, *sd, static_cast<std::size_t>(*sell), *sq, *sbeta,
            static_cast<std::size_t>(*sn), seed);
        const double ks = ndpoly::stats::ks_distance(s.at_beta, s.scaled_from_one);
        const std::string path = out_path.empty() ? "varprob_scaling.csv" : out_path;
        io::CsvWriter csv(path, {"sample", "at_beta", "scaled_from_one", "ks"});
        for (std::size_t i = 0; i < s.at_beta.size(); ++i)
          csv.row_values({static_cast<double>(i), s.at_beta[i], s.scaled_from_one[i], ks});
        std::cout << "two-sample KS = " << io::format_double(ks) << "\n";
        ctx.outputs.push_back(path);
        return ctx.finish();
      });
    });
  }

  // ---------------- polymer ----------------
  auto* poly_cmd = app.add_subcommand("polymer", "Gibbs measure experiments");
  {
    auto* exact = poly_cmd->add_subcommand("exact", "exact partition function (tiny N)");
    auto d = std::make_shared<int>(2);
    auto N = std::make_shared<long long>(8);
    auto beta = std::make_shared<double>(0.25);
    auto h = std::make_shared<double>(0.0);
    auto radius = std::make_shared<double>(16.0);
    auto alpha = std::make_shared<double>(1.5);
    exact->add_option("--d", *d, "dimension");
    exact->add_option("--N", *N, "length");
    exact->add_option("--beta", *beta, "coupling");
    exact->add_option("--field-h", *h, "external field");
    exact->add_option("--radius", *radius, "environment radius");
    exact->add_option("--alpha", *alpha, "tail exponent");
    exact->callback([&, d, N, beta, h, radius, alpha] {
      guard([&]() -> int {
        const auto environment =
            ndpoly::env::LatticeEnvironment::dense(*d, *radius, *alpha, seed);
        const auto res = ndpoly::polymer::partition_exact(
            ndpoly::polymer::EnvView::of(environment), *N, *beta, *h, *d);
        std::cout << "logZ = " << io::format_double(res.logZ) << " (exact)\n";
        return 0;
      });
    });

    auto* mc = poly_cmd->add_subcommand("mc", "Monte Carlo partition function");
    auto md = std::make_shared<int>(2);
    auto mN = std::make_shared<long long>(1024);
    auto mbeta = std::make_shared<double>(0.05);
    auto mh = std::make_shared<double>(0.0);
    auto malpha = std::make_shared<double>(1.5);
    auto mreps = std::make_shared<long long>(20000);
    auto mmax = std::make_shared<double>(0.0);
    mc->add_option("--d", *md, "dimension");
    mc->add_option("--N", *mN, "length");
    mc->add_option("--beta", *mbeta, "coupling");
    mc->add_option("--field-h", *mh, "external field");
    mc->add_option("--alpha", *malpha, "tail exponent");
    mc->add_option("--reps", *mreps, "replicas");
    mc->add_option("--restrict-max", *mmax, "keep only paths with M_N <= this (0 = off)");
    mc->callback([&, md, mN, mbeta, mh, malpha, mreps, mmax] {
      guard([&]() -> int {
        RunContext ctx("polymer mc", seed);
        ctx.log_path = log_path;
        ctx.param("d", static_cast<long long>(*md));
        ctx.param("N", *mN);
        ctx.param("beta", *mbeta);
        ctx.param("h", *mh);
        ctx.param("alpha", *malpha);
        ctx.param("reps", *mreps);
        ctx.param("restrict_max", *mmax);
        const auto environment = ndpoly::env::LatticeEnvironment::lazy(
            *md, static_cast<double>(*mN), *malpha, seed);
        ndpoly::polymer::Restriction restr;
        if (*mmax > 0.0) {
          restr.type = ndpoly::polymer::Restriction::Type::max_le;
          restr.a = *mmax;
        }
        const auto res = ndpoly::polymer::partition_mc(
            ndpoly::polymer::EnvView::of(environment), *mN, *mbeta, *mh, *md,
            static_cast<std::uint64_t>(*mreps), seed, restr);
        std::cout << "logZ = " << io::format_double(res.logZ)
                  << "  rel stderr = " << io::format_double(res.rel_stderr)
                  << "  ESS = " << io::format_double(res.ess)
                  << "  top share = " << io::format_double(res.top_weight_share) << "\n";
        ctx.diag("ess", io::format_double(res.ess));
        ctx.flag_diag("heavy_tail_warning", res.heavy_tail_warning);
        return ctx.finish();
      });
    });

    auto* rstat = poly_cmd->add_subcommand("region-stat", "rescaled log partition function");
    auto rd = std::make_shared<int>(2);
    auto ralpha = std::make_shared<double>(1.5);
    auto rgamma = std::make_shared<double>(0.5);
    auto rbeta_hat = std::make_shared<double>(1.0);
    auto rN = std::make_shared<long long>(4096);
    auto rreps = std::make_shared<long long>(20000);
    auto rvariant = std::make_shared<std::string>("auto");
    rstat->add_option("--d", *rd, "dimension");
    rstat->add_option("--alpha", *ralpha, "tail exponent");
    rstat->add_option("--gamma", *rgamma, "coupling decay");
    rstat->add_option("--beta-hat", *rbeta_hat, "coupling amplitude");
    rstat->add_option("--N", *rN, "length");
    rstat->add_option("--reps", *rreps, "replicas");
    rstat->add_option("--variant", *rvariant, "auto | gaussian | chi | w");
    rstat->callback([&, rd, ralpha, rgamma, rbeta_hat, rN, rreps, rvariant] {
      guard([&]() -> int {
        RunContext ctx("polymer region-stat", seed);
        ctx.log_path = log_path;
        ctx.param("d", static_cast<long long>(*rd));
        ctx.param("alpha", *ralpha);
        ctx.param("gamma", *rgamma);
        ctx.param("beta_hat", *rbeta_hat);
        ctx.param("N", *rN);
        ctx.param("reps", *rreps);
        ctx.param("variant", *rvariant);
        ndpoly::model::ModelParams p;
        p.d = *rd;
        p.alpha = *ralpha;
        p.gamma = *rgamma;
        p.beta_hat = *rbeta_hat;
        if (p.alpha > 1.0) p.mu = ndpoly::env::pareto_mean(p.alpha);
        const auto environment = ndpoly::env::LatticeEnvironment::lazy(
            p.d, static_cast<double>(*rN), p.alpha, seed);
        const auto view = ndpoly::polymer::EnvView::of(environment);
        const auto region = ndpoly::model::classify_regime(p);
        ndpoly::polymer::RegionStatistic rs;
        if (region == ndpoly::model::Region::A || region == ndpoly::model::Region::boundary_AB) {
          rs = ndpoly::polymer::region_A_statistic(p, *rN, view,
                                                   static_cast<std::uint64_t>(*rreps), seed);
        } else if (region == ndpoly::model::Region::B) {
          rs = ndpoly::polymer::region_B_statistic(p, *rN, view,
                                                   static_cast<std::uint64_t>(*rreps), seed);
        } else {
          auto variant = ndpoly::polymer::RegionCVariant::w;
          if (*rvariant == "gaussian") variant = ndpoly::polymer::RegionCVariant::gaussian;
          if (*rvariant == "chi") variant = ndpoly::polymer::RegionCVariant::chi;
          rs = ndpoly::polymer::region_C_statistic(p, *rN, view,
                                                   static_cast<std::uint64_t>(*rreps), seed,
                                                   variant);
        }
        std::cout << "region " << to_string(region)
                  << "  statistic = " << io::format_double(rs.value)
                  << "  ESS = " << io::format_double(rs.partition.ess) << "\n";
        ctx.diag("ess", io::format_double(rs.partition.ess));
        ctx.flag_diag("heavy_tail_warning", rs.partition.heavy_tail_warning);
        return ctx.finish();
      });
    });

    auto* fluct = poly_cmd->add_subcommand("fluct", "transversal fluctuation exponent");
    auto fd = std::make_shared<int>(2);
    auto falpha = std::make_shared<double>(1.5);
    auto fgamma = std::make_shared<double>(0.5);
    auto fbeta_hat = std::make_shared<double>(0.12);
    auto fn_lo = std::make_shared<long long>(2048);
    auto fn_hi = std::make_shared<long long>(16384);
    auto fenvs = std::make_shared<long long>(6);
    auto freps = std::make_shared<long long>(20000);
    fluct->add_option("--d", *fd, "dimension");
    fluct->add_option("--alpha", *falpha, "tail exponent");
    fluct->add_option("--gamma", *fgamma, "coupling decay");
    fluct->add_option("--beta-hat", *fbeta_hat, "coupling amplitude");
    fluct->add_option("--n-min", *fn_lo, "smallest N (doubling grid)");
    fluct->add_option("--n-max", *fn_hi, "largest N");
    fluct->add_option("--envs", *fenvs, "environments");
    fluct->add_option("--reps", *freps, "replicas per cell");
    fluct->callback([&, fd, falpha, fgamma, fbeta_hat, fn_lo, fn_hi, fenvs, freps] {
      guard([&]() -> int {
        RunContext ctx("polymer fluct", seed);
        ctx.log_path = log_path;
        ctx.param("d", static_cast<long long>(*fd));
        ctx.param("alpha", *falpha);
        ctx.param("gamma", *fgamma);
        ctx.param("beta_hat", *fbeta_hat);
        ctx.param("n_min", *fn_lo);
        ctx.param("n_max", *fn_hi);
        ctx.param("envs", *fenvs);
        ctx.param("reps", *freps);
        ndpoly::model::ModelParams p;
        p.d = *fd;
        p.alpha = *falpha;
        p.gamma = *fgamma;
        p.beta_hat = *fbeta_hat;
        if (p.alpha > 1.0) p.mu = ndpoly::env::pareto_mean(p.alpha);
        const auto grid = doubling_grid(*fn_lo, *fn_hi);
        const auto rec = ndpoly::polymer::fluctuation_exponent(
            p, grid, static_cast<int>(*fenvs), static_cast<std::uint64_t>(*freps), 0.5, seed);
        const std::string path = out_path.empty() ? "polymer_fluct.csv" : out_path;
        io::CsvWriter csv(path, {"N", "median_m", "band_lo", "band_hi", "min_ess", "slope",
                                 "slope_ci_lo", "slope_ci_hi"});
        for (std::size_t i = 0; i < grid.size(); ++i) {
          csv.row_values({static_cast<double>(grid[i]), rec.median_m[i], rec.band_lo[i],
                          rec.band_hi[i], rec.min_ess[i], rec.slope, rec.slope_ci_lo,
                          rec.slope_ci_hi});
        }
        std::cout << "slope = " << io::format_double(rec.slope) << "  CI ["
                  << io::format_double(rec.slope_ci_lo) << ", "
                  << io::format_double(rec.slope_ci_hi) << "]\n";
        ctx.outputs.push_back(path);
        ctx.flag_diag("low_ess", rec.low_ess_flag);
        return ctx.finish();
      });
    });
  }

  // ---------------- limits ----------------
  auto* lim_cmd = app.add_subcommand("limits", "limit random variables");
  {
    auto* chi = lim_cmd->add_subcommand("chi", "Green-weighted environment sum samples");
    auto ca = std::make_shared<double>(2.2);
    auto cd = std::make_shared<int>(5);
    auto cr = std::make_shared<double>(10.0);
    auto cn = std::make_shared<long long>(1000);
    chi->add_option("--alpha", *ca, "tail exponent");
    chi->add_option("--d", *cd, "dimension (>= 5)");
    chi->add_option("--r-cut", *cr, "spatial truncation radius");
    chi->add_option("--n", *cn, "samples");
    chi->callback([&, ca, cd, cr, cn] {
      guard([&]() -> int {
        RunContext ctx("limits chi", seed);
        ctx.log_path = log_path;
        ctx.param("alpha", *ca);
        ctx.param("d", static_cast<long long>(*cd));
        ctx.param("r_cut", *cr);
        ctx.param("n", *cn);
        const auto samples = ndpoly::limits::chi_estimate(
            *ca, *cd, ndpoly::env::pareto_mean(*ca), *cr, static_cast<std::size_t>(*cn), seed);
        const std::string path = out_path.empty() ? "limits_chi.csv" : out_path;
        io::CsvWriter csv(path, {"sample", "value", "tail_bound"});
        for (std::size_t i = 0; i < samples.size(); ++i)
          csv.row_values({static_cast<double>(i), samples[i].value, samples[i].tail_bound});
        ctx.outputs.push_back(path);
        return ctx.finish();
      });
    });

    auto* wcmd = lim_cmd->add_subcommand("w", "compensated heavy-tail integral samples");
    auto wa = std::make_shared<double>(1.6);
    auto wd = std::make_shared<int>(3);
    auto wbeta = std::make_shared<double>(0.0);
    auto wK = std::make_shared<double>(6.0);
    auto weps = std::make_shared<double>(0.0);
    auto wn = std::make_shared<long long>(1000);
    wcmd->add_option("--alpha", *wa, "tail exponent");
    wcmd->add_option("--d", *wd, "dimension");
    wcmd->add_option("--beta", *wbeta, "coupling (0 allowed)");
    wcmd->add_option("--K", *wK, "spatial cutoff");
    wcmd->add_option("--eps", *weps, "weight floor (0 = default)");
    wcmd->add_option("--n", *wn, "samples");
    wcmd->callback([&, wa, wd, wbeta, wK, weps, wn] {
      guard([&]() -> int {
        RunContext ctx("limits w", seed);
        ctx.log_path = log_path;
        ctx.param("alpha", *wa);
        ctx.param("d", static_cast<long long>(*wd));
        ctx.param("beta", *wbeta);
        ctx.param("K", *wK);
        ctx.param("eps", *weps);
        ctx.param("n", *wn);
        ndpoly::limits::CompensatedIntegralSpec spec;
        spec.alpha = *wa;
        spec.d = *wd;
        spec.beta = *wbeta;
        spec.K = *wK;
        spec.eps_w = *weps;
        const std::string path = out_path.empty() ? "limits_w.csv" : out_path;
        io::CsvWriter csv(path, {"sample", "value", "spatial_channel", "weight_channel",
                                 "points", "overflowed"});
        bool any_overflow = false;
        for (long long i = 0; i < *wn; ++i) {
          const auto s =
              ndpoly::limits::w_sample(spec, ndpoly::rng::derive_key(seed, "w", i));
          csv.row_values({static_cast<double>(i), s.value, s.spatial_channel, s.weight_channel,
                          static_cast<double>(s.points), s.overflowed ? 1.0 : 0.0});
          any_overflow = any_overflow || s.overflowed;
        }
        ctx.outputs.push_back(path);
        ctx.diag("overflowed_samples", any_overflow ? "some" : "none");
        return ctx.finish();
      });
    });
  }

  // ---------------- verify ----------------
  auto* verify_cmd = app.add_subcommand("verify", "acceptance checks");
  {
    auto* fast = verify_cmd->add_subcommand("fast", "quick release gate");
    fast->callback([&] {
      const auto results = ndpoly::accept::run_suite(true, std::cout);
      for (const auto& r : results)
        if (!r.pass) ret = kExitDiagnostic;
    });
    auto* full = verify_cmd->add_subcommand("full", "every acceptance criterion");
    full->callback([&] {
      const auto results = ndpoly::accept::run_suite(false, std::cout);
      for (const auto& r : results)
        if (!r.pass) ret = kExitDiagnostic;
    });
    verify_cmd->require_subcommand(1);
  }

  CLI11_PARSE(app, argc, argv);
  return ret;
}
