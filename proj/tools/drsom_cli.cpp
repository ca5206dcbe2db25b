// Command-line harness: instance generation, single solves, and benchmark
// grids over the built-in problem families.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "drsom/drsom.hpp"

namespace {

using drsom::json;
using drsom::Objective;
using drsom::RunReport;
using drsom::Vector;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (const char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split_list(s)) out.push_back(std::stod(tok));
  return out;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& tok : split_list(s)) out.push_back(std::stoi(tok));
  return out;
}

struct SolveOptions {
  std::string solver = "drsom";
  std::string mode = "rf";
  std::string model = "interp";
  std::string corrector = "off";
  std::string x0 = "zero";
  double tol = 1e-5;
  int max_iter = 10000;
  std::uint64_t seed = 0;
  std::uint64_t x0_seed = 0;
  double delta0 = 1.0;
  double interp_scale = 1.0;
  int interp_samples = 3;
  int period = 5;
  double c_bound = 1e2;
  int j_max = 10;
  double time_limit = 0.0;
  int memory = 10;
  std::string line_search = "wolfe";
};

drsom::SolverConfig make_solver_config(const SolveOptions& opt) {
  drsom::SolverConfig cfg;
  if (opt.mode == "tr") {
    cfg.mode = drsom::Mode::kTrustRadius;
  } else if (opt.mode == "rf") {
    cfg.mode = drsom::Mode::kRadiusFree;
  } else if (opt.mode == "fixed") {
    cfg.mode = drsom::Mode::kFixedRadius;
  } else {
    throw CLI::ValidationError("--mode must be one of tr|rf|fixed");
  }
  if (opt.model == "hvp") {
    cfg.model.tag = drsom::ModelMethodTag::kHvpExact;
  } else if (opt.model == "fd") {
    cfg.model.tag = drsom::ModelMethodTag::kHvpFd;
  } else if (opt.model == "interp") {
    cfg.model.tag = drsom::ModelMethodTag::kInterpolation;
  } else {
    throw CLI::ValidationError("--model must be one of hvp|fd|interp");
  }
  cfg.model.interp_scale = opt.interp_scale;
  cfg.model.interp_samples = opt.interp_samples;
  cfg.tol_g = opt.tol;
  cfg.max_iter = opt.max_iter;
  cfg.delta0 = opt.delta0;
  cfg.rng_seed = opt.seed;
  cfg.time_limit_sec = opt.time_limit;
  if (opt.corrector == "periodic") {
    cfg.corrector.enabled = true;
    cfg.corrector.period = opt.period;
    cfg.corrector.c_bound = opt.c_bound;
    cfg.corrector.j_max = opt.j_max;
  } else if (opt.corrector != "off") {
    throw CLI::ValidationError("--corrector must be off|periodic");
  }
  return cfg;
}

drsom::BaselineConfig make_baseline_config(const SolveOptions& opt) {
  drsom::BaselineConfig cfg;
  cfg.tol_g = opt.tol;
  cfg.max_iter = opt.max_iter;
  cfg.time_limit_sec = opt.time_limit;
  cfg.memory = opt.memory;
  cfg.ls.kind = opt.line_search == "armijo"
                    ? drsom::LineSearchKind::kArmijoBacktracking
                    : drsom::LineSearchKind::kStrongWolfe;
  return cfg;
}

json options_to_json(const SolveOptions& opt) {
  json j;
  j["solver"] = opt.solver;
  j["mode"] = opt.mode;
  j["model"] = opt.model;
  j["corrector"] = opt.corrector;
  j["x0"] = opt.x0;
  j["tol"] = opt.tol;
  j["max_iter"] = opt.max_iter;
  j["seed"] = opt.seed;
  j["x0_seed"] = opt.x0_seed;
  j["delta0"] = opt.delta0;
  j["interp_scale"] = opt.interp_scale;
  j["interp_samples"] = opt.interp_samples;
  j["period"] = opt.period;
  j["c_bound"] = opt.c_bound;
  j["j_max"] = opt.j_max;
  j["memory"] = opt.memory;
  j["line_search"] = opt.line_search;
  return j;
}

Vector make_x0(const SolveOptions& opt, int dim) {
  if (opt.x0 == "zero") return Vector::Zero(dim);
  if (opt.x0 == "ones") return Vector::Ones(dim);
  if (opt.x0 == "random") {
    std::mt19937_64 rng(opt.x0_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x(i) = normal(rng);
    return x;
  }
  throw CLI::ValidationError("--x0 must be zero|ones|random");
}

Objective objective_from_instance(const json& inst) {
  const std::string kind = inst.at("kind").get<std::string>();
  if (kind == "lp") return drsom::lp_objective(drsom::lp_from_json(inst));
  if (kind == "snl") return drsom::snl_objective(drsom::snl_from_json(inst));
  throw std::runtime_error("unknown instance kind: " + kind);
}

RunReport run_solver(const SolveOptions& opt, const Objective& obj,
                     const Vector& x0) {
  if (opt.solver == "drsom") {
    return drsom::minimize(obj, x0, make_solver_config(opt));
  }
  const drsom::BaselineConfig cfg = make_baseline_config(opt);
  if (opt.solver == "gd") return drsom::gd_minimize(obj, x0, cfg);
  if (opt.solver == "cg") return drsom::cg_minimize(obj, x0, cfg);
  if (opt.solver == "lbfgs") return drsom::lbfgs_minimize(obj, x0, cfg);
  throw CLI::ValidationError("--solver must be drsom|gd|cg|lbfgs");
}

// Flags win over config-file values: only options the user did not pass on
// the command line are replaced by file entries.
void apply_config_file(const std::string& path, CLI::App* cmd,
                       SolveOptions* opt) {
  const json j = json::parse(drsom::read_text_file(path));
  auto maybe = [&](const char* flag, auto* field) {
    using T = std::remove_pointer_t<decltype(field)>;
    const CLI::Option* o = cmd->get_option(flag);
    const std::string key = std::string(flag).substr(2);
    if (o != nullptr && o->count() == 0 && j.contains(key)) {
      *field = j.at(key).get<T>();
    }
  };
  maybe("--solver", &opt->solver);
  maybe("--mode", &opt->mode);
  maybe("--model", &opt->model);
  maybe("--corrector", &opt->corrector);
  maybe("--x0", &opt->x0);
  maybe("--tol", &opt->tol);
  maybe("--max-iter", &opt->max_iter);
  maybe("--seed", &opt->seed);
  maybe("--delta0", &opt->delta0);
  maybe("--interp-scale", &opt->interp_scale);
  maybe("--period", &opt->period);
  maybe("--cbound", &opt->c_bound);
  maybe("--jmax", &opt->j_max);
  maybe("--memory", &opt->memory);
  maybe("--line-search", &opt->line_search);
}

void add_solve_options(CLI::App* cmd, SolveOptions* opt) {
  cmd->add_option("--solver", opt->solver, "drsom|gd|cg|lbfgs");
  cmd->add_option("--mode", opt->mode, "tr|rf|fixed");
  cmd->add_option("--model", opt->model, "hvp|fd|interp");
  cmd->add_option("--corrector", opt->corrector, "off|periodic");
  cmd->add_option("--x0", opt->x0, "zero|ones|random");
  cmd->add_option("--x0-seed", opt->x0_seed, "seed for --x0 random");
  cmd->add_option("--tol", opt->tol, "gradient norm tolerance");
  cmd->add_option("--max-iter", opt->max_iter, "iteration budget");
  cmd->add_option("--seed", opt->seed, "solver RNG seed (interpolation)");
  cmd->add_option("--delta0", opt->delta0, "initial trust radius");
  cmd->add_option("--interp-scale", opt->interp_scale,
                  "interpolation sample radius");
  cmd->add_option("--interp-samples", opt->interp_samples,
                  "interpolation sample count (>= 3)");
  cmd->add_option("--period", opt->period, "corrector period");
  cmd->add_option("--cbound", opt->c_bound, "corrector residual constant");
  cmd->add_option("--jmax", opt->j_max, "corrector subspace cap");
  cmd->add_option("--time-limit", opt->time_limit,
                  "per-run time limit in seconds (0 = off)");
  cmd->add_option("--memory", opt->memory, "L-BFGS history length");
  cmd->add_option("--line-search", opt->line_search, "wolfe|armijo");
}

struct BenchRow {
  std::string family;
  std::string params;
  std::string solver;
  std::uint64_t seed = 0;
  RunReport report;
};

double shifted_geomean(const std::vector<double>& xs, double shift) {
  if (xs.empty()) return 0.0;
  double acc = 0.0;
  for (const double x : xs) acc += std::log(x + shift);
  return std::exp(acc / xs.size()) - shift;
}

int cmd_bench(const std::string& family, const std::vector<int>& ns,
              const std::vector<int>& ms, const std::vector<double>& rs,
              const std::vector<double>& rds, const std::vector<double>& nfs,
              double p, double eps_smooth, const std::string& solvers_csv,
              const std::string& seeds_csv, const SolveOptions& base_opt,
              const std::string& out_prefix, int jobs) {
  const std::vector<std::string> solvers = split_list(solvers_csv);
  const std::vector<int> seeds = split_ints(seeds_csv);
  if (solvers.empty()) throw CLI::ValidationError("--solvers must be nonempty");
  if (seeds.empty()) throw CLI::ValidationError("--seeds must be nonempty");
  if (ns.empty() || ms.empty()) {
    throw CLI::ValidationError("grid must be nonempty");
  }

  struct Job {
    std::string params;
    json instance;
    std::string solver;
    std::uint64_t seed;
  };
  std::vector<Job> jobs_list;

  if (family == "lp") {
    if (rs.empty()) throw CLI::ValidationError("--r grid must be nonempty");
    for (const int n : ns) {
      for (const int m : ms) {
        for (const double r : rs) {
          for (const int seed : seeds) {
            char params[128];
            std::snprintf(params, sizeof(params), "n=%d;m=%d;r=%g", n, m, r);
            const auto inst = drsom::lp_generate(n, m, r, p, eps_smooth,
                                                 static_cast<std::uint64_t>(seed));
            const json ij = drsom::to_json(inst);
            for (const auto& solver : solvers) {
              jobs_list.push_back({params, ij, solver,
                                   static_cast<std::uint64_t>(seed)});
            }
          }
        }
      }
    }
  } else if (family == "snl") {
    if (rds.empty() || nfs.empty()) {
      throw CLI::ValidationError("--rd/--nf grids must be nonempty");
    }
    for (const int n : ns) {
      for (const int m : ms) {
        for (const double rd : rds) {
          for (const double nf : nfs) {
            for (const int seed : seeds) {
              char params[128];
              std::snprintf(params, sizeof(params), "n=%d;m=%d;rd=%g;nf=%g",
                            n, m, rd, nf);
              const auto inst = drsom::snl_generate(
                  n, m, rd, nf, static_cast<std::uint64_t>(seed));
              const json ij = drsom::to_json(inst);
              for (const auto& solver : solvers) {
                jobs_list.push_back({params, ij, solver,
                                     static_cast<std::uint64_t>(seed)});
              }
            }
          }
        }
      }
    }
  } else {
    throw CLI::ValidationError("--family must be lp|snl");
  }

  std::vector<BenchRow> rows(jobs_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs_list.size()) return;
      const Job& job = jobs_list[i];
      SolveOptions opt = base_opt;
      opt.solver = job.solver;
      opt.seed = job.seed;
      const Objective obj = objective_from_instance(job.instance);
      const Vector x0 = make_x0(opt, obj.dim());
      BenchRow row;
      row.family = family;
      row.params = job.params;
      row.solver = job.solver;
      row.seed = job.seed;
      row.report = run_solver(opt, obj, x0);
      rows[i] = std::move(row);
    }
  };
  const int nthreads = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.params, a.solver, a.seed) <
           std::tie(b.params, b.solver, b.seed);
  });

  // Per-run CSV.
  std::string csv =
      "family,params,solver,seed,status,iterations,f_final,gnorm_final,"
      "n_f,n_g,n_hvp,wall_seconds\n";
  char buf[512];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%s,%s,%llu,%s,%d,%.17g,%.17g,%ld,%ld,%ld,%.6f\n",
                  row.family.c_str(), row.params.c_str(), row.solver.c_str(),
                  static_cast<unsigned long long>(row.seed),
                  drsom::to_string(row.report.status), row.report.iterations,
                  row.report.f_final, row.report.gnorm_final,
                  row.report.evals.n_f, row.report.evals.n_g,
                  row.report.evals.n_hvp, row.report.wall_seconds);
    csv += buf;
  }

  // Aggregates per (params, solver) cell: arithmetic and shifted geometric
  // means (shift: 50 iterations, 1 second).
  json aggregates = json::array();
  std::string agg_csv =
      "family,params,solver,runs,converged,mean_iterations,sgm_iterations,"
      "mean_seconds,sgm_seconds\n";
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t jend = i;
    std::vector<double> iters, secs;
    int converged = 0;
    while (jend < rows.size() && rows[jend].params == rows[i].params &&
           rows[jend].solver == rows[i].solver) {
      iters.push_back(rows[jend].report.iterations);
      secs.push_back(rows[jend].report.wall_seconds);
      if (rows[jend].report.status == drsom::Status::kConverged) ++converged;
      ++jend;
    }
    const double mean_it =
        std::accumulate(iters.begin(), iters.end(), 0.0) / iters.size();
    const double mean_s =
        std::accumulate(secs.begin(), secs.end(), 0.0) / secs.size();
    const double sgm_it = shifted_geomean(iters, 50.0);
    const double sgm_s = shifted_geomean(secs, 1.0);
    json cell;
    cell["family"] = family;
    cell["params"] = rows[i].params;
    cell["solver"] = rows[i].solver;
    cell["runs"] = static_cast<int>(iters.size());
    cell["converged"] = converged;
    cell["mean_iterations"] = mean_it;
    cell["sgm_iterations"] = sgm_it;
    cell["mean_seconds"] = mean_s;
    cell["sgm_seconds"] = sgm_s;
    aggregates.push_back(cell);
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%d,%d,%.6g,%.6g,%.6g,%.6g\n",
                  family.c_str(), rows[i].params.c_str(),
                  rows[i].solver.c_str(), static_cast<int>(iters.size()),
                  converged, mean_it, sgm_it, mean_s, sgm_s);
    agg_csv += buf;
    i = jend;
  }

  json out;
  out["family"] = family;
  out["solvers"] = solvers;
  out["seeds"] = seeds;
  out["config"] = options_to_json(base_opt);
  out["line_search_note"] =
      "baselines use strong Wolfe (or Armijo) line search";
  json runs = json::array();
  for (const auto& row : rows) {
    json r = drsom::summary_to_json(row.report, "", "");
    r["family"] = row.family;
    r["params"] = row.params;
    r["seed"] = row.seed;
    runs.push_back(r);
  }
  out["runs"] = runs;
  out["aggregates"] = aggregates;

  drsom::write_text_file(out_prefix + ".csv", csv);
  drsom::write_text_file(out_prefix + "_agg.csv", agg_csv);
  drsom::write_text_file(out_prefix + ".json", out.dump(2) + "\n");
  std::cout << "wrote " << out_prefix << ".csv, " << out_prefix
            << "_agg.csv, " << out_prefix << ".json (" << rows.size()
            << " runs)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DRSOM optimization harness"};
  app.require_subcommand(1);

  // ---- gen ----------------------------------------------------------------
  CLI::App* gen = app.add_subcommand("gen", "generate a problem instance");
  gen->require_subcommand(1);

  int lp_n = 300, lp_m = 100;
  double lp_r = 0.15, lp_p = 0.5, lp_eps = 0.1;
  std::uint64_t lp_seed = 0;
  std::string lp_out = "instance.json";
  CLI::App* gen_lp = gen->add_subcommand("lp", "L2-Lp least squares");
  gen_lp->add_option("--n", lp_n, "rows of A");
  gen_lp->add_option("--m", lp_m, "cols of A (problem dimension)");
  gen_lp->add_option("--r", lp_r, "sparsity (fraction of nonzeros)");
  gen_lp->add_option("--p", lp_p, "penalty exponent in (0,1)");
  gen_lp->add_option("--eps", lp_eps, "smoothing parameter");
  gen_lp->add_option("--seed", lp_seed, "generator seed");
  gen_lp->add_option("--out", lp_out, "output file");

  int snl_n = 80, snl_m = 5;
  double snl_rd = 0.5, snl_nf = 0.05;
  std::uint64_t snl_seed = 0;
  std::string snl_out = "instance.json";
  CLI::App* gen_snl = gen->add_subcommand("snl", "sensor network localization");
  gen_snl->add_option("--n", snl_n, "total points");
  gen_snl->add_option("--m", snl_m, "anchors");
  gen_snl->add_option("--rd", snl_rd, "radio range");
  gen_snl->add_option("--nf", snl_nf, "distance noise factor");
  gen_snl->add_option("--seed", snl_seed, "generator seed");
  gen_snl->add_option("--out", snl_out, "output file");

  // ---- solve --------------------------------------------------------------
  CLI::App* solve = app.add_subcommand("solve", "run one solver on one instance");
  std::string solve_instance;
  std::string out_trace, out_summary, config_file;
  SolveOptions opt;
  solve->add_option("--instance", solve_instance, "instance JSON file")
      ->required();
  solve->add_option("--out-trace", out_trace, "trace CSV output");
  solve->add_option("--out-summary", out_summary, "summary JSON output");
  solve->add_option("--config", config_file,
                    "JSON config file (explicit flags win)");
  add_solve_options(solve, &opt);

  // ---- bench --------------------------------------------------------------
  CLI::App* bench = app.add_subcommand("bench", "run a benchmark grid");
  std::string family = "lp";
  std::string ns_csv = "300", ms_csv = "100", rs_csv = "0.15";
  std::string rds_csv = "0.5", nfs_csv = "0.05";
  double bench_p = 0.5, bench_eps = 0.1;
  std::string solvers_csv = "drsom,gd";
  std::string seeds_csv = "1,2,3";
  std::string out_prefix = "bench";
  int jobs = 1;
  SolveOptions bench_opt;
  bench->add_option("--family", family, "lp|snl");
  bench->add_option("--n", ns_csv, "comma list of n values");
  bench->add_option("--m", ms_csv, "comma list of m values");
  bench->add_option("--r", rs_csv, "comma list of sparsities (lp)");
  bench->add_option("--rd", rds_csv, "comma list of radio ranges (snl)");
  bench->add_option("--nf", nfs_csv, "comma list of noise factors (snl)");
  bench->add_option("--p", bench_p, "lp penalty exponent");
  bench->add_option("--eps", bench_eps, "lp smoothing parameter");
  bench->add_option("--solvers", solvers_csv, "comma list of solvers");
  bench->add_option("--seeds", seeds_csv, "comma list of seeds");
  bench->add_option("--out", out_prefix, "output file prefix");
  bench->add_option("--jobs", jobs, "parallel worker threads");
  add_solve_options(bench, &bench_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_lp->parsed()) {
      const auto inst = drsom::lp_generate(lp_n, lp_m, lp_r, lp_p, lp_eps,
                                           lp_seed);
      const json j = drsom::to_json(inst);
      drsom::write_text_file(lp_out, j.dump() + "\n");
      std::cout << "instance " << lp_out << " digest "
                << drsom::instance_digest(j) << "\n";
      return 0;
    }
    if (gen_snl->parsed()) {
      const auto inst =
          drsom::snl_generate(snl_n, snl_m, snl_rd, snl_nf, snl_seed);
      const json j = drsom::to_json(inst);
      drsom::write_text_file(snl_out, j.dump() + "\n");
      std::cout << "instance " << snl_out << " digest "
                << drsom::instance_digest(j) << "\n";
      return 0;
    }
    if (solve->parsed()) {
      if (!config_file.empty()) apply_config_file(config_file, solve, &opt);
      const json inst = drsom::load_instance_json(solve_instance);
      const Objective obj = objective_from_instance(inst);
      const Vector x0 = make_x0(opt, obj.dim());
      const RunReport report = run_solver(opt, obj, x0);
      const std::string cfg_digest = drsom::digest(options_to_json(opt).dump());
      const std::string inst_digest = drsom::instance_digest(inst);
      if (!out_trace.empty()) {
        drsom::write_text_file(out_trace, drsom::trace_to_csv(report.trace));
      }
      if (!out_summary.empty()) {
        drsom::write_text_file(
            out_summary,
            drsom::summary_to_json(report, cfg_digest, inst_digest).dump(2) +
                "\n");
      }
      std::cout << "solver=" << report.solver
                << " status=" << drsom::to_string(report.status)
                << " iterations=" << report.iterations
                << " f_final=" << report.f_final
                << " gnorm=" << report.gnorm_final << "\n";
      return report.status == drsom::Status::kConverged ? 0 : 1;
    }
    if (bench->parsed()) {
      return cmd_bench(family, split_ints(ns_csv), split_ints(ms_csv),
                       split_doubles(rs_csv), split_doubles(rds_csv),
                       split_doubles(nfs_csv), bench_p, bench_eps, solvers_csv,
                       seeds_csv, bench_opt, out_prefix, jobs);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
