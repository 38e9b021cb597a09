#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "sgdsat/audits.hpp"
#include "sgdsat/config.hpp"
#include "sgdsat/error.hpp"
#include "sgdsat/harness.hpp"
#include "sgdsat/parallel.hpp"
#include "sgdsat/report.hpp"
#include "sgdsat/testproblems.hpp"

namespace {

using nlohmann::json;

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  bool full = false;
  bool override_adm = false;
  int threads = 0;
  bool dry_run = false;
};

int print_error(const std::string& code, const std::string& msg) {
  std::cerr << json{{"error", code}, {"message", msg}}.dump() << '\n';
  return 2;
}

// Accepts a bare config or a manifest written by a previous invocation.
sgdsat::ExperimentConfig load(const Common& c) {
  std::ifstream in(c.config);
  if (!in) sgdsat::fail("bad_config", "cannot open config file '" + c.config + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    sgdsat::fail("bad_config", "'" + c.config + "' is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("environment") && j.contains("config")) j = j.at("config");
  sgdsat::ExperimentConfig cfg = sgdsat::parse_config(j);
  if (c.seed) cfg.base_seed = *c.seed;
  if (c.threads > 0) cfg.threads = c.threads;
  if (c.full) {
    std::cerr << "warning: --full uses n = 1000 and R = 100; expect long runtimes\n";
    sgdsat::apply_full_scale(cfg);
  }
  return cfg;
}

void add_experiment_flags(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Experiment config (JSON) or a saved manifest")->required();
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--seed", c.seed, "Override the base seed");
  app->add_flag("--full", c.full, "Use n = 1000 and R = 100");
  app->add_flag("--override-admissibility", c.override_adm, "Run schedules that violate the stepsize constraints");
  app->add_option("--threads", c.threads, "Worker threads (default: SGDSAT_THREADS or all cores)");
  app->add_flag("--dry-run", c.dry_run, "Validate the config and write the manifest only");
}

void write_manifest(const Common& c, const std::string& command, const sgdsat::ExperimentConfig& cfg,
                    std::vector<std::string> outputs) {
  outputs.push_back("manifest.json");
  json conf = sgdsat::config_to_json(cfg);
  sgdsat::write_output(c.out, "manifest.json",
                       sgdsat::dump_json(sgdsat::make_manifest(command, conf, outputs)));
}

int cmd_run(const Common& c) {
  const auto cfg = load(c);
  if (c.dry_run) {
    write_manifest(c, "run", cfg, {});
    return 0;
  }
  const auto rows = sgdsat::run_comparison(cfg, c.override_adm);
  const std::string csv = sgdsat::summaries_csv(rows);
  sgdsat::write_output(c.out, "summary.csv", csv);
  sgdsat::write_output(c.out, "summary.json", sgdsat::dump_json(sgdsat::summaries_to_json(rows)));
  write_manifest(c, "run", cfg, {"summary.csv", "summary.json"});
  std::cout << csv;
  return 0;
}

int cmd_traj(const Common& c) {
  const auto cfg = load(c);
  if (c.dry_run) {
    write_manifest(c, "traj", cfg, {});
    return 0;
  }
  const auto cells = sgdsat::run_cells(cfg, c.override_adm);
  std::vector<std::string> outputs;
  std::vector<sgdsat::RunSummary> rows;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string base = "traj_" + std::to_string(i);
    sgdsat::write_output(c.out, base + "_sgd.csv", sgdsat::sgd_trace_csv(cells[i].trace));
    sgdsat::write_output(c.out, base + "_lm.csv", sgdsat::landweber_trace_csv(cells[i].trace));
    outputs.push_back(base + "_sgd.csv");
    outputs.push_back(base + "_lm.csv");
    rows.push_back(cells[i].summary);
  }
  sgdsat::write_output(c.out, "summary.json", sgdsat::dump_json(sgdsat::summaries_to_json(rows)));
  outputs.push_back("summary.json");
  write_manifest(c, "traj", cfg, outputs);
  std::cout << sgdsat::summaries_csv(rows);
  return 0;
}

int cmd_rate(const Common& c) {
  const auto cfg = load(c);
  if (c.dry_run) {
    write_manifest(c, "rate", cfg, {});
    return 0;
  }
  const auto rates = sgdsat::rate_vs_noise(cfg, c.override_adm);
  json out = json::array();
  for (const auto& r : rates) {
    out.push_back({{"nu", r.nu},
                   {"schedule", r.schedule},
                   {"deltas", r.deltas},
                   {"e_stars", r.e_stars},
                   {"exponent", r.fit.slope},
                   {"exponent_stderr", r.fit.slope_stderr},
                   {"r2", r.fit.r2}});
  }
  sgdsat::write_output(c.out, "rate.json", sgdsat::dump_json(out));
  write_manifest(c, "rate", cfg, {"rate.json"});
  std::cout << sgdsat::dump_json(out);
  return 0;
}

int cmd_precond(const Common& c) {
  const auto cfg = load(c);
  if (c.dry_run) {
    write_manifest(c, "precond", cfg, {});
    return 0;
  }
  const auto pairs = sgdsat::preconditioning_study(cfg, c.override_adm);
  std::string csv = "nu,eps,c0,alpha,e_sgd_A,e_sgd_Atilde,rel_diff,k_sgd_A,k_sgd_Atilde,e_lm,k_lm,landweber_rel_diff\n";
  json arr = json::array();
  for (const auto& p : pairs) {
    using sgdsat::csv_number;
    csv += csv_number(p.plain.nu) + ',' + csv_number(p.plain.eps) + ',' + csv_number(p.plain.c0) + ',' +
           csv_number(p.plain.alpha) + ',' + csv_number(p.plain.e_sgd) + ',' + csv_number(p.preconditioned.e_sgd) +
           ',' + csv_number(p.rel_diff_e_sgd) + ',' + csv_number(p.plain.k_sgd) + ',' +
           csv_number(p.preconditioned.k_sgd) + ',' + csv_number(p.plain.e_lm) + ',' + std::to_string(p.plain.k_lm) +
           ',' + csv_number(p.landweber_max_rel_diff) + '\n';
    arr.push_back({{"plain", sgdsat::summary_to_json(p.plain)},
                   {"preconditioned", sgdsat::summary_to_json(p.preconditioned)},
                   {"rel_diff_e_sgd", p.rel_diff_e_sgd},
                   {"landweber_max_rel_diff", p.landweber_max_rel_diff}});
  }
  sgdsat::write_output(c.out, "precond.csv", csv);
  sgdsat::write_output(c.out, "precond.json", sgdsat::dump_json(arr));
  write_manifest(c, "precond", cfg, {"precond.csv", "precond.json"});
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SGD and Landweber regularization experiments and bound audits"};
  app.require_subcommand(1);

  std::string problem;
  int n = 0;
  std::optional<std::string> gen_out;
  auto* gen = app.add_subcommand("gen", "Write a test problem as CSV");
  gen->add_option("--problem", problem, "shaw, gravity or phillips")->required();
  gen->add_option("--n", n, "Number of nodes")->required();
  gen->add_option("--out", gen_out, "Output directory (default: stdout)");

  Common run_c, traj_c, rate_c, pre_c;
  add_experiment_flags(app.add_subcommand("run", "Table cells: SGD against Landweber"), run_c);
  add_experiment_flags(app.add_subcommand("traj", "Mean trajectories of every cell"), traj_c);
  add_experiment_flags(app.add_subcommand("rate", "Fitted exponent of the optimal error against the noise level"),
                       rate_c);
  add_experiment_flags(app.add_subcommand("precond", "Paired study of A against its preconditioned form"), pre_c);

  std::string suite = "all";
  sgdsat::AuditOptions ao;
  std::optional<std::string> vb_out;
  auto* vb = app.add_subcommand("verify-bounds", "Audit the lemma, decomposition and rate inequalities");
  vb->add_option("--suite", suite, "lemmas, decomposition, propositions, rate, witness or all");
  vb->add_option("--max-k", ao.max_k, "Largest k in enumerated audits (<= 12)");
  vb->add_option("--seed", ao.seed, "Seed for the random configurations");
  vb->add_option("--threads", ao.threads, "Worker threads");
  vb->add_option("--out", vb_out, "Also write audit.json into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return print_error("bad_arguments", e.what());
  }

  try {
    if (*gen) {
      const sgdsat::TestProblem p = sgdsat::make_problem(problem, n);
      const std::string csv = sgdsat::problem_csv(p);
      if (gen_out) {
        sgdsat::write_output(*gen_out, sgdsat::problem_name(p.kind) + "_" + std::to_string(n) + ".csv", csv);
      } else {
        std::cout << csv;
      }
      return 0;
    }
    if (*app.get_subcommand("run")) return cmd_run(run_c);
    if (*app.get_subcommand("traj")) return cmd_traj(traj_c);
    if (*app.get_subcommand("rate")) return cmd_rate(rate_c);
    if (*app.get_subcommand("precond")) return cmd_precond(pre_c);
    if (*vb) {
      ao.threads = sgdsat::resolve_threads(ao.threads);
      const sgdsat::AuditReport rep = sgdsat::run_audits(suite, ao);
      const std::string text = sgdsat::dump_json(rep.to_json());
      if (vb_out) sgdsat::write_output(*vb_out, "audit.json", text);
      std::cout << text;
      return rep.all_pass() ? 0 : 1;
    }
  } catch (const sgdsat::Error& e) {
    return print_error(e.code(), e.what());
  } catch (const std::exception& e) {
    return print_error("internal", e.what());
  }
  return 0;
}
