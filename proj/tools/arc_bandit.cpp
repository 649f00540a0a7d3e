#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "arc/harness.hpp"
#include "arc/oracle.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

arc::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return arc::experiment_config_from_json(j);
}

int run_simulate(arc::ExperimentConfig cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const arc::SummaryTables summary = arc::run_experiment(cfg);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  arc::emit_plot_data(summary, cfg.output_dir);
  arc::write_manifest(cfg, summary, cfg.output_dir, wall);
  std::printf("wrote %s/{mean,median,q75,q90}.csv and manifest.json (%.1fs)\n",
              cfg.output_dir.c_str(), wall);
  if (summary.failed_episodes > 0) {
    std::fprintf(stderr, "%d/%d episodes aborted on numeric errors\n",
                 summary.failed_episodes, summary.total_episodes);
  }
  if (summary.failure_threshold_exceeded()) {
    std::fprintf(stderr, "failure rate above 1%%; marking the run failed\n");
    return kExitNumeric;
  }
  return 0;
}

struct GridRange {
  double lo = 0.0, hi = 0.0, step = 0.0;
};

GridRange parse_range(const std::string& s, bool with_step) {
  GridRange r;
  const auto c1 = s.find(':');
  if (c1 == std::string::npos) throw std::invalid_argument("bad range: " + s);
  r.lo = std::stod(s.substr(0, c1));
  const auto rest = s.substr(c1 + 1);
  const auto c2 = rest.find(':');
  if (with_step) {
    if (c2 == std::string::npos) {
      throw std::invalid_argument("range needs lo:hi:step, got " + s);
    }
    r.hi = std::stod(rest.substr(0, c2));
    r.step = std::stod(rest.substr(c2 + 1));
  } else {
    r.hi = std::stod(c2 == std::string::npos ? rest : rest.substr(0, c2));
  }
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian bandit experimentation engine"};
  app.require_subcommand(1);

  // simulate ------------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "run a (policy x environment) experiment");
  std::string sim_config;
  int sim_reps = -1, sim_horizon = -1, sim_workers = -1;
  std::int64_t sim_seed = -1;
  std::string sim_out;
  bool paper_scale = false;
  sim->add_option("--config", sim_config, "experiment config (JSON)")->required();
  sim->add_option("--reps", sim_reps, "override replications");
  sim->add_option("--horizon", sim_horizon, "override horizon T");
  sim->add_option("--seed", sim_seed, "override base seed");
  sim->add_option("--out", sim_out, "override output directory");
  sim->add_option("--workers", sim_workers, "worker threads");
  sim->add_flag("--paper-scale", paper_scale,
                "K=50, T=2000, 1000 replications (slow)");

  // oracle --------------------------------------------------------------------
  auto* orc = app.add_subcommand("oracle",
                                 "value-iteration oracle for the 1 1/2 bandit");
  double orc_lambda = 0.1, orc_beta = 0.99, orc_tol = 1e-6, orc_dfloor = 1e-3;
  int orc_mc = 1000;
  std::int64_t orc_seed = 1;
  std::string orc_grid_m = "0:2:0.02", orc_grid_d = "0.01:0.05", orc_out = "out";
  orc->add_option("--lambda", orc_lambda, "temperature");
  orc->add_option("--beta", orc_beta, "discount");
  orc->add_option("--mc", orc_mc, "Monte-Carlo samples per backup");
  orc->add_option("--grid-m", orc_grid_m, "m grid lo:hi:step");
  orc->add_option("--grid-d", orc_grid_d, "d orbit range lo:hi");
  orc->add_option("--tol", orc_tol, "sup-norm convergence tolerance");
  orc->add_option("--d-floor", orc_dfloor, "orbit extension floor");
  orc->add_option("--seed", orc_seed, "draw-set seed");
  orc->add_option("--out", orc_out, "output directory");

  // sweep ---------------------------------------------------------------------
  auto* swp = app.add_subcommand("sweep", "hyper-parameter sweep");
  std::string swp_config, swp_param, swp_values, swp_out;
  int swp_workers = -1;
  swp->add_option("--config", swp_config, "experiment config (JSON)")->required();
  swp->add_option("--param", swp_param, "parameter: rho | epsilon | c")->required();
  swp->add_option("--values", swp_values, "comma-separated values")->required();
  swp->add_option("--out", swp_out, "override output directory");
  swp->add_option("--workers", swp_workers, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      arc::ExperimentConfig cfg = load_config(sim_config);
      if (paper_scale) {
        cfg.env.arms = 50;
        cfg.horizon = 2000;
        cfg.replications = 1000;
        std::fprintf(stderr,
                     "paper-scale run: K=50, T=2000, 1000 replications; this "
                     "takes a while\n");
      }
      if (sim_reps > 0) cfg.replications = sim_reps;
      if (sim_horizon > 0) cfg.horizon = sim_horizon;
      if (sim_seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(sim_seed);
      if (!sim_out.empty()) cfg.output_dir = sim_out;
      if (sim_workers > 0) cfg.workers = sim_workers;
      cfg.validate();
      return run_simulate(std::move(cfg));
    }

    if (orc->parsed()) {
      const GridRange gm = parse_range(orc_grid_m, true);
      const GridRange gd = parse_range(orc_grid_d, false);
      arc::ValueGridSpec spec;
      spec.m_lo = gm.lo;
      spec.m_hi = gm.hi;
      spec.m_step = gm.step;
      spec.d_lo = gd.lo;
      spec.d_hi = gd.hi;
      spec.d_floor = orc_dfloor;
      arc::RngStream rng(static_cast<std::uint64_t>(orc_seed));
      const auto t0 = std::chrono::steady_clock::now();
      const arc::ValueGrid grid =
          arc::value_iterate(spec, orc_lambda, orc_beta, orc_mc, rng, orc_tol);
      const arc::CompareReport rep = arc::compare_grid(grid);
      fs::create_directories(orc_out);
      arc::write_compare_csv(rep, (fs::path(orc_out) / "oracle_compare.csv").string());
      arc::write_compare_summary(
          rep, (fs::path(orc_out) / "oracle_summary.json").string());
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::printf(
          "converged in %d sweeps (sup-delta %.2e, %.1fs): max_rel_err %.4f, "
          "mean_rel_err %.5f, max_p_diff %.4f over %zu nodes\n",
          grid.iterations, grid.sup_delta, wall, rep.max_rel_err,
          rep.mean_rel_err, rep.max_p_diff, rep.rows.size());
      return 0;
    }

    if (swp->parsed()) {
      arc::ExperimentConfig base = load_config(swp_config);
      if (!swp_out.empty()) base.output_dir = swp_out;
      if (swp_workers > 0) base.workers = swp_workers;
      if (swp_param != "rho" && swp_param != "epsilon" && swp_param != "c") {
        throw std::invalid_argument("sweep: unsupported param " + swp_param);
      }
      std::vector<double> values;
      std::stringstream ss(swp_values);
      for (std::string tok; std::getline(ss, tok, ',');) {
        values.push_back(std::stod(tok));
      }
      if (values.empty()) throw std::invalid_argument("sweep: no values given");

      const fs::path root = base.output_dir;
      std::ofstream summary_csv;
      fs::create_directories(root);
      summary_csv.open(root / ("sweep_" + swp_param + ".csv"));
      summary_csv << "value";
      for (const auto& p : base.policies) summary_csv << "," << p.label;
      summary_csv << "\n";

      int rc = 0;
      for (double v : values) {
        arc::ExperimentConfig cfg = base;
        for (auto& p : cfg.policies) {
          if (swp_param == "rho") {
            if (auto* a = std::get_if<arc::ArcPolicy>(&p.kind)) a->config.rho = v;
            if (auto* a = std::get_if<arc::ArcIndexPolicy>(&p.kind)) a->config.rho = v;
            if (auto* b = std::get_if<arc::Boltzmann>(&p.kind)) b->rho = v;
          } else if (swp_param == "epsilon") {
            if (auto* e = std::get_if<arc::EpsilonGreedy>(&p.kind)) e->epsilon = v;
          } else if (swp_param == "c") {
            if (auto* u = std::get_if<arc::BayesUcb>(&p.kind)) u->c = v;
          }
        }
        char tag[64];
        std::snprintf(tag, sizeof(tag), "%s=%g", swp_param.c_str(), v);
        cfg.output_dir = (root / tag).string();
        std::printf("sweep %s\n", tag);
        const int code = run_simulate(cfg);
        rc = std::max(rc, code);

        // final-step mean regret per policy, from the emitted curve
        summary_csv << v;
        std::ifstream in(fs::path(cfg.output_dir) / "mean.csv");
        std::string line, last;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
          if (!line.empty()) last = line;
        }
        const auto first_comma = last.find(',');
        summary_csv << "," << (first_comma == std::string::npos
                                   ? ""
                                   : last.substr(first_comma + 1));
        summary_csv << "\n";
      }
      return rc;
    }
  } catch (const arc::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
