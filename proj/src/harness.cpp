#include "arc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "arc/stats.hpp"

namespace arc {

namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
  env.validate();
  if (horizon < 1) throw std::invalid_argument("ExperimentConfig: horizon >= 1");
  if (replications < 1) {
    throw std::invalid_argument("ExperimentConfig: replications >= 1");
  }
  if (workers < 1) throw std::invalid_argument("ExperimentConfig: workers >= 1");
  if (policies.empty()) {
    throw std::invalid_argument("ExperimentConfig: no policies configured");
  }
  std::set<std::string> labels;
  for (const auto& p : policies) {
    if (!labels.insert(p.label).second) {
      throw std::invalid_argument("ExperimentConfig: duplicate policy label '" +
                                  p.label + "'");
    }
    if (std::holds_alternative<Ids>(p.kind) && !env.gaussian_family()) {
      throw std::invalid_argument(
          "ExperimentConfig: IDS requires a Gaussian environment (closed-form "
          "entropy gain)");
    }
  }
}

namespace {

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& ch : out) {
    if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
  }
  return out;
}

void write_checkpoint(const std::string& dir, const std::string& label,
                      int replication, int t, const nlohmann::json& belief) {
  const fs::path path = fs::path(dir) / "checkpoints";
  fs::create_directories(path);
  std::ofstream out(path / (sanitize(label) + "_rep" + std::to_string(replication) +
                            "_t" + std::to_string(t) + ".json"));
  out << belief.dump(2) << "\n";
}

std::uint64_t hash_vector(const Vector& v) {
  return fnv1a(std::string_view(reinterpret_cast<const char*>(v.data()),
                                static_cast<std::size_t>(v.size()) * sizeof(double)));
}

ArcConfig arc_config_for_step(const ArcConfig& base, bool finite_horizon,
                              int horizon, int t) {
  ArcConfig cfg = base;
  if (finite_horizon) cfg.horizon = horizon - t + 1;  // steps to go
  return cfg;
}

// One decision under a Gaussian belief.
int decide_gaussian(const PolicyKind& kind, const GaussianBelief& belief,
                    const std::vector<GaussianArmModel>& arms,
                    const Vector& env_means, int t, int horizon,
                    RngStream& dec) {
  if (const auto* eg = std::get_if<EpsilonGreedy>(&kind)) {
    return epsilon_greedy_step(predictive_reward(belief, arms).f, eg->epsilon,
                               dec);
  }
  if (const auto* be = std::get_if<Boltzmann>(&kind)) {
    return boltzmann_step(predictive_reward(belief, arms).f, be->rho, be->kappa,
                          belief.d_norm(), dec, be->lambda_floor);
  }
  if (std::holds_alternative<Thompson>(kind)) {
    return thompson_step(belief, arms, dec);
  }
  if (const auto* ucb = std::get_if<BayesUcb>(&kind)) {
    const int T = ucb->total_horizon > 0 ? ucb->total_horizon : horizon;
    return bayes_ucb_step(belief, arms, t, T, ucb->c, &dec, ucb->mc_samples);
  }
  if (const auto* kg = std::get_if<KnowledgeGradient>(&kind)) {
    return kg_step(belief, arms, kg->beta, kg->mc_samples, dec);
  }
  if (const auto* ids = std::get_if<Ids>(&kind)) {
    return ids_step(belief, arms, ids->mc_samples, dec).second;
  }
  if (std::holds_alternative<Greedy>(kind)) {
    return argmax_lowest(predictive_reward(belief, arms).f);
  }
  if (const auto* ap = std::get_if<ArcPolicy>(&kind)) {
    const ArcIndex idx = arc_index(
        belief, arms,
        arc_config_for_step(ap->config, ap->finite_horizon, horizon, t));
    return arc_step(idx, dec.uniform()).second;
  }
  if (const auto* ai = std::get_if<ArcIndexPolicy>(&kind)) {
    const ArcIndex idx = arc_index(
        belief, arms,
        arc_config_for_step(ai->config, ai->finite_horizon, horizon, t));
    return arc_index_step(idx);
  }
  if (std::holds_alternative<OracleBestArm>(kind)) {
    return argmax_lowest(env_means);
  }
  throw std::invalid_argument("decide_gaussian: unsupported policy kind");
}

RegretTrace run_gaussian_episode(const ExperimentConfig& config,
                                 const PolicySpec& policy, int policy_id,
                                 const Vector& theta, int replication) {
  const auto& spec = config.env;
  GaussianBelief belief = make_gaussian_prior(spec);
  const auto arms = make_gaussian_arms(spec);
  const Vector means = conditional_means(spec, theta);
  const double best = means.maxCoeff();

  RngStream obs_rng = RngStream::derive(config.base_seed,
                                        static_cast<std::uint64_t>(replication),
                                        0, StreamKind::Observation);
  RngStream dec_rng = RngStream::derive(
      config.base_seed, static_cast<std::uint64_t>(replication),
      static_cast<std::uint64_t>(policy_id) + 1, StreamKind::Decision);

  RegretTrace trace;
  trace.label = policy.label;
  trace.replication = replication;
  trace.theta_hash = hash_vector(theta);
  trace.cumulative.resize(static_cast<std::size_t>(config.horizon));

  double total = 0.0;
  for (int t = 1; t <= config.horizon; ++t) {
    const int a = decide_gaussian(policy.kind, belief, arms, means, t,
                                  config.horizon, dec_rng);
    const Observation obs = observe(spec, theta, a, obs_rng);
    total += best - means[a];
    trace.cumulative[static_cast<std::size_t>(t - 1)] = total;
    belief = gaussian_update(belief, arms[static_cast<std::size_t>(a)],
                             obs.values);
    if (config.checkpoint_interval > 0 && t % config.checkpoint_interval == 0 &&
        !config.output_dir.empty()) {
      write_checkpoint(config.output_dir, policy.label, replication, t,
                       to_json(belief));
    }
  }
  return trace;
}

// Family (Beta/Gamma) episodes keep per-coordinate beliefs.
struct FamilyState {
  FamilyKind family;
  Vector m, d;
  Matrix observe_counts;  // row i: coordinate exposures under arm i
  Vector reward_scale;    // n_i for the reward coordinate
};

Vector family_f(const FamilyState& st) {
  return st.reward_scale.cwiseProduct(st.m);
}

Vector family_sample_theta_hat(const FamilyState& st, RngStream& rng) {
  Vector theta(st.m.size());
  for (int j = 0; j < st.m.size(); ++j) {
    if (st.family == FamilyKind::Binomial) {
      theta[j] = rng.beta(st.m[j] / st.d[j], (1.0 - st.m[j]) / st.d[j]);
    } else {
      theta[j] = rng.gamma(st.m[j] / st.d[j], st.d[j]);
    }
  }
  return theta;
}

int decide_family(const PolicyKind& kind, const FamilyState& st,
                  const Vector& env_means, int t, int horizon, RngStream& dec) {
  const int K = static_cast<int>(st.m.size());
  if (const auto* eg = std::get_if<EpsilonGreedy>(&kind)) {
    return epsilon_greedy_step(family_f(st), eg->epsilon, dec);
  }
  if (const auto* be = std::get_if<Boltzmann>(&kind)) {
    return boltzmann_step(family_f(st), be->rho, be->kappa, st.d.maxCoeff(), dec,
                          be->lambda_floor);
  }
  if (std::holds_alternative<Thompson>(kind)) {
    const Vector theta_hat = family_sample_theta_hat(st, dec);
    return argmax_lowest(st.reward_scale.cwiseProduct(theta_hat));
  }
  if (const auto* ucb = std::get_if<BayesUcb>(&kind)) {
    const int T = ucb->total_horizon > 0 ? ucb->total_horizon : horizon;
    if (t < 1 || T < 2) {
      throw std::invalid_argument("bayes_ucb: need t >= 1 and T >= 2");
    }
    const double p_quant =
        1.0 - (1.0 / static_cast<double>(t)) *
                  std::pow(std::log(static_cast<double>(T)), -ucb->c);
    Vector q(K);
    std::vector<double> vals(static_cast<std::size_t>(ucb->mc_samples));
    for (int i = 0; i < K; ++i) {
      for (int s = 0; s < ucb->mc_samples; ++s) {
        double th = st.family == FamilyKind::Binomial
                        ? dec.beta(st.m[i] / st.d[i], (1.0 - st.m[i]) / st.d[i])
                        : dec.gamma(st.m[i] / st.d[i], st.d[i]);
        vals[static_cast<std::size_t>(s)] = st.reward_scale[i] * th;
      }
      std::sort(vals.begin(), vals.end());
      q[i] = sorted_quantile(vals, std::clamp(p_quant, 0.0, 1.0));
    }
    return argmax_lowest(q);
  }
  if (const auto* kg = std::get_if<KnowledgeGradient>(&kind)) {
    const Vector f = family_f(st);
    const double cur_max = f.maxCoeff();
    Vector index = f;
    for (int i = 0; i < K; ++i) {
      const double n = st.observe_counts(i, i);
      if (n <= 0.0) continue;
      double acc = 0.0;
      for (int s = 0; s < kg->mc_samples; ++s) {
        double th = st.family == FamilyKind::Binomial
                        ? dec.beta(st.m[i] / st.d[i], (1.0 - st.m[i]) / st.d[i])
                        : dec.gamma(st.m[i] / st.d[i], st.d[i]);
        Vector m2 = st.m;
        if (st.family == FamilyKind::Binomial) {
          const int y = dec.binomial(static_cast<int>(n), th);
          BetaBelief b{st.m, st.d};
          m2[i] = beta_binomial_update(b, static_cast<int>(n), y, i).m[i];
        } else {
          const int y = dec.poisson(n * th);
          GammaBelief g{st.m, st.d};
          m2[i] = gamma_poisson_update(g, n, y, i).m[i];
        }
        acc += st.reward_scale.cwiseProduct(m2).maxCoeff();
      }
      index[i] = f[i] + (kg->beta / (1.0 - kg->beta)) *
                            (acc / kg->mc_samples - cur_max);
    }
    return argmax_lowest(index);
  }
  if (std::holds_alternative<Greedy>(kind)) {
    return argmax_lowest(family_f(st));
  }
  if (const auto* ap = std::get_if<ArcPolicy>(&kind)) {
    const ArcIndex idx = arc_index_family(
        st.m, st.d, st.observe_counts, st.family,
        arc_config_for_step(ap->config, ap->finite_horizon, horizon, t));
    return arc_step(idx, dec.uniform()).second;
  }
  if (const auto* ai = std::get_if<ArcIndexPolicy>(&kind)) {
    const ArcIndex idx = arc_index_family(
        st.m, st.d, st.observe_counts, st.family,
        arc_config_for_step(ai->config, ai->finite_horizon, horizon, t));
    return arc_index_step(idx);
  }
  if (std::holds_alternative<OracleBestArm>(kind)) {
    return argmax_lowest(env_means);
  }
  throw std::invalid_argument("decide_family: unsupported policy kind");
}

RegretTrace run_family_episode(const ExperimentConfig& config,
                               const PolicySpec& policy, int policy_id,
                               const Vector& theta, int replication) {
  const auto& spec = config.env;
  FamilyState st;
  st.family = spec.variant == EnvVariant::Bernoulli ? FamilyKind::Binomial
                                                    : FamilyKind::Poisson;
  if (st.family == FamilyKind::Binomial) {
    const BetaBelief b = make_beta_prior(spec);
    st.m = b.m;
    st.d = b.d;
  } else {
    const GammaBelief g = make_gamma_prior(spec);
    st.m = g.m;
    st.d = g.d;
  }
  st.observe_counts = make_family_observe(spec);
  st.reward_scale = spec.effective_counts();

  const Vector means = conditional_means(spec, theta);
  const double best = means.maxCoeff();

  RngStream obs_rng = RngStream::derive(config.base_seed,
                                        static_cast<std::uint64_t>(replication),
                                        0, StreamKind::Observation);
  RngStream dec_rng = RngStream::derive(
      config.base_seed, static_cast<std::uint64_t>(replication),
      static_cast<std::uint64_t>(policy_id) + 1, StreamKind::Decision);

  RegretTrace trace;
  trace.label = policy.label;
  trace.replication = replication;
  trace.theta_hash = hash_vector(theta);
  trace.cumulative.resize(static_cast<std::size_t>(config.horizon));

  double total = 0.0;
  for (int t = 1; t <= config.horizon; ++t) {
    const int a = decide_family(policy.kind, st, means, t, config.horizon,
                                dec_rng);
    const Observation obs = observe(spec, theta, a, obs_rng);
    total += best - means[a];
    trace.cumulative[static_cast<std::size_t>(t - 1)] = total;
    const double n = st.observe_counts(a, a);
    if (st.family == FamilyKind::Binomial) {
      BetaBelief b{st.m, st.d};
      b = beta_binomial_update(b, static_cast<int>(n),
                               static_cast<int>(obs.values[a]), a);
      st.m = b.m;
      st.d = b.d;
    } else {
      GammaBelief g{st.m, st.d};
      g = gamma_poisson_update(g, n, static_cast<int>(obs.values[a]), a);
      st.m = g.m;
      st.d = g.d;
    }
    if (config.checkpoint_interval > 0 && t % config.checkpoint_interval == 0 &&
        !config.output_dir.empty()) {
      const nlohmann::json snap = st.family == FamilyKind::Binomial
                                      ? to_json(BetaBelief{st.m, st.d})
                                      : to_json(GammaBelief{st.m, st.d});
      write_checkpoint(config.output_dir, policy.label, replication, t, snap);
    }
  }
  return trace;
}

}  // namespace

RegretTrace run_episode(const ExperimentConfig& config, const PolicySpec& policy,
                        int policy_id, const Vector& theta, int replication) {
  if (config.env.gaussian_family()) {
    return run_gaussian_episode(config, policy, policy_id, theta, replication);
  }
  return run_family_episode(config, policy, policy_id, theta, replication);
}

SummaryTables run_experiment(const ExperimentConfig& config) {
  config.validate();
  const int R = config.replications;
  const int P = static_cast<int>(config.policies.size());
  const int T = config.horizon;

  // Every policy in replication r faces the same theta.
  std::vector<Vector> thetas;
  thetas.reserve(static_cast<std::size_t>(R));
  for (int r = 0; r < R; ++r) {
    RngStream theta_rng = RngStream::derive(
        config.base_seed, static_cast<std::uint64_t>(r), 0, StreamKind::Theta);
    thetas.push_back(sample_theta(config.env, theta_rng));
  }

  std::vector<RegretTrace> traces(static_cast<std::size_t>(R) *
                                  static_cast<std::size_t>(P));
  std::atomic<int> next_rep{0};
  std::exception_ptr fatal;
  std::mutex fatal_mu;

  const auto worker = [&]() {
    for (;;) {
      const int r = next_rep.fetch_add(1);
      if (r >= R) return;
      for (int p = 0; p < P; ++p) {
        auto& slot = traces[static_cast<std::size_t>(r) * P + p];
        try {
          slot = run_episode(config, config.policies[static_cast<std::size_t>(p)],
                             p, thetas[static_cast<std::size_t>(r)], r);
        } catch (const NumericError& e) {
          slot.label = config.policies[static_cast<std::size_t>(p)].label;
          slot.replication = r;
          slot.failed = true;
          slot.error = e.what();
        } catch (...) {
          std::lock_guard<std::mutex> lock(fatal_mu);
          if (!fatal) fatal = std::current_exception();
          return;
        }
      }
    }
  };

  const int n_workers = std::min(config.workers, R);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  SummaryTables out;
  out.horizon = T;
  out.replications = R;
  out.total_episodes = R * P;
  for (const auto& p : config.policies) out.labels.push_back(p.label);
  out.mean.resize(T, P);
  out.median.resize(T, P);
  out.q75.resize(T, P);
  out.q90.resize(T, P);

  std::vector<double> sample;
  for (int p = 0; p < P; ++p) {
    std::vector<const RegretTrace*> ok;
    for (int r = 0; r < R; ++r) {
      const auto& tr = traces[static_cast<std::size_t>(r) * P + p];
      if (tr.failed) {
        ++out.failed_episodes;
        out.failures.push_back(tr.label + " rep " + std::to_string(r) + ": " +
                               tr.error);
      } else {
        ok.push_back(&tr);
      }
    }
    if (ok.empty()) {
      out.mean.col(p).setConstant(std::numeric_limits<double>::quiet_NaN());
      out.median.col(p) = out.mean.col(p);
      out.q75.col(p) = out.mean.col(p);
      out.q90.col(p) = out.mean.col(p);
      continue;
    }
    for (int t = 0; t < T; ++t) {
      sample.clear();
      double acc = 0.0;
      for (const auto* tr : ok) {
        const double v = tr->cumulative[static_cast<std::size_t>(t)];
        sample.push_back(v);
        acc += v;
      }
      std::sort(sample.begin(), sample.end());
      out.mean(t, p) = acc / static_cast<double>(sample.size());
      out.median(t, p) = sorted_quantile(sample, 0.5);
      out.q75(t, p) = sorted_quantile(sample, 0.75);
      out.q90(t, p) = sorted_quantile(sample, 0.90);
    }
  }
  return out;
}

namespace {

void write_curve_csv(const fs::path& path, const std::vector<std::string>& labels,
                     const Matrix& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t";
  for (const auto& l : labels) out << "," << l;
  out << "\n";
  if (table.cols() == 0) return;  // header-only when no policies configured
  char buf[32];
  for (int t = 0; t < table.rows(); ++t) {
    out << (t + 1);
    for (int p = 0; p < table.cols(); ++p) {
      std::snprintf(buf, sizeof(buf), "%.17g", table(t, p));
      out << "," << buf;
    }
    out << "\n";
  }
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void emit_plot_data(const SummaryTables& summary, const std::string& dir) {
  fs::create_directories(dir);
  write_curve_csv(fs::path(dir) / "mean.csv", summary.labels, summary.mean);
  write_curve_csv(fs::path(dir) / "median.csv", summary.labels, summary.median);
  write_curve_csv(fs::path(dir) / "q75.csv", summary.labels, summary.q75);
  write_curve_csv(fs::path(dir) / "q90.csv", summary.labels, summary.q90);
}

void emit_theta_log(const ExperimentConfig& config, const std::string& dir) {
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / "thetas.csv");
  out << "replication";
  for (int j = 0; j < config.env.param_dim(); ++j) out << ",theta_" << (j + 1);
  out << "\n";
  char buf[32];
  for (int r = 0; r < config.replications; ++r) {
    RngStream rng = RngStream::derive(config.base_seed,
                                      static_cast<std::uint64_t>(r), 0,
                                      StreamKind::Theta);
    const Vector theta = sample_theta(config.env, rng);
    out << r;
    for (int j = 0; j < theta.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", theta[j]);
      out << "," << buf;
    }
    out << "\n";
  }
}

void write_manifest(const ExperimentConfig& config, const SummaryTables& summary,
                    const std::string& dir, double wall_seconds) {
  fs::create_directories(dir);
  std::string all;
  for (const char* name : {"mean.csv", "median.csv", "q75.csv", "q90.csv"}) {
    all += slurp(fs::path(dir) / name);
  }
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(all)));

  nlohmann::json j;
  j["config"] = to_json(config);
  j["content_hash"] = hash;
  j["failed_episodes"] = summary.failed_episodes;
  j["total_episodes"] = summary.total_episodes;
  j["failures"] = summary.failures;
  j["wall_clock_seconds"] = wall_seconds;

  std::ofstream out(fs::path(dir) / "manifest.json");
  out << j.dump(2) << "\n";
}

// -- JSON configuration --------------------------------------------------------

nlohmann::json to_json(const PolicySpec& p) {
  nlohmann::json j;
  j["label"] = p.label;
  if (const auto* eg = std::get_if<EpsilonGreedy>(&p.kind)) {
    j["kind"] = "epsilon_greedy";
    j["epsilon"] = eg->epsilon;
  } else if (const auto* be = std::get_if<Boltzmann>(&p.kind)) {
    j["kind"] = "boltzmann";
    j["rho"] = be->rho;
    j["kappa"] = be->kappa;
    j["lambda_floor"] = be->lambda_floor;
  } else if (std::holds_alternative<Thompson>(p.kind)) {
    j["kind"] = "thompson";
  } else if (const auto* ucb = std::get_if<BayesUcb>(&p.kind)) {
    j["kind"] = "bayes_ucb";
    j["c"] = ucb->c;
    j["total_horizon"] = ucb->total_horizon;
    j["mc_samples"] = ucb->mc_samples;
  } else if (const auto* kg = std::get_if<KnowledgeGradient>(&p.kind)) {
    j["kind"] = "knowledge_gradient";
    j["beta"] = kg->beta;
    j["mc_samples"] = kg->mc_samples;
  } else if (const auto* ids = std::get_if<Ids>(&p.kind)) {
    j["kind"] = "ids";
    j["mc_samples"] = ids->mc_samples;
  } else if (std::holds_alternative<Greedy>(p.kind)) {
    j["kind"] = "greedy";
  } else if (const auto* ap = std::get_if<ArcPolicy>(&p.kind)) {
    j["kind"] = "arc";
    j["beta"] = ap->config.beta;
    j["rho"] = ap->config.rho;
    j["kappa"] = ap->config.kappa;
    j["lambda_floor"] = ap->config.lambda_floor;
    j["sigma_cap"] = ap->config.sigma_cap;
    j["finite_horizon"] = ap->finite_horizon;
  } else if (const auto* ai = std::get_if<ArcIndexPolicy>(&p.kind)) {
    j["kind"] = "arc_index";
    j["beta"] = ai->config.beta;
    j["rho"] = ai->config.rho;
    j["kappa"] = ai->config.kappa;
    j["lambda_floor"] = ai->config.lambda_floor;
    j["sigma_cap"] = ai->config.sigma_cap;
    j["finite_horizon"] = ai->finite_horizon;
  } else if (std::holds_alternative<OracleBestArm>(p.kind)) {
    j["kind"] = "oracle_best_arm";
  }
  return j;
}

namespace {

ArcConfig arc_config_from_json(const nlohmann::json& j) {
  ArcConfig cfg;
  cfg.beta = j.value("beta", cfg.beta);
  cfg.rho = j.value("rho", cfg.rho);
  cfg.kappa = j.value("kappa", cfg.kappa);
  cfg.lambda_floor = j.value("lambda_floor", cfg.lambda_floor);
  cfg.sigma_cap = j.value("sigma_cap", cfg.sigma_cap);
  cfg.validate();
  return cfg;
}

}  // namespace

PolicySpec policy_spec_from_json(const nlohmann::json& j) {
  PolicySpec p;
  const std::string kind = j.at("kind").get<std::string>();
  p.label = j.value("label", kind);
  if (kind == "epsilon_greedy") {
    EpsilonGreedy eg;
    eg.epsilon = j.value("epsilon", eg.epsilon);
    if (eg.epsilon < 0.0 || eg.epsilon > 1.0) {
      throw std::invalid_argument("policy config: epsilon must be in [0,1]");
    }
    p.kind = eg;
  } else if (kind == "boltzmann") {
    Boltzmann be;
    be.rho = j.value("rho", be.rho);
    be.kappa = j.value("kappa", be.kappa);
    be.lambda_floor = j.value("lambda_floor", be.lambda_floor);
    p.kind = be;
  } else if (kind == "thompson") {
    p.kind = Thompson{};
  } else if (kind == "bayes_ucb") {
    BayesUcb ucb;
    ucb.c = j.value("c", ucb.c);
    ucb.total_horizon = j.value("total_horizon", ucb.total_horizon);
    ucb.mc_samples = j.value("mc_samples", ucb.mc_samples);
    if (ucb.c < 0.0) throw std::invalid_argument("policy config: c >= 0");
    p.kind = ucb;
  } else if (kind == "knowledge_gradient") {
    KnowledgeGradient kg;
    kg.beta = j.value("beta", kg.beta);
    kg.mc_samples = j.value("mc_samples", kg.mc_samples);
    if (kg.mc_samples < 1) {
      throw std::invalid_argument("policy config: mc_samples >= 1");
    }
    p.kind = kg;
  } else if (kind == "ids") {
    Ids ids;
    ids.mc_samples = j.value("mc_samples", ids.mc_samples);
    if (ids.mc_samples < 1) {
      throw std::invalid_argument("policy config: mc_samples >= 1");
    }
    p.kind = ids;
  } else if (kind == "greedy") {
    p.kind = Greedy{};
  } else if (kind == "arc") {
    p.kind = ArcPolicy{arc_config_from_json(j), j.value("finite_horizon", false)};
  } else if (kind == "arc_index") {
    p.kind =
        ArcIndexPolicy{arc_config_from_json(j), j.value("finite_horizon", false)};
  } else if (kind == "oracle_best_arm") {
    p.kind = OracleBestArm{};
  } else {
    throw std::invalid_argument("unknown policy kind: " + kind);
  }
  return p;
}

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  nlohmann::json env;
  env["variant"] = to_string(config.env.variant);
  env["arms"] = config.env.arms;
  env["noise_var"] = config.env.noise_var;
  env["penalty"] = config.env.penalty;
  env["prior"] = {{"mean", config.env.prior_mean},
                  {"uncertainty", config.env.prior_unc}};
  env["theta_prior"] = {{"mean", config.env.theta_mean},
                        {"uncertainty", config.env.theta_unc}};
  if (config.env.counts.size() > 0) {
    env["counts"] = std::vector<double>(
        config.env.counts.data(),
        config.env.counts.data() + config.env.counts.size());
  }
  if (config.env.loadings.size() > 0) {
    std::vector<std::vector<double>> rows;
    for (int r = 0; r < config.env.loadings.rows(); ++r) {
      rows.emplace_back(config.env.loadings.row(r).begin(),
                        config.env.loadings.row(r).end());
    }
    env["loadings"] = rows;
  }
  j["env"] = env;
  j["horizon"] = config.horizon;
  j["replications"] = config.replications;
  j["base_seed"] = config.base_seed;
  j["output_dir"] = config.output_dir;
  j["checkpoint_interval"] = config.checkpoint_interval;
  j["workers"] = config.workers;
  nlohmann::json pols = nlohmann::json::array();
  for (const auto& p : config.policies) pols.push_back(to_json(p));
  j["policies"] = pols;
  return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  const auto& env = j.at("env");
  cfg.env.variant = env_variant_from_string(env.at("variant").get<std::string>());
  cfg.env.arms = env.value("arms", cfg.env.arms);
  cfg.env.noise_var = env.value("noise_var", cfg.env.noise_var);
  cfg.env.penalty = env.value("penalty", cfg.env.penalty);
  const bool family = !cfg.env.gaussian_family();
  if (family) {  // conjugate-family defaults
    cfg.env.prior_mean = cfg.env.variant == EnvVariant::Bernoulli ? 0.5 : 1.0;
    cfg.env.prior_unc = cfg.env.variant == EnvVariant::Bernoulli ? 0.5 : 1.0;
    cfg.env.theta_mean = cfg.env.prior_mean;
    cfg.env.theta_unc = cfg.env.prior_unc;
  }
  if (env.contains("prior")) {
    cfg.env.prior_mean = env["prior"].value("mean", cfg.env.prior_mean);
    cfg.env.prior_unc = env["prior"].value("uncertainty", cfg.env.prior_unc);
  }
  if (env.contains("theta_prior")) {
    cfg.env.theta_mean = env["theta_prior"].value("mean", cfg.env.theta_mean);
    cfg.env.theta_unc = env["theta_prior"].value("uncertainty", cfg.env.theta_unc);
  }
  if (env.contains("counts")) {
    const auto v = env["counts"].get<std::vector<double>>();
    cfg.env.counts =
        Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  if (env.contains("loadings")) {
    const auto rows = env["loadings"].get<std::vector<std::vector<double>>>();
    cfg.env.loadings.resize(static_cast<Eigen::Index>(rows.size()),
                            static_cast<Eigen::Index>(rows.empty() ? 0 : rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      cfg.env.loadings.row(static_cast<Eigen::Index>(r)) = Eigen::Map<const Vector>(
          rows[r].data(), static_cast<Eigen::Index>(rows[r].size()));
    }
  }
  cfg.horizon = j.value("horizon", cfg.horizon);
  cfg.replications = j.value("replications", cfg.replications);
  cfg.base_seed = j.value("base_seed", cfg.base_seed);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.checkpoint_interval = j.value("checkpoint_interval", cfg.checkpoint_interval);
  cfg.workers = j.value("workers", cfg.workers);
  for (const auto& pj : j.at("policies")) {
    cfg.policies.push_back(policy_spec_from_json(pj));
  }
  cfg.validate();
  return cfg;
}

}  // namespace arc
