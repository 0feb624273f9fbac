// Command-line driver: experiment grids, property verification, and
// one-arm index/evaluation dumps.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rbandits/dp.hpp"
#include "rbandits/experiment.hpp"
#include "rbandits/rng.hpp"

namespace {

using namespace rbandits;

struct ArmFlags {
  std::string arm_file;
  int family = 1;
  double p = 0.5;
  int size = 4;
  std::uint64_t seed_q = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--arm", arm_file, "arm JSON file (overrides the flags)");
    cmd->add_option("--family", family, "structured matrix family 1..4");
    cmd->add_option("--p", p, "stay probability of the structured matrix");
    cmd->add_option("--size", size, "number of states");
    cmd->add_option("--seed-q", seed_q, "seed for the sampled reset pmf");
  }

  Arm build() const {
    if (!arm_file.empty()) return arm_from_json(read_text_file(arm_file));
    return Arm{make_structured_matrix(family, p, size),
               sample_reset_pmf(size, seed_q), default_cost(size)};
  }
};

ObsModel parse_model(const std::string& s) {
  if (s == "A" || s == "a") return ObsModel::A;
  if (s == "B" || s == "b") return ObsModel::B;
  throw CLI::ValidationError("--model", "must be A or B");
}

int cmd_run(const std::string& exp, const std::string& config_file,
            const std::vector<std::string>& models_opt,
            const std::vector<std::string>& policies_opt,
            const std::vector<int>& n_opt, const std::vector<int>& m_opt,
            int paths, int horizon, std::uint64_t seed, const std::string& out,
            int threads, bool have_seed, bool have_paths, bool have_horizon) {
  ExperimentConfig config;
  if (!config_file.empty()) {
    config = ExperimentConfig::from_json_text(read_text_file(config_file));
  } else if (exp == "exp1") {
    config = ExperimentConfig::exp1();
  } else if (exp == "exp2") {
    config = ExperimentConfig::exp2();
  } else {
    config = ExperimentConfig{};
  }
  if (!models_opt.empty()) {
    config.models.clear();
    for (const auto& m : models_opt) config.models.push_back(parse_model(m));
  }
  if (!policies_opt.empty()) config.policies = policies_opt;
  if (!n_opt.empty()) config.n_values = n_opt;
  if (!m_opt.empty()) config.m_values = m_opt;
  if (have_paths) config.paths = paths;
  if (have_horizon) config.horizon = horizon;
  if (have_seed) config.seed = seed;
  if (!out.empty()) config.out_dir = out;
  config.threads = threads;

  ExperimentResult result = run_experiment(config);
  for (const auto& cell : result.cells) {
    std::printf("model %s n=%d m=%d P%d:", cell.model == ObsModel::A ? "A" : "B",
                cell.n, cell.m, cell.family);
    for (const auto& [name, sim] : cell.by_policy)
      std::printf("  J(%s)=%.6g (se %.2g)", name.c_str(), sim.j_hat,
                  sim.std_err);
    if (cell.alpha_opt) std::printf("  alpha_opt=%.2f", *cell.alpha_opt);
    if (cell.eps_myp) std::printf("  eps_myp=%.2f", *cell.eps_myp);
    std::printf("\n");
  }
  if (!config.out_dir.empty())
    std::printf("wrote tables to %s\n", config.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"restart bandits: Whittle index policies and experiments"};
  app.require_subcommand(1);

  // ---- run ----
  auto* run = app.add_subcommand("run", "run an experiment grid");
  std::string exp = "custom", config_file, out;
  std::vector<std::string> models_opt, policies_opt;
  std::vector<int> n_opt, m_opt;
  int paths = 0, horizon = 0, threads = 0;
  std::uint64_t seed = 0;
  run->add_option("experiment", exp, "exp1 | exp2 | custom");
  run->add_option("--config", config_file, "JSON config file");
  auto* seed_opt = run->add_option("--seed", seed, "base seed");
  auto* paths_opt = run->add_option("--paths", paths, "Monte Carlo paths");
  auto* horizon_opt = run->add_option("--horizon", horizon, "steps per path");
  run->add_option("--out", out, "output directory");
  run->add_option("--threads", threads, "worker threads (0 = all)");
  run->add_option("--model", models_opt, "A and/or B");
  run->add_option("--policies", policies_opt, "subset of wip,myp,opt");
  run->add_option("--n", n_opt, "fleet sizes");
  run->add_option("--m", m_opt, "activation budgets");

  // ---- verify ----
  auto* verify = app.add_subcommand("verify", "run the property suites");
  VerifyOptions vopts;
  std::string verify_out;
  std::vector<std::string> suites_opt;
  verify->add_option("--suite", suites_opt,
                     "suites to run (default: all; pass none for an empty "
                     "report)");
  verify->add_option("--seed", vopts.seed, "corpus seed");
  verify->add_option("--arms", vopts.arms, "arms per suite");
  verify->add_option("--threads", vopts.threads, "worker threads");
  verify->add_flag("--inject-broken-cost", vopts.inject_broken_cost,
                   "fault injection: run the suites on arms with a "
                   "non-monotone cost");
  verify->add_option("--out", verify_out, "write the JSON report here");

  // ---- index ----
  auto* index = app.add_subcommand("index", "Whittle index table for one arm");
  ArmFlags index_arm;
  index_arm.attach(index);
  std::string index_model = "A", index_csv, index_json;
  int index_ell = 10;
  double index_beta = 0.99;
  index->add_option("--model", index_model, "A or B")->required();
  index->add_option("--ell", index_ell, "truncation");
  index->add_option("--beta", index_beta, "discount factor");
  index->add_option("--out-csv", index_csv, "CSV output path");
  index->add_option("--out-json", index_json, "JSON output path (audit)");

  // ---- eval ----
  auto* eval = app.add_subcommand("eval",
                                  "D/N tables of a threshold policy");
  ArmFlags eval_arm;
  eval_arm.attach(eval);
  std::string eval_model = "A", eval_out;
  int eval_ell = 10;
  double eval_beta = 0.99;
  std::vector<int> eval_theta;
  eval->add_option("--model", eval_model, "A or B")->required();
  eval->add_option("--ell", eval_ell, "truncation");
  eval->add_option("--beta", eval_beta, "discount factor");
  eval->add_option("--theta", eval_theta,
                   "threshold (model A: one value; model B: one per state)")
      ->required();
  eval->add_option("--out", eval_out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(exp, config_file, models_opt, policies_opt, n_opt, m_opt,
                     paths, horizon, seed, out, threads,
                     seed_opt->count() > 0, paths_opt->count() > 0,
                     horizon_opt->count() > 0);
    }
    if (verify->parsed()) {
      if (verify->get_option("--suite")->count() > 0)
        vopts.suites = suites_opt;
      VerificationReport report = run_verification(vopts);
      std::string text = report.to_json_text();
      if (verify_out.empty())
        std::cout << text << "\n";
      else
        write_text_file(verify_out, text);
      return report.all_pass() ? 0 : 1;
    }
    if (index->parsed()) {
      ObsModel model = parse_model(index_model);
      ArmCache cache(index_arm.build(), index_ell);
      std::string csv, js;
      if (model == ObsModel::A) {
        IndexTableA table = whittle_table_a(cache, index_beta);
        csv = index_table_a_to_csv(table);
        js = index_table_a_to_json(table);
      } else {
        IndexTableB table = whittle_table_b(cache, index_beta);
        csv = index_table_b_to_csv(table);
        js = index_table_b_to_json(table);
      }
      if (!index_csv.empty()) write_text_file(index_csv, csv);
      if (!index_json.empty()) write_text_file(index_json, js);
      if (index_csv.empty() && index_json.empty()) std::cout << csv;
      return 0;
    }
    if (eval->parsed()) {
      ObsModel model = parse_model(eval_model);
      ArmCache cache(eval_arm.build(), eval_ell);
      PolicyValue pv;
      if (model == ObsModel::A) {
        if (eval_theta.size() != 1)
          throw std::invalid_argument("model A takes a single --theta");
        pv = dn_values_a(cache, ThresholdPolicyA{eval_theta[0]}, eval_beta);
      } else {
        if (static_cast<int>(eval_theta.size()) != cache.size())
          throw std::invalid_argument(
              "model B needs one --theta entry per state");
        pv = dn_values_b(cache, ThresholdPolicyB{eval_theta}, eval_beta);
      }
      std::string csv = policy_value_to_csv(pv);
      if (eval_out.empty())
        std::cout << csv;
      else
        write_text_file(eval_out, csv);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
