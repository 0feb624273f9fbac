#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rbandits/sim.hpp"

namespace rbandits {

// Declarative experiment description. Paper-protocol defaults are the
// config defaults, so `run exp1` / `run exp2` work with zero arguments.
struct ExperimentConfig {
  std::string experiment = "custom";
  std::vector<ObsModel> models = {ObsModel::A, ObsModel::B};
  std::vector<int> n_values = {3};
  std::vector<int> m_values = {1};
  int size = 4;       // states per arm
  int ell = 3;        // truncation of the elapsed-time coordinate
  std::vector<int> families = {1, 2, 3, 4};
  double beta = 0.99;
  int horizon = 1000;
  int paths = 5000;
  std::uint64_t seed = 1;
  std::vector<std::string> policies = {"wip", "opt"};
  std::string out_dir;
  int threads = 0;
  std::size_t joint_state_cap = 1000000;

  static ExperimentConfig exp1();
  static ExperimentConfig exp2();
  // Parses a JSON document; the "experiment" key selects the defaults the
  // remaining keys override.
  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
  std::uint64_t fingerprint() const;
  void validate() const;
};

struct CellResult {
  ObsModel model = ObsModel::A;
  int n = 0;
  int m = 0;
  int family = 0;
  std::uint64_t fleet_seed = 0;
  std::uint64_t sim_seed = 0;
  std::map<std::string, SimResult> by_policy;
  std::optional<double> alpha_opt;  // when opt and wip both ran
  std::optional<double> eps_myp;    // when myp and wip both ran
  double index_seconds = 0.0;
  double sim_seconds = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<CellResult> cells;
};

// Heterogeneous fleet per the experiment protocol: arm i uses the family
// matrix at the i-th of n equispaced p values in [0.05, 0.95], a freshly
// sampled reset pmf, and the default cost.
Fleet build_fleet(ObsModel model, int family, int n, int m, int size, int ell,
                  std::uint64_t fleet_seed);

// Runs the full grid and, when config.out_dir is set, writes the metric
// tables (CSV), raw per-cell results (CSV), provenance (JSON) and timings
// (JSON, excluded from the reproducibility contract).
ExperimentResult run_experiment(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Random arm corpus shared by the verification suites and acceptance tests.
// ---------------------------------------------------------------------------

struct CorpusSpec {
  int count = 50;
  std::vector<int> sizes = {2, 3, 4, 5};
  std::vector<int> families = {1, 2, 3, 4};
  std::vector<double> betas = {0.9, 0.99};
  std::vector<int> ells = {5, 10};
  std::uint64_t seed = 7;
};

struct CorpusArm {
  Arm arm;
  int family = 0;
  double p = 0.0;
  double beta = 0.9;
  int ell = 5;
  std::uint64_t seed = 0;
};

std::vector<CorpusArm> make_corpus(const CorpusSpec& spec);

// ---------------------------------------------------------------------------
// Property verification suites (machine-readable pass/fail + counterexamples)
// ---------------------------------------------------------------------------

struct VerifyOptions {
  std::vector<std::string> suites = {"assumptions", "oracle_agreement",
                                     "truncation_bound",
                                     "threshold_structure",
                                     "indexability", "index_agreement"};
  std::uint64_t seed = 7;
  int arms = 8;  // arms sampled per suite
  bool inject_broken_cost = false;
  int threads = 0;
};

struct SuiteResult {
  std::string name;
  bool pass = true;
  int checked = 0;
  std::vector<std::string> failures;
};

struct VerificationReport {
  std::vector<SuiteResult> suites;
  bool all_pass() const;
  std::string to_json_text() const;
};

VerificationReport run_verification(const VerifyOptions& options);

// Small file helpers used by the CLI and tests.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Runs fn(i) for i in [0, count) on up to `threads` workers; any exception
// is rethrown on the caller.
void parallel_for(int count, int threads,
                  const std::function<void(int)>& fn);

}  // namespace rbandits
