#include "rbandits/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "rbandits/rng.hpp"

namespace rbandits {

namespace {

using nlohmann::json;

std::string model_name(ObsModel m) { return m == ObsModel::A ? "A" : "B"; }

ObsModel model_from_name(const std::string& s) {
  if (s == "A" || s == "a") return ObsModel::A;
  if (s == "B" || s == "b") return ObsModel::B;
  throw std::invalid_argument("unknown model: " + s);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

ExperimentConfig ExperimentConfig::exp1() {
  ExperimentConfig c;
  c.experiment = "exp1";
  c.n_values = {3};
  c.m_values = {1};
  c.size = 4;
  c.ell = 3;
  c.beta = 0.99;
  c.horizon = 1000;
  c.paths = 5000;
  c.policies = {"wip", "opt"};
  return c;
}

ExperimentConfig ExperimentConfig::exp2() {
  ExperimentConfig c;
  c.experiment = "exp2";
  c.n_values = {20, 40, 60};
  c.m_values = {1, 5};
  c.size = 20;
  c.ell = 39;
  c.beta = 0.99;
  c.horizon = 1000;
  c.paths = 5000;
  c.policies = {"wip", "myp"};
  return c;
}

void ExperimentConfig::validate() const {
  if (experiment != "exp1" && experiment != "exp2" && experiment != "custom")
    throw std::invalid_argument("config: experiment must be exp1|exp2|custom");
  if (models.empty()) throw std::invalid_argument("config: no models");
  if (n_values.empty() || m_values.empty())
    throw std::invalid_argument("config: empty grid");
  for (int n : n_values)
    for (int m : m_values)
      if (!(m >= 1 && m < n))
        throw std::invalid_argument("config: require 1 <= m < n per cell");
  if (size < 2) throw std::invalid_argument("config: size >= 2");
  if (ell < 1) throw std::invalid_argument("config: ell >= 1");
  if (families.empty()) throw std::invalid_argument("config: no families");
  for (int f : families)
    if (f < 1 || f > 4) throw std::invalid_argument("config: family in 1..4");
  check_beta(beta);
  if (horizon < 1 || paths < 1)
    throw std::invalid_argument("config: horizon and paths must be >= 1");
  if (policies.empty()) throw std::invalid_argument("config: no policies");
  for (const auto& p : policies)
    if (p != "wip" && p != "myp" && p != "opt")
      throw std::invalid_argument("config: policy must be wip|myp|opt");
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["experiment"] = experiment;
  std::vector<std::string> ms;
  for (ObsModel m : models) ms.push_back(model_name(m));
  j["models"] = ms;
  j["n"] = n_values;
  j["m"] = m_values;
  j["size"] = size;
  j["ell"] = ell;
  j["families"] = families;
  j["beta"] = beta;
  j["horizon"] = horizon;
  j["paths"] = paths;
  j["seed"] = seed;
  j["policies"] = policies;
  j["joint_state_cap"] = joint_state_cap;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j = json::parse(text);
  std::string kind = j.value("experiment", std::string("custom"));
  ExperimentConfig c;
  if (kind == "exp1") c = exp1();
  else if (kind == "exp2") c = exp2();
  c.experiment = kind;
  if (j.contains("models")) {
    c.models.clear();
    for (const auto& m : j.at("models"))
      c.models.push_back(model_from_name(m.get<std::string>()));
  }
  if (j.contains("n")) c.n_values = j.at("n").get<std::vector<int>>();
  if (j.contains("m")) c.m_values = j.at("m").get<std::vector<int>>();
  if (j.contains("size")) c.size = j.at("size").get<int>();
  if (j.contains("ell")) c.ell = j.at("ell").get<int>();
  if (j.contains("families"))
    c.families = j.at("families").get<std::vector<int>>();
  if (j.contains("beta")) c.beta = j.at("beta").get<double>();
  if (j.contains("horizon")) c.horizon = j.at("horizon").get<int>();
  if (j.contains("paths")) c.paths = j.at("paths").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("policies"))
    c.policies = j.at("policies").get<std::vector<std::string>>();
  if (j.contains("joint_state_cap"))
    c.joint_state_cap = j.at("joint_state_cap").get<std::size_t>();
  c.validate();
  return c;
}

std::uint64_t ExperimentConfig::fingerprint() const {
  return fnv1a(to_json_text());
}

Fleet build_fleet(ObsModel model, int family, int n, int m, int size, int ell,
                  std::uint64_t fleet_seed) {
  if (n < 2) throw std::invalid_argument("build_fleet: n >= 2");
  Fleet fleet;
  fleet.model = model;
  fleet.m = m;
  for (int i = 0; i < n; ++i) {
    double p = 0.05 + 0.9 * static_cast<double>(i) / (n - 1);
    Arm arm{make_structured_matrix(family, p, size),
            sample_reset_pmf(size, derive_stream(fleet_seed, 1, i)),
            default_cost(size)};
    fleet.arms.push_back(std::make_shared<ArmCache>(std::move(arm), ell));
  }
  return fleet;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

struct FleetBundle {
  std::vector<std::shared_ptr<const ArmCache>> arms;
  std::vector<std::uint64_t> arm_seeds;
  std::vector<std::vector<double>> index_tables;
  double index_seconds = 0.0;
};

FleetBundle prepare_fleet(const ExperimentConfig& config, ObsModel model,
                          int n, int family, std::uint64_t fleet_seed,
                          bool need_indices) {
  FleetBundle bundle;
  bundle.arms.resize(n);
  bundle.arm_seeds.resize(n);
  for (int i = 0; i < n; ++i)
    bundle.arm_seeds[i] = derive_stream(fleet_seed, 1, i);

  parallel_for(n, config.threads, [&](int i) {
    double p = 0.05 + 0.9 * static_cast<double>(i) / (n - 1);
    Arm arm{make_structured_matrix(family, p, config.size),
            sample_reset_pmf(config.size, bundle.arm_seeds[i]),
            default_cost(config.size)};
    bundle.arms[i] =
        std::make_shared<ArmCache>(std::move(arm), config.ell);
  });

  if (need_indices) {
    auto t0 = std::chrono::steady_clock::now();
    bundle.index_tables.resize(n);
    parallel_for(n, config.threads, [&](int i) {
      if (model == ObsModel::A)
        bundle.index_tables[i] = whittle_table_a(*bundle.arms[i], config.beta).w;
      else
        bundle.index_tables[i] = whittle_table_b(*bundle.arms[i], config.beta).w;
    });
    bundle.index_seconds = elapsed_seconds(t0);
  }
  return bundle;
}

void write_outputs(const ExperimentResult& result) {
  const ExperimentConfig& config = result.config;
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  auto path = [&](const std::string& name) {
    return (fs::path(config.out_dir) / name).string();
  };
  char buf[256];

  // raw per-cell results
  {
    std::string csv =
        "model,n,m,family,policy,J,std_err,tail_bound,paths,horizon,"
        "sim_seed\n";
    for (const auto& cell : result.cells) {
      for (const auto& [name, sim] : cell.by_policy) {
        std::snprintf(buf, sizeof(buf),
                      "%s,%d,%d,%d,%s,%.17g,%.17g,%.17g,%d,%d,%llu\n",
                      model_name(cell.model).c_str(), cell.n, cell.m,
                      cell.family, name.c_str(), sim.j_hat, sim.std_err,
                      sim.tail_bound, sim.paths, sim.horizon,
                      static_cast<unsigned long long>(sim.seed));
        csv += buf;
      }
    }
    write_text_file(path("raw_results.csv"), csv);
  }

  // metric tables in the paper layout: rows n, columns family
  for (ObsModel model : config.models) {
    for (int m : config.m_values) {
      for (const char* metric : {"alpha_opt", "eps_myp"}) {
        bool any = false;
        std::string csv = "n";
        for (int f : config.families) {
          std::snprintf(buf, sizeof(buf), ",P%d", f);
          csv += buf;
        }
        csv += "\n";
        for (int n : config.n_values) {
          std::snprintf(buf, sizeof(buf), "%d", n);
          csv += buf;
          for (int f : config.families) {
            std::optional<double> value;
            for (const auto& cell : result.cells) {
              if (cell.model == model && cell.n == n && cell.m == m &&
                  cell.family == f) {
                value = std::string(metric) == "alpha_opt" ? cell.alpha_opt
                                                           : cell.eps_myp;
              }
            }
            if (value) {
              any = true;
              std::snprintf(buf, sizeof(buf), ",%.4f", *value);
            } else {
              std::snprintf(buf, sizeof(buf), ",");
            }
            csv += buf;
          }
          csv += "\n";
        }
        if (any) {
          std::snprintf(buf, sizeof(buf), "%s_%s_model%s_m%d.csv",
                        config.experiment.c_str(), metric,
                        model_name(model).c_str(), m);
          write_text_file(path(buf), csv);
        }
      }
    }
  }

  // provenance: everything needed to regenerate any cell
  {
    json prov;
    prov["schema_version"] = 1;
    prov["config"] = json::parse(config.to_json_text());
    prov["config_fingerprint"] = config.fingerprint();
    json cells = json::array();
    for (const auto& cell : result.cells) {
      json c;
      c["model"] = model_name(cell.model);
      c["n"] = cell.n;
      c["m"] = cell.m;
      c["family"] = cell.family;
      c["fleet_seed"] = cell.fleet_seed;
      c["sim_seed"] = cell.sim_seed;
      json pols;
      for (const auto& [name, sim] : cell.by_policy) {
        json p;
        p["J"] = sim.j_hat;
        p["std_err"] = sim.std_err;
        p["tail_bound"] = sim.tail_bound;
        pols[name] = p;
      }
      c["policies"] = pols;
      if (cell.alpha_opt) c["alpha_opt"] = *cell.alpha_opt;
      if (cell.eps_myp) c["eps_myp"] = *cell.eps_myp;
      cells.push_back(c);
    }
    prov["cells"] = cells;
    write_text_file(path("provenance.json"), prov.dump(2));
  }

  // wall-clock times live apart from the deterministic outputs
  {
    json t;
    json cells = json::array();
    for (const auto& cell : result.cells) {
      json c;
      c["model"] = model_name(cell.model);
      c["n"] = cell.n;
      c["m"] = cell.m;
      c["family"] = cell.family;
      c["index_seconds"] = cell.index_seconds;
      c["sim_seconds"] = cell.sim_seconds;
      cells.push_back(c);
    }
    t["cells"] = cells;
    write_text_file(path("timings.json"), t.dump(2));
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  bool want_wip = std::count(config.policies.begin(), config.policies.end(),
                             "wip") > 0;
  bool want_myp = std::count(config.policies.begin(), config.policies.end(),
                             "myp") > 0;
  bool want_opt = std::count(config.policies.begin(), config.policies.end(),
                             "opt") > 0;

  ExperimentResult result;
  result.config = config;

  for (ObsModel model : config.models) {
    std::uint64_t model_id = model == ObsModel::A ? 0 : 1;
    for (int n : config.n_values) {
      for (int family : config.families) {
        std::uint64_t fleet_seed =
            derive_stream(config.seed, model_id,
                          static_cast<std::uint64_t>(n), family);
        FleetBundle bundle =
            prepare_fleet(config, model, n, family, fleet_seed, want_wip);

        for (int m : config.m_values) {
          CellResult cell;
          cell.model = model;
          cell.n = n;
          cell.m = m;
          cell.family = family;
          cell.fleet_seed = fleet_seed;
          cell.sim_seed = derive_stream(fleet_seed, 1000 + m);
          cell.index_seconds = bundle.index_seconds;

          Fleet fleet;
          fleet.model = model;
          fleet.m = m;
          fleet.arms = bundle.arms;

          SimConfig sc;
          sc.horizon = config.horizon;
          sc.paths = config.paths;
          sc.beta = config.beta;
          sc.seed = cell.sim_seed;
          sc.threads = config.threads;

          auto t0 = std::chrono::steady_clock::now();
          if (want_wip) {
            WhittleIndexPolicy pol(bundle.index_tables, m);
            cell.by_policy["wip"] = simulate(fleet, pol, sc);
          }
          if (want_myp) {
            MyopicPolicy pol(fleet);
            cell.by_policy["myp"] = simulate(fleet, pol, sc);
          }
          if (want_opt) {
            std::vector<const ArmCache*> raw;
            for (const auto& a : fleet.arms) raw.push_back(a.get());
            auto chain = std::make_shared<JointChain>(
                std::move(raw), model, config.joint_state_cap);
            auto table = std::make_shared<JointPolicy>(
                joint_optimal_policy(*chain, m, config.beta));
            OptPolicy pol(chain, table);
            cell.by_policy["opt"] = simulate(fleet, pol, sc);
          }
          cell.sim_seconds = elapsed_seconds(t0);

          if (want_opt && want_wip)
            cell.alpha_opt = alpha_opt(cell.by_policy["opt"].j_hat,
                                       cell.by_policy["wip"].j_hat);
          if (want_myp && want_wip)
            cell.eps_myp = eps_myp(cell.by_policy["myp"].j_hat,
                                   cell.by_policy["wip"].j_hat);
          result.cells.push_back(std::move(cell));
        }
      }
    }
  }

  if (!config.out_dir.empty()) write_outputs(result);
  return result;
}

std::vector<CorpusArm> make_corpus(const CorpusSpec& spec) {
  Rng rng(spec.seed);
  std::vector<CorpusArm> corpus;
  corpus.reserve(spec.count);
  auto pick = [&](const auto& values) {
    return values[static_cast<std::size_t>(rng.uniform01() * values.size()) %
                  values.size()];
  };
  for (int i = 0; i < spec.count; ++i) {
    CorpusArm c;
    c.family = pick(spec.families);
    c.beta = pick(spec.betas);
    c.ell = pick(spec.ells);
    int size = pick(spec.sizes);
    c.p = 0.05 + 0.9 * rng.uniform01();
    c.seed = rng.next_u64();
    c.arm = Arm{make_structured_matrix(c.family, c.p, size),
                sample_reset_pmf(size, c.seed), default_cost(size)};
    corpus.push_back(std::move(c));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

namespace {

void fail(SuiteResult& suite, const std::string& what) {
  suite.pass = false;
  if (suite.failures.size() < 20) suite.failures.push_back(what);
}

CostSpec broken_cost(int size) {
  // decreasing passive cost: violates the monotonicity assumption
  CostSpec c = default_cost(size);
  std::reverse(c.passive.begin(), c.passive.end());
  return c;
}

std::string arm_tag(const CorpusArm& c) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "family=%d size=%d p=%.3f beta=%g ell=%d",
                c.family, c.arm.size(), c.p, c.beta, c.ell);
  return buf;
}

SuiteResult suite_assumptions(const VerifyOptions& options) {
  SuiteResult suite;
  suite.name = "assumptions";
  for (int family = 1; family <= 4; ++family) {
    for (int size : {3, 5, 8}) {
      for (double p : {0.0, 0.3, 0.7, 1.0}) {
        Arm arm{make_structured_matrix(family, p, size),
                sample_reset_pmf(size, derive_stream(options.seed, family,
                                                     size)),
                options.inject_broken_cost ? broken_cost(size)
                                           : default_cost(size)};
        ++suite.checked;
        AssumptionReport rep = validate_assumptions(arm);
        if (!rep.ok()) {
          char buf[160];
          std::snprintf(buf, sizeof(buf),
                        "family=%d size=%d p=%.2f: %s", family, size, p,
                        rep.describe().c_str());
          fail(suite, buf);
        }
      }
    }
  }
  return suite;
}

std::vector<CorpusArm> verify_corpus(const VerifyOptions& options) {
  CorpusSpec spec;
  spec.count = options.arms;
  spec.seed = options.seed;
  std::vector<CorpusArm> corpus = make_corpus(spec);
  if (options.inject_broken_cost)
    for (auto& c : corpus) c.arm.cost = broken_cost(c.arm.size());
  return corpus;
}

SuiteResult suite_oracle_agreement(const VerifyOptions& options) {
  SuiteResult suite;
  suite.name = "oracle_agreement";
  for (const CorpusArm& c : verify_corpus(options)) {
    ArmCache cache(c.arm, c.ell);
    int horizon = static_cast<int>(
        std::ceil(std::log(1e-12) / std::log(c.beta)));
    Rng rng(derive_stream(options.seed, 0xE));
    for (int theta = 0; theta <= c.ell + 1; ++theta) {
      PolicyValue closed = dn_values_a(cache, ThresholdPolicyA{theta}, c.beta);
      PolicyValue fh =
          finite_horizon_eval(cache, ThresholdPolicyA{theta}, horizon, c.beta)
              .value;
      ++suite.checked;
      for (std::size_t z = 0; z < closed.D.size(); ++z) {
        if (std::fabs(closed.D[z] - fh.D[z]) > 1e-8 ||
            std::fabs(closed.N[z] - fh.N[z]) > 1e-8) {
          fail(suite, "model A " + arm_tag(c) + " theta=" +
                          std::to_string(theta));
          break;
        }
      }
    }
    for (int rep = 0; rep < 5; ++rep) {
      ThresholdPolicyB pol;
      for (int s = 0; s < c.arm.size(); ++s)
        pol.theta.push_back(
            static_cast<int>(rng.uniform01() * (c.ell + 2)));
      PolicyValue closed = dn_values_b(cache, pol, c.beta);
      PolicyValue fh =
          finite_horizon_eval(cache, pol, horizon, c.beta).value;
      ++suite.checked;
      for (std::size_t z = 0; z < closed.D.size(); ++z) {
        if (std::fabs(closed.D[z] - fh.D[z]) > 1e-8 ||
            std::fabs(closed.N[z] - fh.N[z]) > 1e-8) {
          fail(suite, "model B " + arm_tag(c));
          break;
        }
      }
    }
  }
  return suite;
}

SuiteResult suite_truncation_bound(const VerifyOptions& options) {
  SuiteResult suite;
  suite.name = "truncation_bound";
  std::vector<CorpusArm> corpus = verify_corpus(options);
  if (corpus.size() > 4) corpus.resize(4);
  for (const CorpusArm& c : corpus) {
    const int ell_ref = 200;
    ArmCache ref_cache(c.arm, ell_ref);
    for (ObsModel model : {ObsModel::A, ObsModel::B}) {
      for (double lambda : {-5.0, 0.0, 5.0}) {
        ValueFunction ref =
            value_iteration(ref_cache, model, lambda, c.beta, 1e-11);
        double span_c;
        {
          double lo = 1e300, hi = -1e300;
          for (int x = 0; x < c.arm.size(); ++x) {
            for (double v : {c.arm.cost.passive[x],
                             c.arm.cost.active[x] + lambda}) {
              lo = std::min(lo, v);
              hi = std::max(hi, v);
            }
          }
          span_c = hi - lo;
        }
        for (int ell : {5, 10, 20}) {
          ArmCache cache(c.arm, ell);
          ValueFunction vf =
              value_iteration(cache, model, lambda, c.beta, 1e-11);
          ++suite.checked;
          int rows = model == ObsModel::A ? 1 : c.arm.size();
          for (int s = 0; s < rows; ++s) {
            for (int k = 0; k <= ell; ++k) {
              double diff = std::fabs(vf.V[vf.idx(s, k)] -
                                      ref.V[ref.idx(s, k)]);
              double bound = std::pow(c.beta, ell - k + 1) * span_c /
                                 (1.0 - c.beta) +
                             1e-9;
              if (diff > bound) {
                char buf[200];
                std::snprintf(buf, sizeof(buf),
                              "%s model %s ell=%d lambda=%g (s=%d,k=%d): "
                              "|diff|=%.3g > bound=%.3g",
                              arm_tag(c).c_str(), model_name(model).c_str(),
                              ell, lambda, s, k, diff, bound);
                fail(suite, buf);
              }
            }
          }
        }
      }
    }
  }
  return suite;
}

SuiteResult suite_threshold_structure(const VerifyOptions& options) {
  SuiteResult suite;
  suite.name = "threshold_structure";
  for (const CorpusArm& c : verify_corpus(options)) {
    ArmCache cache(c.arm, c.ell);
    for (ObsModel model : {ObsModel::A, ObsModel::B}) {
      PenalizedDp dp(cache, model, c.beta, 1e-11);
      double b = dp.bracket();
      for (int i = 0; i < 20; ++i) {
        double lambda = -b + 2.0 * b * i / 19.0;
        const ValueFunction& vf = dp.solve(lambda);
        ++suite.checked;
        try {
          if (model == ObsModel::A)
            extract_threshold_a(vf);
          else
            extract_threshold_b(vf);
        } catch (const std::exception& e) {
          fail(suite, arm_tag(c) + " model " + model_name(model) +
                          " lambda=" + std::to_string(lambda) + ": " +
                          e.what());
        }
      }
    }
  }
  return suite;
}

SuiteResult suite_indexability(const VerifyOptions& options) {
  SuiteResult suite;
  suite.name = "indexability";
  for (const CorpusArm& c : verify_corpus(options)) {
    ArmCache cache(c.arm, c.ell);
    for (ObsModel model : {ObsModel::A, ObsModel::B}) {
      PenalizedDp dp(cache, model, c.beta, 1e-11);
      double b = dp.bracket();
      std::vector<double> grid;
      for (int i = 0; i < 30; ++i) grid.push_back(-b + 2.0 * b * i / 29.0);
      PassiveScan scan = passive_set_scan(dp, grid);
      ++suite.checked;
      if (!scan.indexable)
        fail(suite, arm_tag(c) + " model " + model_name(model) +
                        ": passive sets not nested at grid index " +
                        std::to_string(scan.first_violation));
    }
  }
  return suite;
}

SuiteResult suite_index_agreement(const VerifyOptions& options) {
  SuiteResult suite;
  suite.name = "index_agreement";
  std::vector<CorpusArm> corpus = verify_corpus(options);
  if (corpus.size() > 4) corpus.resize(4);
  for (const CorpusArm& c : corpus) {
    ArmCache cache(c.arm, c.ell);
    {
      IndexTableA table = whittle_table_a(cache, c.beta);
      PenalizedDp dp(cache, ObsModel::A, c.beta, 1e-12);
      for (int k = 0; k <= c.ell; ++k) {
        ++suite.checked;
        double oracle = index_by_bisection(dp, InfoStateA{k});
        if (std::fabs(oracle - table.w[k]) > 1e-6)
          fail(suite, arm_tag(c) + " model A k=" + std::to_string(k));
      }
    }
    {
      IndexTableB table = whittle_table_b(cache, c.beta);
      PenalizedDp dp(cache, ObsModel::B, c.beta, 1e-12);
      for (int s = 0; s < c.arm.size(); ++s) {
        for (int k = 0; k <= c.ell; ++k) {
          ++suite.checked;
          double oracle = index_by_bisection(dp, InfoStateB{s, k});
          if (std::fabs(oracle - table.at(s, k)) > 1e-6)
            fail(suite, arm_tag(c) + " model B s=" + std::to_string(s) +
                            " k=" + std::to_string(k));
        }
      }
    }
  }
  return suite;
}

}  // namespace

bool VerificationReport::all_pass() const {
  for (const auto& s : suites)
    if (!s.pass) return false;
  return true;
}

std::string VerificationReport::to_json_text() const {
  json j;
  json arr = json::array();
  for (const auto& s : suites) {
    json e;
    e["name"] = s.name;
    e["pass"] = s.pass;
    e["checked"] = s.checked;
    e["failures"] = s.failures;
    arr.push_back(e);
  }
  j["suites"] = arr;
  j["all_pass"] = all_pass();
  return j.dump(2);
}

VerificationReport run_verification(const VerifyOptions& options) {
  VerificationReport report;
  for (const std::string& name : options.suites) {
    if (name == "assumptions")
      report.suites.push_back(suite_assumptions(options));
    else if (name == "oracle_agreement")
      report.suites.push_back(suite_oracle_agreement(options));
    else if (name == "truncation_bound")
      report.suites.push_back(suite_truncation_bound(options));
    else if (name == "threshold_structure")
      report.suites.push_back(suite_threshold_structure(options));
    else if (name == "indexability")
      report.suites.push_back(suite_indexability(options));
    else if (name == "index_agreement")
      report.suites.push_back(suite_index_agreement(options));
    else
      throw std::invalid_argument("unknown suite: " + name);
  }
  return report;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace rbandits
