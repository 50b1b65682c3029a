// treechain: experiment harness for tree-indexed Markov chain simulations.
//
// Subcommands: simulate | lln | martingale | paircov | variance | genchk |
//              mrca | oracle
// Exit codes:  0 all checks passed, 2 at least one check failed,
//              1 usage/config error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treechain/config.hpp"
#include "treechain/diagnostics.hpp"
#include "treechain/engine.hpp"
#include "treechain/enumeration.hpp"
#include "treechain/limits.hpp"
#include "treechain/measures.hpp"
#include "treechain/parallel.hpp"
#include "treechain/report.hpp"
#include "treechain/simd/ops.hpp"
#include "treechain/stats.hpp"

namespace tc = treechain;

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::string simd;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->required();
  cmd->add_option("--seed", args.seed, "override run.master_seed");
  cmd->add_option("--workers", args.workers, "override run.workers");
  cmd->add_option("--out", args.out, "override run.out (output directory)");
  cmd->add_option("--format", args.format, "override run.format (json|csv|both)");
  cmd->add_option("--simd", args.simd, "SIMD backend (auto|scalar|avx2)");
}

tc::ExperimentConfig load_config(const CommonArgs& args) {
  tc::ExperimentConfig c = tc::ExperimentConfig::parse_file(args.config_path);
  if (args.seed) c.run.master_seed = *args.seed;
  if (args.workers) c.run.workers = *args.workers;
  if (args.out) c.run.out = *args.out;
  if (args.format) c.run.format = *args.format;
  if (c.run.format != "json" && c.run.format != "csv" && c.run.format != "both")
    throw tc::ConfigError("run.format must be json, csv, or both");
  if (c.run.workers < 1) throw tc::ConfigError("run.workers must be >= 1");
  if (!args.simd.empty() && !tc::simd::set_backend(args.simd))
    throw tc::ConfigError("unknown or unsupported SIMD backend '" + args.simd + "'");
  return c;
}

struct CsvSink {
  bool enabled = false;
  std::string dir;

  void table(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<std::string>>& rows) const {
    if (!enabled) return;
    std::filesystem::create_directories(dir);
    tc::write_csv(dir + "/" + name, header, rows);
  }
};

std::string fd(double v) { return tc::format_double(v); }

// --- subcommands -------------------------------------------------------------

tc::RunReport cmd_simulate(const tc::ExperimentConfig& c, const CsvSink& csv) {
  tc::RunReport report;
  const auto kernel = c.make_kernel();
  const auto policy = c.policy();
  nlohmann::json details;
  if (c.experiment.target == "walk") {
    const tc::WalkPath path =
        tc::simulate_walk(kernel, c.experiment.x0, c.experiment.k, policy);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < path.states.size(); ++j)
      rows.push_back({std::to_string(j), fd(path.states[j])});
    csv.table("walk.csv", {"step", "state"}, rows);
    details["steps"] = c.experiment.k;
    details["final_state"] = path.states.back();
  } else {
    std::vector<std::vector<std::string>> rows;
    const tc::GenerationBuffer last = tc::simulate_full_tree(
        kernel, c.experiment.x0, c.experiment.k, policy,
        [&](std::uint32_t k, std::span<const double> states) {
          const tc::EmpiricalMeasure z{{states.begin(), states.end()}};
          rows.push_back({std::to_string(k),
                          fd(tc::integrate(z, tc::TestFunction::identity())),
                          fd(tc::integrate(z, tc::TestFunction::square()))});
        },
        c.run.workers, c.experiment.k_max);
    csv.table("generations.csv", {"k", "mean", "second_moment"}, rows);
    std::filesystem::create_directories(c.run.out);
    const std::string dump =
        c.run.out + "/gen_" + std::to_string(last.generation) + ".tcgb";
    tc::write_generation_dump(dump, last, kernel.integer_valued());
    details["generations"] = c.experiment.k;
    details["dump"] = dump;
  }
  report.checks.push_back({"simulate_completed", true, details});
  return report;
}

tc::RunReport cmd_lln(const tc::ExperimentConfig& c, const CsvSink& csv) {
  tc::RunReport report;
  const auto kernel = c.make_kernel();
  std::vector<double> atoms;
  const tc::LlnVerdict v =
      tc::lln_check(kernel, c.experiment.x0, c.experiment.t, c.experiment.m,
                    c.make_law(), c.experiment.threshold, c.policy(),
                    csv.enabled ? &atoms : nullptr);
  nlohmann::json details;
  details["family"] = v.family;
  details["n"] = v.n;
  details["t"] = v.t;
  details["m"] = v.m;
  details["distance_kind"] = v.distance_kind;
  details["distance"] = v.distance;
  details["threshold"] = v.threshold;
  details["second_moment"] = v.second_moment;
  details["prob_zero"] = v.prob_zero;
  details["law"] = c.make_law().describe();
  report.checks.push_back({"lln_distance_below_threshold", v.pass, details});
  csv.table("lln.csv",
            {"family", "n", "t", "m", "distance_kind", "distance", "threshold",
             "pass"},
            {{v.family, std::to_string(v.n), fd(v.t), std::to_string(v.m),
              v.distance_kind, fd(v.distance), fd(v.threshold),
              v.pass ? "1" : "0"}});
  if (!atoms.empty()) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(atoms.size());
    for (const double a : atoms) rows.push_back({fd(a)});
    csv.table("measure.csv", {"state"}, rows);
  }
  return report;
}

tc::RunReport cmd_martingale(const tc::ExperimentConfig& c, const CsvSink& csv) {
  tc::RunReport report;
  const auto kernel = c.make_kernel();
  const auto phi = c.make_phi();
  const auto policy = c.policy();
  const double horizon = c.experiment.t;

  const tc::MartingaleEnsemble e = tc::martingale_ensemble(
      kernel, c.experiment.x0, phi, horizon, c.experiment.replicates, policy,
      c.run.workers, c.experiment.k_max);
  const bool mean_zero =
      std::fabs(e.mean_terminal) <= 4.0 * e.se_terminal + 1e-12;
  nlohmann::json details;
  details["n"] = e.n;
  details["replicates"] = e.replicates;
  details["mean_terminal"] = e.mean_terminal;
  details["se_terminal"] = e.se_terminal;
  report.checks.push_back({"martingale_mean_zero_within_4se", mean_zero, details});

  const tc::MartingalePath path0 = tc::martingale_path(
      kernel, c.experiment.x0, phi, horizon, policy.replicate(0), c.run.workers,
      c.experiment.k_max);
  std::vector<std::vector<std::string>> prow;
  for (std::size_t j = 0; j < path0.values.size(); ++j)
    prow.push_back({std::to_string(j), fd(path0.times[j]), fd(path0.values[j]),
                    fd(path0.compensator[j])});
  csv.table("martingale_path.csv", {"j", "t", "M", "compensator"}, prow);

  std::vector<std::vector<std::string>> rrow;
  for (int r = 0; r < e.replicates; ++r)
    rrow.push_back({std::to_string(r), fd(e.terminal[r]), fd(e.sup_abs[r])});
  csv.table("martingale_replicates.csv", {"replicate", "terminal", "sup_abs"}, rrow);

  if (c.kernel.n_list.size() >= 2) {
    const auto decay = tc::martingale_sup_decay(
        kernel, c.experiment.x0, phi, horizon, c.kernel.n_list,
        c.experiment.replicates, policy, c.run.workers, c.experiment.k_max);
    std::vector<std::vector<std::string>> drow;
    for (const auto& row : decay)
      drow.push_back({std::to_string(row.n), fd(row.value)});
    csv.table("martingale_decay.csv", {"n", "median_sup_abs"}, drow);
    nlohmann::json dd;
    dd["n_first"] = decay.front().n;
    dd["median_first"] = decay.front().value;
    dd["n_last"] = decay.back().n;
    dd["median_last"] = decay.back().value;
    report.checks.push_back({"martingale_sup_median_decays",
                             decay.back().value < decay.front().value, dd});
  }
  return report;
}

tc::RunReport cmd_paircov(const tc::ExperimentConfig& c, const CsvSink& csv) {
  tc::RunReport report;
  const auto phi = c.make_phi();
  const auto policy = c.policy();
  std::vector<tc::PairCovReport> rows;
  for (const std::uint64_t n : c.scales())
    rows.push_back(tc::pair_covariance(c.make_kernel(n), c.experiment.x0,
                                       c.experiment.t, phi,
                                       c.experiment.replicates, policy,
                                       c.run.workers));
  std::vector<std::vector<std::string>> crow;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    crow.push_back({std::to_string(r.n), fd(r.t), r.phi,
                    std::to_string(r.replicates), fd(r.estimate), fd(r.lo),
                    fd(r.hi), fd(r.remainder_bound)});
    nlohmann::json j;
    j["n"] = r.n;
    j["estimate"] = r.estimate;
    j["ci"] = {r.lo, r.hi};
    j["remainder_bound"] = r.remainder_bound;
    j["phi_bounded"] = r.phi_bounded;
    arr.push_back(j);
  }
  csv.table("paircov.csv",
            {"n", "t", "phi", "replicates", "estimate", "ci_lo", "ci_hi",
             "remainder_bound"},
            crow);
  nlohmann::json details;
  details["rows"] = arr;
  if (rows.size() >= 2) {
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
      decreasing &= std::fabs(rows[i + 1].estimate) < std::fabs(rows[i].estimate);
    report.checks.push_back({"abs_covariance_decreasing_in_n", decreasing, details});
    const auto& last = rows.back();
    report.checks.push_back(
        {"ci_contains_zero_at_largest_n", last.lo <= 0.0 && 0.0 <= last.hi, details});
  } else {
    report.checks.push_back({"pair_covariance_estimated", true, details});
  }
  return report;
}

tc::RunReport cmd_variance(const tc::ExperimentConfig& c, const CsvSink& csv) {
  tc::RunReport report;
  std::vector<std::vector<double>> samples;
  const auto rows = tc::variance_decay(
      c.make_kernel(), c.experiment.x0, c.make_phi(), c.experiment.t, c.scales(),
      c.experiment.replicates, c.policy(), c.run.workers, c.experiment.k_max,
      &samples);
  tc::rng::Stream boot = c.policy().labeled_stream(tc::rng::salt::kBootstrap, 777);
  std::vector<std::vector<std::string>> crow;
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    crow.push_back({std::to_string(r.n), fd(r.value), fd(r.lo), fd(r.hi)});
    // moment-measure pairings of <Z, phi> with itself, plus the
    // deterministic-measure product-form gap
    const auto m = tc::estimate_moments(samples[i], samples[i]);
    const auto gap = tc::product_form_gap(samples[i], samples[i], boot);
    nlohmann::json j;
    j["n"] = r.n;
    j["variance"] = r.value;
    j["ci"] = {r.lo, r.hi};
    j["moments"] = {{"first", m.first1},       {"first_se", m.first1_se},
                    {"second", m.second},      {"second_se", m.second_se},
                    {"replicates", m.replicates}};
    j["product_form_gap"] = {{"gap", gap.gap}, {"ci", {gap.lo, gap.hi}}};
    arr.push_back(j);
  }
  csv.table("variance.csv", {"n", "variance", "ci_lo", "ci_hi"}, crow);
  nlohmann::json details;
  details["rows"] = arr;
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    decreasing &= rows[i + 1].value < rows[i].value;
  report.checks.push_back(
      {rows.size() >= 2 ? "variance_strictly_decreasing" : "variance_estimated",
       decreasing, details});
  return report;
}

tc::RunReport cmd_genchk(const tc::ExperimentConfig& c, const CsvSink& csv) {
  tc::RunReport report;
  const auto phi = c.make_phi();
  const tc::Grid grid{c.experiment.grid_min, c.experiment.grid_max,
                      c.experiment.grid_step};
  const auto gen = tc::GeneratorSpec::for_family(c.make_kernel());

  std::vector<std::vector<std::string>> crow;
  nlohmann::json arr = nlohmann::json::array();
  bool within = true;
  for (const std::uint64_t n : c.scales()) {
    const tc::GapReport r = tc::generator_gap(c.make_kernel(n), phi, gen, grid);
    within &= r.gap <= c.experiment.threshold;
    crow.push_back({r.phi, r.family, std::to_string(r.n), fd(r.grid_min),
                    fd(r.grid_max), fd(r.grid_step), fd(r.gap)});
    nlohmann::json j;
    j["phi"] = r.phi;
    j["family"] = r.family;
    j["n"] = r.n;
    j["grid_min"] = r.grid_min;
    j["grid_max"] = r.grid_max;
    j["grid_step"] = r.grid_step;
    j["gap"] = r.gap;
    arr.push_back(j);
  }
  csv.table("genchk.csv",
            {"phi", "family", "n", "grid_min", "grid_max", "grid_step", "gap"},
            crow);
  nlohmann::json details;
  details["generator"] = gen.name();
  details["rows"] = arr;
  details["threshold"] = c.experiment.threshold;
  report.checks.push_back({"generator_gap_within_threshold", within, details});

  const double fg = tc::function_gap(phi, phi, grid);
  nlohmann::json fgd;
  fgd["phi_n"] = "identity embedding (phi_n = phi)";
  fgd["gap"] = fg;
  report.checks.push_back({"function_gap_zero", fg == 0.0, fgd});
  return report;
}

tc::RunReport cmd_mrca(const tc::ExperimentConfig& c, const CsvSink& csv) {
  tc::RunReport report;
  const std::uint32_t k = c.experiment.k;
  const auto pmf = tc::mrca_depth_pmf(k);
  tc::rng::Stream stream = c.policy().labeled_stream(tc::rng::salt::kLeafSampling, 0);
  std::vector<std::uint64_t> counts(k + 1, 0);
  for (std::uint64_t i = 0; i < c.experiment.m; ++i) {
    const tc::Vertex a = tc::sample_leaf(k, stream);
    const tc::Vertex b = tc::sample_leaf(k, stream);
    ++counts[tc::mrca(a, b).depth()];
  }
  const auto chi = tc::stats::chi_square_gof(counts, pmf);
  const bool pass = chi.p_value >= c.experiment.significance;
  nlohmann::json details;
  details["k"] = k;
  details["pairs"] = c.experiment.m;
  details["chi_square"] = chi.statistic;
  details["dof"] = chi.dof;
  details["p_value"] = chi.p_value;
  details["significance"] = c.experiment.significance;
  report.checks.push_back({"mrca_depth_law_chi_square", pass, details});
  std::vector<std::vector<std::string>> rows;
  for (std::uint32_t j = 0; j <= k; ++j)
    rows.push_back({std::to_string(j), fd(pmf[j]), std::to_string(counts[j])});
  csv.table("mrca.csv", {"depth", "probability", "count"}, rows);
  return report;
}

tc::RunReport cmd_oracle(const tc::ExperimentConfig& c, const CsvSink& csv) {
  tc::RunReport report;
  const auto kernel = c.make_kernel();
  const auto phi = c.make_phi();
  const auto policy = c.policy();
  const std::uint32_t k = c.experiment.k;

  const double oracle_tree =
      tc::enumerate_tree_expectation(kernel, c.experiment.x0, k, phi);
  const double oracle_walk =
      tc::enumerate_walk_expectation(kernel, c.experiment.x0, k, phi);
  nlohmann::json details;
  details["k"] = k;
  details["phi"] = phi.name();
  details["oracle_tree"] = oracle_tree;
  details["oracle_walk"] = oracle_walk;
  report.checks.push_back({"tree_equals_walk_expectation",
                           std::fabs(oracle_tree - oracle_walk) <= 1e-12, details});

  if (k >= 1) {
    const auto sm = tc::enumerate_second_moment(kernel, c.experiment.x0, k, phi);
    const double rhs = sm.pair_product_distinct +
                       std::ldexp(1.0, -static_cast<int>(k)) *
                           (sm.marginal_square - sm.pair_product_distinct);
    nlohmann::json smd;
    smd["mean_square"] = sm.mean_square;
    smd["decomposition"] = rhs;
    report.checks.push_back({"second_moment_decomposition",
                             std::fabs(sm.mean_square - rhs) <= 1e-12, smd});
  }

  const int replicates = c.experiment.replicates;
  std::vector<double> values(replicates);
  tc::parallel_for(static_cast<std::uint64_t>(replicates), c.run.workers,
                   [&](std::uint64_t r) {
                     const tc::GenerationBuffer g = tc::simulate_full_tree(
                         kernel, c.experiment.x0, k, policy.replicate(r), {}, 1,
                         c.experiment.k_max);
                     values[r] = tc::integrate(tc::empirical_from_buffer(g), phi);
                   });
  const double mean = tc::stats::mean(values);
  const double se = replicates > 1
                        ? std::sqrt(tc::stats::sample_variance(values) /
                                    static_cast<double>(replicates))
                        : 0.0;
  const bool sim_ok = se > 0.0 ? std::fabs(mean - oracle_tree) <= 4.0 * se
                               : std::fabs(mean - oracle_tree) <= 1e-12;
  nlohmann::json simd_details;
  simd_details["replicates"] = replicates;
  simd_details["simulated_mean"] = mean;
  simd_details["standard_error"] = se;
  simd_details["oracle"] = oracle_tree;
  report.checks.push_back({"simulation_within_4se_of_oracle", sim_ok, simd_details});

  csv.table("oracle.csv",
            {"kernel", "k", "phi", "oracle_tree", "oracle_walk", "simulated_mean",
             "standard_error"},
            {{kernel.describe(), std::to_string(k), phi.name(), fd(oracle_tree),
              fd(oracle_walk), fd(mean), fd(se)}});
  return report;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tree-indexed Markov chain simulation and verification"};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    tc::RunReport (*run)(const tc::ExperimentConfig&, const CsvSink&);
  };
  const Entry entries[] = {
      {"simulate", "full-tree generation stream or walk path", cmd_simulate},
      {"lln", "law-of-large-numbers verdict against the analytic limit", cmd_lln},
      {"martingale", "mean-zero martingale and compensator checks", cmd_martingale},
      {"paircov", "covariance of phi at two distinct random leaves", cmd_paircov},
      {"variance", "variance decay of <Z, phi> across scales", cmd_variance},
      {"genchk", "generator and test-function approximation gaps", cmd_genchk},
      {"mrca", "chi-square of sampled MRCA depths against the exact law", cmd_mrca},
      {"oracle", "exact enumeration oracle vs simulation", cmd_oracle},
  };

  std::vector<CommonArgs> args(std::size(entries));
  std::vector<const Entry*> chosen;
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    CLI::App* sub = app.add_subcommand(entries[i].name, entries[i].help);
    add_common(sub, args[i]);
    sub->callback([&, i] { chosen.push_back(&entries[i]); });
  }

  CLI11_PARSE(app, argc, argv);
  if (chosen.size() != 1) {
    std::cerr << "expected exactly one subcommand\n";
    return 1;
  }
  const Entry& entry = *chosen.front();
  const CommonArgs& a = args[&entry - entries];

  try {
    const tc::ExperimentConfig config = load_config(a);
    const CsvSink csv{config.run.format != "json", config.run.out};
    const auto start = std::chrono::steady_clock::now();
    tc::RunReport report = entry.run(config, csv);
    report.command = entry.name;
    report.version = tc::library_version();
    report.config = config;
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    report.write(config.run.out);
    for (const auto& check : report.checks)
      std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name << "\n";
    return report.all_pass() ? 0 : 2;
  } catch (const tc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
