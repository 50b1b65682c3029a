#pragma once

// Experiment configuration: a single key/value file with nested sections is
// the full record of an experiment. Parsing is strict -- unknown sections or
// keys are rejected -- and parse -> serialize -> parse is the identity.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "treechain/engine.hpp"
#include "treechain/kernels.hpp"
#include "treechain/limits.hpp"
#include "treechain/test_function.hpp"

namespace treechain {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KernelSection {
  std::string family = "donsker";        // donsker|poisson|symmetric_product|custom
  std::string increment = "rademacher";  // rademacher|gaussian|bernoulli_jump|point_mass|table
  double sigma = 1.0;                    // gaussian
  double shift = 0.0;                    // point_mass
  double lambda = 1.0;                   // poisson rate / bernoulli_jump rate
  std::vector<std::pair<double, double>> table;  // value:prob rows
  std::vector<MixtureRow> mixture;               // shift0:shift1:prob rows
  std::uint64_t n = 1;
  std::vector<std::uint64_t> n_list;
};

struct ExperimentSection {
  double x0 = 0.0;
  double t = 1.0;
  std::uint64_t m = 10000;      // leaf sample size
  int replicates = 200;
  std::uint32_t k = 4;          // generation for simulate/oracle/mrca
  std::string phi = "square";   // identity|square|quartic|indicator|exp_bounded|table
  double phi_threshold = 1.0;   // indicator c
  double phi_scale = 1.0;       // exp_bounded a
  std::vector<std::pair<double, double>> phi_table;
  double threshold = 0.05;      // verdict threshold (lln distance, genchk gap)
  double significance = 0.01;   // chi-square significance (mrca)
  double grid_min = -2.0;
  double grid_max = 2.0;
  double grid_step = 0.1;
  std::uint32_t k_max = kDefaultFullTreeCap;  // full-tree generation cap
  std::string target = "walk";  // simulate: walk|tree
};

struct LawSection {
  std::string kind = "auto";  // auto|normal|poisson|point_mass
};

struct RunSection {
  std::uint64_t master_seed = 1;
  int workers = 1;
  std::string out = ".";
  std::string format = "json";  // json|csv|both
};

struct ExperimentConfig {
  KernelSection kernel;
  ExperimentSection experiment;
  LawSection law;
  RunSection run;

  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse_string(const std::string& text);
  [[nodiscard]] std::string serialize() const;
  // The experiment's identity: everything that determines results
  // (kernel/experiment/law sections plus the master seed), excluding
  // execution details (workers, output paths, formats).
  [[nodiscard]] std::string serialize_identity() const;

  // Instantiations (validated; throw ConfigError on inconsistent settings).
  [[nodiscard]] KernelFamily make_kernel() const { return make_kernel(kernel.n); }
  [[nodiscard]] KernelFamily make_kernel(std::uint64_t n) const;
  [[nodiscard]] TestFunction make_phi() const;
  [[nodiscard]] LimitLaw make_law() const;
  [[nodiscard]] std::vector<std::uint64_t> scales() const;  // n_list or {n}
  [[nodiscard]] VertexRngPolicy policy() const { return {run.master_seed}; }
};

// 17-significant-digit float text, locale-independent ('.' decimal).
std::string format_double(double v);

}  // namespace treechain
