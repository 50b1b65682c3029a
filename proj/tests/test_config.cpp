#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "treechain/config.hpp"

using namespace treechain;

namespace {

const char* kSample = R"(# example experiment
[kernel]
family = donsker
increment = rademacher
n = 256

[experiment]
x0 = 0
t = 1.0
m = 20000
phi = square
threshold = 0.03

[law]
kind = normal

[run]
master_seed = 7
workers = 4
out = results
format = both
)";

}  // namespace

TEST_CASE("parse and instantiate") {
  const auto c = ExperimentConfig::parse_string(kSample);
  CHECK(c.kernel.n == 256);
  CHECK(c.run.master_seed == 7);
  CHECK(c.run.workers == 4);
  const auto kernel = c.make_kernel();
  CHECK(kernel.family() == Family::donsker);
  CHECK(kernel.scale() == 256);
  CHECK(c.make_phi().name() == "square");
  CHECK(c.make_law().kind() == LimitLaw::Kind::normal);
  CHECK(c.scales() == std::vector<std::uint64_t>{256});
}

TEST_CASE("strict parsing rejects unknown keys and sections") {
  CHECK_THROWS_AS((void)ExperimentConfig::parse_string("[kernel]\nfamilly = x\n"),
                  ConfigError);
  CHECK_THROWS_AS((void)ExperimentConfig::parse_string("[cooking]\nheat = 9\n"),
                  ConfigError);
  CHECK_THROWS_AS((void)ExperimentConfig::parse_string("orphan = 1\n"), ConfigError);
  CHECK_THROWS_AS((void)ExperimentConfig::parse_string("[kernel]\nn = -3\n"),
                  ConfigError);
  CHECK_THROWS_AS((void)ExperimentConfig::parse_string("[run]\nformat = yaml\n"),
                  ConfigError);
}

TEST_CASE("round trip: parse -> serialize -> parse is the identity") {
  auto c = ExperimentConfig::parse_string(kSample);
  c.kernel.n_list = {4, 8, 12, 16};
  c.kernel.table = {{-1.0, 0.5}, {1.0, 0.5}};
  c.experiment.phi_table = {{0.0, 0.25}, {1.5, 2.0}};
  const std::string once = c.serialize();
  const auto reparsed = ExperimentConfig::parse_string(once);
  CHECK(reparsed.serialize() == once);
  CHECK(reparsed.kernel.n_list == c.kernel.n_list);
  CHECK(reparsed.experiment.phi_table == c.experiment.phi_table);
  CHECK(reparsed.run.out == c.run.out);
}

TEST_CASE("17-digit float round trip") {
  const double tricky = 0.1 + 0.2;
  auto c = ExperimentConfig::parse_string(kSample);
  c.experiment.t = tricky;
  const auto back = ExperimentConfig::parse_string(c.serialize());
  CHECK(back.experiment.t == tricky);
}

TEST_CASE("kernel construction failures surface as config errors") {
  auto c = ExperimentConfig::parse_string(kSample);
  c.kernel.family = "poisson";
  c.kernel.lambda = 1.0;
  c.kernel.n = 2;  // violates n > 2 lambda
  CHECK_THROWS_AS((void)c.make_kernel(), ConfigError);
  c.kernel.family = "symmetric_product";
  CHECK_NOTHROW((void)c.make_kernel(8));
  c.kernel.family = "custom";
  CHECK_THROWS_AS((void)c.make_kernel(), ConfigError);  // missing mixture
}

TEST_CASE("law resolution") {
  auto c = ExperimentConfig::parse_string(kSample);
  c.law.kind = "auto";
  CHECK(c.make_law().kind() == LimitLaw::Kind::normal);
  c.kernel.family = "poisson";
  c.kernel.n = 8;
  CHECK(c.make_law().kind() == LimitLaw::Kind::poisson);
  c.experiment.t = 0.0;
  CHECK(c.make_law().kind() == LimitLaw::Kind::point_mass);
  c.experiment.t = 1.0;
  c.kernel.family = "custom";
  CHECK_THROWS_AS((void)c.make_law(), ConfigError);
}

TEST_CASE("phi selection") {
  auto c = ExperimentConfig::parse_string(kSample);
  c.experiment.phi = "indicator";
  c.experiment.phi_threshold = 2.0;
  CHECK(c.make_phi()(2.0) == 1.0);
  CHECK(c.make_phi()(1.9) == 0.0);
  c.experiment.phi = "exp_bounded";
  c.experiment.phi_scale = 0.5;
  CHECK(c.make_phi()(0.0) == 1.0);
  c.experiment.phi = "nope";
  CHECK_THROWS_AS((void)c.make_phi(), ConfigError);
}
