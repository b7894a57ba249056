#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "masec/experiment.hpp"
#include "support.hpp"

using namespace masec;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("masec_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> lines(const fs::path& file) {
  std::ifstream in(file);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentSpec tiny_spec(ExperimentKind kind, const fs::path& out) {
  ExperimentSpec s;
  s.kind = kind;
  s.config = test::tiny_config();
  s.output = out.string();
  return s;
}

}  // namespace

TEST(Names, RoundTrip) {
  for (auto k : {ExperimentKind::kConvergence, ExperimentKind::kGainmap, ExperimentKind::kSweep})
    EXPECT_EQ(parse_kind(kind_name(k)), k);
  for (auto p : {SweepParameter::kRegionSize, SweepParameter::kNumAntennas, SweepParameter::kKUl, SweepParameter::kKDl,
                 SweepParameter::kKEve, SweepParameter::kSiLossDb, SweepParameter::kFriError})
    EXPECT_EQ(parse_parameter(parameter_name(p)), p);
  EXPECT_EQ(parse_parameter("k_u"), SweepParameter::kKUl);
  EXPECT_EQ(parameter_column(SweepParameter::kRegionSize), "A_over_lambda");
  EXPECT_EQ(parse_fri_kind("aod"), FriErrorKind::kDepartureAngle);
  EXPECT_EQ(parse_fri_kind(fri_kind_name(FriErrorKind::kArrivalAngle)), FriErrorKind::kArrivalAngle);
  EXPECT_THROW(parse_kind("plot"), ConfigError);
  EXPECT_THROW(parse_parameter("beta"), ConfigError);
}

TEST(Spec, Validation) {
  ExperimentSpec s = tiny_spec(ExperimentKind::kSweep, "x");
  EXPECT_THROW(s.validate(), ConfigError);  // sweep without values
  s.values = {1, 3, 2};
  EXPECT_THROW(s.validate(), ConfigError);
  s.values = {1, 2, 3};
  EXPECT_NO_THROW(s.validate());
  s.parameter = SweepParameter::kKEve;
  s.values = {0, 1.5};
  EXPECT_THROW(s.validate(), ConfigError);
  s.values = {0, 1};
  s.trials = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  ExperimentSpec g = tiny_spec(ExperimentKind::kGainmap, "x");
  g.step = 0;
  EXPECT_THROW(g.validate(), ConfigError);
  g.step = 0.1;
  g.values = {1};
  EXPECT_THROW(g.validate(), ConfigError);
}

TEST(Spec, SweepValueApplication) {
  ExperimentSpec s = tiny_spec(ExperimentKind::kSweep, "x");
  s.parameter = SweepParameter::kRegionSize;
  EXPECT_EQ(apply_sweep_value(s, 2.0).region_size, 2.0);
  s.parameter = SweepParameter::kNumAntennas;
  const SystemConfig n = apply_sweep_value(s, 2);
  EXPECT_EQ(n.num_tx, 2);
  EXPECT_EQ(n.num_rx, 2);
  s.parameter = SweepParameter::kSiLossDb;
  EXPECT_NEAR(apply_sweep_value(s, -80).si_loss, 1e-8, 1e-22);
}

TEST(Spec, JsonRoundTrip) {
  ExperimentSpec s = tiny_spec(ExperimentKind::kSweep, "out/dir");
  s.parameter = SweepParameter::kFriError;
  s.fri_kind = FriErrorKind::kArrivalAngle;
  s.values = {0, 0.1};
  s.schemes = {SchemeId::kProposed, SchemeId::kZf};
  s.trials = 3;
  s.seed = 12;
  EXPECT_EQ(spec_to_json(spec_from_json(spec_to_json(s))), spec_to_json(s));
  EXPECT_THROW(spec_from_json({{"kind", 3}}), ConfigError);
}

TEST(RunExperiment, SweepCsvContract) {
  const fs::path dir = scratch("sweep");
  ExperimentSpec s = tiny_spec(ExperimentKind::kSweep, dir);
  s.values = {1, 2, 3, 4};
  s.schemes = {SchemeId::kProposed, SchemeId::kFpa};
  s.config.ao.max_iterations = 1;
  const ExperimentOutcome o = run_experiment(s);
  EXPECT_EQ(o.failures, 0);
  const auto rows = lines(dir / "sweep.csv");
  ASSERT_EQ(rows.size(), 1u + 4 * 2);
  EXPECT_EQ(rows[0], "A_over_lambda,scheme,mean_ssr,std_ssr,n");
  EXPECT_EQ(rows[1].substr(0, 11), "1,Proposed,");
  EXPECT_EQ(rows[2].substr(0, 6), "1,FPA,");
  EXPECT_TRUE(fs::exists(dir / "trials.csv"));
  std::ifstream m(dir / "manifest.json");
  const auto manifest = nlohmann::json::parse(m);
  EXPECT_EQ(manifest.at("failures"), 0);
  EXPECT_TRUE(manifest.contains("spec"));
  fs::remove_all(dir);
}

TEST(RunExperiment, GainmapRaster) {
  const fs::path dir = scratch("gain");
  ExperimentSpec s = tiny_spec(ExperimentKind::kGainmap, dir);
  s.config.region_size = 4.0;
  s.step = 1.0 / 50;
  s.links = {"bd"};
  run_experiment(s);
  const auto rows = lines(dir / "gainmap_bd.csv");
  ASSERT_EQ(rows.size(), 1u + 201 * 201);
  EXPECT_EQ(rows[0], "x,y,gain_db");
  fs::remove_all(dir);
}

TEST(RunExperiment, ConvergenceAndReplayAreByteIdentical) {
  const fs::path dir = scratch("conv");
  ExperimentSpec s = tiny_spec(ExperimentKind::kConvergence, dir);
  s.trials = 2;
  const ExperimentOutcome o = run_experiment(s);
  ASSERT_FALSE(o.files.empty());
  std::map<std::string, std::string> first;
  for (const auto& f : o.files) first[f] = slurp(dir / f);
  EXPECT_EQ(lines(dir / "convergence_ao.csv")[0],
            "A_over_lambda,trial,iteration,ssr_positions,ssr_transmit,ssr_receive,penalty,max_rank_residual");
  const fs::path again = scratch("conv_replay");
  replay_manifest(dir / "manifest.json", again.string(), 4);
  for (const auto& [f, content] : first) EXPECT_EQ(slurp(again / f), content) << f;
  fs::remove_all(dir);
  fs::remove_all(again);
}

#ifdef MASEC_CLI_PATH
namespace {
int cli(const std::string& args) { return std::system((std::string(MASEC_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str()); }
int exit_code(int status) { return WIFEXITED(status) ? WEXITSTATUS(status) : -1; }
}  // namespace

TEST(Cli, GainmapAndSweep) {
  const fs::path dir = scratch("cli");
  ASSERT_EQ(exit_code(cli("gainmap --antennas 2 --links ub --step 0.02 -o " + dir.string())), 0);
  EXPECT_EQ(lines(dir / "gainmap_ub.csv").size(), 1u + 201 * 201);
  ASSERT_EQ(exit_code(cli("sweep --antennas 2 --k-ul 1 --k-dl 1 --k-eve 1 --particles 4 --swarm-iterations 2 "
                          "--ao-iterations 1 --sca-iterations 3 -p region_size -v 1,2 -s Proposed,FPA -n 1 -o " +
                          dir.string())),
            0);
  EXPECT_EQ(lines(dir / "sweep.csv")[0], "A_over_lambda,scheme,mean_ssr,std_ssr,n");
  fs::remove_all(dir);
}

TEST(Cli, InvalidInputExitsNonzero) {
  EXPECT_EQ(exit_code(cli("sweep -p beta -v 1 -o /tmp/masec_never")), 1);
  EXPECT_EQ(exit_code(cli("sweep -p region_size -v 1,3,2 -o /tmp/masec_never")), 1);
  EXPECT_NE(exit_code(cli("no-such-command")), 0);
}
#endif
