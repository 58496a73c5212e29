#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rkpr/experiment.hpp"

using namespace rkpr;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rkpr_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small() {
  ExperimentConfig c;
  c.n = 8;
  c.m_over_n = 8;
  c.trials = 4;
  c.max_iters = 100;
  c.seed = 3;
  return c;
}

}  // namespace

TEST(Config, JsonRoundTripAndHash) {
  ExperimentConfig c = small();
  c.init = InitKind::Spectral;
  c.lambda = 4.0;
  const ExperimentConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(config_hash(c).size(), 16u);

  ExperimentConfig moved = c;
  moved.output_dir = "elsewhere";
  moved.threads = 8;
  EXPECT_EQ(config_hash(moved), config_hash(c));
  moved.seed = 4;
  EXPECT_NE(config_hash(moved), config_hash(c));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_json({{"trails", 3}}), std::invalid_argument);
  EXPECT_THROW(config_from_json({{"n", "eight"}}), std::invalid_argument);
  EXPECT_THROW(config_from_json({{"init", "random"}}), std::invalid_argument);

  ExperimentConfig c = small();
  c.delta = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.delta = 0.5;
  c.planted_radius = 0.02;  // above 0.01 * delta
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.allow_outside_hypothesis = true;
  EXPECT_NO_THROW(c.validate());
  c.trials = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Solve, ZeroIterationsGivesPlantedDistance) {
  ExperimentConfig c = small();
  c.trials = 1;
  c.max_iters = 0;
  c.output_dir = scratch("zero_iters").string();
  const SolveResult r = cmd_solve(c);
  const std::string csv = slurp(fs::path(c.output_dir) / "trace_0000.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,i_k,dist,abs_az");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  ASSERT_EQ(r.median_dist.size(), 1u);
  EXPECT_NEAR(r.median_dist[0], 0.005, 1e-15);
}

TEST(Solve, ArtifactsAreByteIdenticalAcrossRunsAndThreads) {
  ExperimentConfig c = small();
  c.output_dir = scratch("det_a").string();
  cmd_solve(c);
  ExperimentConfig d = c;
  d.output_dir = scratch("det_b").string();
  d.threads = 3;
  cmd_solve(d);
  for (const char* f : {"aggregate.csv", "trace_0000.csv", "trace_0003.csv", "trace_0002.json"}) {
    EXPECT_EQ(slurp(fs::path(c.output_dir) / f), slurp(fs::path(d.output_dir) / f)) << f;
  }
  const auto summary = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "summary.json"));
  EXPECT_EQ(summary.at("seed"), 3);
  EXPECT_EQ(summary.at("generator"), std::string(RngStream::kGeneratorId));
  EXPECT_EQ(summary.at("config_hash"), config_hash(c));
  const auto side = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "aggregate.json"));
  EXPECT_EQ(side.at("schema_version"), kSchemaVersion);
  EXPECT_EQ(slurp(fs::path(c.output_dir) / "aggregate.csv").substr(0, 37),
            "k,mean_dist2,median_dist,frac_exited\n");
}

TEST(Solve, TraceSidecarRegeneratesEnsemble) {
  ExperimentConfig c = small();
  c.trials = 1;
  c.output_dir = scratch("sidecar").string();
  cmd_solve(c);
  const auto side = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "trace_0000.json"));
  EXPECT_EQ(side.at("stream_id"), 0);
  EXPECT_EQ(side.at("m"), 64);
  EXPECT_EQ(side.at("z0").size(), 8u);
  EXPECT_TRUE(side.at("stopping_time").is_null());
}

TEST(Solve, OutsideRegimeIsReportOnly) {
  ExperimentConfig c = small();
  c.model = Model::ComplexGaussian;
  const SolveResult r = cmd_solve(c, false);
  EXPECT_FALSE(r.run.asserted);
  EXPECT_TRUE(r.run.pass);
}

TEST(Solve, UnwritableOutputFails) {
  ExperimentConfig c = small();
  c.output_dir = "/proc/rkpr_cannot_write_here";
  EXPECT_THROW(cmd_solve(c), std::runtime_error);
}

TEST(RscScan, EmptyScanWritesHeaderOnly) {
  ExperimentConfig c = small();
  c.samples = 0;
  c.output_dir = scratch("rsc_empty").string();
  const RscScanResult r = cmd_rsc_scan(c);
  EXPECT_EQ(slurp(fs::path(c.output_dir) / "rsc_scan.csv"), "sample_id,h_norm,f,D,gamma_hat\n");
  EXPECT_FALSE(r.run.asserted);
}

TEST(RscScan, StructuredSamplesAndLargeBall) {
  ExperimentConfig c = small();
  c.m_over_n = 16;
  c.samples = 20;
  const RscScanResult r = cmd_rsc_scan(c, false);
  ASSERT_EQ(r.samples.size(), 20u);
  EXPECT_TRUE(r.run.asserted);
  EXPECT_NEAR(r.samples[0].h_norm, 0.01, 1e-15);
  EXPECT_NEAR(r.samples[2].h_norm, 0.01, 1e-15);
  c.ball_radius_rel = 0.5;
  const RscScanResult wide = cmd_rsc_scan(c, false);
  EXPECT_FALSE(wide.run.asserted);
  EXPECT_TRUE(wide.run.pass);
}

TEST(Verify, LemmaSelection) {
  ExperimentConfig c = small();
  c.samples = 20000;
  c.lambda = 3.0;
  const VerifyResult f = cmd_verify(c, "F", false);
  ASSERT_EQ(f.reports.size(), 1u);
  EXPECT_DOUBLE_EQ(f.reports[0].bound, 0.3125);
  EXPECT_TRUE(f.run.pass);
  EXPECT_THROW(cmd_verify(c, "H", false), std::invalid_argument);
  c.lambda = 0.9;
  EXPECT_THROW(cmd_verify(c, "G", false), std::domain_error);
}

TEST(Baseline, TruthStartIsFlatZero) {
  ExperimentConfig c = small();
  c.init = InitKind::Truth;
  const BaselineResult r = cmd_baseline(c, false);
  for (double d : r.median_dist) EXPECT_EQ(d, 0.0);
  EXPECT_TRUE(r.monotone);
}

TEST(Baseline, DeterministicUnderFixedSeed) {
  ExperimentConfig c = small();
  const BaselineResult a = cmd_baseline(c, false), b = cmd_baseline(c, false);
  EXPECT_EQ(a.final_error, b.final_error);
  EXPECT_TRUE(a.monotone);
}
