#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rkpr/init.hpp"
#include "rkpr/kaczmarz.hpp"
#include "rkpr/phase.hpp"

using namespace rkpr;

TEST(PrStep, LandsOnTheMeasurementSet) {
  RngStream rng(1, 0);
  for (int t = 0; t < 100; ++t) {
    const CVector a = sample_complex_gaussian(5, rng);
    const CVector z = sample_complex_gaussian(5, rng);
    const double b = 3.0 * rng.uniform();
    const CVector w = pr_step(z, a, b);
    EXPECT_NEAR(std::abs(inner(a, w)), b, 1e-12);
    // Only the component along a changes.
    const CVector d = w - z;
    const Complex c = inner(a, d) / norm_sq(a);
    EXPECT_NEAR(norm(d - c * a), 0.0, 1e-12);
  }
}

TEST(PrStep, ZeroResidualPolicies) {
  const CVector a{{1.0, 0.0}, {0.0, 0.0}};
  const CVector z{{0.0, 0.0}, {1.0, 0.0}};
  const CVector one = pr_step(z, a, 2.0, ZeroResidualPolicy::PhaseOne);
  EXPECT_EQ(one[0], Complex(2.0, 0.0));
  EXPECT_EQ(one[1], Complex(1.0, 0.0));
  EXPECT_EQ(pr_step(z, a, 2.0, ZeroResidualPolicy::Skip), z);
}

TEST(PrStep, ValidatesInput) {
  const CVector a(2), z(2);
  EXPECT_THROW(pr_step(z, a, 1.0), std::invalid_argument);  // zero row
  const CVector a1{{1.0, 0.0}, {0.0, 0.0}};
  EXPECT_THROW(pr_step(z, a1, -1.0), std::invalid_argument);
  EXPECT_THROW(pr_step(CVector(3), a1, 1.0), std::invalid_argument);
}

TEST(LinearStep, ProjectsOntoHyperplane) {
  RngStream rng(2, 0);
  for (int t = 0; t < 50; ++t) {
    const CVector a = sample_complex_gaussian(4, rng);
    const CVector z = sample_complex_gaussian(4, rng);
    const Complex y = rng.complex_normal();
    const CVector w = linear_step(z, a, y);
    EXPECT_NEAR(std::abs(inner(a, w) - y), 0.0, 1e-12);
    // Idempotent.
    EXPECT_NEAR(norm(linear_step(w, a, y) - w), 0.0, 1e-12);
  }
}

TEST(SelectRow, NormWeightedFrequencies) {
  const Ensemble e(3, 1, Model::ComplexGaussian,
                   {Complex{1.0, 0.0}, Complex{0.0, std::sqrt(2.0)}, Complex{std::sqrt(3.0), 0.0}});
  RngStream rng(3, 0);
  std::vector<double> count(3, 0.0);
  const int draws = 120000;
  for (int i = 0; i < draws; ++i) count[select_row(e, rng, Selection::NormWeighted)] += 1.0;
  const double p[3] = {1.0 / 6, 2.0 / 6, 3.0 / 6};
  double chi2 = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double ex = p[j] * draws;
    chi2 += (count[j] - ex) * (count[j] - ex) / ex;
  }
  EXPECT_LT(chi2, 13.82);  // 0.999 quantile, 2 dof
}

TEST(RunPr, ZeroIterationsGivesSingleRecord) {
  RngStream rng(4, 0);
  const CVector x = sample_unit_sphere(8, rng);
  const Ensemble e = make_ensemble(64, 8, Model::UnitSphere, rng);
  const Measurements b = measure(e, x);
  const CVector z0 = planted_init(x, 0.005, rng);
  SolverConfig cfg;
  cfg.max_iters = 0;
  const SolverTrace tr = run_pr(e, b, z0, cfg, rng, &x);
  ASSERT_EQ(tr.records.size(), 1u);
  EXPECT_NEAR(tr.records[0].dist, 0.005, 1e-15);
  EXPECT_FALSE(tr.records[0].row.has_value());
  EXPECT_EQ(tr.final_z, z0);
}

TEST(RunPr, ConvergesFromPlantedStartAndIsDeterministic) {
  auto run = [] {
    RngStream rng(5, 0);
    const CVector x = sample_unit_sphere(16, rng);
    const Ensemble e = make_ensemble(128, 16, Model::UnitSphere, rng);
    const Measurements b = measure(e, x);
    const CVector z0 = planted_init(x, 0.005, rng);
    SolverConfig cfg;
    cfg.max_iters = 4000;
    return run_pr(e, b, z0, cfg, rng, &x);
  };
  const SolverTrace a = run(), b = run();
  ASSERT_EQ(a.records.size(), 4001u);
  EXPECT_LT(a.records.back().dist, 1e-10);
  EXPECT_FALSE(a.exited());
  EXPECT_EQ(a.final_z, b.final_z);
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    ASSERT_EQ(a.records[k].row, b.records[k].row);
    ASSERT_EQ(a.records[k].dist, b.records[k].dist);
  }
}

TEST(RunPr, TruthIsAFixedPoint) {
  RngStream rng(6, 0);
  const CVector x = sample_unit_sphere(8, rng);
  const Ensemble e = make_ensemble(64, 8, Model::UnitSphere, rng);
  SolverConfig cfg;
  cfg.max_iters = 200;
  const SolverTrace tr = run_pr(e, measure(e, x), x, cfg, rng, &x);
  for (const auto& r : tr.records) EXPECT_LT(r.dist, 1e-14);
}

TEST(RunPr, StoppingTimeRecordsFirstExit) {
  RngStream rng(7, 0);
  const CVector x = sample_unit_sphere(4, rng);
  const Ensemble e = make_ensemble(32, 4, Model::UnitSphere, rng);
  SolverConfig cfg;
  cfg.max_iters = 5;
  cfg.ball_radius_rel = 0.01;
  const CVector far = planted_init(x, 0.5, rng);
  const SolverTrace tr = run_pr(e, measure(e, x), far, cfg, rng, &x);
  ASSERT_TRUE(tr.exited());
  EXPECT_EQ(*tr.stopping_time, 0u);
  EXPECT_EQ(tr.records.size(), 6u);  // the run continues past tau
}

TEST(RunPr, RequiresTruthWhenTracking) {
  RngStream rng(8, 0);
  const CVector x = sample_unit_sphere(4, rng);
  const Ensemble e = make_ensemble(16, 4, Model::UnitSphere, rng);
  SolverConfig cfg;
  EXPECT_THROW(run_pr(e, measure(e, x), x, cfg, rng, nullptr), std::invalid_argument);
  cfg.track_distance = false;
  cfg.max_iters = 3;
  const SolverTrace tr = run_pr(e, measure(e, x), x, cfg, rng, nullptr);
  EXPECT_TRUE(std::isnan(tr.records[0].dist));
}

TEST(RunLinear, MonotoneErrorOnConsistentSystem) {
  RngStream rng(9, 0);
  const std::size_t n = 8, m = 64;
  const CVector x = sample_unit_sphere(n, rng);
  const Ensemble e = make_ensemble(m, n, Model::ComplexGaussian, rng);
  std::vector<Complex> y(m);
  e.apply(x, y);
  SolverConfig cfg;
  cfg.max_iters = 1000;
  cfg.ball_radius_rel = 1.0;
  const SolverTrace tr = run_linear(e, y, CVector(n), cfg, rng, &x);
  for (std::size_t k = 0; k + 1 < tr.records.size(); ++k) {
    ASSERT_LE(tr.records[k + 1].dist, tr.records[k].dist + 1e-14);
  }
  EXPECT_LT(tr.records.back().dist, 1e-10);
}
