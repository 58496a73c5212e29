#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "rkpr/ensemble.hpp"
#include "rkpr/io.hpp"
#include "test_util.hpp"

using namespace rkpr;

TEST(Ensemble, SphereRowsHaveUnitNorm) {
  RngStream rng(1, 0);
  const Ensemble e = make_ensemble(200, 7, Model::UnitSphere, rng);
  for (std::size_t j = 0; j < e.m(); ++j) EXPECT_NEAR(e.row_norm_sq(j), 1.0, 1e-14);
  EXPECT_NEAR(e.total_norm_sq(), 200.0, 1e-10);
}

TEST(Ensemble, SampleCovarianceApproachesIdentityOverN) {
  // Dense oracle: || (1/m) A^* A - I/n || shrinks like sqrt(n/m)/n.
  RngStream rng(2, 0);
  const std::size_t n = 6, m = 20000;
  const Ensemble e = make_ensemble(m, n, Model::UnitSphere, rng);
  const Eigen::MatrixXcd a = test::to_eigen(e);
  const Eigen::MatrixXcd cov = a.adjoint() * a / static_cast<double>(m);
  const Eigen::MatrixXcd dev = cov - Eigen::MatrixXcd::Identity(n, n) / static_cast<double>(n);
  EXPECT_LT(dev.operatorNorm(), 0.05 / static_cast<double>(n));
}

TEST(Ensemble, GaussianRowsHaveExpectedNorm) {
  RngStream rng(3, 0);
  const std::size_t n = 10, m = 5000;
  const Ensemble e = make_ensemble(m, n, Model::ComplexGaussian, rng);
  EXPECT_NEAR(e.total_norm_sq() / static_cast<double>(m), static_cast<double>(n), 0.15);
}

TEST(Ensemble, RegenerationFromProvenance) {
  RngStream rng(9, 4);
  rng.complex_normal();
  const Ensemble e = make_ensemble(30, 5, Model::UnitSphere, rng);
  ASSERT_TRUE(e.provenance().has_value());
  EXPECT_EQ(e.provenance()->offset, 2u);
  const Ensemble r = regenerate_ensemble(30, 5, Model::UnitSphere, *e.provenance());
  for (std::size_t k = 0; k < e.rows().size(); ++k) EXPECT_EQ(e.rows()[k], r.rows()[k]);
}

TEST(Ensemble, ValidatesInput) {
  EXPECT_THROW(Ensemble(2, 2, Model::ComplexGaussian, std::vector<Complex>(3)), std::invalid_argument);
  EXPECT_THROW(Ensemble(1, 2, Model::ComplexGaussian, std::vector<Complex>(2)), std::invalid_argument);
  EXPECT_THROW(Ensemble(1, 2, Model::UnitSphere, {Complex{2.0, 0.0}, Complex{0.0, 0.0}}),
               std::invalid_argument);
  EXPECT_THROW(Measurements({1.0, -0.5}), std::invalid_argument);
  EXPECT_THROW(parse_model("cauchy"), std::invalid_argument);
  EXPECT_EQ(parse_model("sphere"), Model::UnitSphere);
}

TEST(Ensemble, MeasureMatchesDenseProduct) {
  RngStream rng(4, 0);
  const Ensemble e = make_ensemble(40, 6, Model::ComplexGaussian, rng);
  const CVector x = sample_complex_gaussian(6, rng);
  const Measurements b = measure(e, x);
  const Eigen::VectorXcd ax = test::to_eigen(e) * test::to_eigen(x);
  for (std::size_t j = 0; j < e.m(); ++j) EXPECT_NEAR(b[j], std::abs(ax(j)), 1e-12);
}

TEST(Ensemble, JsonContainerRoundTrip) {
  RngStream rng(5, 2);
  const Ensemble e = make_ensemble(12, 3, Model::UnitSphere, rng);
  const CVector x = sample_unit_sphere(3, rng);
  const Measurements b = measure(e, x);

  const auto by_prov = ensemble_from_json(ensemble_to_json(e));
  const auto with_rows = ensemble_to_json(e, true, &b);
  const auto explicit_rows = ensemble_from_json(with_rows);
  for (std::size_t k = 0; k < e.rows().size(); ++k) {
    EXPECT_EQ(by_prov.rows()[k], e.rows()[k]);
    EXPECT_EQ(explicit_rows.rows()[k], e.rows()[k]);
  }
  EXPECT_EQ(measurements_from_json(with_rows), b);

  const Ensemble bare(1, 2, Model::ComplexGaussian, {Complex{1.0, 0.0}, Complex{0.0, 1.0}});
  EXPECT_THROW(ensemble_to_json(bare), std::invalid_argument);
  auto bad = ensemble_to_json(e);
  bad["version"] = 99;
  EXPECT_THROW(ensemble_from_json(bad), std::invalid_argument);
}
