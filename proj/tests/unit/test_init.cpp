#include <gtest/gtest.h>

#include <cmath>

#include "rkpr/init.hpp"
#include "rkpr/phase.hpp"
#include "test_util.hpp"

using namespace rkpr;

TEST(PlantedInit, ExactDistanceAndZeroPhase) {
  RngStream rng(1, 0);
  for (int t = 0; t < 200; ++t) {
    const double scale = 0.1 + 10.0 * rng.uniform();
    const CVector x = Complex{scale, 0.0} * sample_unit_sphere(6, rng);
    const double r = 0.9 * rng.uniform();
    const CVector z = planted_init(x, r, rng);
    EXPECT_NEAR(dist(z, x), r * scale, 1e-12 * scale);
    const double phi = optimal_phase(z, x);
    EXPECT_TRUE(phi < 1e-12 || phi > 2.0 * 3.141592653589793 - 1e-12);
  }
  const CVector x{{1.0, 0.0}};
  EXPECT_EQ(planted_init(x, 0.0, rng), x);
  EXPECT_THROW(planted_init(x, -0.1, rng), std::invalid_argument);
}

TEST(SpectralInit, MatchesDenseTopEigenvector) {
  // Population-free oracle: the dense eigendecomposition of the same Y.
  RngStream rng(2, 0);
  const std::size_t n = 12, m = 600;
  const CVector x = sample_unit_sphere(n, rng);
  const Ensemble e = make_ensemble(m, n, Model::UnitSphere, rng);
  const Measurements b = measure(e, x);
  InitConfig cfg;
  cfg.power_iters = 2000;
  cfg.tol = 1e-12;
  const InitResult res = spectral_init(e, b, cfg, rng);
  ASSERT_TRUE(res.converged);

  const Eigen::MatrixXcd a = test::to_eigen(e);
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t j = 0; j < m; ++j) {
    const Eigen::VectorXcd aj = a.row(static_cast<Eigen::Index>(j)).adjoint();
    y += b[j] * b[j] * aj * aj.adjoint();
  }
  y /= static_cast<double>(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(y);
  const Eigen::VectorXcd top = es.eigenvectors().col(static_cast<Eigen::Index>(n) - 1);
  CVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = top(static_cast<Eigen::Index>(i));

  CVector dir = res.z;
  dir *= Complex{1.0 / norm(res.z), 0.0};
  EXPECT_LT(dist(dir, v), 1e-5);
}

TEST(SpectralInit, DeskScaleSuccessRate) {
  // n = 64, m = 32n: dist(z0, x) <= 0.5 ||x|| in at least 95 of 100 trials.
  const std::size_t n = 64, m = 32 * n;
  int ok = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    RngStream rng(3, t);
    const CVector x = sample_unit_sphere(n, rng);
    const Ensemble e = make_ensemble(m, n, Model::UnitSphere, rng);
    const InitResult res = spectral_init(e, measure(e, x), InitConfig{}, rng);
    if (dist(res.z, x) <= 0.5) ++ok;
  }
  EXPECT_GE(ok, 95);
}

TEST(SpectralInit, RejectsAllZeroMeasurements) {
  RngStream rng(4, 0);
  const Ensemble e = make_ensemble(10, 3, Model::UnitSphere, rng);
  EXPECT_THROW(spectral_init(e, Measurements(std::vector<double>(10, 0.0)), InitConfig{}, rng),
               std::invalid_argument);
  InitConfig bad;
  bad.power_iters = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}
