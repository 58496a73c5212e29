#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "rkpr/analysis.hpp"
#include "rkpr/init.hpp"
#include "rkpr/phase.hpp"

using namespace rkpr;

namespace {

struct Instance {
  CVector x;
  Ensemble e;
  Measurements b;
};

Instance make_instance(std::size_t n, std::size_t m, RngStream& rng) {
  CVector x = sample_unit_sphere(n, rng);
  Ensemble e = make_ensemble(m, n, Model::UnitSphere, rng);
  Measurements b = measure(e, x);
  return {std::move(x), std::move(e), std::move(b)};
}

// Scalar reference: loop over rows without the span kernels.
double brute_loss(const Ensemble& e, const CVector& x, const CVector& z) {
  double s = 0.0;
  for (std::size_t j = 0; j < e.m(); ++j) {
    Complex ax = 0.0, az = 0.0;
    for (std::size_t i = 0; i < e.n(); ++i) {
      ax += std::conj(e.row(j)[i]) * x[i];
      az += std::conj(e.row(j)[i]) * z[i];
    }
    s += (std::abs(az) - std::abs(ax)) * (std::abs(az) - std::abs(ax));
  }
  return s / static_cast<double>(e.m());
}

}  // namespace

TEST(Analysis, LossMatchesScalarReference) {
  RngStream rng(1, 0);
  const auto in = make_instance(5, 40, rng);
  for (int t = 0; t < 20; ++t) {
    const CVector z = sample_complex_gaussian(5, rng);
    EXPECT_NEAR(loss(in.e, in.x, z), brute_loss(in.e, in.x, z), 1e-13);
  }
  EXPECT_NEAR(loss(in.e, in.x, Complex{0.0, 1.0} * in.x), 0.0, 1e-15);
}

TEST(Analysis, DirectionalDerivativeMatchesFiniteDifference) {
  RngStream rng(2, 0);
  for (int t = 0; t < 100; ++t) {
    const auto in = make_instance(4, 24, rng);
    const CVector z = planted_init(in.x, 0.3 * rng.uniform_pos(), rng);
    const CVector v = sample_complex_gaussian(4, rng);
    const double step = 1e-6;
    CVector zt = z;
    axpy(Complex{step, 0.0}, v, zt.span());
    const double fd = (loss(in.e, in.x, zt) - loss(in.e, in.x, z)) / step;
    EXPECT_NEAR(directional_derivative(in.e, in.x, z, v), fd, 1e-4);
  }
}

TEST(Analysis, RowTermsSumToMargin) {
  RngStream rng(3, 0);
  for (int t = 0; t < 50; ++t) {
    const auto in = make_instance(8, 64, rng);
    const CVector z = planted_init(in.x, 0.2 * rng.uniform_pos(), rng);
    const RscSample s = rsc_margin(in.e, in.x, z);
    EXPECT_LT(s.decomposition_rel_error, 1e-8);
    const auto terms = row_terms(in.e, in.x, z);
    const double mean = std::accumulate(terms.begin(), terms.end(), 0.0) / terms.size();
    EXPECT_NEAR(mean, s.directional - s.f_value, 1e-12);
    EXPECT_NEAR(s.h_norm, dist(z, in.x), 1e-15);
  }
}

TEST(Analysis, AnchoredStepIdentityAndUpperBound) {
  RngStream rng(4, 0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = t % 2 ? 2 : 8, m = t % 3 ? 5 : 64;
    const auto in = make_instance(n, m, rng);
    const CVector z = planted_init(in.x, 0.5 * rng.uniform_pos(), rng);
    const double d2 = dist(z, in.x) * dist(z, in.x);
    const double f = loss(in.e, in.x, z);
    CVector v = z;
    axpy(-std::polar(1.0, optimal_phase(z, in.x)), in.x, v.span());
    const double d = directional_derivative(in.e, in.x, z, v);
    const double anchored = anchored_expected_step(in.e, in.b, in.x, z);
    EXPECT_NEAR(anchored, d2 + f - d, 1e-10 * (d2 + f + std::abs(d)));
    EXPECT_LE(expected_step(in.e, in.b, in.x, z), anchored * (1.0 + 1e-12));
  }
}

TEST(Analysis, RowClaimsHold) {
  RngStream rng(5, 0);
  for (int t = 0; t < 30; ++t) {
    const auto in = make_instance(16, 256, rng);
    const CVector z = planted_init(in.x, 0.05 * rng.uniform_pos(), rng);
    const RowClaimReport r = check_row_claims(in.e, in.x, z);
    EXPECT_EQ(r.inside + r.outside, 256u);
    EXPECT_EQ(r.inside_violations, 0u);
    EXPECT_EQ(r.outside_violations, 0u);
  }
}

TEST(Analysis, RejectsDegeneratePoints) {
  RngStream rng(6, 0);
  const auto in = make_instance(4, 16, rng);
  EXPECT_THROW(rsc_margin(in.e, in.x, in.x), std::invalid_argument);
  const CVector v(4);
  EXPECT_THROW(directional_derivative(in.e, in.x, in.x, v), std::invalid_argument);
  // z orthogonal to one row makes that a_j^* z vanish.
  const Ensemble e(2, 2, Model::ComplexGaussian,
                   {Complex{1.0, 0.0}, Complex{0.0, 0.0}, Complex{0.0, 0.0}, Complex{1.0, 0.0}});
  const CVector x{{1.0, 0.0}, {1.0, 0.0}};
  const CVector z{{0.0, 0.0}, {1.0, 0.0}};
  try {
    rsc_margin(e, x, z);
    FAIL() << "expected DegenerateRowsError";
  } catch (const DegenerateRowsError& err) {
    ASSERT_EQ(err.rows().size(), 1u);
    EXPECT_EQ(err.rows()[0], 0u);
  }
}

TEST(Analysis, ExpectedStepRequiresUnitRows) {
  RngStream rng(7, 0);
  const CVector x = sample_unit_sphere(3, rng);
  const Ensemble e = make_ensemble(10, 3, Model::ComplexGaussian, rng);
  EXPECT_THROW(expected_step(e, measure(e, x), x, x), std::invalid_argument);
}

TEST(Analysis, ContractionStatsSkipExitedTrials) {
  auto trace = [](std::vector<double> d, std::optional<std::size_t> tau) {
    SolverTrace t{{}, tau, CVector(1)};
    for (std::size_t k = 0; k < d.size(); ++k) t.records.push_back({k, std::nullopt, d[k], kNotRecorded});
    return t;
  };
  const std::vector<SolverTrace> traces = {trace({1.0, 0.5, 0.25}, std::nullopt),
                                           trace({1.0, 2.0, 4.0}, 1),
                                           trace({2.0, 1.0, 0.5}, std::nullopt)};
  const ContractionStats s = contraction_stats(traces);
  EXPECT_EQ(s.surviving, 2u);
  EXPECT_NEAR(s.frac_exited, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.mean_dist2[0], 2.5, 1e-15);
  EXPECT_NEAR(s.max_ratio_above(0.0), 0.25, 1e-15);
  EXPECT_NEAR(s.fitted_factor(0.0), 0.25, 1e-12);
  EXPECT_TRUE(std::isinf(s.max_ratio_above(1.0)));  // no step stays above the floor
}
