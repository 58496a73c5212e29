#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rkpr/ensemble.hpp"
#include "rkpr/phase.hpp"
#include "rkpr/rng.hpp"

using namespace rkpr;

namespace {

// Grid search over psi, refined around the best grid point.
double grid_dist(const CVector& z, const CVector& x) {
  auto at = [&](double psi) {
    double s = 0.0;
    const Complex r = std::polar(1.0, psi);
    for (std::size_t i = 0; i < z.size(); ++i) s += std::norm(z[i] - x[i] * r);
    return std::sqrt(s);
  };
  double best = at(0.0), best_psi = 0.0;
  const int steps = 20000;
  for (int k = 1; k < steps; ++k) {
    const double psi = 2.0 * std::numbers::pi * k / steps;
    if (const double d = at(psi); d < best) best = d, best_psi = psi;
  }
  double lo = best_psi - 2e-3, hi = best_psi + 2e-3;
  for (int it = 0; it < 200; ++it) {
    const double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
    if (at(a) < at(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return std::min(best, at(0.5 * (lo + hi)));
}

}  // namespace

TEST(Phase, MatchesGridSearch) {
  RngStream rng(1, 0);
  for (int t = 0; t < 20; ++t) {
    const CVector x = sample_complex_gaussian(5, rng);
    const CVector z = sample_complex_gaussian(5, rng);
    EXPECT_NEAR(dist(z, x), grid_dist(z, x), 1e-9);
  }
}

TEST(Phase, GlobalPhaseInvariance) {
  RngStream rng(2, 0);
  for (int t = 0; t < 50; ++t) {
    const CVector x = sample_complex_gaussian(8, rng);
    const CVector z = sample_complex_gaussian(8, rng);
    const Complex r = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    EXPECT_NEAR(dist(r * z, x), dist(z, x), 1e-12);
    EXPECT_NEAR(dist(z, r * x), dist(z, x), 1e-12);
    EXPECT_NEAR(dist(r * x, x), 0.0, 1e-12);
    EXPECT_LE(dist(z, x), norm(z - x) + 1e-15);
  }
}

TEST(Phase, AlignedErrorIsRealAgainstX) {
  RngStream rng(3, 0);
  for (int t = 0; t < 50; ++t) {
    const CVector x = sample_complex_gaussian(6, rng);
    const CVector z = sample_complex_gaussian(6, rng);
    const CVector h = aligned_error(z, x);
    EXPECT_NEAR(inner(h, x).imag(), 0.0, 1e-12);
    EXPECT_NEAR(norm(h), dist(z, x), 1e-12);
    const double phi = optimal_phase(z, x);
    EXPECT_GE(phi, 0.0);
    EXPECT_LT(phi, 2.0 * std::numbers::pi);
  }
}

TEST(Phase, KnownValues) {
  const CVector x{{1.0, 0.0}, {0.0, 0.0}};
  const CVector z{{0.0, 2.0}, {0.0, 0.0}};  // z = 2i x
  EXPECT_NEAR(optimal_phase(z, x), std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(dist(z, x), 1.0, 1e-15);
  // x^* z = 0 picks phase 0.
  const CVector w{{0.0, 0.0}, {1.0, 0.0}};
  EXPECT_EQ(optimal_phase(w, x), 0.0);
  EXPECT_NEAR(dist(w, x), std::sqrt(2.0), 1e-15);
  EXPECT_THROW(optimal_phase(z, CVector(2)), std::invalid_argument);
  EXPECT_NEAR(dist(z, CVector(2)), 2.0, 1e-15);
}
