#include "rkpr/init.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rkpr {

void InitConfig::validate() const {
  if (power_iters < 1) throw std::invalid_argument("InitConfig: power_iters must be >= 1");
  if (!(tol >= 0.0)) throw std::invalid_argument("InitConfig: tol must be >= 0");
}

InitResult spectral_init(const Ensemble& e, const Measurements& b, const InitConfig& cfg,
                         RngStream& rng) {
  cfg.validate();
  if (b.size() != e.m()) throw std::invalid_argument("spectral_init: measurement count mismatch");
  double mean_b2 = 0.0;
  for (double bj : b.values()) mean_b2 += bj * bj;
  mean_b2 /= static_cast<double>(e.m());
  if (mean_b2 == 0.0) throw std::invalid_argument("spectral_init: all measurements are zero");

  const double inv_m = 1.0 / static_cast<double>(e.m());
  auto apply = [&](ConstSpan v, MutSpan out) {
    std::fill(out.begin(), out.end(), Complex{0.0, 0.0});
    for (std::size_t j = 0; j < e.m(); ++j) {
      const auto a = e.row(j);
      axpy(b[j] * b[j] * inv_m * inner(a, v), a, out);
    }
  };
  PowerResult pr = power_iteration(apply, sample_complex_gaussian(e.n(), rng),
                                   PowerOptions{cfg.power_iters, cfg.tol});

  const double scale = cfg.norm_model == Model::UnitSphere
                           ? std::sqrt(static_cast<double>(e.n()) * mean_b2)
                           : std::sqrt(mean_b2);
  pr.vector *= Complex{scale, 0.0};
  return {std::move(pr.vector), pr.converged, pr.iterations};
}

CVector planted_init(const CVector& x, double rel_radius, RngStream& rng) {
  require_finite(x, "planted_init");
  const double xn = norm(x);
  if (xn == 0.0) throw std::invalid_argument("planted_init: x must be nonzero");
  if (!(rel_radius >= 0.0) || !std::isfinite(rel_radius)) {
    throw std::invalid_argument("planted_init: rel_radius must be finite and >= 0");
  }
  if (rel_radius == 0.0) return x;

  const std::size_t n = x.size();
  CVector xhat = Complex{1.0 / xn, 0.0} * x;
  CVector w(n);
  for (;;) {
    w = sample_complex_gaussian(n, rng);
    // Drop the imaginary part of the overlap so Im(x^* w) = 0.
    const double im = inner(xhat, w).imag();
    axpy(Complex{0.0, -im}, xhat, w.span());
    const double wn = norm(w);
    if (wn > 0.0) {
      w *= Complex{1.0 / wn, 0.0};
      break;
    }
  }
  // x^* z0 = ||x||^2 (1 + r c) with c = Re(xhat^* w); reflect w's component
  // along xhat when that would not be positive, keeping the optimal phase 0.
  const double c = inner(xhat, w).real();
  if (1.0 + rel_radius * c <= 0.0) axpy(Complex{-2.0 * c, 0.0}, xhat, w.span());

  CVector z0 = x;
  axpy(Complex{rel_radius * xn, 0.0}, w, z0.span());
  return z0;
}

}  // namespace rkpr
