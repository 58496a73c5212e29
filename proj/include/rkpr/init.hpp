#pragma once

#include <cstddef>

#include "rkpr/cvector.hpp"
#include "rkpr/ensemble.hpp"
#include "rkpr/power.hpp"
#include "rkpr/rng.hpp"

namespace rkpr {

struct InitConfig {
  std::size_t power_iters = 200;
  double tol = 1e-8;
  /// Selects the norm estimate: sqrt(n * mean b^2) on the sphere,
  /// sqrt(mean b^2) for complex Gaussian rows.
  Model norm_model = Model::UnitSphere;

  void validate() const;
};

struct InitResult {
  CVector z;
  bool converged;  ///< false: power iteration hit power_iters; z is the last iterate
  std::size_t iterations;
};

/// Top eigenvector of Y = (1/m) sum_j b_j^2 a_j a_j^*, computed matrix-free
/// by power iteration from a random start, scaled by the model's norm
/// estimate. Throws if every b_j is zero.
InitResult spectral_init(const Ensemble& e, const Measurements& b, const InitConfig& cfg,
                         RngStream& rng);

/// Random point at distance exactly rel_radius * ||x|| from the solution
/// circle {x e^{i psi}}, with its optimal phase equal to 0.
CVector planted_init(const CVector& x, double rel_radius, RngStream& rng);

}  // namespace rkpr
