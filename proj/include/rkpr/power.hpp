#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rkpr/cvector.hpp"
#include "rkpr/phase.hpp"

namespace rkpr {

struct PowerOptions {
  std::size_t max_iters = 200;
  /// Stop once dist(v_{k+1}, v_k) <= tol (phase-invariant step between unit iterates).
  double tol = 1e-8;
};

struct PowerResult {
  CVector vector;      ///< unit-norm top eigenvector estimate
  double eigenvalue;   ///< Rayleigh quotient of `vector`
  std::size_t iterations;
  bool converged;
  std::vector<double> rayleigh;  ///< Rayleigh quotient before each multiply
};

/// Power iteration for a Hermitian positive semidefinite operator given only
/// as a matrix-vector product `apply(ConstSpan in, MutSpan out)`.
template <class MatVec>
PowerResult power_iteration(MatVec&& apply, CVector start, const PowerOptions& opts) {
  if (opts.max_iters == 0) throw std::invalid_argument("power_iteration: max_iters must be >= 1");
  const double start_norm = norm(start);
  if (!(start_norm > 0.0)) throw std::invalid_argument("power_iteration: zero start vector");
  start *= Complex{1.0 / start_norm, 0.0};

  CVector v = std::move(start);
  CVector w(v.size());
  std::vector<double> rayleigh;
  rayleigh.reserve(opts.max_iters + 1);
  bool converged = false;
  std::size_t it = 0;
  while (it < opts.max_iters) {
    apply(v.view(), w.span());
    rayleigh.push_back(inner(v, w).real());
    const double wn = norm(w);
    if (wn == 0.0) break;  // v lies in the null space; nothing to iterate on
    w *= Complex{1.0 / wn, 0.0};
    ++it;
    const double step = dist(w, v);
    std::swap(v, w);
    if (step <= opts.tol) {
      converged = true;
      break;
    }
  }
  apply(v.view(), w.span());
  const double lambda = inner(v, w).real();
  rayleigh.push_back(lambda);
  return {std::move(v), lambda, it, converged, std::move(rayleigh)};
}

}  // namespace rkpr
