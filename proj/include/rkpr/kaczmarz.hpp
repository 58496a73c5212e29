#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "rkpr/cvector.hpp"
#include "rkpr/ensemble.hpp"
#include "rkpr/rng.hpp"

namespace rkpr {

enum class Selection {
  NormWeighted,  ///< P(j) = ||a_j||^2 / sum_l ||a_l||^2
  Uniform,       ///< P(j) = 1/m
};

/// What pr_step does when a^* z == 0 and the phase of a^* z is undefined.
enum class ZeroResidualPolicy {
  PhaseOne,  ///< adopt phase factor 1: z + (b / ||a||^2) a
  Skip,      ///< leave z unchanged
};

struct SolverConfig {
  std::size_t max_iters = 1000;
  /// Radius of the ball B = {z : dist(z, x) <= ball_radius_rel * ||x||}.
  double ball_radius_rel = 0.01;
  bool track_distance = true;
  Selection selection = Selection::NormWeighted;
  ZeroResidualPolicy zero_residual_policy = ZeroResidualPolicy::PhaseOne;

  void validate() const;
};

inline constexpr double kNotRecorded = std::numeric_limits<double>::quiet_NaN();

/// State z_k and, for k < max_iters, the row used to produce z_{k+1}.
struct TraceRecord {
  std::size_t k = 0;
  std::optional<std::size_t> row;
  double dist = kNotRecorded;    ///< distance to the truth, if tracked
  double abs_az = kNotRecorded;  ///< |a_{i_k}^* z_k|, if a row was chosen
};

struct SolverTrace {
  std::vector<TraceRecord> records;
  /// First k with dist(z_k, x) > ball_radius_rel * ||x||; nullopt means the
  /// iterates never left the ball (tau = infinity).
  std::optional<std::size_t> stopping_time;
  CVector final_z;

  bool exited() const noexcept { return stopping_time.has_value(); }
};

std::size_t select_row(const Ensemble& e, RngStream& rng, Selection selection);

/// Phase-retrieval Kaczmarz step on a single equation |a^* z| = b:
///   z - (1 - b / |a^* z|) (a^* z / ||a||^2) a.
CVector pr_step(ConstSpan z, ConstSpan a, double b,
                ZeroResidualPolicy policy = ZeroResidualPolicy::PhaseOne);

/// Orthogonal projection of z onto {w : a^* w = y}.
CVector linear_step(ConstSpan z, ConstSpan a, Complex y);

// In-place kernels used by the run loops; no validation.
void pr_step_inplace(MutSpan z, ConstSpan a, double a_norm_sq, double b, ZeroResidualPolicy policy);
void linear_step_inplace(MutSpan z, ConstSpan a, double a_norm_sq, Complex y);

/// Runs the phase-retrieval iteration for cfg.max_iters steps. The truth is
/// used only for instrumentation (distance and stopping time) and is
/// required when cfg.track_distance is set. The loop never halts at the
/// stopping time.
SolverTrace run_pr(const Ensemble& e, const Measurements& b, const CVector& z0,
                   const SolverConfig& cfg, RngStream& rng, const CVector* truth = nullptr);

/// Classical randomized Kaczmarz for a^*_j z = y_j. With a truth supplied the
/// trace records the plain Euclidean error ||z_k - x||.
SolverTrace run_linear(const Ensemble& e, std::span<const Complex> y, const CVector& z0,
                       const SolverConfig& cfg, RngStream& rng, const CVector* truth = nullptr);

}  // namespace rkpr
