#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>

#include "rkpr/cvector.hpp"
#include "rkpr/ensemble.hpp"
#include "rkpr/power.hpp"
#include "rkpr/rng.hpp"

namespace rkpr {

enum class Direction { AtLeast, AtMost };

std::string_view to_string(Direction d) noexcept;

/// Result of checking one probabilistic bound.
///
/// pass == (estimate + 3 * std_error >= bound) for AtLeast and
/// (estimate - 3 * std_error <= bound) for AtMost: a report fails only when
/// the violation exceeds Monte Carlo resolution.
struct LemmaReport {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  Direction direction = Direction::AtLeast;
  std::size_t samples = 0;
  bool pass = false;
  std::map<std::string, double> details;
  std::string note;
};

LemmaReport make_report(std::string name, double estimate, double std_error, double bound,
                        Direction direction, std::size_t samples);

struct LemmaParams {
  double lambda = 3.0;
  double sigma = 0.0;  ///< real overlap h^* x of the unit pair (h, x)
  double delta = 0.1;
  double alpha = 12.0;

  double tau() const { return std::sqrt(1.0 - sigma * sigma); }
};

/// Streaming mean/variance with an associative merge.
struct MomentAccumulator {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) noexcept;
  void merge(const MomentAccumulator& other) noexcept;
  double variance() const noexcept;  ///< sample variance
  double std_error() const noexcept;
};

/// Monte Carlo draws run in fixed batches of this many samples, each with
/// its own substream rng.split(batch); batch results merge in batch order,
/// so the estimate does not depend on the thread count.
inline constexpr std::size_t kBatchSize = 1u << 16;

// --- covariance concentration ----------------------------------------------

/// Spectral norm of a Hermitian operator via power iteration on its square.
double hermitian_spectral_norm(const std::function<void(ConstSpan, MutSpan)>& apply, std::size_t n,
                               RngStream& rng, const PowerOptions& opts = {500, 1e-10});

/// || (1/m) sum_j a_j a_j^* - I/n ||_2 for the given ensemble.
double covariance_deviation(const Ensemble& e, RngStream& rng);

/// Draws `trials` unit-sphere ensembles (trial t uses rng.split(t)) and
/// reports the fraction whose covariance deviation is at most delta/n,
/// against `min_fraction`.
LemmaReport check_covariance(std::size_t n, std::size_t m, double delta, std::size_t trials,
                             const RngStream& rng, double min_fraction = 0.98,
                             std::size_t threads = 1);

// --- expectation lemmas (two-coordinate reduction) --------------------------

/// Monte Carlo estimate of
///   F(lambda, sigma) = E[ Re^2(h^* xi xi^* x) / |xi^* x|^2 * 1{lambda |xi^* x| >= |xi^* h|} ]
/// with h = e1, x = sigma e1 + tau e^{i phi} e2, phi uniform per sample,
/// against 3/8 - 1/(lambda+1)^2. Requires lambda >= 2.95, |sigma| <= 1.
LemmaReport mc_F(const LemmaParams& p, std::size_t samples, const RngStream& rng,
                 std::size_t threads = 1);

/// Monte Carlo estimate of
///   G(lambda, sigma) = E[ |xi^* h|^2 * 1{|xi^* x| <= lambda |xi^* h|} ]
/// against lambda^2 (lambda^2 + 2) / (lambda^2 + 1)^2; the weaker bound
/// 2 lambda^2 / (lambda^2 + 1) is recorded in details. Requires
/// 0 <= lambda <= 0.4, |sigma| <= 1.
LemmaReport mc_G(const LemmaParams& p, std::size_t samples, const RngStream& rng,
                 std::size_t threads = 1);

/// F and G estimated with full n-dimensional xi and a random unit pair
/// (h, x) with h^* x = sigma; cross-validates the two-coordinate reduction.
/// Domain checks are those of mc_F / mc_G.
LemmaReport mc_F_full(const LemmaParams& p, std::size_t n, std::size_t samples,
                      const RngStream& rng, std::size_t threads = 1);
LemmaReport mc_G_full(const LemmaParams& p, std::size_t n, std::size_t samples,
                      const RngStream& rng, std::size_t threads = 1);

/// Truncated series
///   F = 2 sum_k (2k+1)!(2k+1)/(k!)^2 sigma^{2k} (1-sigma^2)^2 int_0^lambda (t/(1+t^2))^{2k+3} dt
/// with composite 20-point Gauss-Legendre quadrature on `quad_points` panels.
/// Stops when a term drops below 1e-12 or after k_max terms. Requires
/// |sigma| < 1, lambda > 0.
double series_F(const LemmaParams& p, std::size_t k_max = 5000, std::size_t quad_points = 64);

/// F(lambda, 0) in closed form: 1/2 - 1/(1+lambda^2) + 1/(2(1+lambda^2)^2).
double F_sigma_zero(double lambda);

/// lambda^2 (lambda^2 + 2) / (lambda^2 + 1)^2
double G_closed_form_bound(double lambda);

// --- ensemble-level "for all h" lemmas ---------------------------------------

/// For one unit-sphere ensemble (rng.split(0)) and unit x (rng.split(1)),
/// evaluates (1/m) sum_j Re^2(h^* a_j a_j^* x)/|a_j^* x|^2 * 1{lambda |a_j^* x| >= |a_j^* h|}
/// at h = x, at an h orthogonal to x, and at `h_samples` random unit h with
/// Im(h^* x) = 0; reports the minimum against
/// (1/n)(3/8 - 1/(1 + 0.99 lambda)^2 - delta). Requires lambda >= 3.
LemmaReport check_restricted_ratio(std::size_t n, std::size_t m, const LemmaParams& p,
                                   std::size_t h_samples, const RngStream& rng,
                                   std::size_t threads = 1);

/// Mirror of check_restricted_ratio for
/// (1/m) sum_j |a_j^* h|^2 * 1{|a_j^* x| <= lambda |a_j^* h|}, reporting the
/// maximum against 2 lambda^2 / ((lambda^2 + 0.99) n) + delta/n.
/// Requires 0 < lambda <= 0.4.
LemmaReport check_truncated_moment(std::size_t n, std::size_t m, const LemmaParams& p,
                                   std::size_t h_samples, const RngStream& rng,
                                   std::size_t threads = 1);

}  // namespace rkpr
