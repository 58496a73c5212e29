#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rkpr/cvector.hpp"
#include "rkpr/ensemble.hpp"
#include "rkpr/kaczmarz.hpp"

namespace rkpr {

/// Thrown where a formula divides by |a_j^* z| and some row has a_j^* z == 0.
class DegenerateRowsError : public std::domain_error {
 public:
  DegenerateRowsError(const std::string& what, std::vector<std::size_t> rows);
  const std::vector<std::size_t>& rows() const noexcept { return rows_; }

 private:
  std::vector<std::size_t> rows_;
};

/// f(z) = (1/m) sum_j (|a_j^* z| - |a_j^* x|)^2
double loss(const Ensemble& e, ConstSpan x, ConstSpan z);

/// One-sided directional derivative of f at z along v:
///   (2/m) sum_j (1 - |a_j^* x| / |a_j^* z|) Re((a_j^* v) conj(a_j^* z)).
double directional_derivative(const Ensemble& e, ConstSpan x, ConstSpan z, ConstSpan v);

/// Per-row terms T_j of D_{z - x e^{i phi(z)}} f(z) - f(z) = (1/m) sum_j T_j in
/// closed form, with h the aligned error and R_j = Re(conj(a_j^* h) a_j^* x):
///   T_j = |a^*h|^2 - 2|a^*x|^2|a^*h|^2 / (|a^*z|(|a^*z|+|a^*x|))
///       + 2|a^*x||a^*h|^2 R_j / (|a^*z|(|a^*z|+|a^*x|)^2)
///       + 4|a^*x| R_j^2 / (|a^*z|(|a^*z|+|a^*x|)^2)
std::vector<double> row_terms(const Ensemble& e, ConstSpan x, ConstSpan z);

struct RscSample {
  CVector z;
  double h_norm;         ///< dist(z, x)
  double f_value;        ///< loss(z)
  double directional;    ///< D along z - x e^{i phi(z)}
  double margin_gamma;   ///< (D - f) / ||h||^2
  double decomposition;  ///< (1/m) sum_j T_j from row_terms
  double decomposition_rel_error;  ///< |decomposition - (D - f)| / |D - f|
};

/// Restricted-strong-convexity margin at z. Throws std::invalid_argument if
/// z lies on the solution circle (h == 0) and DegenerateRowsError if some
/// a_j^* z == 0.
RscSample rsc_margin(const Ensemble& e, ConstSpan x, ConstSpan z);

struct RowClaimReport {
  double alpha;
  std::size_t inside = 0;   ///< rows with |a^*x| >= alpha |a^*h|
  std::size_t outside = 0;
  std::size_t inside_violations = 0;
  std::size_t outside_violations = 0;
  double min_inside_slack = 0.0;   ///< min over inside rows of T_j - lower bound
  double min_outside_slack = 0.0;  ///< min over outside rows of T_j + 3|a^*h|^2
};

/// Row-by-row check of the two lower bounds on T_j: inside the index set
///   T_j >= 4a^3/((a+1)(2a+1)^2) R_j^2/|a^*x|^2 - (8a^2-5a+1)/((a-1)(2a-1)^2) |a^*h|^2
/// and outside it T_j >= -3|a^*h|^2. Requires alpha > 1.
RowClaimReport check_row_claims(const Ensemble& e, ConstSpan x, ConstSpan z, double alpha = 12.0);

/// Exact one-step expectation over a uniformly chosen row:
///   (1/m) sum_j dist^2(pr_step(z, a_j, b_j), x).
/// Requires unit-norm rows.
double expected_step(const Ensemble& e, const Measurements& b, ConstSpan x, ConstSpan z,
                     ZeroResidualPolicy policy = ZeroResidualPolicy::PhaseOne);

/// Same average but measured against the pre-step aligned solution
/// x e^{i phi(z)}; equals dist^2(z,x) + f(z) - D f(z) exactly and bounds
/// expected_step from above.
double anchored_expected_step(const Ensemble& e, const Measurements& b, ConstSpan x, ConstSpan z,
                              ZeroResidualPolicy policy = ZeroResidualPolicy::PhaseOne);

struct ContractionStats {
  std::size_t trials = 0;
  std::size_t surviving = 0;  ///< trials with tau = infinity
  double frac_exited = 0.0;
  std::vector<double> mean_dist2;  ///< over surviving trials, per k
  std::vector<double> ratios;      ///< mean_dist2[k+1] / mean_dist2[k]

  /// Largest ratio over steps k with mean_dist2[k+1] still above `floor`.
  double max_ratio_above(double floor) const;
  /// exp of the least-squares slope of log(mean_dist2) over entries above `floor`.
  double fitted_factor(double floor) const;
};

ContractionStats contraction_stats(std::span<const SolverTrace> traces);

}  // namespace rkpr
