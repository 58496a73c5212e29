#include "rkpr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rkpr/phase.hpp"

namespace rkpr {

DegenerateRowsError::DegenerateRowsError(const std::string& what, std::vector<std::size_t> rows)
    : std::domain_error(what), rows_(std::move(rows)) {}

namespace {

void check_pair(const Ensemble& e, ConstSpan x, ConstSpan z, const char* what) {
  if (x.size() != e.n() || z.size() != e.n()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
  require_finite(x, what);
  require_finite(z, what);
}

std::vector<Complex> products(const Ensemble& e, ConstSpan v) {
  std::vector<Complex> out(e.m());
  e.apply(v, out);
  return out;
}

void require_nonzero(const std::vector<Complex>& az, const char* what) {
  std::vector<std::size_t> bad;
  for (std::size_t j = 0; j < az.size(); ++j) {
    if (az[j] == Complex{0.0, 0.0}) bad.push_back(j);
  }
  if (bad.empty()) return;
  std::string msg = std::string(what) + ": a_j^* z = 0 for rows";
  for (std::size_t i = 0; i < bad.size() && i < 16; ++i) msg += " " + std::to_string(bad[i]);
  if (bad.size() > 16) msg += " ...";
  throw DegenerateRowsError(msg, std::move(bad));
}

void require_unit_rows(const Ensemble& e, const char* what) {
  for (std::size_t j = 0; j < e.m(); ++j) {
    if (std::abs(std::sqrt(e.row_norm_sq(j)) - 1.0) > 1e-10) {
      throw std::invalid_argument(std::string(what) + ": requires unit-norm rows");
    }
  }
}

// D along v given precomputed a^*x, a^*z.
double derivative_from(const std::vector<Complex>& ax, const std::vector<Complex>& az,
                       const std::vector<Complex>& av) {
  double s = 0.0;
  for (std::size_t j = 0; j < az.size(); ++j) {
    const double w = 1.0 - std::abs(ax[j]) / std::abs(az[j]);
    s += w * (av[j] * std::conj(az[j])).real();
  }
  return 2.0 * s / static_cast<double>(az.size());
}

double loss_from(const std::vector<Complex>& ax, const std::vector<Complex>& az) {
  double s = 0.0;
  for (std::size_t j = 0; j < az.size(); ++j) {
    const double d = std::abs(az[j]) - std::abs(ax[j]);
    s += d * d;
  }
  return s / static_cast<double>(az.size());
}

}  // namespace

double loss(const Ensemble& e, ConstSpan x, ConstSpan z) {
  check_pair(e, x, z, "loss");
  return loss_from(products(e, x), products(e, z));
}

double directional_derivative(const Ensemble& e, ConstSpan x, ConstSpan z, ConstSpan v) {
  check_pair(e, x, z, "directional_derivative");
  if (v.size() != e.n()) throw std::invalid_argument("directional_derivative: dimension mismatch");
  require_finite(v, "directional_derivative");
  if (norm_sq(v) == 0.0) throw std::invalid_argument("directional_derivative: v must be nonzero");
  const auto az = products(e, z);
  require_nonzero(az, "directional_derivative");
  return derivative_from(products(e, x), az, products(e, v));
}

std::vector<double> row_terms(const Ensemble& e, ConstSpan x, ConstSpan z) {
  check_pair(e, x, z, "row_terms");
  const CVector h = aligned_error(z, x);
  const auto ax = products(e, x);
  const auto az = products(e, z);
  require_nonzero(az, "row_terms");
  const auto ah = products(e, h);
  std::vector<double> t(e.m());
  for (std::size_t j = 0; j < e.m(); ++j) {
    const double X = std::abs(ax[j]);
    const double Z = std::abs(az[j]);
    const double H = std::norm(ah[j]);
    const double R = (std::conj(ah[j]) * ax[j]).real();
    const double s = Z + X;
    t[j] = H - 2.0 * X * X * H / (Z * s) + 2.0 * X * H * R / (Z * s * s) +
           4.0 * X * R * R / (Z * s * s);
  }
  return t;
}

RscSample rsc_margin(const Ensemble& e, ConstSpan x, ConstSpan z) {
  check_pair(e, x, z, "rsc_margin");
  const Alignment al = align(z, x);
  if (al.distance == 0.0) throw std::invalid_argument("rsc_margin: z lies on the solution circle");
  const auto ax = products(e, x);
  const auto az = products(e, z);
  require_nonzero(az, "rsc_margin");

  // v = z - x e^{i phi(z)}
  CVector v(z);
  axpy(-std::polar(1.0, al.phase), x, v.span());
  const double d = derivative_from(ax, az, products(e, v));
  const double f = loss_from(ax, az);

  const auto t = row_terms(e, x, z);
  double decomp = 0.0;
  for (double tj : t) decomp += tj;
  decomp /= static_cast<double>(e.m());

  const double h2 = al.distance * al.distance;
  const double gap = d - f;
  const double denom = std::max(std::abs(gap), std::numeric_limits<double>::min());
  return {CVector(z), al.distance, f, d, gap / h2, decomp, std::abs(decomp - gap) / denom};
}

RowClaimReport check_row_claims(const Ensemble& e, ConstSpan x, ConstSpan z, double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("check_row_claims: alpha must exceed 1");
  check_pair(e, x, z, "check_row_claims");
  const auto t = row_terms(e, x, z);
  const CVector h = aligned_error(z, x);
  const auto ax = products(e, x);
  const auto ah = products(e, h);

  const double a = alpha;
  const double c_in = 4.0 * a * a * a / ((a + 1.0) * (2.0 * a + 1.0) * (2.0 * a + 1.0));
  const double c_h = (8.0 * a * a - 5.0 * a + 1.0) / ((a - 1.0) * (2.0 * a - 1.0) * (2.0 * a - 1.0));

  RowClaimReport rep{alpha};
  rep.min_inside_slack = std::numeric_limits<double>::infinity();
  rep.min_outside_slack = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < e.m(); ++j) {
    const double X = std::abs(ax[j]);
    const double Habs = std::abs(ah[j]);
    const double H = Habs * Habs;
    if (X >= alpha * Habs && X > 0.0) {
      const double R = (std::conj(ah[j]) * ax[j]).real();
      const double ratio = R * R / (X * X);
      const double slack = t[j] - (c_in * ratio - c_h * H);
      const double tol = 1e-12 * (H + ratio + std::abs(t[j]));
      ++rep.inside;
      if (slack < -tol) ++rep.inside_violations;
      rep.min_inside_slack = std::min(rep.min_inside_slack, slack);
    } else {
      const double slack = t[j] + 3.0 * H;
      const double tol = 1e-12 * (H + std::abs(t[j]));
      ++rep.outside;
      if (slack < -tol) ++rep.outside_violations;
      rep.min_outside_slack = std::min(rep.min_outside_slack, slack);
    }
  }
  return rep;
}

namespace {

template <class Metric>
double average_step(const Ensemble& e, const Measurements& b, ConstSpan x, ConstSpan z,
                    ZeroResidualPolicy policy, const char* what, Metric&& metric) {
  check_pair(e, x, z, what);
  if (b.size() != e.m()) throw std::invalid_argument(std::string(what) + ": measurement count mismatch");
  require_unit_rows(e, what);
  CVector w(z.size());
  double s = 0.0;
  for (std::size_t j = 0; j < e.m(); ++j) {
    std::copy(z.begin(), z.end(), w.begin());
    pr_step_inplace(w.span(), e.row(j), e.row_norm_sq(j), b[j], policy);
    s += metric(w);
  }
  return s / static_cast<double>(e.m());
}

}  // namespace

double expected_step(const Ensemble& e, const Measurements& b, ConstSpan x, ConstSpan z,
                     ZeroResidualPolicy policy) {
  return average_step(e, b, x, z, policy, "expected_step", [&](const CVector& w) {
    const double d = dist(w, x);
    return d * d;
  });
}

double anchored_expected_step(const Ensemble& e, const Measurements& b, ConstSpan x, ConstSpan z,
                              ZeroResidualPolicy policy) {
  const Complex rot = std::polar(1.0, optimal_phase(z, x));
  return average_step(e, b, x, z, policy, "anchored_expected_step", [&](const CVector& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += std::norm(w[i] - x[i] * rot);
    return s;
  });
}

double ContractionStats::max_ratio_above(double floor) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    if (!(mean_dist2[k + 1] > floor)) break;
    worst = std::max(worst, ratios[k]);
  }
  return worst;
}

double ContractionStats::fitted_factor(double floor) const {
  double sk = 0, sy = 0, skk = 0, sky = 0;
  std::size_t cnt = 0;
  for (std::size_t k = 0; k < mean_dist2.size(); ++k) {
    if (!(mean_dist2[k] > floor)) break;
    const double kk = static_cast<double>(k);
    const double y = std::log(mean_dist2[k]);
    sk += kk;
    sy += y;
    skk += kk * kk;
    sky += kk * y;
    ++cnt;
  }
  if (cnt < 2) return std::numeric_limits<double>::quiet_NaN();
  const double c = static_cast<double>(cnt);
  const double slope = (c * sky - sk * sy) / (c * skk - sk * sk);
  return std::exp(slope);
}

ContractionStats contraction_stats(std::span<const SolverTrace> traces) {
  if (traces.empty()) throw std::invalid_argument("contraction_stats: no traces");
  const std::size_t len = traces.front().records.size();
  ContractionStats st;
  st.trials = traces.size();
  st.mean_dist2.assign(len, 0.0);
  std::size_t exited = 0;
  for (const auto& tr : traces) {
    if (tr.records.size() != len) throw std::invalid_argument("contraction_stats: trace lengths differ");
    if (tr.exited()) {
      ++exited;
      continue;
    }
    ++st.surviving;
    for (std::size_t k = 0; k < len; ++k) {
      const double d = tr.records[k].dist;
      if (std::isnan(d)) throw std::invalid_argument("contraction_stats: trace has no distances");
      st.mean_dist2[k] += d * d;
    }
  }
  st.frac_exited = static_cast<double>(exited) / static_cast<double>(st.trials);
  if (st.surviving == 0) {
    st.mean_dist2.assign(len, std::numeric_limits<double>::quiet_NaN());
  } else {
    for (auto& v : st.mean_dist2) v /= static_cast<double>(st.surviving);
  }
  for (std::size_t k = 0; k + 1 < len; ++k) st.ratios.push_back(st.mean_dist2[k + 1] / st.mean_dist2[k]);
  return st;
}

}  // namespace rkpr
