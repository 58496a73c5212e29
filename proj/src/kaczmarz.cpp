#include "rkpr/kaczmarz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rkpr/phase.hpp"

namespace rkpr {

void SolverConfig::validate() const {
  if (!(ball_radius_rel >= 0.0 && ball_radius_rel <= 1.0)) {
    throw std::invalid_argument("SolverConfig: ball_radius_rel must lie in [0, 1]");
  }
}

std::size_t select_row(const Ensemble& e, RngStream& rng, Selection selection) {
  if (selection == Selection::Uniform) return rng.uniform_index(e.m());
  const auto cum = e.cumulative_norm_sq();
  const double target = rng.uniform() * e.total_norm_sq();
  const auto it = std::upper_bound(cum.begin(), cum.end(), target);
  const auto j = static_cast<std::size_t>(it - cum.begin());
  return j < e.m() ? j : e.m() - 1;
}

void pr_step_inplace(MutSpan z, ConstSpan a, double a_norm_sq, double b, ZeroResidualPolicy policy) {
  const Complex az = inner(a, z);
  const double mag = std::abs(az);
  if (mag == 0.0) {
    if (policy == ZeroResidualPolicy::PhaseOne) axpy(Complex{b / a_norm_sq, 0.0}, a, z);
    return;
  }
  // z+ = z + ((b/|a^*z|) - 1) (a^*z / ||a||^2) a, so a^* z+ = (b/|a^*z|) a^* z.
  const Complex coeff = ((b / mag) - 1.0) * az / a_norm_sq;
  axpy(coeff, a, z);
}

void linear_step_inplace(MutSpan z, ConstSpan a, double a_norm_sq, Complex y) {
  const Complex coeff = (y - inner(a, z)) / a_norm_sq;
  axpy(coeff, a, z);
}

namespace {

double checked_row_norm_sq(ConstSpan a, const char* what) {
  require_finite(a, what);
  const double s = norm_sq(a);
  if (s == 0.0) throw std::invalid_argument(std::string(what) + ": zero row");
  return s;
}

// dist without input validation; the run loops validate once up front.
double fast_dist(ConstSpan z, ConstSpan x) {
  const Complex ov = inner(x, z);
  const Complex rot = (ov == Complex{0.0, 0.0}) ? Complex{1.0, 0.0} : ov / std::abs(ov);
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += std::norm(z[i] - x[i] * rot);
  return std::sqrt(s);
}

double euclid_dist(ConstSpan z, ConstSpan x) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += std::norm(z[i] - x[i]);
  return std::sqrt(s);
}

template <class Step, class Distance>
SolverTrace run_loop(const Ensemble& e, const CVector& z0, const SolverConfig& cfg,
                     RngStream& rng, const CVector* truth, Step&& step, Distance&& distance) {
  cfg.validate();
  if (z0.size() != e.n()) throw std::invalid_argument("run: z0 dimension mismatch");
  require_finite(z0, "run: z0");
  if (cfg.track_distance && truth == nullptr) {
    throw std::invalid_argument("run: track_distance requires a ground-truth vector");
  }
  if (truth != nullptr) {
    if (truth->size() != e.n()) throw std::invalid_argument("run: truth dimension mismatch");
    require_finite(*truth, "run: truth");
  }
  const bool tracking = cfg.track_distance;
  const double radius = tracking ? cfg.ball_radius_rel * norm(*truth) : 0.0;

  SolverTrace trace{{}, std::nullopt, z0};
  trace.records.reserve(cfg.max_iters + 1);
  MutSpan z = trace.final_z.span();

  for (std::size_t k = 0;; ++k) {
    TraceRecord rec;
    rec.k = k;
    if (tracking) {
      rec.dist = distance(z, truth->view());
      if (!trace.stopping_time && rec.dist > radius) trace.stopping_time = k;
    }
    if (k == cfg.max_iters) {
      trace.records.push_back(rec);
      break;
    }
    const std::size_t j = select_row(e, rng, cfg.selection);
    rec.row = j;
    rec.abs_az = std::abs(inner(e.row(j), z));
    trace.records.push_back(rec);
    step(z, j);
  }
  return trace;
}

}  // namespace

CVector pr_step(ConstSpan z, ConstSpan a, double b, ZeroResidualPolicy policy) {
  require_same_size(z, a, "pr_step");
  require_finite(z, "pr_step");
  const double s = checked_row_norm_sq(a, "pr_step");
  if (!std::isfinite(b) || b < 0.0) throw std::invalid_argument("pr_step: b must be finite and >= 0");
  CVector out(z);
  pr_step_inplace(out.span(), a, s, b, policy);
  return out;
}

CVector linear_step(ConstSpan z, ConstSpan a, Complex y) {
  require_same_size(z, a, "linear_step");
  require_finite(z, "linear_step");
  const double s = checked_row_norm_sq(a, "linear_step");
  if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
    throw std::invalid_argument("linear_step: y must be finite");
  }
  CVector out(z);
  linear_step_inplace(out.span(), a, s, y);
  return out;
}

SolverTrace run_pr(const Ensemble& e, const Measurements& b, const CVector& z0,
                   const SolverConfig& cfg, RngStream& rng, const CVector* truth) {
  if (b.size() != e.m()) throw std::invalid_argument("run_pr: measurement count mismatch");
  return run_loop(
      e, z0, cfg, rng, truth,
      [&](MutSpan z, std::size_t j) {
        pr_step_inplace(z, e.row(j), e.row_norm_sq(j), b[j], cfg.zero_residual_policy);
      },
      fast_dist);
}

SolverTrace run_linear(const Ensemble& e, std::span<const Complex> y, const CVector& z0,
                       const SolverConfig& cfg, RngStream& rng, const CVector* truth) {
  if (y.size() != e.m()) throw std::invalid_argument("run_linear: right-hand side size mismatch");
  require_finite(y, "run_linear: y");
  return run_loop(
      e, z0, cfg, rng, truth,
      [&](MutSpan z, std::size_t j) { linear_step_inplace(z, e.row(j), e.row_norm_sq(j), y[j]); },
      euclid_dist);
}

}  // namespace rkpr
