#include "rkpr/lemmas.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rkpr/parallel.hpp"

namespace rkpr {

std::string_view to_string(Direction d) noexcept {
  return d == Direction::AtLeast ? "at_least" : "at_most";
}

LemmaReport make_report(std::string name, double estimate, double std_error, double bound,
                        Direction direction, std::size_t samples) {
  LemmaReport r;
  r.name = std::move(name);
  r.estimate = estimate;
  r.std_error = std_error;
  r.bound = bound;
  r.direction = direction;
  r.samples = samples;
  // The buffer favours the bound: only a violation beyond 3 SE fails.
  r.pass = direction == Direction::AtLeast ? (estimate + 3.0 * std_error >= bound)
                                           : (estimate - 3.0 * std_error <= bound);
  return r;
}

void MomentAccumulator::add(double v) noexcept {
  ++count;
  const double d = v - mean;
  mean += d / static_cast<double>(count);
  m2 += d * (v - mean);
}

void MomentAccumulator::merge(const MomentAccumulator& o) noexcept {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(o.count);
  const double d = o.mean - mean;
  const double n = na + nb;
  mean += d * nb / n;
  m2 += o.m2 + d * d * na * nb / n;
  count += o.count;
}

double MomentAccumulator::variance() const noexcept {
  return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
}

double MomentAccumulator::std_error() const noexcept {
  return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::domain_error(msg);
}

void check_sigma(double sigma, const char* what) {
  require(std::isfinite(sigma) && std::abs(sigma) <= 1.0,
          std::string(what) + ": sigma must lie in [-1, 1]");
}

void check_F_domain(const LemmaParams& p, const char* what) {
  require(p.lambda >= 2.95, std::string(what) + ": requires lambda >= 2.95");
  check_sigma(p.sigma, what);
}

void check_G_domain(const LemmaParams& p, const char* what) {
  require(p.lambda >= 0.0 && p.lambda <= 0.4, std::string(what) + ": requires 0 <= lambda <= 0.4");
  check_sigma(p.sigma, what);
}

template <class Draw>
MomentAccumulator run_batches(std::size_t samples, const RngStream& rng, std::size_t threads,
                              Draw&& draw) {
  const std::size_t batches = (samples + kBatchSize - 1) / kBatchSize;
  std::vector<MomentAccumulator> parts(batches);
  parallel_for(batches, threads, [&](std::size_t b) {
    RngStream r = rng.split(b);
    const std::size_t lo = b * kBatchSize;
    const std::size_t hi = std::min(samples, lo + kBatchSize);
    MomentAccumulator acc;
    for (std::size_t i = lo; i < hi; ++i) acc.add(draw(r));
    parts[b] = acc;
  });
  MomentAccumulator total;
  for (const auto& part : parts) total.merge(part);
  return total;
}

// xi^* h and xi^* x under the reduction h = e1, x = sigma e1 + tau e^{i phi} e2.
struct Projections {
  Complex xh;
  Complex xx;
};

Projections draw_reduced(RngStream& r, double sigma, double tau) {
  const Complex xi1 = r.complex_normal();
  const Complex xi2 = r.complex_normal();
  const double phi = 2.0 * std::numbers::pi * r.uniform();
  const Complex c1 = std::conj(xi1);
  return {c1, c1 * sigma + std::conj(xi2) * std::polar(tau, phi)};
}

double F_integrand(const Projections& p, double lambda) {
  const double ax = std::abs(p.xx);
  if (ax == 0.0) return 0.0;
  if (!(lambda * ax >= std::abs(p.xh))) return 0.0;
  const double re = (std::conj(p.xh) * p.xx).real();  // Re(h^* xi xi^* x)
  return re * re / (ax * ax);
}

double G_integrand(const Projections& p, double lambda) {
  const double ah = std::abs(p.xh);
  return std::abs(p.xx) <= lambda * ah ? ah * ah : 0.0;
}

double F_bound(double lambda) { return 3.0 / 8.0 - 1.0 / ((lambda + 1.0) * (lambda + 1.0)); }

// Random unit pair with h^* x = sigma.
std::pair<CVector, CVector> unit_pair(std::size_t n, double sigma, RngStream& r) {
  if (n < 2) throw std::domain_error("full-dimension check requires n >= 2");
  CVector h = sample_unit_sphere(n, r);
  CVector w = sample_complex_gaussian(n, r);
  axpy(-inner(h, w), h, w.span());
  w *= Complex{1.0 / norm(w), 0.0};
  const double tau = std::sqrt(1.0 - sigma * sigma);
  CVector x = Complex{sigma, 0.0} * h;
  axpy(std::polar(tau, 2.0 * std::numbers::pi * r.uniform()), w, x.span());
  return {std::move(h), std::move(x)};
}

template <class Integrand>
MomentAccumulator full_dimension(std::size_t n, double sigma, std::size_t samples,
                                 const RngStream& rng, std::size_t threads, Integrand&& f) {
  RngStream frame_rng = rng.split(std::numeric_limits<std::uint64_t>::max());
  const auto [h, x] = unit_pair(n, sigma, frame_rng);
  return run_batches(samples, rng, threads, [&](RngStream& r) {
    thread_local std::vector<Complex> xi;
    xi.resize(n);
    for (auto& e : xi) e = r.complex_normal();
    return f(Projections{inner(xi, h), inner(xi, x)});
  });
}

}  // namespace

double hermitian_spectral_norm(const std::function<void(ConstSpan, MutSpan)>& apply, std::size_t n,
                               RngStream& rng, const PowerOptions& opts) {
  CVector tmp(n);
  auto squared = [&](ConstSpan v, MutSpan out) {
    apply(v, tmp.span());
    apply(tmp.view(), out);
  };
  const PowerResult pr = power_iteration(squared, sample_complex_gaussian(n, rng), opts);
  return std::sqrt(std::max(pr.eigenvalue, 0.0));
}

double covariance_deviation(const Ensemble& e, RngStream& rng) {
  const double inv_m = 1.0 / static_cast<double>(e.m());
  const double inv_n = 1.0 / static_cast<double>(e.n());
  auto apply = [&](ConstSpan v, MutSpan out) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = -inv_n * v[i];
    for (std::size_t j = 0; j < e.m(); ++j) {
      const auto a = e.row(j);
      axpy(inv_m * inner(a, v), a, out);
    }
  };
  return hermitian_spectral_norm(apply, e.n(), rng);
}

LemmaReport check_covariance(std::size_t n, std::size_t m, double delta, std::size_t trials,
                             const RngStream& rng, double min_fraction, std::size_t threads) {
  require(n >= 1 && m >= n, "covariance: requires m >= n >= 1");
  require(delta > 0.0 && delta <= 1.0, "covariance: delta must lie in (0, 1]");
  require(trials >= 1, "covariance: trials must be positive");
  std::vector<double> dev(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    RngStream r = rng.split(t);
    const Ensemble e = make_ensemble(m, n, Model::UnitSphere, r);
    dev[t] = covariance_deviation(e, r);
  });
  const double threshold = delta / static_cast<double>(n);
  std::size_t ok = 0;
  double worst = 0.0, sum = 0.0;
  for (double d : dev) {
    ok += d <= threshold ? 1 : 0;
    worst = std::max(worst, d);
    sum += d;
  }
  const double frac = static_cast<double>(ok) / static_cast<double>(trials);
  const double se = std::sqrt(frac * (1.0 - frac) / static_cast<double>(trials));
  LemmaReport r = make_report("covariance", frac, se, min_fraction, Direction::AtLeast, trials);
  r.details = {{"n", double(n)},
               {"m", double(m)},
               {"delta", delta},
               {"threshold", threshold},
               {"max_deviation", worst},
               {"mean_deviation", sum / static_cast<double>(trials)}};
  r.note = "estimate is the fraction of ensembles with ||(1/m) sum a a^* - I/n|| <= delta/n";
  return r;
}

LemmaReport mc_F(const LemmaParams& p, std::size_t samples, const RngStream& rng,
                 std::size_t threads) {
  check_F_domain(p, "F");
  require(samples >= 1, "F: samples must be positive");
  const double tau = p.tau();
  const auto acc = run_batches(samples, rng, threads, [&](RngStream& r) {
    return F_integrand(draw_reduced(r, p.sigma, tau), p.lambda);
  });
  LemmaReport rep = make_report("F", acc.mean, acc.std_error(), F_bound(p.lambda),
                                Direction::AtLeast, samples);
  rep.details = {{"lambda", p.lambda}, {"sigma", p.sigma}};
  return rep;
}

LemmaReport mc_G(const LemmaParams& p, std::size_t samples, const RngStream& rng,
                 std::size_t threads) {
  check_G_domain(p, "G");
  require(samples >= 1, "G: samples must be positive");
  const double tau = p.tau();
  const auto acc = run_batches(samples, rng, threads, [&](RngStream& r) {
    return G_integrand(draw_reduced(r, p.sigma, tau), p.lambda);
  });
  LemmaReport rep = make_report("G", acc.mean, acc.std_error(), G_closed_form_bound(p.lambda),
                                Direction::AtMost, samples);
  const double weak = 2.0 * p.lambda * p.lambda / (p.lambda * p.lambda + 1.0);
  rep.details = {{"lambda", p.lambda},
                 {"sigma", p.sigma},
                 {"weak_bound", weak},
                 {"weak_pass", acc.mean - 3.0 * acc.std_error() <= weak ? 1.0 : 0.0}};
  return rep;
}

LemmaReport mc_F_full(const LemmaParams& p, std::size_t n, std::size_t samples,
                      const RngStream& rng, std::size_t threads) {
  check_F_domain(p, "F_full");
  const auto acc = full_dimension(n, p.sigma, samples, rng, threads,
                                  [&](const Projections& pr) { return F_integrand(pr, p.lambda); });
  LemmaReport rep = make_report("F_full", acc.mean, acc.std_error(), F_bound(p.lambda),
                                Direction::AtLeast, samples);
  rep.details = {{"lambda", p.lambda}, {"sigma", p.sigma}, {"n", double(n)}};
  return rep;
}

LemmaReport mc_G_full(const LemmaParams& p, std::size_t n, std::size_t samples,
                      const RngStream& rng, std::size_t threads) {
  check_G_domain(p, "G_full");
  const auto acc = full_dimension(n, p.sigma, samples, rng, threads,
                                  [&](const Projections& pr) { return G_integrand(pr, p.lambda); });
  LemmaReport rep = make_report("G_full", acc.mean, acc.std_error(),
                                G_closed_form_bound(p.lambda), Direction::AtMost, samples);
  rep.details = {{"lambda", p.lambda}, {"sigma", p.sigma}, {"n", double(n)}};
  return rep;
}

double series_F(const LemmaParams& p, std::size_t k_max, std::size_t quad_points) {
  require(std::isfinite(p.sigma) && std::abs(p.sigma) < 1.0, "series_F: requires |sigma| < 1");
  require(p.lambda > 0.0 && std::isfinite(p.lambda), "series_F: requires lambda > 0");
  require(k_max >= 1 && quad_points >= 1, "series_F: k_max and quad_points must be positive");

  using Rule = boost::math::quadrature::gauss<double, 20>;
  // int_0^lambda (2t/(1+t^2))^power dt; the integrand peaks at t = 1.
  auto scaled_integral = [&](double power) {
    auto f = [power](double t) { return std::pow(2.0 * t / (1.0 + t * t), power); };
    auto composite = [&](double lo, double hi) {
      double s = 0.0;
      const double w = (hi - lo) / static_cast<double>(quad_points);
      for (std::size_t i = 0; i < quad_points; ++i) {
        s += Rule::integrate(f, lo + w * static_cast<double>(i), lo + w * static_cast<double>(i + 1));
      }
      return s;
    };
    const double mid = std::min(p.lambda, 1.0);
    double s = composite(0.0, mid);
    if (p.lambda > 1.0) s += composite(1.0, p.lambda);
    return s;
  };

  const double s2 = p.sigma * p.sigma;
  const double outer = (1.0 - s2) * (1.0 - s2);
  // scaled_k = (2k+1)!(2k+1)/(k!)^2 * 2^-(2k+3); stays O(k) instead of overflowing.
  double scaled = 0.125;
  double sigma_pow = 1.0;
  double total = 0.0;
  for (std::size_t k = 0; k < k_max; ++k) {
    const double kk = static_cast<double>(k);
    const double term = 2.0 * scaled * sigma_pow * outer * scaled_integral(2.0 * kk + 3.0);
    total += term;
    if (k >= 1 && term < 1e-12) break;
    scaled *= (2.0 * kk + 3.0) * (2.0 * kk + 3.0) / (2.0 * (kk + 1.0) * (2.0 * kk + 1.0));
    sigma_pow *= s2;
  }
  return total;
}

double F_sigma_zero(double lambda) {
  const double u = 1.0 + lambda * lambda;
  return 0.5 - 1.0 / u + 0.5 / (u * u);
}

double G_closed_form_bound(double lambda) {
  const double l2 = lambda * lambda;
  return l2 * (l2 + 2.0) / ((l2 + 1.0) * (l2 + 1.0));
}

namespace {

struct RowAverage {
  double mean;
  double std_error;
};

template <class Term>
RowAverage row_average(const Ensemble& e, const std::vector<Complex>& ax, ConstSpan h, Term&& term) {
  MomentAccumulator acc;
  for (std::size_t j = 0; j < e.m(); ++j) acc.add(term(inner(e.row(j), h), ax[j]));
  return {acc.mean, acc.std_error()};
}

CVector admissible_direction(const CVector& x, RngStream& r) {
  for (;;) {
    CVector u = sample_complex_gaussian(x.size(), r);
    axpy(Complex{0.0, -inner(x, u).imag()}, x, u.span());
    const double un = norm(u);
    if (un > 0.0) return Complex{1.0 / un, 0.0} * std::move(u);
  }
}

CVector orthogonal_direction(const CVector& x, RngStream& r) {
  for (;;) {
    CVector u = sample_complex_gaussian(x.size(), r);
    axpy(-inner(x, u), x, u.span());
    const double un = norm(u);
    if (un > 0.0) return Complex{1.0 / un, 0.0} * std::move(u);
  }
}

template <class Term>
LemmaReport scan_directions(const char* name, std::size_t n, std::size_t m, std::size_t h_samples,
                            const RngStream& rng, std::size_t threads, Direction dir, double bound,
                            Term&& term) {
  require(n >= 2 && m >= 1, std::string(name) + ": requires n >= 2, m >= 1");
  RngStream ens_rng = rng.split(0);
  const Ensemble e = make_ensemble(m, n, Model::UnitSphere, ens_rng);
  RngStream x_rng = rng.split(1);
  const CVector x = sample_unit_sphere(n, x_rng);
  std::vector<Complex> ax(m);
  e.apply(x, ax);

  RngStream orth_rng = rng.split(2);
  const RowAverage aligned = row_average(e, ax, x, term);
  const RowAverage orth = row_average(e, ax, orthogonal_direction(x, orth_rng), term);

  std::vector<RowAverage> sampled(h_samples);
  parallel_for(h_samples, threads, [&](std::size_t i) {
    RngStream r = rng.split(3 + i);
    sampled[i] = row_average(e, ax, admissible_direction(x, r), term);
  });

  RowAverage extreme = aligned;
  auto better = [dir](const RowAverage& a, const RowAverage& b) {
    return dir == Direction::AtLeast ? a.mean < b.mean : a.mean > b.mean;
  };
  if (better(orth, extreme)) extreme = orth;
  for (const auto& s : sampled) {
    if (better(s, extreme)) extreme = s;
  }
  LemmaReport rep = make_report(name, extreme.mean, extreme.std_error, bound, dir, h_samples + 2);
  rep.details = {{"n", double(n)},
                 {"m", double(m)},
                 {"h_aligned", aligned.mean},
                 {"h_orthogonal", orth.mean},
                 {"random_h", double(h_samples)}};
  rep.note = "covers h = x, one h orthogonal to x, and the sampled admissible h only";
  return rep;
}

}  // namespace

LemmaReport check_restricted_ratio(std::size_t n, std::size_t m, const LemmaParams& p,
                                   std::size_t h_samples, const RngStream& rng,
                                   std::size_t threads) {
  require(p.lambda >= 3.0, "ratio: requires lambda >= 3");
  require(p.delta > 0.0 && p.delta <= 1.0, "ratio: delta must lie in (0, 1]");
  const double l = p.lambda;
  const double bound =
      (3.0 / 8.0 - 1.0 / ((1.0 + 0.99 * l) * (1.0 + 0.99 * l)) - p.delta) / static_cast<double>(n);
  auto term = [l](Complex ah, Complex ax) {
    const double X = std::abs(ax);
    if (X == 0.0 || !(l * X >= std::abs(ah))) return 0.0;
    const double re = (std::conj(ah) * ax).real();
    return re * re / (X * X);
  };
  LemmaReport rep = scan_directions("ratio", n, m, h_samples, rng, threads, Direction::AtLeast,
                                    bound, term);
  rep.details["lambda"] = p.lambda;
  rep.details["delta"] = p.delta;
  return rep;
}

LemmaReport check_truncated_moment(std::size_t n, std::size_t m, const LemmaParams& p,
                                   std::size_t h_samples, const RngStream& rng,
                                   std::size_t threads) {
  require(p.lambda > 0.0 && p.lambda <= 0.4, "moment: requires 0 < lambda <= 0.4");
  require(p.delta > 0.0 && p.delta <= 1.0, "moment: delta must lie in (0, 1]");
  const double l = p.lambda;
  const double nn = static_cast<double>(n);
  const double bound = 2.0 * l * l / ((l * l + 0.99) * nn) + p.delta / nn;
  auto term = [l](Complex ah, Complex ax) {
    const double H = std::abs(ah);
    return std::abs(ax) <= l * H ? H * H : 0.0;
  };
  LemmaReport rep = scan_directions("moment", n, m, h_samples, rng, threads, Direction::AtMost,
                                    bound, term);
  rep.details["lambda"] = p.lambda;
  rep.details["delta"] = p.delta;
  return rep;
}

}  // namespace rkpr
