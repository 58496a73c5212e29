#include "rkpr/ensemble.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rkpr {

std::string_view to_string(Model model) noexcept {
  switch (model) {
    case Model::UnitSphere:
      return "unit_sphere";
    case Model::ComplexGaussian:
      return "complex_gaussian";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  if (name == "unit_sphere" || name == "sphere") return Model::UnitSphere;
  if (name == "complex_gaussian" || name == "gaussian") return Model::ComplexGaussian;
  throw std::invalid_argument("unknown measurement model '" + std::string(name) + "'");
}

Ensemble::Ensemble(std::size_t m, std::size_t n, Model model, std::vector<Complex> entries,
                   std::optional<Provenance> provenance)
    : m_(m), n_(n), model_(model), rows_(std::move(entries)), provenance_(provenance) {
  if (m_ == 0 || n_ == 0) throw std::invalid_argument("Ensemble: m and n must be positive");
  if (rows_.size() != m_ * n_) {
    throw std::invalid_argument("Ensemble: expected " + std::to_string(m_ * n_) +
                                " entries, got " + std::to_string(rows_.size()));
  }
  require_finite(rows(), "Ensemble");
  row_norms_sq_.resize(m_);
  cumulative_.resize(m_);
  double running = 0.0;
  for (std::size_t j = 0; j < m_; ++j) {
    const double s = norm_sq(row(j));
    if (s == 0.0) throw std::invalid_argument("Ensemble: row " + std::to_string(j) + " is zero");
    if (model_ == Model::UnitSphere && std::abs(std::sqrt(s) - 1.0) > 1e-12) {
      throw std::invalid_argument("Ensemble: unit-sphere row " + std::to_string(j) +
                                  " does not have unit norm");
    }
    row_norms_sq_[j] = s;
    running += s;
    cumulative_[j] = running;
  }
}

void Ensemble::apply(ConstSpan v, std::span<Complex> out) const {
  if (v.size() != n_ || out.size() != m_) {
    throw std::invalid_argument("Ensemble::apply: dimension mismatch");
  }
  for (std::size_t j = 0; j < m_; ++j) out[j] = inner(row(j), v);
}

Measurements::Measurements(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("Measurements: empty");
  for (double b : values_) {
    if (!std::isfinite(b) || b < 0.0) {
      throw std::invalid_argument("Measurements: entries must be finite and nonnegative");
    }
  }
}

CVector sample_complex_gaussian(std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_complex_gaussian: n must be positive");
  CVector v(n);
  for (auto& e : v) e = rng.complex_normal();
  return v;
}

namespace {

void fill_unit_sphere(MutSpan out, RngStream& rng) {
  for (;;) {
    for (auto& e : out) e = rng.complex_normal();
    const double nrm = norm(out);
    if (nrm > 0.0) {
      for (auto& e : out) e /= nrm;
      return;
    }
  }
}

}  // namespace

CVector sample_unit_sphere(std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_unit_sphere: n must be positive");
  CVector v(n);
  fill_unit_sphere(v.span(), rng);
  return v;
}

Ensemble make_ensemble(std::size_t m, std::size_t n, Model model, RngStream& rng) {
  if (m == 0 || n == 0) throw std::invalid_argument("make_ensemble: m and n must be positive");
  const Provenance prov{rng.seed(), rng.stream_id(), rng.position()};
  std::vector<Complex> rows(m * n);
  for (std::size_t j = 0; j < m; ++j) {
    MutSpan r{rows.data() + j * n, n};
    if (model == Model::UnitSphere) {
      fill_unit_sphere(r, rng);
    } else {
      for (auto& e : r) e = rng.complex_normal();
    }
  }
  return Ensemble(m, n, model, std::move(rows), prov);
}

Ensemble regenerate_ensemble(std::size_t m, std::size_t n, Model model, const Provenance& p) {
  RngStream rng(p.seed, p.stream_id);
  rng.discard(p.offset);
  return make_ensemble(m, n, model, rng);
}

Measurements measure(const Ensemble& e, ConstSpan x) {
  if (x.size() != e.n()) throw std::invalid_argument("measure: dimension mismatch");
  require_finite(x, "measure");
  std::vector<double> b(e.m());
  for (std::size_t j = 0; j < e.m(); ++j) b[j] = std::abs(inner(e.row(j), x));
  return Measurements(std::move(b));
}

}  // namespace rkpr
