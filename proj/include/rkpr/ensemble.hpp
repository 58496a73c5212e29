#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rkpr/cvector.hpp"
#include "rkpr/rng.hpp"

namespace rkpr {

enum class Model { UnitSphere, ComplexGaussian };

std::string_view to_string(Model model) noexcept;
/// Accepts "sphere"/"unit_sphere" and "gaussian"/"complex_gaussian".
Model parse_model(std::string_view name);

/// Where a generated ensemble came from: regenerate by constructing
/// RngStream(seed, stream_id), discarding `offset` words, then make_ensemble.
struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t offset = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// m measurement rows a_j in C^n, stored row-major, with cached squared norms
/// and their running sums (for norm-weighted row selection).
class Ensemble {
 public:
  /// `entries` holds m*n values, row j at [j*n, (j+1)*n). Every row must be
  /// finite and nonzero; UnitSphere rows must have norm 1 within 1e-12.
  Ensemble(std::size_t m, std::size_t n, Model model, std::vector<Complex> entries,
           std::optional<Provenance> provenance = std::nullopt);

  std::size_t m() const noexcept { return m_; }
  std::size_t n() const noexcept { return n_; }
  Model model() const noexcept { return model_; }

  ConstSpan row(std::size_t j) const noexcept { return {rows_.data() + j * n_, n_}; }
  ConstSpan rows() const noexcept { return {rows_.data(), rows_.size()}; }

  double row_norm_sq(std::size_t j) const noexcept { return row_norms_sq_[j]; }
  std::span<const double> row_norms_sq() const noexcept { return row_norms_sq_; }
  /// cumulative[j] = sum_{l <= j} ||a_l||^2
  std::span<const double> cumulative_norm_sq() const noexcept { return cumulative_; }
  double total_norm_sq() const noexcept { return cumulative_.back(); }

  const std::optional<Provenance>& provenance() const noexcept { return provenance_; }

  /// A^* applied row-wise: out[j] = a_j^* v.
  void apply(ConstSpan v, std::span<Complex> out) const;

 private:
  std::size_t m_;
  std::size_t n_;
  Model model_;
  std::vector<Complex> rows_;
  std::vector<double> row_norms_sq_;
  std::vector<double> cumulative_;
  std::optional<Provenance> provenance_;
};

/// Phaseless measurements b_j >= 0.
class Measurements {
 public:
  explicit Measurements(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const noexcept { return values_[j]; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const Measurements&, const Measurements&) = default;

 private:
  std::vector<double> values_;
};

/// Entries with iid N(0, 1/2) real and imaginary parts.
CVector sample_complex_gaussian(std::size_t n, RngStream& rng);

/// Uniform on the complex unit sphere: a normalised complex Gaussian,
/// redrawn in the (measure-zero) event of a zero draw.
CVector sample_unit_sphere(std::size_t n, RngStream& rng);

Ensemble make_ensemble(std::size_t m, std::size_t n, Model model, RngStream& rng);

/// Regenerates an ensemble from its provenance record.
Ensemble regenerate_ensemble(std::size_t m, std::size_t n, Model model, const Provenance& p);

/// b_j = |a_j^* x|.
Measurements measure(const Ensemble& e, ConstSpan x);

}  // namespace rkpr
