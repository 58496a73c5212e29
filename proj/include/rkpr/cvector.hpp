#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace rkpr {

using Complex = std::complex<double>;
using ConstSpan = std::span<const Complex>;
using MutSpan = std::span<Complex>;

/// Dense complex vector of fixed length n >= 1.
///
/// The length is set at construction and never changes; entries may be
/// modified in place. Operations that accept a CVector reject non-finite
/// entries at their boundary.
class CVector {
 public:
  explicit CVector(std::size_t n);
  explicit CVector(std::vector<Complex> entries);
  CVector(std::initializer_list<Complex> entries);
  explicit CVector(ConstSpan entries);

  static CVector zeros(std::size_t n) { return CVector(n); }

  std::size_t size() const noexcept { return v_.size(); }

  Complex& operator[](std::size_t i) noexcept { return v_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return v_[i]; }

  Complex* data() noexcept { return v_.data(); }
  const Complex* data() const noexcept { return v_.data(); }

  auto begin() noexcept { return v_.begin(); }
  auto end() noexcept { return v_.end(); }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }

  ConstSpan view() const noexcept { return {v_.data(), v_.size()}; }
  MutSpan span() noexcept { return {v_.data(), v_.size()}; }
  operator ConstSpan() const noexcept { return view(); }

  const std::vector<Complex>& entries() const noexcept { return v_; }

  CVector& operator+=(ConstSpan rhs);
  CVector& operator-=(ConstSpan rhs);
  CVector& operator*=(Complex s) noexcept;

  friend bool operator==(const CVector&, const CVector&) = default;

 private:
  std::vector<Complex> v_;
};

CVector operator+(CVector lhs, ConstSpan rhs);
CVector operator-(CVector lhs, ConstSpan rhs);
CVector operator*(Complex s, CVector v);

// Span kernels. `inner(a, z)` is a^* z = sum conj(a_i) z_i.
Complex inner(ConstSpan a, ConstSpan z);
double norm_sq(ConstSpan v);
double norm(ConstSpan v);
bool all_finite(ConstSpan v);

/// y += alpha * x
void axpy(Complex alpha, ConstSpan x, MutSpan y);

void require_same_size(ConstSpan a, ConstSpan b, std::string_view what);
void require_finite(ConstSpan v, std::string_view what);

}  // namespace rkpr
