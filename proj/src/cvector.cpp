#include "rkpr/cvector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rkpr {

namespace {

void require_nonempty(std::size_t n) {
  if (n == 0) throw std::invalid_argument("CVector: length must be at least 1");
}

}  // namespace

CVector::CVector(std::size_t n) : v_(n, Complex{0.0, 0.0}) { require_nonempty(n); }

CVector::CVector(std::vector<Complex> entries) : v_(std::move(entries)) {
  require_nonempty(v_.size());
}

CVector::CVector(std::initializer_list<Complex> entries) : v_(entries) {
  require_nonempty(v_.size());
}

CVector::CVector(ConstSpan entries) : v_(entries.begin(), entries.end()) {
  require_nonempty(v_.size());
}

CVector& CVector::operator+=(ConstSpan rhs) {
  require_same_size(view(), rhs, "CVector +=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += rhs[i];
  return *this;
}

CVector& CVector::operator-=(ConstSpan rhs) {
  require_same_size(view(), rhs, "CVector -=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= rhs[i];
  return *this;
}

CVector& CVector::operator*=(Complex s) noexcept {
  for (auto& e : v_) e *= s;
  return *this;
}

CVector operator+(CVector lhs, ConstSpan rhs) { return lhs += rhs; }
CVector operator-(CVector lhs, ConstSpan rhs) { return lhs -= rhs; }
CVector operator*(Complex s, CVector v) { return v *= s; }

Complex inner(ConstSpan a, ConstSpan z) {
  require_same_size(a, z, "inner");
  // Separate real/imag accumulators; avoids std::complex multiply overhead.
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double zr = z[i].real(), zi = z[i].imag();
    re += ar * zr + ai * zi;
    im += ar * zi - ai * zr;
  }
  return {re, im};
}

double norm_sq(ConstSpan v) {
  double s = 0.0;
  for (const auto& e : v) s += e.real() * e.real() + e.imag() * e.imag();
  return s;
}

double norm(ConstSpan v) { return std::sqrt(norm_sq(v)); }

bool all_finite(ConstSpan v) {
  for (const auto& e : v) {
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
  }
  return true;
}

void axpy(Complex alpha, ConstSpan x, MutSpan y) {
  require_same_size(x, y, "axpy");
  const double pr = alpha.real(), pi = alpha.imag();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] += Complex{pr * xr - pi * xi, pr * xi + pi * xr};
  }
}

void require_same_size(ConstSpan a, ConstSpan b, std::string_view what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

void require_finite(ConstSpan v, std::string_view what) {
  if (!all_finite(v)) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

}  // namespace rkpr
