#include "rkpr/phase.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rkpr {

namespace {

void check_inputs(ConstSpan z, ConstSpan x, const char* what) {
  require_same_size(z, x, what);
  require_finite(z, what);
  require_finite(x, what);
}

double phase_of(Complex overlap) {
  if (overlap == Complex{0.0, 0.0}) return 0.0;
  double p = std::arg(overlap);
  if (p < 0.0) p += 2.0 * std::numbers::pi;
  // arg can round to exactly -0.0 or a value that wraps to 2*pi.
  if (p >= 2.0 * std::numbers::pi) p = 0.0;
  return p;
}

double residual_norm(ConstSpan z, ConstSpan x, Complex rot) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += std::norm(z[i] - x[i] * rot);
  return std::sqrt(s);
}

}  // namespace

double optimal_phase(ConstSpan z, ConstSpan x) {
  check_inputs(z, x, "optimal_phase");
  if (norm_sq(x) == 0.0) throw std::invalid_argument("optimal_phase: ||x|| must be positive");
  return phase_of(inner(x, z));
}

Alignment align(ConstSpan z, ConstSpan x) {
  check_inputs(z, x, "align");
  const double phase = phase_of(inner(x, z));
  return {phase, residual_norm(z, x, std::polar(1.0, phase))};
}

double dist(ConstSpan z, ConstSpan x) { return align(z, x).distance; }

CVector aligned_error(ConstSpan z, ConstSpan x) {
  const double phase = optimal_phase(z, x);
  const Complex unrot = std::polar(1.0, -phase);
  CVector h(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) h[i] = z[i] * unrot - x[i];
  return h;
}

}  // namespace rkpr
