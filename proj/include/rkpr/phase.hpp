#pragma once

#include "rkpr/cvector.hpp"

namespace rkpr {

/// Optimal global phase between an estimate and a reference, and the
/// resulting distance.
struct Alignment {
  double phase = 0.0;     ///< radians in [0, 2*pi)
  double distance = 0.0;  ///< ||z - x e^{i phase}||
};

/// Best phase psi minimising ||z - x e^{i psi}||, i.e. arg(x^* z) mapped into
/// [0, 2*pi). Returns 0 when x^* z == 0, where every phase is optimal.
/// Throws std::invalid_argument if ||x|| == 0, on dimension mismatch, or on
/// non-finite input.
double optimal_phase(ConstSpan z, ConstSpan x);

/// min over psi of ||z - x e^{i psi}||. Symmetric in its arguments.
double dist(ConstSpan z, ConstSpan x);

Alignment align(ConstSpan z, ConstSpan x);

/// h = e^{-i phase} z - x. Satisfies ||h|| = dist(z, x) and Im(h^* x) = 0.
CVector aligned_error(ConstSpan z, ConstSpan x);

}  // namespace rkpr
