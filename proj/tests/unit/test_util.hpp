#pragma once

#include <Eigen/Dense>

#include "rkpr/cvector.hpp"
#include "rkpr/ensemble.hpp"

namespace rkpr::test {

inline Eigen::VectorXcd to_eigen(ConstSpan v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

// Row j of the result is a_j^*, so A z gives the vector of a_j^* z.
inline Eigen::MatrixXcd to_eigen(const Ensemble& e) {
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(e.m()), static_cast<Eigen::Index>(e.n()));
  for (std::size_t j = 0; j < e.m(); ++j) {
    const auto r = e.row(j);
    for (std::size_t i = 0; i < e.n(); ++i) {
      a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::conj(r[i]);
    }
  }
  return a;
}

}  // namespace rkpr::test
