#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "qedist/bipartite.hpp"

namespace testutil {

using namespace qedist;

inline CVector schmidt_form(const std::vector<double>& sq) {
  const int d = static_cast<int>(sq.size());
  CVector v = CVector::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = std::sqrt(sq[i]);
  return v / v.norm();
}

inline DensityOperator schmidt_state(const std::vector<double>& sq) {
  const int d = static_cast<int>(sq.size());
  return PureState(d, d, schmidt_form(sq)).projector();
}

inline DensityOperator ginibre(int da, int db, std::uint64_t seed, std::optional<int> rank = std::nullopt) {
  return random_state({RandomKind::ginibre_mixed, da, db, seed, std::nullopt, rank});
}

inline DensityOperator haar(int da, int db, std::uint64_t seed) {
  return random_state({RandomKind::haar_pure, da, db, seed, std::nullopt, std::nullopt});
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// A ⊗ B channel acting by random local unitary mixtures.
inline DensityOperator local_channel(const DensityOperator& rho, std::uint64_t seed) {
  const int da = rho.d_a(), db = rho.d_b();
  CMatrix out = CMatrix::Zero(rho.dim(), rho.dim());
  const double w[2] = {0.6, 0.4};
  for (int k = 0; k < 2; ++k) {
    const CMatrix ua = random_unitary(da, seed + 2 * k), ub = random_unitary(db, seed + 2 * k + 1);
    CMatrix u(da * db, da * db);
    for (int i = 0; i < da; ++i)
      for (int j = 0; j < da; ++j) u.block(i * db, j * db, db, db) = ua(i, j) * ub;
    out += w[k] * u * rho.matrix() * u.adjoint();
  }
  return DensityOperator(da, db, out);
}

}  // namespace testutil
