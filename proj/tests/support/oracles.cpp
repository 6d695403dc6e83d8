#include "oracles.hpp"

namespace gerbelab::testing {

int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

VectorField r3_hamiltonian_vf(const PolyForm& alpha) {
  VectorField X(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        int e = levi_civita(i, j, k);
        if (e) X[i] -= Scalar(e) * alpha.coeff({k}).partial(j);
      }
  return X;
}

PolyForm r3_bracket(const PolyForm& alpha, const PolyForm& beta) {
  PolyForm r(3, 1);
  for (int l = 0; l < 3; ++l) {
    Poly c(3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          int e = levi_civita(i, j, k);
          if (!e) continue;
          Poly curl = beta.coeff({l}).partial(j) - beta.coeff({j}).partial(l);
          c += Scalar(e) * (alpha.coeff({k}).partial(i) * curl);
        }
    r.add({l}, c);
  }
  return r;
}

}  // namespace gerbelab::testing
