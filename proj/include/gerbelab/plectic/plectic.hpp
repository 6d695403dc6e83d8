#pragma once

#include "gerbelab/gerbe/gerbe.hpp"

namespace gerbelab {

struct PlecticSpace {
  int n = 0;
  PolyForm omega;
  bool constant_coefficients = false;
  // rational points where nondegeneracy was certified (empty for constant omega)
  std::vector<std::vector<mpq_class>> certificate_points;
};

struct Observable {
  PolyForm alpha;
  Poly f;
};

PlecticSpace make_plectic(const PolyForm& omega);

// Solves iota_X omega = -d alpha exactly (alpha of degree deg(omega) - 2).
VectorField hamiltonian_vf(const PlecticSpace& P, const PolyForm& alpha);
// -iota_{X_alpha} iota_{X_beta} omega
PolyForm bracket_forms(const PlecticSpace& P, const PolyForm& alpha, const PolyForm& beta);
Observable bracket(const PlecticSpace& P, const Observable& a, const Observable& b);

struct JacobiatorResult {
  Observable J;           // ([alpha,[beta,gamma]], iota iota iota omega)
  bool identity_holds;    // [[a,b],c] + [b,[a,c]] + d f = [a,[b,c]]
  PolyForm defect;        // [[a,b],c] + [b,[a,c]] - [a,[b,c]] + d f
};
JacobiatorResult jacobiator(const PlecticSpace& P, const PolyForm& alpha, const PolyForm& beta, const PolyForm& gamma);

struct PrequantumReport {
  bool ok;
  PolyForm difference;  // H + 2 pi i omega
};
PrequantumReport prequantum_check(const PlecticSpace& P, const LocalGerbe& L);

// omega_red = iota_{d/dx^k} omega on the remaining coordinates
PlecticSpace reduce_dimension(const PlecticSpace& P, int k);
// form with no dx^k and no x^k dependence, rewritten on the remaining coordinates
PolyForm drop_coordinate(const PolyForm& a, int k);
PolyForm reduce_observable(const PolyForm& alpha, int k);

}  // namespace gerbelab
