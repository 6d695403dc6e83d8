#pragma once

#include <optional>

#include "gerbelab/gerbe/gerbe.hpp"
#include "gerbelab/twovect/matform.hpp"

namespace gerbelab {

constexpr double kTauU = 1e-9;
constexpr double kTauEig = 1e-7;

// Twisted vector bundle with connection over the common cover (constant transitions).
struct GerbeMorphism {
  LocalGerbe source;
  LocalGerbe target;
  int rank = 0;
  std::map<Simplex, CMatrix> alpha;  // ordered pairs {a, b}, a < b
  std::map<int, MatForm> a;          // per patch, anti-hermitian 1-forms

  // alpha_{ab} for any pair; alpha_{ba} = alpha_{ab}^{-1}, alpha_{aa} = 1
  CMatrix transition(int p, int q) const;
};

struct MorphismReport {
  bool ok = true;
  std::optional<ErrorCode> failure;
  std::vector<Residual> residuals;  // layers "twist", "unitarity", "connection", "anti-hermitian", "fake-curvature"
};

MorphismReport check_morphism(const GerbeMorphism& E, double tol = kTauU, bool fake_flat = false);
GerbeMorphism make_morphism(const LocalGerbe& L1, const LocalGerbe& L2, std::map<Simplex, CMatrix> alpha,
                            std::map<int, MatForm> a, double tol = kTauU, bool fake_flat = false);
GerbeMorphism identity_morphism(const LocalGerbe& L, int rank = 1);

// F_a - (B2_a - B1_a) 1 on each patch
std::map<int, MatForm> fake_curvature(const GerbeMorphism& E);

GerbeMorphism compose(const GerbeMorphism& F, const GerbeMorphism& E);  // F o E
GerbeMorphism direct_sum(const GerbeMorphism& E, const GerbeMorphism& E2);
GerbeMorphism tensor_mor(const GerbeMorphism& E, const GerbeMorphism& F);
GerbeMorphism det_morphism(const GerbeMorphism& E);
GerbeMorphism riesz_theta(const GerbeMorphism& E);

struct TwoMorphism {
  GerbeMorphism source;
  GerbeMorphism target;
  std::map<int, CMatrix> phi;  // target.rank x source.rank per patch
};

struct TwoMorphismReport {
  bool ok = true;
  std::optional<ErrorCode> failure;
  std::vector<Residual> residuals;  // layers "intertwine", "parallel"
};

TwoMorphismReport check_2morphism(const GerbeMorphism& E, const GerbeMorphism& E2, const std::map<int, CMatrix>& phi,
                                  double tol = kTauU);
TwoMorphism verify_2morphism(const GerbeMorphism& E, const GerbeMorphism& E2, std::map<int, CMatrix> phi,
                             double tol = kTauU);
TwoMorphism identity_2morphism(const GerbeMorphism& E);
TwoMorphism vcompose(const TwoMorphism& psi, const TwoMorphism& phi);  // psi o phi
TwoMorphism direct_sum(const TwoMorphism& phi, const TwoMorphism& psi);
TwoMorphism riesz_theta(const TwoMorphism& phi);

enum class Distribution { Compose, Tensor };
// F (.) (E + E2) => (F (.) E) + (F (.) E2) by a permutation of basis vectors
TwoMorphism left_distributor(const GerbeMorphism& F, const GerbeMorphism& E, const GerbeMorphism& E2,
                             Distribution kind = Distribution::Compose);

GerbeMorphism kernel_2mor(const TwoMorphism& phi, double tol = kTauU);

struct EigenSummand {
  std::complex<double> eigenvalue;
  GerbeMorphism summand;
};
struct EigenSplit {
  std::vector<EigenSummand> summands;  // sorted by (re, im)
  TwoMorphism reassembly;              // unitary from the direct sum of summands to E
};
EigenSplit eigensplit(const TwoMorphism& phi, double tol = kTauU, double tau_eig = kTauEig);

// Trivial gerbe on R^3: sections are u(n)-valued 1-forms, homs solve f w = eta f + df.
struct ModelSection {
  int n = 0;
  std::vector<PolyForm> omega;  // row-major n x n
  const PolyForm& at(int r, int c) const { return omega[r * n + c]; }
};

struct ModelHom {
  int rows = 0, cols = 0;
  std::vector<Poly> f;  // row-major
  const Poly& at(int r, int c) const { return f[r * cols + c]; }
};

ModelSection zero_section(int dim, int n);
ModelSection make_section(int n, std::vector<PolyForm> omega);  // checks anti-hermiticity
bool solves_hom(const ModelHom& f, const ModelSection& omega, const ModelSection& eta);
std::vector<ModelHom> hom_space(const ModelSection& omega, const ModelSection& eta, int degree_bound);
Scalar inner_product_hilbert(const ModelHom& f, const ModelHom& g, uint64_t seed = 0x5eedULL);
// -omega^t (x) 1_{n'} + 1_n (x) eta, index s * n' + r for the column-major vec of f
ModelSection gerbe_metric(const ModelSection& omega, const ModelSection& eta);
ModelSection direct_sum(const ModelSection& a, const ModelSection& b);

}  // namespace gerbelab
