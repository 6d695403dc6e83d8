#pragma once

#include <array>
#include <functional>
#include <optional>

#include "gerbelab/plectic/plectic.hpp"
#include "gerbelab/twovect/twovect.hpp"

namespace gerbelab {

using RMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RVector = Eigen::VectorXd;
using cplx = std::complex<double>;

// PolyForm compiled for repeated double evaluation.
class NumForm {
 public:
  NumForm() = default;
  explicit NumForm(const PolyForm& w);
  int dim() const { return n_; }
  int degree() const { return p_; }
  // w_x(v_1, ..., v_p)
  cplx operator()(const double* x, const std::vector<const double*>& vs) const;

 private:
  struct Term {
    Index idx;
    Exps exps;
    cplx c;
  };
  int n_ = 0, p_ = 0;
  std::vector<Term> terms_;
};

// Real polynomial vector field compiled for evaluation with its Jacobian.
class NumField {
 public:
  explicit NumField(const VectorField& V);
  int dim() const { return static_cast<int>(comps_.size()); }
  RVector operator()(const double* x) const;
  RMatrix jacobian(const double* x) const;

 private:
  std::vector<Poly> comps_;
  std::vector<std::vector<Poly>> partials_;
};

enum class LoopDerivative { FiniteDifference4, Spectral };

// Uniform periodic samples gamma(j/N), j = 0..N-1.
class SampledLoop {
 public:
  explicit SampledLoop(RMatrix samples, LoopDerivative mode = LoopDerivative::FiniteDifference4);
  static SampledLoop sample(int dim, int N, const std::function<RVector(double)>& f,
                            LoopDerivative mode = LoopDerivative::FiniteDifference4);

  int dim() const { return static_cast<int>(x_.cols()); }
  int size() const { return static_cast<int>(x_.rows()); }
  const RMatrix& points() const { return x_; }
  const RMatrix& velocity() const { return v_; }
  LoopDerivative mode() const { return mode_; }

  SampledLoop deformed(const RMatrix& X, double eps) const;
  SampledLoop deformed(const VectorField& V, double eps) const;

 private:
  RMatrix x_, v_;
  LoopDerivative mode_;
};

using LoopTangent = RMatrix;  // N x dim

// d/dtau of periodic samples (rows = samples)
RMatrix periodic_derivative(const RMatrix& f, LoopDerivative mode);
LoopTangent pullback_tangent(const VectorField& V, const SampledLoop& gamma);

// Trapezoid quadrature of w(X_1, ..., X_{p-1}, gamma') over the loop.
cplx transgress_form(const PolyForm& w, const SampledLoop& gamma, const std::vector<LoopTangent>& Xs);
cplx transgress_form(const NumForm& w, const SampledLoop& gamma, const std::vector<LoopTangent>& Xs);

// Polynomial path [0,1] -> R^n, integrated by Gauss-Legendre.
struct PolyPath {
  std::vector<Poly> comps;  // polynomials in one variable
  int dim() const { return static_cast<int>(comps.size()); }
};
cplx transgress_form(const PolyForm& w, const PolyPath& path, const std::vector<VectorField>& Ys);

using LoopFn = std::function<cplx(const SampledLoop&)>;

cplx deform_derivative(const LoopFn& F, const SampledLoop& gamma, const LoopTangent& X, double eps = 1e-4,
                       bool richardson = false);

// Coordinate-free d of T(w) on pullback fields V_0..V_{p-1} (Lie terms by central differences).
cplx transgression_d(const PolyForm& w, const SampledLoop& gamma, const std::vector<VectorField>& Vs, double eps = 1e-4);
cplx transgression_d(const PolyForm& w, const PolyPath& path, const std::vector<VectorField>& Vs, double eps = 1e-4);
// (-1)^{p-1} [w(V_0, ..., V_{p-1})] evaluated between the path's endpoints
cplx boundary_term(const PolyForm& w, const PolyPath& path, const std::vector<VectorField>& Vs);
// L_{G*X} T(w) on pullback fields Y_1..Y_{p-1}
cplx transgression_lie(const PolyForm& w, const SampledLoop& gamma, const VectorField& X,
                       const std::vector<VectorField>& Ys, double eps = 1e-4);

// exp(c T(theta)), or a product / sum of such.
class LoopFunctional {
 public:
  enum class Kind { Constant, Exp, Product, Sum };

  static LoopFunctional constant(cplx v);
  static LoopFunctional exp_transgression(const Scalar& c, const PolyForm& theta);
  static LoopFunctional product(std::vector<LoopFunctional> parts);
  static LoopFunctional sum(std::vector<LoopFunctional> parts);

  Kind kind() const { return kind_; }
  const Scalar& coefficient() const { return c_; }
  const PolyForm& theta() const { return theta_; }
  const std::vector<LoopFunctional>& parts() const { return parts_; }
  cplx value() const { return v_; }

  cplx operator()(const SampledLoop& gamma) const;
  // closed form: d/de exp(c T(theta)) = c T(d theta)(X) exp(c T(theta))
  cplx derivative(const SampledLoop& gamma, const LoopTangent& X) const;
  LoopFn fn() const;

 private:
  Kind kind_ = Kind::Constant;
  cplx v_ = 0;
  Scalar c_;
  PolyForm theta_;
  std::vector<LoopFunctional> parts_;
};

cplx deform_derivative(const LoopFunctional& F, const SampledLoop& gamma, const LoopTangent& X, double eps = 1e-4,
                       bool richardson = false);

// Line bundle in local form: A_a - A_b = dlog f_ab, f_ab = exp(2 pi i q_ab).
struct LocalLineBundle {
  CoverPtr cover;
  CechCochain f;  // U1, Cech degree 1
  CechCochain A;  // 1-forms, Cech degree 0
};
LocalLineBundle make_line_bundle(const CoverPtr& cover, CechCochain f, CechCochain A);

// Arc k runs over samples start[k] .. start[k+1] (cyclically) in patch[k].
struct ArcAssignment {
  std::vector<int> start;
  std::vector<int> patch;
};

cplx line_holonomy(const PolyForm& A, const SampledLoop& gamma);
cplx line_holonomy(const LocalLineBundle& L, const SampledLoop& gamma, const ArcAssignment& arcs);
// -hol(gamma) T(dA)(X): the first variation of the holonomy along X
cplx holonomy_variation(const PolyForm& A, const SampledLoop& gamma, const LoopTangent& X);

struct SphereChart {
  RVector center;
  double radius = 1.0;
};

struct SurfacePatches {
  std::vector<int> triangle;
  std::map<std::pair<int, int>, int> edge;  // key (min, max) vertex
  std::vector<int> vertex;
};

struct TriangulatedSurface {
  RMatrix vertices;  // V x dim
  std::vector<std::array<int, 3>> triangles;
  std::optional<SphereChart> sphere;  // quadrature points projected radially
  std::optional<SurfacePatches> patches;
};

TriangulatedSurface icosphere(int subdivisions, double radius = 1.0);
// flat disc in the x^1 x^2 plane, counterclockwise
TriangulatedSurface flat_disc(int rings, int segments, double radius = 1.0);
bool is_closed(const TriangulatedSurface& S);
std::vector<int> boundary_loop(const TriangulatedSurface& S);
cplx integrate_surface(const PolyForm& w, const TriangulatedSurface& S);

enum class HolonomyMode { Trivialized, Local };
cplx surface_holonomy(const PolyForm& rho, const TriangulatedSurface& S);
cplx surface_holonomy(const LocalGerbe& L, const TriangulatedSurface& S, HolonomyMode mode);

// tr P exp(-int a) around the boundary of D, times exp(-int_D rho)
cplx dbrane_holonomy(const PolyForm& rho, const MatForm& a, const TriangulatedSurface& D, int steps_per_edge = 8);
cplx dbrane_holonomy(const PolyForm& rho, const GerbeMorphism& E, const TriangulatedSurface& D, int steps_per_edge = 8);

// tr of the path-ordered exponential of -a around gamma, later steps on the left
CMatrix wilson_transport(const MatForm& a, const SampledLoop& gamma);
cplx transgress_section_wilson(const MatForm& a, const SampledLoop& gamma);
cplx transgress_section_wilson(const GerbeMorphism& E, const SampledLoop& gamma);

cplx transgressed_connection(const PolyForm& rho, const SampledLoop& gamma, const LoopTangent& X);
// X1(A(X2)) - X2(A(X1)) for fixed sample tangents
cplx connection_curvature_fd(const PolyForm& rho, const SampledLoop& gamma, const LoopTangent& X1,
                             const LoopTangent& X2, double eps = 1e-4);

// Q(alpha) = nabla_{X_alpha} + 2 pi i T(alpha) with nabla = d + A
LoopFn ks_operator(const PlecticSpace& P, const PolyForm& rho, const PolyForm& alpha, LoopFn psi, double eps = 1e-3);
cplx ks_apply(const PlecticSpace& P, const PolyForm& rho, const Observable& alpha, const LoopFunctional& psi,
              const SampledLoop& gamma, double eps = 1e-3);

}  // namespace gerbelab
