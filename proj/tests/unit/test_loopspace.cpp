#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "gerbelab/loopspace/loopspace.hpp"

using namespace gerbelab;
using namespace gerbelab::testing;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx I(0, 1);

Poly x(int i) { return Poly::var(3, i); }
PolyForm dx(int i) { return PolyForm::dx(3, i); }
PolyForm vol() { return PolyForm::volume(3); }
PolyForm two_pi_i(const PolyForm& w) { return Scalar::two_pi_i() * w; }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

RVector vec(double a, double b, double c) {
  RVector v(3);
  v << a, b, c;
  return v;
}

SampledLoop circle(int N, LoopDerivative mode = LoopDerivative::FiniteDifference4, double r = 1.0) {
  return SampledLoop::sample(
      3, N, [r](double t) { return vec(r * std::cos(2 * kPi * t), r * std::sin(2 * kPi * t), 0.0); }, mode);
}

// a few low Fourier modes around a random center
SampledLoop rand_loop(Rng& rng, int N, LoopDerivative mode = LoopDerivative::Spectral) {
  Eigen::MatrixXd c(3, 7);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 7; ++k) c(i, k) = (k < 3 ? 0.5 : 0.15) * (2 * rand_unit(rng) - 1);
  return SampledLoop::sample(
      3, N,
      [c](double t) {
        RVector p(3);
        for (int i = 0; i < 3; ++i) {
          p(i) = c(i, 0);
          for (int k = 1; k <= 3; ++k)
            p(i) += c(i, 2 * k - 1) * std::cos(2 * kPi * k * t) + c(i, 2 * k) * std::sin(2 * kPi * k * t);
        }
        return p;
      },
      mode);
}

LoopTangent rand_tangent(Rng& rng, int N) {
  Eigen::MatrixXd c(3, 4);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 4; ++k) c(i, k) = 0.5 * (2 * rand_unit(rng) - 1);
  LoopTangent X(N, 3);
  for (int j = 0; j < N; ++j) {
    double t = 2 * kPi * j / N;
    for (int i = 0; i < 3; ++i) X(j, i) = c(i, 0) + c(i, 1) * std::cos(t) + c(i, 2) * std::sin(t) + c(i, 3) * std::cos(2 * t);
  }
  return X;
}

LoopTangent constant_tangent(int N, const RVector& v) {
  LoopTangent X(N, 3);
  for (int j = 0; j < N; ++j) X.row(j) = v.transpose();
  return X;
}

// order-one random data keeps the O(eps^2) difference error below the tolerances
PolyForm mild_form(Rng& rng, int p, int max_deg = 2, bool complex = true) {
  return Scalar::rational(1, 4) * rand_form(rng, 3, p, max_deg, 3, complex);
}
VectorField mild_field(Rng& rng) { return Scalar::rational(1, 2) * rand_vector_field(rng, 3, 2); }
// imaginary forms give unitary holonomies
PolyForm rand_imag_form(Rng& rng, int p, int max_deg = 2) {
  return Scalar::i() * Scalar::rational(1, 4) * rand_form(rng, 3, p, max_deg, 3, false);
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("sampled loops") {
  CHECK(code_of([] { circle(8); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { circle(17); }) == ErrorCode::InvalidArgument);
  SampledLoop g = circle(64, LoopDerivative::Spectral);
  CHECK(std::abs(g.velocity()(0, 1) - 2 * kPi) < 1e-12);
  CHECK(code_of([&] { transgress_form(PolyForm::volume(2), g, {}); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { transgress_form(vol(), g, {constant_tangent(64, vec(0, 0, 1))}); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("transgression of forms") {
  const int N = 256;
  LoopTangent e3 = constant_tangent(N, vec(0, 0, 1));
  SampledLoop spectral = circle(N, LoopDerivative::Spectral);
  LoopTangent radial = spectral.points();
  cplx v = transgress_form(vol(), spectral, {e3, radial});
  CHECK(std::abs(v - 2 * kPi) / (2 * kPi) <= 1e-10);

  // order-4 differences scale a single harmonic by 1 - x^4/30, x = 2 pi / N
  SampledLoop fd = circle(N);
  double xN = 2 * kPi / N;
  double err = std::abs(transgress_form(vol(), fd, {e3, radial}) - 2 * kPi) / (2 * kPi);
  CHECK(err == doctest::Approx(std::pow(xN, 4) / 30).epsilon(0.01));

  CHECK(transgress_form(vol(), fd, {radial, e3}) == -transgress_form(vol(), fd, {e3, radial}));
  CHECK(transgress_form(vol(), fd, {e3, e3}) == cplx(0));

  Rng rng(71);
  for (int t = 0; t < 5; ++t) {
    Poly f = rand_poly(rng, 3, 3, 4);
    PolyForm df = exterior_derivative(PolyForm::from_poly(f));
    CHECK(std::abs(transgress_form(df, rand_loop(rng, N, LoopDerivative::Spectral), {})) <= 1e-12);
    CHECK(std::abs(transgress_form(df, circle(N), {})) <= 1e-12);
    PolyForm w = rand_form(rng, 3, 3, 2, 3);
    SampledLoop g = rand_loop(rng, N);
    LoopTangent X = rand_tangent(rng, N), Y = rand_tangent(rng, N);
    CHECK(transgress_form(w, g, {X, Y}) == -transgress_form(w, g, {Y, X}));
  }

  // Gauss-Legendre on a polynomial path is exact for low degree: int_0^1 t^2 * 2t dt = 1/2
  PolyPath path{{Poly::var(1, 0), Poly::var(1, 0) * Poly::var(1, 0), Poly(1, Scalar(0))}};
  CHECK(std::abs(transgress_form(x(1) * dx(1), path, {}) - 0.5) < 1e-14);
}

TEST_CASE("deformation derivatives") {
  const int N = 256;
  Rng rng(72);
  SampledLoop g = rand_loop(rng, N);
  LoopTangent X = rand_tangent(rng, N);
  CHECK(deform_derivative(LoopFunctional::constant(2.5), g, X) == cplx(0));
  CHECK(code_of([&] { deform_derivative(LoopFunctional::constant(1), g, X, 0.0); }) == ErrorCode::InvalidArgument);

  for (int t = 0; t < 5; ++t) {
    PolyForm theta = rand_imag_form(rng, 1);
    VectorField V = mild_field(rng);
    LoopFn T = [&](const SampledLoop& h) { return transgress_form(theta, h, {}); };
    cplx lhs = deform_derivative(T, g, pullback_tangent(V, g));
    cplx rhs = transgress_form(lie_derivative(V, theta), g, {});
    CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max(1.0, std::abs(rhs)));

    LoopFunctional F = LoopFunctional::exp_transgression(Scalar::rational(1, 2), theta);
    CHECK(std::abs(deform_derivative(F, g, X, 1e-4, true) - F.derivative(g, X)) <= 1e-6 * std::max(1.0, std::abs(F(g))));
  }

  // order-2 convergence of the central difference
  PolyForm theta = Scalar::i() * (x(0) * x(0) * x(1) * dx(2) + x(2) * x(2) * x(2) * dx(0));
  LoopFunctional F = LoopFunctional::exp_transgression(Scalar(3), theta);
  cplx exact = F.derivative(g, X);
  double e1 = std::abs(deform_derivative(F, g, X, 2e-2) - exact);
  double e2 = std::abs(deform_derivative(F, g, X, 1e-2) - exact);
  CHECK(e2 / e1 == doctest::Approx(0.25).epsilon(0.05));
  CHECK(std::abs(deform_derivative(F, g, X, 2e-2, true) - exact) < e2 / 10);
}

TEST_CASE("line holonomy") {
  SampledLoop g = circle(512, LoopDerivative::Spectral);
  CHECK(line_holonomy(PolyForm(3, 1), g) == cplx(1));
  PolyForm A = Scalar(-1) * two_pi_i(x(0) * dx(1));
  cplx expected = std::exp(2 * kPi * kPi * I);
  CHECK(rel(line_holonomy(A, g), expected) <= 1e-8);
  // finite-difference velocities sit at the x^4/30 level
  CHECK(rel(line_holonomy(A, circle(512)), expected) <= 1e-7);

  Rng rng(73);
  for (int t = 0; t < 5; ++t) {
    PolyForm B = rand_imag_form(rng, 1, 3);
    CHECK(std::abs(std::abs(line_holonomy(B, rand_loop(rng, 256))) - 1) <= 1e-12);
  }

  // the same connection in two patches glued by exp(2 pi i q)
  CoverPtr two = build_cover(3, {"u", "v"}, {{"u", "v"}});
  Poly q = Scalar::rational(1, 3) * (x(0) * x(1)) + Scalar::rational(1, 5) * x(0);
  CechCochain f = make_cochain(two, 1, ValueKind::U1, 0, {{{0, 1}, PolyForm::from_poly(q)}});
  CechCochain As = make_cochain(two, 0, ValueKind::Form, 1, {{{0}, A}, {{1}, A - dlog(q)}});
  LocalLineBundle L = make_line_bundle(two, f, As);
  for (auto arcs : {ArcAssignment{{0}, {1}}, ArcAssignment{{0, 100, 300}, {0, 1, 0}}, ArcAssignment{{5, 260}, {1, 0}}})
    CHECK(rel(line_holonomy(L, g, arcs), expected) <= 1e-8);

  CechCochain wrong = make_cochain(two, 0, ValueKind::Form, 1, {{{0}, A}, {{1}, A}});
  CHECK(code_of([&] { make_line_bundle(two, f, wrong); }) == ErrorCode::ConnectionMismatch);

  CoverPtr path = build_cover(3, {"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
  CechCochain f3 = zero_cochain(path, 1, ValueKind::U1, 0);
  CechCochain A3 = make_cochain(path, 0, ValueKind::Form, 1, {{{0}, A}, {{1}, A}, {{2}, A}});
  LocalLineBundle L3 = make_line_bundle(path, f3, A3);
  CHECK(rel(line_holonomy(L3, g, {{0, 150, 300, 420}, {0, 1, 2, 1}}), expected) <= 1e-8);
  CHECK(code_of([&] { line_holonomy(L3, g, {{0, 200}, {0, 2}}); }) == ErrorCode::PatchGap);
  CHECK(code_of([&] { line_holonomy(L3, g, {{200, 100}, {0, 1}}); }) == ErrorCode::PatchGap);
}

TEST_CASE("variation of holonomy") {
  Rng rng(74);
  for (int t = 0; t < 5; ++t) {
    PolyForm A = rand_imag_form(rng, 1);
    SampledLoop g = rand_loop(rng, 256);
    LoopTangent X = rand_tangent(rng, 256);
    LoopFn hol = [&](const SampledLoop& h) { return line_holonomy(A, h); };
    CHECK(std::abs(deform_derivative(hol, g, X) - holonomy_variation(A, g, X)) <= 1e-4);
  }
}

TEST_CASE("surfaces") {
  TriangulatedSurface S = icosphere(2);
  CHECK(is_closed(S));
  CHECK(S.triangles.size() == 320);
  TriangulatedSurface D = flat_disc(4, 24);
  CHECK(!is_closed(D));
  CHECK(boundary_loop(D).size() == 24);
  // area checks
  PolyForm area = PolyForm::basis(3, {0, 1}, Poly(3, Scalar(1)));
  CHECK(std::abs(integrate_surface(area, D) - cplx(24 * std::sin(2 * kPi / 24) / 2)) < 1e-12);
  PolyForm sphere_area = x(0) * PolyForm::basis(3, {1, 2}, Poly(3, Scalar(1))) +
                         x(1) * PolyForm::basis(3, {2, 0}, Poly(3, Scalar(1))) +
                         x(2) * PolyForm::basis(3, {0, 1}, Poly(3, Scalar(1)));
  CHECK(std::abs(integrate_surface(sphere_area, icosphere(4)) - 4 * kPi) < 1e-3);
  CHECK(code_of([&] { surface_holonomy(area, D); }) == ErrorCode::NotClosed);
}

TEST_CASE("surface holonomy") {
  TriangulatedSurface S = icosphere(4);
  cplx expected = std::exp(8 * kPi * kPi / 3 * I);
  CHECK(rel(surface_holonomy(rho_r3(), S), expected) <= 1e-3);
  CHECK(surface_holonomy(PolyForm(3, 2), S) == cplx(1));

  // sigma = d beta with beta = x1^2 x3 dx2: integral over the closed sphere vanishes
  PolyForm sigma = exterior_derivative(x(0) * x(0) * x(2) * dx(1));
  CHECK(rel(surface_holonomy(rho_r3() + two_pi_i(sigma), S), expected) <= 1e-3);

  // two-patch presentation, hemispheres with a ragged seam
  CoverPtr two = build_cover(3, {"n", "s"}, {{"n", "s"}});
  CechCochain h = make_cochain(two, 1, ValueKind::U1, 0,
                               {{{0, 1}, PolyForm::from_poly(Scalar::rational(1, 4) * (x(0) * x(2)) + Poly(3, Scalar::rational(1, 3)))}});
  CechCochain a = make_cochain(two, 0, ValueKind::Form, 1,
                               {{{0}, Scalar::i() * (x(1) * dx(2))}, {{1}, Scalar::i() * (x(0) * x(0) * dx(1))}});
  LocalGerbe L = gerbe_from_trivialization({h, a, rho_r3()});
  CHECK(code_of([&] { surface_holonomy(L, S, HolonomyMode::Local); }) == ErrorCode::PatchGap);

  SurfacePatches P;
  auto side = [&](const RVector& p) { return p(2) + 0.1 * p(0) > 0 ? 0 : 1; };
  for (const auto& t : S.triangles) {
    RVector c = (S.vertices.row(t[0]) + S.vertices.row(t[1]) + S.vertices.row(t[2])).transpose() / 3.0;
    P.triangle.push_back(side(c));
  }
  for (size_t ti = 0; ti < S.triangles.size(); ++ti)
    for (int i = 0; i < 3; ++i) {
      int u = S.triangles[ti][i], w = S.triangles[ti][(i + 1) % 3];
      P.edge.emplace(std::make_pair(std::min(u, w), std::max(u, w)), P.triangle[ti]);
    }
  for (int v = 0; v < S.vertices.rows(); ++v) P.vertex.push_back(v % 2);
  S.patches = P;
  cplx local = surface_holonomy(L, S, HolonomyMode::Local);
  CHECK(rel(local, expected) <= 1e-3);
  CHECK(rel(local, surface_holonomy(L, S, HolonomyMode::Trivialized)) <= 1e-6);

  // n and e do not meet, but the assignment puts them side by side
  CoverPtr apart = build_cover(3, {"n", "s", "e"}, {{"n", "s"}, {"s", "e"}});
  LocalGerbe L2 = make_gerbe(apart, zero_cochain(apart, 2, ValueKind::U1, 0), zero_cochain(apart, 1, ValueKind::Form, 1),
                             make_cochain(apart, 0, ValueKind::Form, 2, {{{0}, rho_r3()}, {{1}, rho_r3()}, {{2}, rho_r3()}}));
  for (auto& p : S.patches->triangle) p *= 2;
  CHECK(code_of([&] { surface_holonomy(L2, S, HolonomyMode::Local); }) == ErrorCode::PatchGap);
}

TEST_CASE("D-brane holonomy") {
  TriangulatedSurface D = flat_disc(6, 48);
  CHECK(dbrane_holonomy(PolyForm(3, 2), MatForm(3, 1, 1, 1), D) == cplx(1));

  PolyForm rho = rho_r3() + Scalar::i() * (x(0) * PolyForm::basis(3, {0, 1}, Poly(3, Scalar(1))));
  MatForm a = MatForm::scalar(Scalar::i() * (x(1) * x(1) * dx(0) + x(0) * dx(1)), 1);
  PolyForm lambda = Scalar::i() * (x(0) * x(1) * dx(1) + x(0) * dx(2));
  cplx base = dbrane_holonomy(rho, a, D);
  cplx shifted = dbrane_holonomy(rho + exterior_derivative(lambda), a - MatForm::scalar(lambda, 1), D);
  CHECK(rel(shifted, base) <= 1e-3);
  CHECK(std::abs(std::abs(base) - 1) < 1e-9);

  // per-block oracle: boundary polygon line integrals times the disc factor
  PolyForm a1 = Scalar::i() * (x(0) * dx(1)), a2 = Scalar::i() * (Scalar(3) * x(1) * dx(0));
  MatForm block = direct_sum(MatForm::scalar(a1, 1), MatForm::scalar(a2, 1));
  std::vector<int> b = boundary_loop(D);
  auto polygon = [&](const PolyForm& w) {
    cplx s = 0;
    for (size_t k = 0; k < b.size(); ++k) {
      RVector P = D.vertices.row(b[k]).transpose(), Q = D.vertices.row(b[(k + 1) % b.size()]).transpose();
      PolyPath seg;
      for (int i = 0; i < 3; ++i) seg.comps.push_back(Poly(1, Scalar(mpq_class(P(i)))) + Scalar(mpq_class(Q(i) - P(i))) * Poly::var(1, 0));
      s += transgress_form(w, seg, {});
    }
    return s;
  };
  cplx disc = std::exp(-integrate_surface(rho, D));
  cplx oracle = (std::exp(-polygon(a1)) + std::exp(-polygon(a2))) * disc;
  CHECK(rel(dbrane_holonomy(rho, block, D, 32), oracle) <= 1e-3);

  LocalGerbe I0 = trivial_gerbe(PolyForm(3, 2));
  LocalGerbe Irho = trivial_gerbe(exterior_derivative(a1));
  GerbeMorphism E = make_morphism(I0, Irho, {}, {{0, MatForm::scalar(a1, 1)}});
  CHECK(dbrane_holonomy(PolyForm(3, 2), E, D) == dbrane_holonomy(PolyForm(3, 2), MatForm::scalar(a1, 1), D));
}

TEST_CASE("Wilson loops") {
  SampledLoop g = circle(256);
  CHECK(std::abs(transgress_section_wilson(MatForm(3, 1, 3, 3), g) - 3.0) < 1e-15);

  Rng rng(75);
  PolyForm A = rand_imag_form(rng, 1);
  SampledLoop h = rand_loop(rng, 256);
  CHECK(rel(transgress_section_wilson(MatForm::scalar(A, 1), h), line_holonomy(A, h)) <= 1e-12);

  // midpoint products converge at order 2 for noncommuting data
  MatForm na = rand_matconnection(rng, 3, 2);
  auto at = [&](int N) {
    return circle(N, LoopDerivative::Spectral, 0.8).deformed(constant_tangent(N, vec(0.1, -0.2, 0.3)), 1.0);
  };
  cplx ref = transgress_section_wilson(na, at(8192));
  double e1 = std::abs(transgress_section_wilson(na, at(128)) - ref);
  double e2 = std::abs(transgress_section_wilson(na, at(256)) - ref);
  CHECK(e2 / e1 == doctest::Approx(0.25).epsilon(0.05));

  // metric compatibility on rank 1: conj(T E) T F = T(hom(E, F))
  PolyForm B = rand_imag_form(rng, 1);
  MatForm aE = MatForm::scalar(A, 1), aF = MatForm::scalar(B, 1);
  cplx lhs = std::conj(transgress_section_wilson(aE, h)) * transgress_section_wilson(aF, h);
  CHECK(std::abs(lhs - transgress_section_wilson(aF - aE, h)) <= 1e-8);

  // nonabelian: unitary transport
  MatForm m = rand_matconnection(rng, 3, 2);
  CMatrix U = wilson_transport(m, h);
  CHECK((U.adjoint() * U - CMatrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("transgressed connection and curvature") {
  const int N = 256;
  SampledLoop g = circle(N, LoopDerivative::Spectral);
  LoopTangent e3 = constant_tangent(N, vec(0, 0, 1));
  CHECK(transgressed_connection(PolyForm(3, 2), g, e3) == cplx(0));
  CHECK(std::abs(transgressed_connection(rho_r3(), g, e3) - 4 * kPi * kPi / 3 * I) <= 1e-10);
  CHECK(std::abs(transgressed_connection(rho_r3(), g, g.points())) <= 1e-12);

  Rng rng(76);
  LoopTangent X = rand_tangent(rng, N), Y = rand_tangent(rng, N);
  CHECK(transgressed_connection(rho_r3(), g, 2.0 * X) == 2.0 * transgressed_connection(rho_r3(), g, X));
  cplx sum = transgressed_connection(rho_r3(), g, X) + transgressed_connection(rho_r3(), g, Y);
  CHECK(std::abs(transgressed_connection(rho_r3(), g, X + Y) - sum) <= 1e-14 * std::abs(sum) + 1e-15);

  for (int t = 0; t < 5; ++t) {
    PolyForm rho = rand_imag_form(rng, 2);
    SampledLoop h = rand_loop(rng, N);
    LoopTangent X1 = rand_tangent(rng, N), X2 = rand_tangent(rng, N);
    cplx F = connection_curvature_fd(rho, h, X1, X2);
    CHECK(std::abs(F - transgress_form(exterior_derivative(rho), h, {X1, X2})) <= 1e-4);
  }
}

TEST_CASE("transgression is a chain map") {
  const int N = 256;
  Rng rng(77);
  for (int p = 1; p <= 3; ++p)
    for (int t = 0; t < 3; ++t) {
      PolyForm w = mild_form(rng, p);
      SampledLoop g = rand_loop(rng, N);
      std::vector<VectorField> Vs;
      std::vector<LoopTangent> Xs;
      for (int k = 0; k < p; ++k) {
        Vs.push_back(mild_field(rng));
        Xs.push_back(pullback_tangent(Vs.back(), g));
      }
      cplx lhs = transgression_d(w, g, Vs);
      cplx rhs = p < 3 ? transgress_form(exterior_derivative(w), g, Xs) : cplx(0);
      CHECK(std::abs(lhs - rhs) <= 1e-5);

      // open paths pick up the endpoint term
      PolyPath path;
      for (int i = 0; i < 3; ++i) path.comps.push_back(Scalar::rational(1, 2) * rand_poly(rng, 1, 2, 3, false));
      cplx d = transgression_d(w, path, Vs);
      cplx body = p < 3 ? transgress_form(exterior_derivative(w), path, Vs) : cplx(0);
      CHECK(std::abs(d - body - boundary_term(w, path, Vs)) <= 1e-5);
    }

  for (int t = 0; t < 5; ++t) {
    PolyForm w = mild_form(rng, 2);
    SampledLoop g = rand_loop(rng, N);
    VectorField X = mild_field(rng), Y = mild_field(rng);
    cplx lhs = transgression_lie(w, g, X, {Y});
    cplx rhs = transgress_form(lie_derivative(X, w), g, {pullback_tangent(Y, g)});
    CHECK(std::abs(lhs - rhs) <= 1e-5);
  }
}

TEST_CASE("Hamiltonian naturality") {
  const int N = 256;
  auto P = make_plectic(vol());
  Rng rng(78);
  for (int t = 0; t < 5; ++t) {
    PolyForm alpha = mild_form(rng, 1, 2, false);
    VectorField Xa = hamiltonian_vf(P, alpha), Y = mild_field(rng);
    SampledLoop g = rand_loop(rng, N);
    cplx lhs = transgress_form(vol(), g, {pullback_tangent(Xa, g), pullback_tangent(Y, g)});
    CHECK(std::abs(lhs + transgression_d(alpha, g, {Y})) <= 1e-5);
  }
}

TEST_CASE("fake-flat sections transgress to parallel sections") {
  const int N = 256;
  Rng rng(79);
  // F = rho 1: a = beta diag(a1, a1 + d theta) beta^*, rho = d a1
  PolyForm a1 = Scalar::i() * (x(0) * x(0) * dx(1) + x(1) * x(2) * dx(0));
  PolyForm a2 = a1 + Scalar::i() * exterior_derivative(PolyForm::from_poly(x(0) * x(1) * x(2)));
  PolyForm rho = exterior_derivative(a1);
  CMatrix beta = rand_unitary(rng, 2);
  MatForm a = direct_sum(MatForm::scalar(a1, 1), MatForm::scalar(a2, 1)).left(beta).right(beta.adjoint());
  LocalGerbe I0 = trivial_gerbe(PolyForm(3, 2));
  GerbeMorphism E = make_morphism(I0, trivial_gerbe(rho), {}, {{0, a}}, kTauU, true);
  for (int t = 0; t < 3; ++t) {
    SampledLoop g = rand_loop(rng, N);
    LoopTangent X = rand_tangent(rng, N);
    LoopFn W = [&](const SampledLoop& h) { return transgress_section_wilson(E, h); };
    cplx DW = deform_derivative(W, g, X) + transgressed_connection(rho, g, X) * W(g);
    CHECK(std::abs(DW) <= 1e-4);
  }
  // a non-fake-flat section is not parallel
  MatForm bent = MatForm::scalar(Scalar::i() * (x(0) * x(2) * dx(1)), 1);
  SampledLoop g = circle(N);
  LoopTangent X = constant_tangent(N, vec(0.3, 0.1, 1));
  LoopFn W = [&](const SampledLoop& h) { return transgress_section_wilson(bent, h); };
  CHECK(std::abs(deform_derivative(W, g, X)) > 1e-2);
}

TEST_CASE("Kostant-Souriau operator") {
  const int N = 256;
  auto P = make_plectic(vol());
  PolyForm rho = rho_r3();
  Rng rng(80);
  LoopFunctional psi = LoopFunctional::exp_transgression(Scalar(1), x(1) * dx(2));
  SampledLoop g = rand_loop(rng, N, LoopDerivative::Spectral);

  Observable exact{exterior_derivative(PolyForm::from_poly(x(0) * x(1) * x(2))), Poly(3, Scalar(0))};
  CHECK(std::abs(ks_apply(P, rho, exact, psi, g)) <= 1e-10);

  Observable alpha{x(2) * dx(0), Poly(3, Scalar(0))}, beta{x(0) * dx(1), Poly(3, Scalar(0))};
  LoopFunctional twice = LoopFunctional::product({LoopFunctional::constant(2), psi});
  CHECK(ks_apply(P, rho, alpha, twice, g) == 2.0 * ks_apply(P, rho, alpha, psi, g));

  LoopFn Qb = ks_operator(P, rho, beta.alpha, psi.fn());
  LoopFn Qa = ks_operator(P, rho, alpha.alpha, psi.fn());
  cplx ab = ks_operator(P, rho, alpha.alpha, Qb)(g);
  cplx ba = ks_operator(P, rho, beta.alpha, Qa)(g);
  cplx br = ks_operator(P, rho, bracket(P, alpha, beta).alpha, psi.fn())(g);
  CHECK(std::abs(ab - ba - br) <= 1e-3 * std::abs(psi(g)));

  for (int t = 0; t < 4; ++t) {
    Observable a{mild_form(rng, 1, 3, false), Poly(3, Scalar(0))};
    Observable b{mild_form(rng, 1, 3, false), Poly(3, Scalar(0))};
    LoopFunctional phi = LoopFunctional::exp_transgression(Scalar::i(), mild_form(rng, 1, 2, false));
    SampledLoop h = rand_loop(rng, N);
    LoopFn Pa = ks_operator(P, rho, a.alpha, phi.fn()), Pb = ks_operator(P, rho, b.alpha, phi.fn());
    cplx comm = ks_operator(P, rho, a.alpha, Pb)(h) - ks_operator(P, rho, b.alpha, Pa)(h);
    cplx rhs = ks_operator(P, rho, bracket(P, a, b).alpha, phi.fn())(h);
    CHECK(std::abs(comm - rhs) <= 1e-3 * std::abs(phi(h)));
    CHECK(std::abs(rhs) > 1e-2);
  }

  CHECK(code_of([&] { ks_operator(P, rho, PolyForm::from_poly(x(0)), psi.fn()); }) == ErrorCode::DegreeMismatch);
}

TEST_CASE("finite-difference velocities on single-harmonic loops") {
  const int N = 256;
  Rng rng(81);
  for (int t = 0; t < 3; ++t) {
    RVector c = vec(rand_unit(rng) - 0.5, rand_unit(rng) - 0.5, rand_unit(rng) - 0.5);
    RVector u = vec(0.8, 0.1 * rand_unit(rng), 0), v = vec(0, 0.6, 0.2 * rand_unit(rng));
    SampledLoop g = SampledLoop::sample(3, N, [&](double s) {
      return RVector(c + std::cos(2 * kPi * s) * u + std::sin(2 * kPi * s) * v);
    });
    std::vector<VectorField> Vs{VectorField::coordinate(3, 0), Scalar::rational(1, 2) * VectorField::coordinate(3, 2)};
    PolyForm w = Scalar::rational(1, 4) * rand_form(rng, 3, 2, 1, 3);
    cplx rhs = transgress_form(exterior_derivative(w), g, {pullback_tangent(Vs[0], g), pullback_tangent(Vs[1], g)});
    CHECK(std::abs(transgression_d(w, g, Vs) - rhs) <= 1e-5);
  }
}
