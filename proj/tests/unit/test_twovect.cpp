#include <doctest.h>

#include <Eigen/LU>
#include <functional>

#include "generators.hpp"
#include "gerbelab/twovect/twovect.hpp"

using namespace gerbelab;
using namespace gerbelab::testing;

namespace {

using cd = std::complex<double>;

Poly x(int i) { return Poly::var(3, i); }
PolyForm dx(int i) { return PolyForm::dx(3, i); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

CoverPtr triangle() { return build_cover(3, {"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"a", "c"}, {"a", "b", "c"}}); }

LocalGerbe flat_gerbe(const CoverPtr& c, const Scalar& q012) {
  std::map<Simplex, PolyForm> g;
  g[{0, 1, 2}] = PolyForm::from_poly(Poly(3, q012));
  return make_gerbe(c, make_cochain(c, 2, ValueKind::U1, 0, g), zero_cochain(c, 1, ValueKind::Form, 1),
                    zero_cochain(c, 0, ValueKind::Form, 2));
}

std::map<int, MatForm> zero_conn(const CoverPtr& c, int n) {
  std::map<int, MatForm> a;
  for (int p = 0; p < c->size(); ++p) a[p] = MatForm(c->dim(), 1, n, n);
  return a;
}

double dist(const GerbeMorphism& E, const GerbeMorphism& F) {
  double d = 0;
  for (const auto& [s, M] : E.alpha) d = std::max(d, (M - F.alpha.at(s)).cwiseAbs().maxCoeff());
  for (const auto& [p, m] : E.a) d = std::max(d, (m - F.a.at(p)).norm());
  return d;
}

std::map<int, CMatrix> conj_blocks(const std::map<int, CMatrix>& beta2, const CMatrix& C, const std::map<int, CMatrix>& beta) {
  std::map<int, CMatrix> phi;
  for (const auto& [p, b] : beta) phi[p] = beta2.at(p) * C * b.adjoint();
  return phi;
}

// nullity of {C : C W_i = W_i C}, via the Kronecker form of the Sylvester system
int commutant_dim(const std::vector<CMatrix>& Ws) {
  const int n = static_cast<int>(Ws[0].rows());
  CMatrix S(n * n * Ws.size(), n * n);
  CMatrix I = CMatrix::Identity(n, n);
  for (size_t i = 0; i < Ws.size(); ++i) S.middleRows(i * n * n, n * n) = kron(I, Ws[i]) - kron(Ws[i].transpose(), I);
  Eigen::FullPivLU<CMatrix> lu(S);
  lu.setThreshold(1e-10);
  return n * n - static_cast<int>(lu.rank());
}

}  // namespace

TEST_CASE("morphism validation") {
  LocalGerbe I0 = trivial_gerbe(PolyForm(3, 2));
  GerbeMorphism id = identity_morphism(I0);
  CHECK(id.rank == 1);

  LocalGerbe Irho = trivial_gerbe(rho_r3());
  MatForm a = MatForm::scalar(Scalar::i() * (x(0) * dx(1) + x(2) * x(2) * dx(0)), 1);
  CHECK_NOTHROW(make_morphism(I0, Irho, {}, {{0, a}}));
  MatForm bad = MatForm::scalar(x(0) * dx(1), 1);
  CHECK(code_of([&] { make_morphism(I0, Irho, {}, {{0, bad}}); }) == ErrorCode::ConnectionFail);

  CoverPtr c = triangle();
  LocalGerbe L1 = flat_gerbe(c, Scalar(0));
  LocalGerbe L2 = flat_gerbe(c, Scalar::rational(1, 3));
  CMatrix one = CMatrix::Identity(1, 1);
  std::map<Simplex, CMatrix> alpha{{{0, 1}, one}, {{1, 2}, one}, {{0, 2}, one}};
  CHECK(code_of([&] { make_morphism(L1, L2, alpha, zero_conn(c, 1)); }) == ErrorCode::TwistedCocycleFail);
  try {
    make_morphism(L1, L2, alpha, zero_conn(c, 1));
  } catch (const Error& e) {
    REQUIRE(e.residuals().size() == 1);
    CHECK(e.residuals()[0].simplex == std::vector<std::string>{"a", "b", "c"});
  }
  alpha[{0, 2}] = std::exp(cd(0, 2 * M_PI / 3)) * one;
  CHECK_NOTHROW(make_morphism(L1, L2, alpha, zero_conn(c, 1)));
  alpha[{0, 1}] = 2.0 * one;
  CHECK(code_of([&] { make_morphism(L1, L1, alpha, zero_conn(c, 1)); }) == ErrorCode::TwistedCocycleFail);
  std::map<Simplex, CMatrix> stretched{{{0, 1}, 2.0 * one}, {{1, 2}, 0.5 * one}, {{0, 2}, one}};
  CHECK(code_of([&] { make_morphism(L1, L1, stretched, zero_conn(c, 1)); }) == ErrorCode::UnitarityFail);
}

TEST_CASE("randomized twisted morphisms validate") {
  Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    CoverPtr c = rand_cover(rng, 3, 5);
    Twist T = rand_twist(rng, rand_gerbe(rng, c, 1));
    int n = rand_int(rng, 1, 3);
    GerbeMorphism E = twisted_morphism(T, rand_frames(rng, c, n), rand_matconnection(rng, 3, n));
    CHECK(check_morphism(E).ok);
    GerbeMorphism D = det_morphism(E);
    CHECK(D.rank == 1);
    CHECK(check_morphism(D).ok);
  }
}

TEST_CASE("composition and tensor") {
  Rng rng(42);
  CoverPtr c = rand_cover(rng, 3, 4);
  Twist T12 = rand_twist(rng, rand_gerbe(rng, c, 1));
  Twist T23 = rand_twist(rng, T12.L2);
  Twist T34 = rand_twist(rng, T23.L2);
  GerbeMorphism E = twisted_morphism(T12, rand_frames(rng, c, 2), rand_matconnection(rng, 3, 2));
  GerbeMorphism F = twisted_morphism(T23, rand_frames(rng, c, 3), rand_matconnection(rng, 3, 3));
  GerbeMorphism G = twisted_morphism(T34, rand_frames(rng, c, 1), rand_matconnection(rng, 3, 1));

  GerbeMorphism FE = compose(F, E);
  CHECK(FE.rank == 6);
  CHECK(dist(compose(identity_morphism(T12.L2), E), E) <= kTauU);
  CHECK(dist(compose(E, identity_morphism(T12.L1)), E) <= kTauU);
  CHECK(dist(compose(G, FE), compose(compose(G, F), E)) <= kTauU);
  CHECK(code_of([&] { compose(E, F); }) == ErrorCode::GerbeMismatch);

  GerbeMorphism EF = tensor_mor(E, F);
  CHECK(EF.rank == 6);
  LocalGerbe I = trivial_gerbe(PolyForm(3, 2));
  Rng r2(7);
  MatForm m = rand_matconnection(r2, 3, 2);
  GerbeMorphism S = make_morphism(I, I, {}, {{0, m}});
  GerbeMorphism S1 = tensor_mor(S, identity_morphism(I));
  CHECK(dist(S1, S) <= kTauU);
}

TEST_CASE("direct sums and distributors") {
  Rng rng(43);
  CoverPtr c = rand_cover(rng, 3, 4);
  Twist T = rand_twist(rng, rand_gerbe(rng, c, 1));
  Twist U = rand_twist(rng, T.L2);
  GerbeMorphism E = twisted_morphism(T, rand_frames(rng, c, 2), rand_matconnection(rng, 3, 2));
  GerbeMorphism E2 = twisted_morphism(T, rand_frames(rng, c, 1), rand_matconnection(rng, 3, 1));
  GerbeMorphism F = twisted_morphism(U, rand_frames(rng, c, 2), rand_matconnection(rng, 3, 2));
  CHECK(direct_sum(E, E2).rank == 3);
  CHECK(code_of([&] { direct_sum(E, F); }) == ErrorCode::GerbeMismatch);

  TwoMorphism dist_c = left_distributor(F, E, E2, Distribution::Compose);
  CHECK(check_2morphism(dist_c.source, dist_c.target, dist_c.phi).ok);
  TwoMorphism dist_t = left_distributor(F, E, E2, Distribution::Tensor);
  CHECK(dist_t.source.rank == 6);

  // (phi + psi) o (phi' + psi') = (phi o phi') + (psi o psi')
  std::map<int, CMatrix> lam, mu;
  for (int p = 0; p < c->size(); ++p) {
    lam[p] = cd(2, 1) * CMatrix::Identity(2, 2);
    mu[p] = cd(-1, 3) * CMatrix::Identity(1, 1);
  }
  TwoMorphism phi = verify_2morphism(E, E, lam), psi = verify_2morphism(E2, E2, mu);
  TwoMorphism lhs = vcompose(direct_sum(phi, psi), direct_sum(phi, psi));
  TwoMorphism rhs = direct_sum(vcompose(phi, phi), vcompose(psi, psi));
  for (int p = 0; p < c->size(); ++p) CHECK((lhs.phi.at(p) - rhs.phi.at(p)).cwiseAbs().maxCoeff() <= kTauU);

  // inclusion of a summand
  std::map<int, CMatrix> inc;
  for (int p = 0; p < c->size(); ++p) inc[p] = CMatrix::Identity(3, 2);
  CHECK_NOTHROW(verify_2morphism(E, direct_sum(E, E2), inc));
}

TEST_CASE("Riesz dual") {
  Rng rng(44);
  CoverPtr c = rand_cover(rng, 3, 4);
  Twist T = rand_twist(rng, rand_gerbe(rng, c, 1));
  GerbeMorphism E = twisted_morphism(T, rand_frames(rng, c, 3), rand_matconnection(rng, 3, 3));
  GerbeMorphism tE = riesz_theta(E);
  CHECK(check_morphism(tE).ok);
  for (const auto& [s, M] : E.alpha) CHECK((tE.alpha.at(s) - M.conjugate()).cwiseAbs().maxCoeff() <= kTauU);
  CHECK(dist(riesz_theta(tE), E) <= kTauU);

  LocalGerbe I = trivial_gerbe(PolyForm(3, 2));
  GerbeMorphism id = identity_morphism(I, 2);
  CHECK(dist(riesz_theta(id), id) == 0.0);

  std::map<int, CMatrix> beta = rand_frames(rng, c, 3), beta2 = rand_frames(rng, c, 3);
  MatForm m = MatForm::scalar(Scalar::i() * dx(0), 3);
  GerbeMorphism A = twisted_morphism(T, beta, m), B = twisted_morphism(T, beta2, m);
  CMatrix C1 = rand_unitary(rng, 3), C2 = rand_unitary(rng, 3);
  TwoMorphism psi = verify_2morphism(A, B, conj_blocks(beta2, C1, beta));
  TwoMorphism phi = verify_2morphism(B, A, conj_blocks(beta, C2, beta2));
  TwoMorphism lhs = riesz_theta(vcompose(phi, psi));
  TwoMorphism rhs = vcompose(riesz_theta(psi), riesz_theta(phi));
  CHECK(check_2morphism(lhs.source, lhs.target, lhs.phi).ok);
  for (int p = 0; p < c->size(); ++p) CHECK((lhs.phi.at(p) - rhs.phi.at(p)).cwiseAbs().maxCoeff() <= kTauU);
}

TEST_CASE("2-morphism verification") {
  Rng rng(45);
  CoverPtr c = rand_cover(rng, 3, 4);
  Twist T = rand_twist(rng, rand_gerbe(rng, c, 1));
  std::map<int, CMatrix> beta = rand_frames(rng, c, 2);
  GerbeMorphism E = twisted_morphism(T, beta, rand_matconnection(rng, 3, 2));
  CHECK_NOTHROW(verify_2morphism(E, E, identity_2morphism(E).phi));
  std::map<int, CMatrix> skew;
  for (const auto& [p, b] : beta) skew[p] = b * CMatrix(Eigen::Vector2cd(1, 2).asDiagonal()) * b.adjoint();
  int code = static_cast<int>(code_of([&] { verify_2morphism(E, E, skew); }));
  CHECK((code == static_cast<int>(ErrorCode::ParallelFail) || code == static_cast<int>(ErrorCode::IntertwineFail)));
  std::map<int, CMatrix> unframed;
  for (const auto& [p, b] : beta) unframed[p] = CMatrix(Eigen::Vector2cd(1, 2).asDiagonal());
  if (c->size() > 1) CHECK(code_of([&] { verify_2morphism(E, E, unframed); }) == ErrorCode::IntertwineFail);
}

TEST_CASE("kernels and eigensplitting") {
  Rng rng(46);
  CoverPtr c = rand_cover(rng, 3, 4);
  Twist T = rand_twist(rng, rand_gerbe(rng, c, 1));
  std::map<int, CMatrix> beta = rand_frames(rng, c, 3);
  // block-diagonal connection so that diagonal constants are parallel
  MatForm m(3, 1, 3, 3);
  CMatrix blk = CMatrix::Zero(3, 3);
  blk.topLeftCorner(2, 2) = rand_antihermitian(rng, 2);
  blk(2, 2) = cd(0, 0.7);
  m.add({{0}, Exps(3, 0)}, blk);
  GerbeMorphism E = twisted_morphism(T, beta, m);

  auto endo = [&](const CMatrix& C) { return verify_2morphism(E, E, conj_blocks(beta, C, beta)); };
  CHECK(kernel_2mor(endo(CMatrix::Zero(3, 3))).rank == 3);
  CHECK(kernel_2mor(endo(CMatrix::Identity(3, 3))).rank == 0);
  CMatrix D = CMatrix::Zero(3, 3);
  D(2, 2) = 1;
  GerbeMorphism K = kernel_2mor(endo(D));
  CHECK(K.rank == 2);
  CHECK(check_morphism(K).ok);

  EigenSplit one = eigensplit(endo(cd(0.5, -1) * CMatrix::Identity(3, 3)));
  CHECK(one.summands.size() == 1);
  CHECK(std::abs(one.summands[0].eigenvalue - cd(0.5, -1)) <= kTauU);

  CMatrix D12 = CMatrix::Identity(3, 3);
  D12(2, 2) = 2;
  EigenSplit two = eigensplit(endo(D12));
  REQUIRE(two.summands.size() == 2);
  CHECK(two.summands[0].summand.rank == 2);
  CHECK(two.summands[1].summand.rank == 1);
  CHECK(std::abs(two.summands[0].eigenvalue - 1.0) <= kTauU);
  CHECK(std::abs(two.summands[1].eigenvalue - 2.0) <= kTauU);
  for (const auto& [p, U] : two.reassembly.phi) {
    CMatrix diag = CMatrix(Eigen::Vector3cd(1, 1, 2).asDiagonal());
    CHECK((U * diag * U.adjoint() - beta.at(p) * D12 * beta.at(p).adjoint()).cwiseAbs().maxCoeff() <= 10 * kTauU);
  }

  LocalGerbe I = trivial_gerbe(PolyForm(3, 2));
  GerbeMorphism flat = identity_morphism(I, 2);
  CMatrix N(2, 2);
  N << 1, 1, 0, 1;
  CHECK(code_of([&] { eigensplit({flat, flat, {{0, N}}}); }) == ErrorCode::NotNormal);
}

TEST_CASE("hom spaces of the R^3 model") {
  ModelSection zero = zero_section(3, 1);
  for (int D = 0; D <= 3; ++D) CHECK(hom_space(zero, zero, D).size() == 1);

  ModelSection phase = make_section(1, {Scalar::two_pi_i() * dx(0)});
  for (int D = 0; D <= 3; ++D) CHECK(hom_space(phase, zero, D).empty());

  Scalar i = Scalar::i();
  PolyForm z(3, 1);
  ModelSection sz = make_section(2, {i * dx(0), z, z, -(i * dx(0))});
  ModelSection szx = make_section(2, {i * dx(0), i * dx(1), i * dx(1), -(i * dx(0))});
  CMatrix Z(2, 2), X(2, 2);
  Z << cd(0, 1), 0, 0, cd(0, -1);
  X << 0, cd(0, 1), cd(0, 1), 0;
  for (int D = 0; D <= 2; ++D) {
    CHECK(static_cast<int>(hom_space(sz, sz, D).size()) == commutant_dim({Z}));
    CHECK(static_cast<int>(hom_space(szx, szx, D).size()) == commutant_dim({Z, X}));
  }
  CHECK(commutant_dim({Z}) == 2);
  CHECK(commutant_dim({Z, X}) == 1);
  CHECK(code_of([&] { make_section(1, {dx(0)}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("2-Hilbert inner product") {
  ModelSection zero2 = zero_section(3, 2);
  std::vector<ModelHom> basis = hom_space(zero2, zero2, 1);
  REQUIRE(basis.size() == 4);
  ModelHom id{2, 2, {Poly(3, Scalar(1)), Poly(3), Poly(3), Poly(3, Scalar(1))}};
  CHECK(inner_product_hilbert(id, id) == Scalar(2));
  ModelHom e01{2, 2, {Poly(3), Poly(3, Scalar(1)), Poly(3), Poly(3)}};
  CHECK(inner_product_hilbert(id, e01) == Scalar(0));
  for (const auto& f : basis) {
    Scalar v = inner_product_hilbert(f, f);
    CHECK(v.is_rational());
    CHECK(v.to_complex().real() > 0);
  }
  ModelHom moving{1, 1, {x(0)}};
  CHECK(code_of([&] { inner_product_hilbert(moving, moving); }) == ErrorCode::XDependence);

  // tr(f* f) is constant, so polynomial homs are constant even for non-constant sections
  Scalar i = Scalar::i();
  ModelSection w = make_section(1, {i * (x(1) * dx(0) + x(0) * x(2) * dx(2))});
  std::vector<ModelHom> h = hom_space(w, w, 2);
  REQUIRE(h.size() == 1);
  CHECK(h[0].at(0, 0).degree() == 0);
  CHECK_NOTHROW(inner_product_hilbert(h[0], h[0]));
}

TEST_CASE("gerbe metric") {
  Scalar i = Scalar::i();
  PolyForm z(3, 1);
  ModelSection zero = zero_section(3, 1);
  ModelSection h00 = gerbe_metric(zero, zero);
  CHECK(h00.omega[0].is_zero());

  ModelSection sz = make_section(2, {i * dx(0), z, z, -(i * dx(0))});
  ModelSection szx = make_section(2, {i * dx(0), i * dx(1), i * dx(1), -(i * dx(0))});
  ModelSection c1 = make_section(1, {i * dx(2)});
  std::vector<std::pair<ModelSection, ModelSection>> pairs{{sz, sz}, {szx, szx}, {sz, szx}, {c1, c1}, {zero, c1}};
  for (const auto& [w, e] : pairs) {
    ModelSection h = gerbe_metric(w, e);
    CHECK(hom_space(zero, h, 1).size() == hom_space(w, e, 1).size());
  }
  // second slot is additive
  ModelSection he = gerbe_metric(sz, direct_sum(sz, c1));
  CHECK(hom_space(zero, he, 1).size() == hom_space(sz, sz, 1).size() + hom_space(sz, c1, 1).size());
}

TEST_CASE("fake curvature flag") {
  LocalGerbe I0 = trivial_gerbe(PolyForm(3, 2));
  PolyForm a1 = Scalar::i() * (x(0) * dx(1) - x(2) * dx(0));
  LocalGerbe flat = trivial_gerbe(exterior_derivative(a1));
  MatForm a = MatForm::scalar(a1, 1);
  CHECK_NOTHROW(make_morphism(I0, flat, {}, {{0, a}}, kTauU, true));
  CHECK(code_of([&] { make_morphism(I0, flat, {}, {{0, MatForm(3, 1, 1, 1)}}, kTauU, true); }) ==
        ErrorCode::ConnectionFail);
  CHECK_NOTHROW(make_morphism(I0, flat, {}, {{0, MatForm(3, 1, 1, 1)}}));
}
