#include <doctest.h>

#include "generators.hpp"
#include "gerbelab/cech/deligne.hpp"

using namespace gerbelab;
using namespace gerbelab::testing;

namespace {

Poly x(int n, int i) { return Poly::var(n, i); }
PolyForm u1(const Poly& q) { return PolyForm::from_poly(q); }

CoverPtr two_patches() { return build_cover(3, {"a", "b"}, {{"a", "b"}}); }

}  // namespace

TEST_CASE("build_cover") {
  auto c = two_patches();
  CHECK(c->simplices(1).size() == 1);
  CHECK_THROWS_AS(build_cover(3, {"a", "b", "c"}, {{"a", "b", "c"}, {"a", "b"}, {"b", "c"}}), Error);
  try {
    build_cover(3, {"a", "b", "c"}, {{"a", "b", "c"}, {"a", "b"}, {"b", "c"}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidNerve);
  }
  auto tet = build_cover(3, {"a", "b", "c", "d"},
                         {{"a", "b"}, {"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}, {"c", "d"},
                          {"a", "b", "c"}, {"a", "b", "d"}, {"a", "c", "d"}, {"b", "c", "d"}, {"a", "b", "c", "d"}});
  CHECK(tet->simplices(2).size() == 4);
  CHECK(tet->simplices(3).size() == 1);
  CHECK_THROWS_AS(build_cover(3, {"a", "b"}, {}), Error);
}

TEST_CASE("cech_delta conventions") {
  auto c = build_cover(2, {"a", "b", "c"}, {{"a", "b"}, {"a", "c"}, {"b", "c"}, {"a", "b", "c"}});
  CechCochain f = zero_cochain(c, 0, ValueKind::Form, 0);
  f.entries[{0}] = u1(x(2, 0));
  f.entries[{1}] = u1(x(2, 1));
  f.entries[{2}] = u1(Poly(2, Scalar(5)));
  CechCochain df = cech_delta(f);
  CHECK(df.at({0, 1}) == u1(x(2, 1) - x(2, 0)));
  CHECK(df.at({1, 2}) == u1(Poly(2, Scalar(5)) - x(2, 1)));
  CechCochain A = zero_cochain(c, 1, ValueKind::Form, 1);
  A.entries[{0, 1}] = PolyForm::dx(2, 0);
  A.entries[{0, 2}] = PolyForm::dx(2, 1);
  A.entries[{1, 2}] = x(2, 0) * PolyForm::dx(2, 1);
  CHECK(cech_delta(A).at({0, 1, 2}) == A.at({1, 2}) - A.at({0, 2}) + A.at({0, 1}));
}

TEST_CASE("delta squared vanishes") {
  Rng rng(11);
  for (int t = 0; t < 60; ++t) {
    auto cover = rand_cover(rng, 3);
    int k = rand_int(rng, 0, 2);
    auto kind = t % 2 ? ValueKind::U1 : ValueKind::Form;
    auto c = rand_cochain(rng, cover, k, kind, rand_int(rng, 0, 2));
    auto dd = cech_delta(cech_delta(c));
    for (const auto& [s, v] : dd.entries) CHECK(v.is_zero());
    int n = rand_int(rng, 1, 3);
    auto D = rand_deligne(rng, cover, n, rand_int(rng, 0, 3));
    CHECK(is_zero(deligne_delta(deligne_delta(D))));
  }
}

TEST_CASE("line bundle cocycle") {
  auto c = two_patches();
  // f_ab = exp(2 pi i x1 x2), A_a - A_b = dlog f_ab
  Poly q = x(3, 0) * x(3, 1);
  PolyForm Aa = Scalar(-1) * Scalar::two_pi_i() * (x(3, 0) * PolyForm::dx(3, 1));
  CechCochain f = make_cochain(c, 1, ValueKind::U1, 0, {{{0, 1}, u1(q)}});
  CechCochain A = make_cochain(c, 0, ValueKind::Form, 1, {{{0}, Aa}, {{1}, Aa - dlog(q)}});
  DeligneCochain L = make_deligne(1, 1, {f, A});
  CHECK(is_deligne_cocycle(L).ok);
  CHECK(is_zero(deligne_delta(L)));
  // F = dA_a for degree-1 classes
  CHECK(curv_of_class(L) == exterior_derivative(Aa));

  // triangle nerve: f_ab f_bc f_ca = 1 with constant exponents
  auto tri = build_cover(3, {"a", "b", "c"}, {{"a", "b"}, {"a", "c"}, {"b", "c"}, {"a", "b", "c"}});
  CechCochain f3 = make_cochain(tri, 1, ValueKind::U1, 0,
                                {{{0, 1}, u1(Poly(3, Scalar::rational(1, 3)))},
                                 {{1, 2}, u1(Poly(3, Scalar::rational(1, 3)))},
                                 {{0, 2}, u1(Poly(3, Scalar::rational(-1, 3)))}});
  CechCochain A3 = zero_cochain(tri, 0, ValueKind::Form, 1);
  CHECK(is_deligne_cocycle(make_deligne(1, 1, {f3, A3})).ok);

  CechCochain bad = f;
  bad.entries[{0, 1}] = u1(q + x(3, 2));
  auto rep = is_deligne_cocycle(make_deligne(1, 1, {bad, A}));
  CHECK(!rep.ok);
  REQUIRE(rep.residuals.size() == 1);
  CHECK(rep.residuals[0].simplex == std::vector<std::string>{"a", "b"});
}

TEST_CASE("gauge shift") {
  auto c = two_patches();
  Poly q = x(3, 0) * x(3, 1);
  PolyForm Aa = Scalar(-1) * Scalar::two_pi_i() * (x(3, 0) * PolyForm::dx(3, 1));
  DeligneCochain L = make_deligne(1, 1,
                                  {make_cochain(c, 1, ValueKind::U1, 0, {{{0, 1}, u1(q)}}),
                                   make_cochain(c, 0, ValueKind::Form, 1, {{{0}, Aa}, {{1}, Aa - dlog(q)}})});
  DeligneCochain same = gauge_shift(L, zero_deligne(c, 1, 0));
  CHECK(is_zero(same + (-L)));

  Poly ga = x(3, 2) * x(3, 2), gb = x(3, 0);
  DeligneCochain h = zero_deligne(c, 1, 0);
  h.comps[0].entries[{0}] = u1(ga);
  h.comps[0].entries[{1}] = u1(gb);
  DeligneCochain s = gauge_shift(L, h);
  CHECK(is_deligne_cocycle(s).ok);
  // f~_ab = g_a^{-1} f_ab g_b
  CHECK(s.comps[0].at({0, 1}) == u1(q - ga + gb));
  // A~_a = A_a - dlog g_a under the self-consistent convention
  CHECK(s.comps[1].at({0}) == Aa - dlog(ga));
  CHECK(s.comps[1].at({1}) == Aa - dlog(q) - dlog(gb));
  // the opposite sign breaks A~_a - A~_b = dlog f~_ab
  DeligneCochain flipped = s;
  flipped.comps[1].entries[{0}] = Aa + dlog(ga);
  flipped.comps[1].entries[{1}] = Aa - dlog(q) + dlog(gb);
  CHECK(!is_deligne_cocycle(flipped).ok);
  CHECK(curv_of_class(s) == curv_of_class(L));
}

TEST_CASE("curvature and projection") {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    auto cover = rand_cover(rng, 3, 5);
    auto L = rand_deligne_cocycle(rng, cover, 2);
    REQUIRE(is_deligne_cocycle(L).ok);
    PolyForm H = curv_of_class(L);
    CHECK(exterior_derivative(H).is_zero());
    auto h = rand_deligne(rng, cover, 2, 1);
    CHECK(curv_of_class(gauge_shift(L, h)) == H);
    auto L2 = rand_deligne_cocycle(rng, cover, 2);
    auto g1 = dd_projection(L), g2 = dd_projection(L2);
    CHECK((dd_projection(L + L2) - (g1 + g2)).is_zero());
    CHECK((dd_projection(-L) + g1).is_zero());
    auto broken = L;
    auto& top = broken.comps[2].entries.begin()->second;
    top += PolyForm::basis(3, {0, 1}, Poly(3, Scalar(1)));
    if (cover->size() > 1) {
      auto rep = is_deligne_cocycle(broken);
      CHECK(!rep.ok);
      CHECK_THROWS_AS(curv_of_class(broken), Error);
    }
  }
  // flat datum
  auto c = two_patches();
  auto flat = zero_deligne(c, 2, 2);
  CHECK(curv_of_class(flat).is_zero());
  CHECK_THROWS_AS(curv_of_class(zero_deligne(c, 2, 1)), Error);
}
