#include "gerbelab/gerbe/gerbe.hpp"

#include "gerbelab/exterior/linalg.hpp"

#include <set>

namespace gerbelab {

namespace {

void expect_layout(const CechCochain& c, int k, ValueKind kind, int p, const char* name) {
  if (c.k != k || c.kind != kind || (kind == ValueKind::Form && c.form_degree != p))
    throw Error(ErrorCode::DegreeMismatch, std::string("gerbe component ") + name + " has the wrong layout");
}

void append(std::vector<Residual>& out, const std::vector<Residual>& in) { out.insert(out.end(), in.begin(), in.end()); }

}  // namespace

DeligneCochain LocalGerbe::deligne() const { return make_deligne(2, 2, {g, A, B}); }

GerbeReport validate_gerbe(const CoverPtr& cover, const CechCochain& g, const CechCochain& A, const CechCochain& B) {
  for (const auto* c : {&g, &A, &B})
    if (!same_cover(c->cover, cover)) throw Error(ErrorCode::CoverMismatch, "gerbe data on another cover");
  expect_layout(g, 2, ValueKind::U1, 0, "g");
  expect_layout(A, 1, ValueKind::Form, 1, "A");
  expect_layout(B, 0, ValueKind::Form, 2, "B");
  GerbeReport rep;
  auto mark = [&](ErrorCode code, const std::vector<Residual>& res) {
    if (res.empty()) return;
    if (!rep.failure) rep.failure = code;
    append(rep.residuals, res);
  };
  mark(ErrorCode::NotACocycle, nonzero_entries(cech_delta(g), "cocycle"));
  mark(ErrorCode::ConnectionMismatch, nonzero_entries(cech_delta(A) + cochain_d(g), "connection"));
  mark(ErrorCode::CurvingMismatch, nonzero_entries(cech_delta(B) + cochain_d(A), "curving"));
  std::vector<Residual> curv;
  const PolyForm* H0 = nullptr;
  PolyForm H;
  for (const auto& [s, b] : B.entries) {
    PolyForm db = exterior_derivative(b);
    if (!H0) {
      H = db;
      H0 = &H;
    } else if (db != H) {
      curv.push_back({"curvature", cover->names(s), (db - H).str()});
    }
  }
  mark(ErrorCode::CurvingMismatch, curv);
  rep.ok = !rep.failure.has_value();
  return rep;
}

LocalGerbe make_gerbe(const CoverPtr& cover, CechCochain g, CechCochain A, CechCochain B) {
  auto rep = validate_gerbe(cover, g, A, B);
  if (!rep.ok) throw Error(*rep.failure, "invalid local gerbe data", rep.residuals);
  PolyForm H = exterior_derivative(B.entries.begin()->second);
  return {cover, std::move(g), std::move(A), std::move(B), std::move(H)};
}

LocalGerbe trivial_gerbe(const PolyForm& rho, const std::string& label) {
  if (rho.degree() != 2) throw Error(ErrorCode::DegreeMismatch, "curving must be a 2-form");
  auto cover = single_patch_cover(rho.dim(), label);
  return make_gerbe(cover, zero_cochain(cover, 2, ValueKind::U1, 0), zero_cochain(cover, 1, ValueKind::Form, 1),
                    make_cochain(cover, 0, ValueKind::Form, 2, {{{0}, rho}}));
}

const PolyForm& curvature_3form(const LocalGerbe& L) { return L.H; }

const CechCochain& dd_cocycle(const LocalGerbe& L) { return L.g; }

LocalGerbe tensor(const LocalGerbe& L1, const LocalGerbe& L2) {
  if (!same_cover(L1.cover, L2.cover)) throw Error(ErrorCode::CoverMismatch, "tensor of gerbes on different covers");
  return make_gerbe(L1.cover, L1.g + L2.g, L1.A + L2.A, L1.B + L2.B);
}

LocalGerbe dual(const LocalGerbe& L) { return make_gerbe(L.cover, -L.g, -L.A, -L.B); }

LocalGerbe tensor_power(const LocalGerbe& L, int n) {
  if (n < 0) return tensor_power(dual(L), -n);
  LocalGerbe r{L.cover, zero_cochain(L.cover, 2, ValueKind::U1, 0), zero_cochain(L.cover, 1, ValueKind::Form, 1),
               zero_cochain(L.cover, 0, ValueKind::Form, 2), PolyForm(L.cover->dim(), 3)};
  for (int k = 0; k < n; ++k) r = tensor(r, L);
  return make_gerbe(r.cover, r.g, r.A, r.B);
}

TrivializationReport verify_trivialization(const LocalGerbe& L, const Trivialization& T) {
  if (!same_cover(L.cover, T.h.cover) || !same_cover(L.cover, T.a.cover))
    throw Error(ErrorCode::CoverMismatch, "trivialization on another cover");
  expect_layout(T.h, 1, ValueKind::U1, 0, "h");
  expect_layout(T.a, 0, ValueKind::Form, 1, "a");
  if (T.rho.degree() != 2 || T.rho.dim() != L.cover->dim())
    throw Error(ErrorCode::DegreeMismatch, "trivialization curving must be a global 2-form");
  TrivializationReport rep;
  append(rep.residuals, nonzero_entries(L.g - cech_delta(T.h), "cocycle"));
  append(rep.residuals, nonzero_entries(L.A - cech_delta(T.a) + cochain_d(T.h), "connection"));
  CechCochain flat = L.B + cochain_d(T.a);
  for (auto& [s, v] : flat.entries) v -= T.rho;
  append(rep.residuals, nonzero_entries(flat, "curving"));
  rep.ok = rep.residuals.empty();
  return rep;
}

std::pair<LocalGerbe, Trivialization> self_trivialization(const LocalGerbe& L) {
  LocalGerbe LL = tensor(L, dual(L));
  Trivialization T{zero_cochain(L.cover, 1, ValueKind::U1, 0), zero_cochain(L.cover, 0, ValueKind::Form, 1),
                   PolyForm(L.cover->dim(), 2)};
  return {LL, T};
}

namespace {

// Solve delta x = y for a Cech (k-1)-cochain x, coordinatewise in the (index, exponent) basis.
std::optional<CechCochain> solve_coboundary(const CechCochain& y) {
  const CoverPtr& cover = y.cover;
  auto src = cover->simplices(y.k - 1);
  auto tgt = cover->simplices(y.k);
  std::map<Simplex, int> col;
  for (size_t i = 0; i < src.size(); ++i) col[src[i]] = static_cast<int>(i);
  std::vector<SparseRow> rows;
  for (const auto& s : tgt) {
    SparseRow r;
    for (size_t j = 0; j < s.size(); ++j) {
      Simplex f = s;
      f.erase(f.begin() + static_cast<long>(j));
      r[col.at(f)] = Scalar(j % 2 ? -1 : 1);
    }
    rows.push_back(r);
  }
  std::set<std::pair<Index, Exps>> keys;
  for (const auto& [s, v] : y.entries)
    for (const auto& [idx, p] : v.terms())
      for (const auto& [e, c] : p.terms()) keys.insert({idx, e});
  CechCochain x = zero_cochain(cover, y.k - 1, y.kind, y.form_degree);
  for (const auto& [idx, e] : keys) {
    std::vector<Scalar> rhs;
    for (const auto& s : tgt) {
      Poly p = y.at(s).coeff(idx);
      auto it = p.terms().find(e);
      rhs.push_back(it == p.terms().end() ? Scalar() : it->second);
    }
    auto sol = solve(rows, rhs, static_cast<int>(src.size()));
    if (!sol) return std::nullopt;
    for (size_t i = 0; i < src.size(); ++i) {
      auto v = as_scalar((*sol)[i]);
      if (!v) return std::nullopt;
      x.entries[src[i]].add(idx, Poly::monomial(cover->dim(), e, *v));
    }
  }
  return x;
}

}  // namespace

std::optional<Trivialization> find_trivialization(const LocalGerbe& L) {
  for (const auto& [s, v] : L.g.entries)
    if (!v.as_poly().is_constant())
      throw Error(ErrorCode::InvalidArgument, "trivialization search needs constant cocycle exponents");
  auto h = solve_coboundary(L.g);
  if (!h) return std::nullopt;
  auto a = solve_coboundary(L.A + cochain_d(*h));
  if (!a) return std::nullopt;
  PolyForm rho = L.B.entries.begin()->second + exterior_derivative(a->entries.begin()->second);
  Trivialization T{*h, *a, rho};
  if (!verify_trivialization(L, T).ok) return std::nullopt;
  return T;
}

LocalGerbe gerbe_from_trivialization(const Trivialization& T) {
  DeligneCochain hd = make_deligne(2, 1, {T.h, T.a});
  DeligneCochain c = deligne_delta(hd);
  for (auto& [s, v] : c.comps[2].entries) v += T.rho;
  return make_gerbe(T.h.cover, c.comps[0], c.comps[1], c.comps[2]);
}

}  // namespace gerbelab
