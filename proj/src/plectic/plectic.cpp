#include "gerbelab/plectic/plectic.hpp"

#include <functional>
#include <random>
#include <set>

#include "gerbelab/exterior/linalg.hpp"

namespace gerbelab {

namespace {

// index tuples of length p in canonical order
std::vector<Index> all_indices(int n, int p) {
  std::vector<Index> out;
  Index cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == p) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

std::vector<Exps> monomials_up_to(int n, int deg) {
  std::vector<Exps> out;
  Exps e(n, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n) {
      out.push_back(e);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[i] = k;
      rec(i + 1, left - k);
    }
    e[i] = 0;
  };
  rec(0, deg);
  return out;
}

// rows of the constant linear map v -> iota_v omega(x) at a rational point (or constant omega)
std::vector<SparseRow> contraction_rows(const PolyForm& omega, const std::vector<mpq_class>* x) {
  int n = omega.dim();
  std::map<Index, SparseRow> rows;
  for (int i = 0; i < n; ++i) {
    PolyForm c = interior_product(VectorField::coordinate(n, i), omega);
    for (const auto& [idx, f] : c.terms()) {
      Scalar v = x ? f.eval(*x) : f.constant_term();
      if (!v.is_zero()) rows[idx][i] = v;
    }
  }
  std::vector<SparseRow> out;
  for (auto& [idx, r] : rows) out.push_back(std::move(r));
  return out;
}

}  // namespace

PlecticSpace make_plectic(const PolyForm& omega) {
  if (omega.degree() < 2) throw Error(ErrorCode::Degenerate, "a plectic form has degree at least 2");
  if (!exterior_derivative(omega).is_zero()) throw Error(ErrorCode::NotClosed, "omega is not closed");
  PlecticSpace P;
  P.n = omega.dim();
  P.omega = omega;
  P.constant_coefficients = omega.coeff_degree() <= 0;
  if (P.constant_coefficients) {
    if (rank(contraction_rows(omega, nullptr), P.n) < P.n)
      throw Error(ErrorCode::Degenerate, "iota_X omega = 0 has a nonzero solution");
    return P;
  }
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<int> num(-7, 7), den(1, 5);
  for (int s = 0; s < 8; ++s) {
    std::vector<mpq_class> x;
    for (int i = 0; i < P.n; ++i) {
      mpq_class q(num(rng), den(rng));
      q.canonicalize();
      x.push_back(q);
    }
    if (rank(contraction_rows(omega, &x), P.n) < P.n)
      throw Error(ErrorCode::Degenerate, "omega degenerates at a sample point");
    P.certificate_points.push_back(std::move(x));
  }
  return P;
}

VectorField hamiltonian_vf(const PlecticSpace& P, const PolyForm& alpha) {
  if (alpha.dim() != P.n) throw Error(ErrorCode::DimensionMismatch, "observable dimension");
  if (alpha.degree() != P.omega.degree() - 2)
    throw Error(ErrorCode::DegreeMismatch, "Hamiltonian forms have degree deg(omega) - 2");
  PolyForm target = -exterior_derivative(alpha);
  VectorField X(P.n);
  if (target.is_zero()) return X;
  if (P.constant_coefficients) {
    // the system decouples monomial by monomial
    auto rows_by_idx = contraction_rows(P.omega, nullptr);
    std::map<Index, int> row_of;
    {
      int r = 0;
      for (int i = 0; i < P.n; ++i) {
        PolyForm c = interior_product(VectorField::coordinate(P.n, i), P.omega);
        for (const auto& [idx, f] : c.terms()) row_of.try_emplace(idx, 0);
      }
      for (auto& [idx, v] : row_of) v = r++;
    }
    std::set<Exps> monos;
    for (const auto& [idx, f] : target.terms())
      for (const auto& [e, c] : f.terms()) monos.insert(e);
    for (const auto& e : monos) {
      std::vector<Scalar> rhs(rows_by_idx.size());
      for (const auto& [idx, f] : target.terms()) {
        auto it = f.terms().find(e);
        if (it == f.terms().end()) continue;
        auto r = row_of.find(idx);
        if (r == row_of.end()) throw Error(ErrorCode::NotHamiltonian, "d alpha leaves the image of omega");
        rhs[r->second] = it->second;
      }
      auto sol = solve(rows_by_idx, rhs, P.n);
      if (!sol) throw Error(ErrorCode::NotHamiltonian, "no vector field solves iota_X omega = -d alpha");
      for (int i = 0; i < P.n; ++i) {
        auto v = as_scalar((*sol)[i]);
        if (!v) throw Error(ErrorCode::NotHamiltonian, "solution leaves Q(i)[pi]");
        X[i].add_term(e, *v);
      }
    }
  } else {
    int bound = std::max(0, alpha.coeff_degree()) + std::max(0, P.omega.coeff_degree());
    auto monos = monomials_up_to(P.n, bound);
    int ncols = P.n * static_cast<int>(monos.size());
    std::map<std::pair<Index, Exps>, SparseRow> rows;
    for (int i = 0; i < P.n; ++i)
      for (size_t m = 0; m < monos.size(); ++m) {
        VectorField basis(P.n);
        basis[i] = Poly::monomial(P.n, monos[m], Scalar(1));
        PolyForm c = interior_product(basis, P.omega);
        for (const auto& [idx, f] : c.terms())
          for (const auto& [e, s] : f.terms()) rows[{idx, e}][i * static_cast<int>(monos.size()) + m] = s;
      }
    std::vector<SparseRow> A;
    std::vector<Scalar> b;
    for (auto& [key, r] : rows) {
      A.push_back(r);
      Poly t = target.coeff(key.first);
      auto it = t.terms().find(key.second);
      b.push_back(it == t.terms().end() ? Scalar() : it->second);
    }
    for (const auto& [idx, f] : target.terms())
      for (const auto& [e, c] : f.terms())
        if (!rows.count({idx, e})) throw Error(ErrorCode::NotHamiltonian, "d alpha has terms omega cannot reach");
    auto sol = solve(A, b, ncols);
    if (!sol) throw Error(ErrorCode::NotHamiltonian, "no polynomial vector field within the degree bound");
    for (int i = 0; i < P.n; ++i)
      for (size_t m = 0; m < monos.size(); ++m) {
        auto v = as_scalar((*sol)[i * monos.size() + m]);
        if (!v) throw Error(ErrorCode::NotHamiltonian, "solution leaves Q(i)[pi]");
        X[i].add_term(monos[m], *v);
      }
  }
  if (interior_product(X, P.omega) != target)
    throw Error(ErrorCode::NotHamiltonian, "solver output failed symbolic verification");
  return X;
}

PolyForm bracket_forms(const PlecticSpace& P, const PolyForm& alpha, const PolyForm& beta) {
  VectorField Xa = hamiltonian_vf(P, alpha), Xb = hamiltonian_vf(P, beta);
  return -interior_product(Xa, interior_product(Xb, P.omega));
}

Observable bracket(const PlecticSpace& P, const Observable& a, const Observable& b) {
  return {bracket_forms(P, a.alpha, b.alpha), Poly(P.n)};
}

JacobiatorResult jacobiator(const PlecticSpace& P, const PolyForm& alpha, const PolyForm& beta, const PolyForm& gamma) {
  VectorField Xa = hamiltonian_vf(P, alpha), Xb = hamiltonian_vf(P, beta), Xc = hamiltonian_vf(P, gamma);
  PolyForm f = interior_product(Xa, interior_product(Xb, interior_product(Xc, P.omega)));
  PolyForm ab_c = bracket_forms(P, bracket_forms(P, alpha, beta), gamma);
  PolyForm b_ac = bracket_forms(P, beta, bracket_forms(P, alpha, gamma));
  PolyForm a_bc = bracket_forms(P, alpha, bracket_forms(P, beta, gamma));
  PolyForm defect = ab_c + b_ac - a_bc + exterior_derivative(f);
  bool ok = defect.is_zero();
  Poly fp = f.degree() == 0 ? f.as_poly() : Poly(P.n);
  return {{a_bc, fp}, ok, defect};
}

PrequantumReport prequantum_check(const PlecticSpace& P, const LocalGerbe& L) {
  if (L.cover->dim() != P.n) throw Error(ErrorCode::DimensionMismatch, "gerbe and plectic space dimensions");
  if (P.omega.degree() != 3) throw Error(ErrorCode::DegreeMismatch, "prequantum gerbes need a 2-plectic form");
  PolyForm diff = curvature_3form(L) + Scalar::two_pi_i() * P.omega;
  return {diff.is_zero(), diff};
}

PolyForm drop_coordinate(const PolyForm& a, int k) {
  PolyForm r(a.dim() - 1, a.degree());
  for (const auto& [idx, f] : a.terms()) {
    Index j;
    for (int i : idx) {
      if (i == k) throw Error(ErrorCode::NotInvariant, "form still contains dx^" + std::to_string(k + 1));
      j.push_back(i > k ? i - 1 : i);
    }
    r.add(j, f.drop_variable(k));
  }
  return r;
}

PlecticSpace reduce_dimension(const PlecticSpace& P, int k) {
  if (k < 0 || k >= P.n) throw Error(ErrorCode::InvalidArgument, "direction index out of range");
  if (P.omega.depends_on(k)) throw Error(ErrorCode::NotInvariant, "omega varies along the reduction direction");
  PolyForm red = drop_coordinate(interior_product(VectorField::coordinate(P.n, k), P.omega), k);
  return make_plectic(red);
}

PolyForm reduce_observable(const PolyForm& alpha, int k) {
  if (alpha.depends_on(k)) throw Error(ErrorCode::NotInvariant, "observable varies along the reduction direction");
  return drop_coordinate(interior_product(VectorField::coordinate(alpha.dim(), k), alpha), k);
}

}  // namespace gerbelab
