#include "gerbelab/twovect/twovect.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <tuple>

#include "gerbelab/exterior/linalg.hpp"

namespace gerbelab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double maxabs(const CMatrix& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

bool same_gerbe(const LocalGerbe& a, const LocalGerbe& b) {
  return same_cover(a.cover, b.cover) && a.g.entries == b.g.entries && a.A.entries == b.A.entries &&
         a.B.entries == b.B.entries;
}

std::vector<Simplex> pairs(const Cover& c) { return c.simplices(1); }
std::vector<Simplex> triples(const Cover& c) { return c.simplices(2); }

MatForm zero_connection(int dim, int n) { return MatForm(dim, 1, n, n); }

MatForm trace(const MatForm& a) {
  MatForm out(a.dim(), a.degree(), 1, 1);
  for (const auto& [k, M] : a.terms()) out.add(k, CMatrix::Constant(1, 1, M.trace()));
  return out;
}

GerbeMorphism restrict_morphism(const GerbeMorphism& E, const std::map<int, CMatrix>& V, int k, double tol) {
  std::map<Simplex, CMatrix> alpha;
  std::map<int, MatForm> a;
  for (const auto& [s, M] : E.alpha) alpha[s] = V.at(s[0]).adjoint() * M * V.at(s[1]);
  for (const auto& [p, m] : E.a) a[p] = m.left(V.at(p).adjoint()).right(V.at(p));
  GerbeMorphism out = make_morphism(E.source, E.target, std::move(alpha), std::move(a), tol);
  out.rank = k;
  return out;
}

}  // namespace

CMatrix GerbeMorphism::transition(int p, int q) const {
  if (p == q) return CMatrix::Identity(rank, rank);
  if (p < q) return alpha.at({p, q});
  return alpha.at({q, p}).inverse();
}

MorphismReport check_morphism(const GerbeMorphism& E, double tol, bool fake_flat) {
  if (!same_cover(E.source.cover, E.target.cover))
    throw Error(ErrorCode::CoverMismatch, "morphism between gerbes on different covers");
  const Cover& cov = *E.source.cover;
  const int n = E.rank;
  for (const auto& s : pairs(cov)) {
    auto it = E.alpha.find(s);
    if (it == E.alpha.end())
      throw Error(ErrorCode::InvalidArgument, "missing transition", {{"twist", cov.names(s), "missing"}});
    if (it->second.rows() != n || it->second.cols() != n)
      throw Error(ErrorCode::DimensionMismatch, "transition of wrong size", {{"twist", cov.names(s), "shape"}});
  }
  if (E.alpha.size() != pairs(cov).size()) throw Error(ErrorCode::InvalidArgument, "transition on a non-overlap");
  for (int p = 0; p < cov.size(); ++p) {
    auto it = E.a.find(p);
    if (it == E.a.end()) throw Error(ErrorCode::InvalidArgument, "missing connection on patch " + cov.labels()[p]);
    if (it->second.rows() != n || it->second.cols() != n ||
        (!it->second.terms().empty() && (it->second.degree() != 1 || it->second.dim() != cov.dim())))
      throw Error(ErrorCode::DimensionMismatch, "connection on patch " + cov.labels()[p] + " has the wrong shape");
  }

  MorphismReport rep;
  auto mark = [&](ErrorCode code, Residual r) {
    if (rep.ok) rep.failure = code;
    rep.ok = false;
    rep.residuals.push_back(std::move(r));
  };

  for (const auto& s : triples(cov)) {
    Poly q = E.target.g.at(s).as_poly() - E.source.g.at(s).as_poly();
    if (!q.is_constant()) {
      mark(ErrorCode::TwistedCocycleFail, {"twist", cov.names(s), "non-constant twist " + q.str()});
      continue;
    }
    std::complex<double> phase = std::exp(std::complex<double>(0, kTwoPi) * q.constant_term().to_complex());
    double r = maxabs(phase * E.alpha.at({s[0], s[1]}) * E.alpha.at({s[1], s[2]}) - E.alpha.at({s[0], s[2]}));
    if (r > tol) mark(ErrorCode::TwistedCocycleFail, {"twist", cov.names(s), fmt(r)});
  }
  for (const auto& [s, M] : E.alpha) {
    double r = maxabs(M.adjoint() * M - CMatrix::Identity(n, n));
    if (r > tol) mark(ErrorCode::UnitarityFail, {"unitarity", cov.names(s), fmt(r)});
  }
  for (const auto& [s, M] : E.alpha) {
    // a_b - A1_ab = Ad(alpha_ab^{-1}) (a_a - A2_ab)
    MatForm lhs = E.a.at(s[1]) - MatForm::scalar(E.source.A.at(s), n);
    MatForm rhs = (E.a.at(s[0]) - MatForm::scalar(E.target.A.at(s), n)).left(M.inverse()).right(M);
    double r = (lhs - rhs).norm();
    if (r > tol) mark(ErrorCode::ConnectionFail, {"connection", cov.names(s), fmt(r)});
  }
  for (const auto& [p, m] : E.a) {
    double r = (m + m.adjoint()).norm();
    if (r > tol) mark(ErrorCode::ConnectionFail, {"anti-hermitian", {cov.labels()[p]}, fmt(r)});
  }
  if (fake_flat)
    for (const auto& [p, F] : fake_curvature(E)) {
      double r = F.norm();
      if (r > tol) mark(ErrorCode::ConnectionFail, {"fake-curvature", {cov.labels()[p]}, fmt(r)});
    }
  return rep;
}

GerbeMorphism make_morphism(const LocalGerbe& L1, const LocalGerbe& L2, std::map<Simplex, CMatrix> alpha,
                            std::map<int, MatForm> a, double tol, bool fake_flat) {
  GerbeMorphism E{L1, L2, 0, std::move(alpha), std::move(a)};
  if (!E.a.empty()) E.rank = static_cast<int>(E.a.begin()->second.rows());
  MorphismReport rep = check_morphism(E, tol, fake_flat);
  if (!rep.ok) throw Error(*rep.failure, "invalid gerbe morphism", rep.residuals);
  return E;
}

GerbeMorphism identity_morphism(const LocalGerbe& L, int rank) {
  std::map<Simplex, CMatrix> alpha;
  std::map<int, MatForm> a;
  for (const auto& s : pairs(*L.cover)) alpha[s] = CMatrix::Identity(rank, rank);
  for (int p = 0; p < L.cover->size(); ++p) a[p] = zero_connection(L.cover->dim(), rank);
  return make_morphism(L, L, std::move(alpha), std::move(a));
}

std::map<int, MatForm> fake_curvature(const GerbeMorphism& E) {
  std::map<int, MatForm> out;
  for (const auto& [p, m] : E.a) {
    MatForm F = mat_d(m) + mat_wedge(m, m);
    F -= MatForm::scalar(E.target.B.at({p}) - E.source.B.at({p}), E.rank);
    out[p] = F;
  }
  return out;
}

GerbeMorphism compose(const GerbeMorphism& F, const GerbeMorphism& E) {
  if (!same_gerbe(F.source, E.target)) throw Error(ErrorCode::GerbeMismatch, "compose: middle gerbes differ");
  const int nF = F.rank, nE = E.rank;
  std::map<Simplex, CMatrix> alpha;
  std::map<int, MatForm> a;
  for (const auto& [s, M] : F.alpha) alpha[s] = kron(M, E.alpha.at(s));
  for (const auto& [p, m] : F.a)
    a[p] = kron(m, CMatrix::Identity(nE, nE)) + kron(CMatrix::Identity(nF, nF), E.a.at(p));
  return make_morphism(E.source, F.target, std::move(alpha), std::move(a));
}

GerbeMorphism direct_sum(const GerbeMorphism& E, const GerbeMorphism& E2) {
  if (!same_gerbe(E.source, E2.source) || !same_gerbe(E.target, E2.target))
    throw Error(ErrorCode::GerbeMismatch, "direct sum of morphisms between different gerbes");
  std::map<Simplex, CMatrix> alpha;
  std::map<int, MatForm> a;
  for (const auto& [s, M] : E.alpha) alpha[s] = block_diag(M, E2.alpha.at(s));
  for (const auto& [p, m] : E.a) a[p] = direct_sum(m, E2.a.at(p));
  GerbeMorphism out = make_morphism(E.source, E.target, std::move(alpha), std::move(a));
  out.rank = E.rank + E2.rank;
  return out;
}

GerbeMorphism tensor_mor(const GerbeMorphism& E, const GerbeMorphism& F) {
  if (!same_cover(E.source.cover, F.source.cover)) throw Error(ErrorCode::GerbeMismatch, "tensor on different covers");
  const int nE = E.rank, nF = F.rank;
  std::map<Simplex, CMatrix> alpha;
  std::map<int, MatForm> a;
  for (const auto& [s, M] : E.alpha) alpha[s] = kron(M, F.alpha.at(s));
  for (const auto& [p, m] : E.a)
    a[p] = kron(m, CMatrix::Identity(nF, nF)) + kron(CMatrix::Identity(nE, nE), F.a.at(p));
  return make_morphism(tensor(E.source, F.source), tensor(E.target, F.target), std::move(alpha), std::move(a));
}

GerbeMorphism det_morphism(const GerbeMorphism& E) {
  std::map<Simplex, CMatrix> alpha;
  std::map<int, MatForm> a;
  for (const auto& [s, M] : E.alpha) alpha[s] = CMatrix::Constant(1, 1, M.determinant());
  for (const auto& [p, m] : E.a) a[p] = trace(m);
  return make_morphism(tensor_power(E.source, E.rank), tensor_power(E.target, E.rank), std::move(alpha),
                       std::move(a));
}

GerbeMorphism riesz_theta(const GerbeMorphism& E) {
  GerbeMorphism out{dual(E.source), dual(E.target), E.rank, {}, {}};
  for (const auto& [s, M] : E.alpha) out.alpha[s] = M.inverse().transpose();
  for (const auto& [p, m] : E.a) out.a[p] = -m.transpose();
  return out;
}

TwoMorphismReport check_2morphism(const GerbeMorphism& E, const GerbeMorphism& E2, const std::map<int, CMatrix>& phi,
                                  double tol) {
  if (!same_gerbe(E.source, E2.source) || !same_gerbe(E.target, E2.target))
    throw Error(ErrorCode::GerbeMismatch, "2-morphism between morphisms of different gerbes");
  const Cover& cov = *E.source.cover;
  for (int p = 0; p < cov.size(); ++p) {
    auto it = phi.find(p);
    if (it == phi.end()) throw Error(ErrorCode::InvalidArgument, "missing 2-morphism block on " + cov.labels()[p]);
    if (it->second.rows() != E2.rank || it->second.cols() != E.rank)
      throw Error(ErrorCode::DimensionMismatch, "2-morphism block of wrong size on " + cov.labels()[p]);
  }
  TwoMorphismReport rep;
  auto mark = [&](ErrorCode code, Residual r) {
    if (rep.ok) rep.failure = code;
    rep.ok = false;
    rep.residuals.push_back(std::move(r));
  };
  for (const auto& [s, M] : E.alpha) {
    double r = maxabs(E2.alpha.at(s) * phi.at(s[1]) - phi.at(s[0]) * M);
    if (r > tol) mark(ErrorCode::IntertwineFail, {"intertwine", cov.names(s), fmt(r)});
  }
  for (int p = 0; p < cov.size(); ++p) {
    double r = (E2.a.at(p).right(phi.at(p)) - E.a.at(p).left(phi.at(p))).norm();
    if (r > tol) mark(ErrorCode::ParallelFail, {"parallel", {cov.labels()[p]}, fmt(r)});
  }
  return rep;
}

TwoMorphism verify_2morphism(const GerbeMorphism& E, const GerbeMorphism& E2, std::map<int, CMatrix> phi,
                             double tol) {
  TwoMorphismReport rep = check_2morphism(E, E2, phi, tol);
  if (!rep.ok) throw Error(*rep.failure, "invalid 2-morphism", rep.residuals);
  return {E, E2, std::move(phi)};
}

TwoMorphism identity_2morphism(const GerbeMorphism& E) {
  std::map<int, CMatrix> phi;
  for (const auto& [p, m] : E.a) phi[p] = CMatrix::Identity(E.rank, E.rank);
  return {E, E, std::move(phi)};
}

TwoMorphism vcompose(const TwoMorphism& psi, const TwoMorphism& phi) {
  if (psi.source.rank != phi.target.rank) throw Error(ErrorCode::DimensionMismatch, "vertical composition ranks");
  std::map<int, CMatrix> out;
  for (const auto& [p, M] : phi.phi) out[p] = psi.phi.at(p) * M;
  return {phi.source, psi.target, std::move(out)};
}

TwoMorphism direct_sum(const TwoMorphism& phi, const TwoMorphism& psi) {
  std::map<int, CMatrix> out;
  for (const auto& [p, M] : phi.phi) out[p] = block_diag(M, psi.phi.at(p));
  return {direct_sum(phi.source, psi.source), direct_sum(phi.target, psi.target), std::move(out)};
}

TwoMorphism riesz_theta(const TwoMorphism& phi) {
  std::map<int, CMatrix> out;
  for (const auto& [p, M] : phi.phi) out[p] = M.transpose();
  return {riesz_theta(phi.target), riesz_theta(phi.source), std::move(out)};
}

TwoMorphism left_distributor(const GerbeMorphism& F, const GerbeMorphism& E, const GerbeMorphism& E2,
                             Distribution kind) {
  auto prod = [&](const GerbeMorphism& X) { return kind == Distribution::Compose ? compose(F, X) : tensor_mor(F, X); };
  GerbeMorphism src = prod(direct_sum(E, E2));
  GerbeMorphism tgt = direct_sum(prod(E), prod(E2));
  const int nF = F.rank, n1 = E.rank, n2 = E2.rank, m = n1 + n2;
  CMatrix P = CMatrix::Zero(nF * m, nF * m);
  for (int i = 0; i < nF; ++i)
    for (int j = 0; j < m; ++j) {
      int to = j < n1 ? i * n1 + j : nF * n1 + i * n2 + (j - n1);
      P(to, i * m + j) = 1.0;
    }
  std::map<int, CMatrix> phi;
  for (int p = 0; p < F.source.cover->size(); ++p) phi[p] = P;
  return verify_2morphism(src, tgt, std::move(phi));
}

GerbeMorphism kernel_2mor(const TwoMorphism& phi, double tol) {
  const GerbeMorphism& E = phi.source;
  std::map<int, CMatrix> V;
  int k = -1;
  for (const auto& [p, M] : phi.phi) {
    Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double cut = std::max(tol, 1e-12) * std::max(1.0, sv.size() ? sv(0) : 0.0) * std::max(1, E.rank);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cut) ++r;
    int dim = E.rank - r;
    if (k >= 0 && dim != k)
      throw Error(ErrorCode::NonConstantRank, "kernel dimension varies across patches",
                  {{"kernel", {E.source.cover->labels()[p]}, std::to_string(dim) + " vs " + std::to_string(k)}});
    k = dim;
    V[p] = svd.matrixV().rightCols(dim);
  }
  return restrict_morphism(E, V, std::max(k, 0), tol);
}

EigenSplit eigensplit(const TwoMorphism& phi, double tol, double tau_eig) {
  const GerbeMorphism& E = phi.source;
  if (E.rank != phi.target.rank) throw Error(ErrorCode::DimensionMismatch, "eigensplit needs an endomorphism");
  const Cover& cov = *E.source.cover;
  const int n = E.rank;

  struct Cluster {
    std::complex<double> center;
    std::vector<int> cols;
  };
  auto lex = [](std::complex<double> a, std::complex<double> b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  };

  std::vector<Cluster> ref;
  std::map<int, CMatrix> U;
  std::map<int, std::vector<std::vector<int>>> cols;
  for (const auto& [p, M] : phi.phi) {
    double scale = std::max(1.0, maxabs(M) * maxabs(M));
    double r = maxabs(M * M.adjoint() - M.adjoint() * M);
    if (r > 10 * tol * scale) throw Error(ErrorCode::NotNormal, "endomorphism is not normal", {{"normal", {cov.labels()[p]}, fmt(r)}});
    Eigen::ComplexSchur<CMatrix> schur(M);
    const CMatrix& T = schur.matrixT();
    U[p] = schur.matrixU();
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return lex(T(x, x), T(y, y)); });

    if (ref.empty()) {
      for (int i : order) {
        auto it = std::find_if(ref.begin(), ref.end(), [&](const Cluster& c) { return std::abs(c.center - T(i, i)) <= tau_eig; });
        if (it == ref.end()) {
          ref.push_back({T(i, i), {i}});
        } else {
          it->cols.push_back(i);
          std::complex<double> sum = 0;
          for (int j : it->cols) sum += T(j, j);
          it->center = sum / static_cast<double>(it->cols.size());
        }
      }
      std::sort(ref.begin(), ref.end(), [&](const Cluster& a, const Cluster& b) { return lex(a.center, b.center); });
      for (const auto& c : ref) cols[p].push_back(c.cols);
      continue;
    }
    std::vector<std::vector<int>> mine(ref.size());
    for (int i : order) {
      size_t best = ref.size();
      for (size_t c = 0; c < ref.size(); ++c)
        if (std::abs(ref[c].center - T(i, i)) <= 10 * tau_eig) best = c;
      if (best == ref.size())
        throw Error(ErrorCode::NonConstantRank, "eigenvalues differ across patches", {{"eigen", {cov.labels()[p]}, fmt(std::abs(T(i, i)))}});
      mine[best].push_back(i);
    }
    for (size_t c = 0; c < ref.size(); ++c)
      if (mine[c].size() != ref[c].cols.size())
        throw Error(ErrorCode::NonConstantRank, "eigenspace dimension varies across patches", {{"eigen", {cov.labels()[p]}, ""}});
    cols[p] = mine;
  }

  EigenSplit out;
  std::map<int, CMatrix> reassembly;
  for (size_t c = 0; c < ref.size(); ++c) {
    std::map<int, CMatrix> V;
    const int k = static_cast<int>(ref[c].cols.size());
    for (const auto& [p, Up] : U) {
      CMatrix Vp(n, k);
      for (int j = 0; j < k; ++j) Vp.col(j) = Up.col(cols[p][c][j]);
      V[p] = Vp;
      if (reassembly.count(p)) {
        CMatrix R(n, reassembly[p].cols() + k);
        R << reassembly[p], Vp;
        reassembly[p] = R;
      } else {
        reassembly[p] = Vp;
      }
    }
    out.summands.push_back({ref[c].center, restrict_morphism(E, V, k, tol)});
  }
  GerbeMorphism sum = out.summands.front().summand;
  for (size_t c = 1; c < out.summands.size(); ++c) sum = direct_sum(sum, out.summands[c].summand);
  out.reassembly = verify_2morphism(sum, E, std::move(reassembly), 10 * tol);
  return out;
}

ModelSection zero_section(int dim, int n) { return {n, std::vector<PolyForm>(n * n, PolyForm(dim, 1))}; }

ModelSection make_section(int n, std::vector<PolyForm> omega) {
  if (n <= 0 || static_cast<int>(omega.size()) != n * n)
    throw Error(ErrorCode::DimensionMismatch, "section needs n*n form entries");
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const PolyForm& w = omega[r * n + c];
      if (w.degree() != 1 && !w.is_zero()) throw Error(ErrorCode::DegreeMismatch, "section entries are 1-forms");
      if (w != -omega[c * n + r].conj())
        throw Error(ErrorCode::InvalidArgument, "section is not anti-hermitian",
                    {{"anti-hermitian", {std::to_string(r), std::to_string(c)}, w.str()}});
    }
  return {n, std::move(omega)};
}

bool solves_hom(const ModelHom& f, const ModelSection& omega, const ModelSection& eta) {
  if (f.cols != omega.n || f.rows != eta.n) return false;
  const int dim = omega.omega[0].dim();
  for (int r = 0; r < f.rows; ++r)
    for (int s = 0; s < f.cols; ++s) {
      PolyForm res = -exterior_derivative(PolyForm::from_poly(f.at(r, s)));
      if (res.is_zero()) res = PolyForm(dim, 1);
      for (int t = 0; t < omega.n; ++t) res += f.at(r, t) * omega.at(t, s);
      for (int t = 0; t < eta.n; ++t) res -= f.at(t, s) * eta.at(r, t);
      if (!res.is_zero()) return false;
    }
  return true;
}

std::vector<ModelHom> hom_space(const ModelSection& omega, const ModelSection& eta, int degree_bound) {
  if (degree_bound < 0) throw Error(ErrorCode::InvalidArgument, "degree bound must be non-negative");
  const int n = omega.n, m = eta.n;
  const int dim = omega.omega[0].dim();

  std::vector<Exps> monos;
  Exps e(dim, 0);
  std::function<void(int, int)> gen = [&](int i, int left) {
    if (i == dim) { monos.push_back(e); return; }
    for (int k = 0; k <= left; ++k) { e[i] = k; gen(i + 1, left - k); }
    e[i] = 0;
  };
  gen(0, degree_bound);
  const int M = static_cast<int>(monos.size());
  auto unknown = [&](int r, int s, int mono) { return (r * n + s) * M + mono; };

  std::map<std::tuple<int, Index, Exps>, SparseRow> eqs;
  auto deposit = [&](int entry, const PolyForm& w, int u) {
    for (const auto& [idx, poly] : w.terms())
      for (const auto& [ex, c] : poly.terms()) {
        Scalar& slot = eqs[{entry, idx, ex}][u];
        slot += c;
      }
  };
  for (int r = 0; r < m; ++r)
    for (int s = 0; s < n; ++s)
      for (int k = 0; k < M; ++k) {
        const int u = unknown(r, s, k);
        Poly x = Poly::monomial(dim, monos[k], Scalar(1));
        for (int s2 = 0; s2 < n; ++s2) deposit(r * n + s2, x * omega.at(s, s2), u);
        for (int r2 = 0; r2 < m; ++r2) deposit(r2 * n + s, -(x * eta.at(r2, r)), u);
        deposit(r * n + s, -exterior_derivative(PolyForm::from_poly(x)), u);
      }
  std::vector<SparseRow> rows;
  for (auto& [key, row] : eqs) {
    for (auto it = row.begin(); it != row.end();) it = it->second.is_zero() ? row.erase(it) : std::next(it);
    if (!row.empty()) rows.push_back(std::move(row));
  }

  std::vector<ModelHom> out;
  for (const auto& v : nullspace(rows, m * n * M)) {
    ModelHom f{m, n, std::vector<Poly>(m * n, Poly(dim))};
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < n; ++s)
        for (int k = 0; k < M; ++k)
          if (!v[unknown(r, s, k)].is_zero()) f.f[r * n + s].add_term(monos[k], v[unknown(r, s, k)]);
    if (!solves_hom(f, omega, eta)) throw std::logic_error("hom_space: nullspace vector fails re-verification");
    out.push_back(std::move(f));
  }
  return out;
}

Scalar inner_product_hilbert(const ModelHom& f, const ModelHom& g, uint64_t seed) {
  if (f.rows != g.rows || f.cols != g.cols) throw Error(ErrorCode::DimensionMismatch, "inner product shapes differ");
  const int dim = f.f.empty() ? 0 : f.f[0].dim();
  Poly tr(dim);
  for (size_t i = 0; i < f.f.size(); ++i) tr += f.f[i].conj() * g.f[i];
  Scalar v0 = tr.eval(std::vector<mpq_class>(dim, 0));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-7, 7), den(1, 5);
  for (int t = 0; t < 5; ++t) {
    std::vector<mpq_class> x(dim);
    for (auto& xi : x) {
      xi = mpq_class(num(rng), den(rng));
      xi.canonicalize();
    }
    Scalar v = tr.eval(x);
    if (v != v0) throw Error(ErrorCode::XDependence, "tr(f* g) depends on the point", {{"inner-product", {}, (v - v0).str()}});
  }
  return v0;
}

ModelSection gerbe_metric(const ModelSection& omega, const ModelSection& eta) {
  const int n = omega.n, m = eta.n, N = n * m;
  const int dim = omega.omega[0].dim();
  std::vector<PolyForm> h(N * N, PolyForm(dim, 1));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < m; ++k)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < m; ++l) {
          PolyForm& w = h[(i * m + k) * N + (j * m + l)];
          if (k == l) w -= omega.at(j, i);
          if (i == j) w += eta.at(k, l);
        }
  return make_section(N, std::move(h));
}

ModelSection direct_sum(const ModelSection& a, const ModelSection& b) {
  const int N = a.n + b.n;
  const int dim = a.omega[0].dim();
  std::vector<PolyForm> w(N * N, PolyForm(dim, 1));
  for (int r = 0; r < a.n; ++r)
    for (int c = 0; c < a.n; ++c) w[r * N + c] = a.at(r, c);
  for (int r = 0; r < b.n; ++r)
    for (int c = 0; c < b.n; ++c) w[(a.n + r) * N + a.n + c] = b.at(r, c);
  return make_section(N, std::move(w));
}

}  // namespace gerbelab
