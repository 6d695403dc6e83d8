#include "gerbelab/loopspace/loopspace.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

namespace gerbelab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kTwoPiI(0.0, 2.0 * kPi);

double monomial(const Exps& e, const double* x) {
  double v = 1.0;
  for (size_t i = 0; i < e.size(); ++i)
    for (int k = 0; k < e[i]; ++k) v *= x[i];
  return v;
}

// det of the p x p matrix M_{kj} = vs[j][idx[k]]
double minor_det(const Index& idx, const std::vector<const double*>& vs) {
  const size_t p = idx.size();
  if (p == 0) return 1.0;
  if (p == 1) return vs[0][idx[0]];
  if (p == 2) return vs[0][idx[0]] * vs[1][idx[1]] - vs[1][idx[0]] * vs[0][idx[1]];
  Eigen::MatrixXd M(p, p);
  for (size_t k = 0; k < p; ++k)
    for (size_t j = 0; j < p; ++j) M(k, j) = vs[j][idx[k]];
  if (p == 3)
    return M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1)) - M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
           M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
  return M.determinant();
}

// Gauss-Legendre nodes and weights on [0, 1]
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) { p1 = z; p0 = 1.0; }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}

const std::vector<double>& gl_nodes(int n, bool weights) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    it = cache.emplace(n, std::make_pair(x, w)).first;
  }
  return weights ? it->second.second : it->second.first;
}

// quadrature nodes of a curve: points, velocities, weights
struct Nodes {
  RMatrix x, v;
  std::vector<double> w;
};

constexpr int kPathNodes = 24;

// gamma(t) + eps V(gamma(t)) at Gauss-Legendre nodes
Nodes path_nodes(const PolyPath& path, const VectorField* V, double eps) {
  const auto& t = gl_nodes(kPathNodes, false);
  const auto& w = gl_nodes(kPathNodes, true);
  const int dim = path.dim();
  Nodes n{RMatrix(kPathNodes, dim), RMatrix(kPathNodes, dim), w};
  std::optional<NumField> F;
  if (V) F.emplace(*V);
  for (int k = 0; k < kPathNodes; ++k) {
    RVector x(dim), v(dim);
    for (int i = 0; i < dim; ++i) {
      x(i) = path.comps[i].eval(&t[k]).real();
      v(i) = path.comps[i].partial(0).eval(&t[k]).real();
    }
    if (F) {
      RVector Vx = (*F)(x.data());
      RMatrix J = F->jacobian(x.data());
      x += eps * Vx;
      v += eps * (J * v);
    }
    n.x.row(k) = x.transpose();
    n.v.row(k) = v.transpose();
  }
  return n;
}

cplx integrate(const NumForm& w, const Nodes& n, const std::vector<NumField>& Ys) {
  const int N = static_cast<int>(n.x.rows());
  const int dim = static_cast<int>(n.x.cols());
  std::vector<RVector> vals(Ys.size());
  cplx sum = 0;
  for (int j = 0; j < N; ++j) {
    std::vector<const double*> vs;
    for (size_t k = 0; k < Ys.size(); ++k) {
      vals[k] = Ys[k](n.x.row(j).data());
      vs.push_back(vals[k].data());
    }
    vs.push_back(n.v.row(j).data());
    sum += n.w[j] * w(n.x.row(j).data(), vs);
  }
  (void)dim;
  return sum;
}

void check_transgress_args(const PolyForm& w, int dim, size_t nfields) {
  if (w.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "form and loop dimensions differ");
  if (w.degree() < 1) throw Error(ErrorCode::DegreeMismatch, "transgression needs a form of degree >= 1");
  if (static_cast<int>(nfields) != w.degree() - 1)
    throw Error(ErrorCode::DimensionMismatch, "transgression of a p-form takes p-1 tangents");
}

std::vector<NumField> compile(const std::vector<VectorField>& Vs) {
  std::vector<NumField> out;
  for (const auto& V : Vs) out.emplace_back(V);
  return out;
}

template <class T>
std::vector<T> without(const std::vector<T>& v, size_t i, size_t j = static_cast<size_t>(-1)) {
  std::vector<T> out;
  for (size_t k = 0; k < v.size(); ++k)
    if (k != i && k != j) out.push_back(v[k]);
  return out;
}

// Sum_i (-1)^i D_{V_i} T(w)(..no V_i..) + Sum_{i<j} (-1)^{i+j} T(w)([V_i, V_j], ..no V_i, V_j..)
template <class Eval, class Deformed>
cplx global_d(const PolyForm& w, const std::vector<VectorField>& Vs, double eps, Eval eval, Deformed deformed) {
  cplx out = 0;
  for (size_t i = 0; i < Vs.size(); ++i) {
    std::vector<VectorField> rest = without(Vs, i);
    cplx D = (eval(deformed(Vs[i], eps), rest) - eval(deformed(Vs[i], -eps), rest)) / (2 * eps);
    out += (i % 2 == 0 ? 1.0 : -1.0) * D;
  }
  for (size_t i = 0; i < Vs.size(); ++i)
    for (size_t j = i + 1; j < Vs.size(); ++j) {
      std::vector<VectorField> args{lie_bracket(Vs[i], Vs[j])};
      for (const auto& V : without(Vs, i, j)) args.push_back(V);
      out += ((i + j) % 2 == 0 ? 1.0 : -1.0) * eval(deformed(Vs[i], 0.0), args);
    }
  (void)w;
  return out;
}

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// chart point and Jacobian at a flat point y
void chart(const TriangulatedSurface& S, const RVector& y, RVector& x, RMatrix& J) {
  const int dim = static_cast<int>(y.size());
  if (!S.sphere) {
    x = y;
    J = RMatrix::Identity(dim, dim);
    return;
  }
  RVector d = y - S.sphere->center;
  double r = d.norm();
  RVector u = d / r;
  x = S.sphere->center + S.sphere->radius * u;
  J = (S.sphere->radius / r) * (RMatrix::Identity(dim, dim) - u * u.transpose());
}

cplx triangle_integral(const NumForm& w, const TriangulatedSurface& S, const std::array<int, 3>& t) {
  RVector P0 = S.vertices.row(t[0]).transpose();
  RVector e1 = S.vertices.row(t[1]).transpose() - P0;
  RVector e2 = S.vertices.row(t[2]).transpose() - P0;
  static const double uv[3][2] = {{0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}};
  cplx sum = 0;
  for (const auto& q : uv) {
    RVector y = P0 + q[0] * e1 + q[1] * e2, x;
    RMatrix J;
    chart(S, y, x, J);
    RVector t1 = J * e1, t2 = J * e2;
    sum += w(x.data(), {t1.data(), t2.data()}) / 6.0;
  }
  return sum;
}

cplx edge_integral(const NumForm& w, const TriangulatedSurface& S, int a, int b) {
  RVector P = S.vertices.row(a).transpose();
  RVector e = S.vertices.row(b).transpose() - P;
  const auto& s = gl_nodes(4, false);
  const auto& ws = gl_nodes(4, true);
  cplx sum = 0;
  for (size_t k = 0; k < s.size(); ++k) {
    RVector y = P + s[k] * e, x;
    RMatrix J;
    chart(S, y, x, J);
    RVector t = J * e;
    sum += ws[k] * w(x.data(), {t.data()});
  }
  return sum;
}

void require_closed(const TriangulatedSurface& S) {
  if (!is_closed(S)) throw Error(ErrorCode::NotClosed, "surface holonomy needs a closed oriented surface");
}

CMatrix step_transport(const MatForm& a, const RVector& mid, const RVector& delta) {
  CMatrix M = CMatrix::Zero(a.rows(), a.cols());
  for (int i = 0; i < static_cast<int>(delta.size()); ++i)
    if (delta(i) != 0.0) M += delta(i) * a.component(i, mid.data());
  return CMatrix(-M).exp();
}

}  // namespace

NumForm::NumForm(const PolyForm& w) : n_(w.dim()), p_(w.degree()) {
  for (const auto& [idx, poly] : w.terms())
    for (const auto& [e, c] : poly.terms()) terms_.push_back({idx, e, c.to_complex()});
}

cplx NumForm::operator()(const double* x, const std::vector<const double*>& vs) const {
  cplx sum = 0;
  for (const auto& t : terms_) {
    double d = minor_det(t.idx, vs);
    if (d != 0.0) sum += t.c * (monomial(t.exps, x) * d);
  }
  return sum;
}

NumField::NumField(const VectorField& V) : comps_(V.components()) {
  for (const auto& c : comps_) {
    std::vector<Poly> row;
    for (int j = 0; j < V.dim(); ++j) row.push_back(c.partial(j));
    partials_.push_back(std::move(row));
  }
}

RVector NumField::operator()(const double* x) const {
  RVector out(dim());
  for (int i = 0; i < dim(); ++i) out(i) = comps_[i].eval(x).real();
  return out;
}

RMatrix NumField::jacobian(const double* x) const {
  RMatrix J(dim(), dim());
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) J(i, j) = partials_[i][j].eval(x).real();
  return J;
}

RMatrix periodic_derivative(const RMatrix& f, LoopDerivative mode) {
  const int N = static_cast<int>(f.rows());
  RMatrix out(N, f.cols());
  if (mode == LoopDerivative::FiniteDifference4) {
    for (int j = 0; j < N; ++j) {
      auto r = [&](int k) { return f.row(((j + k) % N + N) % N); };
      out.row(j) = (-r(2) + 8.0 * r(1) - 8.0 * r(-1) + r(-2)) * (N / 12.0);
    }
    return out;
  }
  Eigen::FFT<double> fft;
  for (Eigen::Index c = 0; c < f.cols(); ++c) {
    std::vector<cplx> in(N), spec;
    for (int j = 0; j < N; ++j) in[j] = f(j, c);
    fft.fwd(spec, in);
    for (int k = 0; k < N; ++k) {
      int m = k < N / 2 ? k : (k == N / 2 ? 0 : k - N);
      spec[k] *= kTwoPiI * static_cast<double>(m);
    }
    std::vector<cplx> back;
    fft.inv(back, spec);
    for (int j = 0; j < N; ++j) out(j, c) = back[j].real();
  }
  return out;
}

SampledLoop::SampledLoop(RMatrix samples, LoopDerivative mode) : x_(std::move(samples)), mode_(mode) {
  if (x_.rows() < 16 || x_.rows() % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "a sampled loop needs an even number N >= 16 of samples");
  v_ = periodic_derivative(x_, mode_);
}

SampledLoop SampledLoop::sample(int dim, int N, const std::function<RVector(double)>& f, LoopDerivative mode) {
  RMatrix x(N, dim);
  for (int j = 0; j < N; ++j) {
    RVector p = f(static_cast<double>(j) / N);
    if (p.size() != dim) throw Error(ErrorCode::DimensionMismatch, "sample has the wrong dimension");
    x.row(j) = p.transpose();
  }
  return SampledLoop(std::move(x), mode);
}

SampledLoop SampledLoop::deformed(const RMatrix& X, double eps) const {
  if (X.rows() != x_.rows() || X.cols() != x_.cols()) throw Error(ErrorCode::DimensionMismatch, "tangent shape");
  return SampledLoop(x_ + eps * X, mode_);
}

SampledLoop SampledLoop::deformed(const VectorField& V, double eps) const {
  return deformed(pullback_tangent(V, *this), eps);
}

LoopTangent pullback_tangent(const VectorField& V, const SampledLoop& gamma) {
  if (V.dim() != gamma.dim()) throw Error(ErrorCode::DimensionMismatch, "vector field and loop dimensions differ");
  NumField F(V);
  LoopTangent X(gamma.size(), gamma.dim());
  for (int j = 0; j < gamma.size(); ++j) X.row(j) = F(gamma.points().row(j).data()).transpose();
  return X;
}

cplx transgress_form(const NumForm& w, const SampledLoop& gamma, const std::vector<LoopTangent>& Xs) {
  if (w.dim() != gamma.dim()) throw Error(ErrorCode::DimensionMismatch, "form and loop dimensions differ");
  if (static_cast<int>(Xs.size()) != w.degree() - 1)
    throw Error(ErrorCode::DimensionMismatch, "transgression of a p-form takes p-1 tangents");
  for (const auto& X : Xs)
    if (X.rows() != gamma.size() || X.cols() != gamma.dim())
      throw Error(ErrorCode::DimensionMismatch, "tangent shape differs from the loop");
  // canonical order of the tangents, so permuting them only flips the sign bit
  std::vector<size_t> order(Xs.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = k;
  auto less = [&](size_t a, size_t b) {
    return std::lexicographical_compare(Xs[a].data(), Xs[a].data() + Xs[a].size(), Xs[b].data(),
                                        Xs[b].data() + Xs[b].size());
  };
  bool odd = false;
  for (size_t i = 1; i < order.size(); ++i)
    for (size_t j = i; j > 0 && less(order[j], order[j - 1]); --j) {
      std::swap(order[j], order[j - 1]);
      odd = !odd;
    }
  for (size_t i = 1; i < order.size(); ++i)
    if (!less(order[i - 1], order[i])) return 0.0;
  const int N = gamma.size();
  cplx sum = 0;
  std::vector<const double*> vs(Xs.size() + 1);
  for (int j = 0; j < N; ++j) {
    for (size_t k = 0; k < Xs.size(); ++k) vs[k] = Xs[order[k]].row(j).data();
    vs.back() = gamma.velocity().row(j).data();
    sum += w(gamma.points().row(j).data(), vs);
  }
  sum /= static_cast<double>(N);
  return odd ? -sum : sum;
}

cplx transgress_form(const PolyForm& w, const SampledLoop& gamma, const std::vector<LoopTangent>& Xs) {
  check_transgress_args(w, gamma.dim(), Xs.size());
  return transgress_form(NumForm(w), gamma, Xs);
}

cplx transgress_form(const PolyForm& w, const PolyPath& path, const std::vector<VectorField>& Ys) {
  check_transgress_args(w, path.dim(), Ys.size());
  return integrate(NumForm(w), path_nodes(path, nullptr, 0.0), compile(Ys));
}

cplx deform_derivative(const LoopFn& F, const SampledLoop& gamma, const LoopTangent& X, double eps, bool richardson) {
  if (eps <= 0) throw Error(ErrorCode::InvalidArgument, "deformation step must be positive");
  auto central = [&](double e) { return (F(gamma.deformed(X, e)) - F(gamma.deformed(X, -e))) / (2 * e); };
  if (!richardson) return central(eps);
  return (4.0 * central(eps / 2) - central(eps)) / 3.0;
}

cplx transgression_d(const PolyForm& w, const SampledLoop& gamma, const std::vector<VectorField>& Vs, double eps) {
  if (static_cast<int>(Vs.size()) != w.degree()) throw Error(ErrorCode::DimensionMismatch, "d T(w) takes p fields");
  NumForm nw(w);
  auto eval = [&](const SampledLoop& g, const std::vector<VectorField>& Ys) {
    std::vector<LoopTangent> Xs;
    for (const auto& Y : Ys) Xs.push_back(pullback_tangent(Y, g));
    return transgress_form(nw, g, Xs);
  };
  auto deformed = [&](const VectorField& V, double e) { return e == 0.0 ? gamma : gamma.deformed(V, e); };
  return global_d(w, Vs, eps, eval, deformed);
}

cplx transgression_d(const PolyForm& w, const PolyPath& path, const std::vector<VectorField>& Vs, double eps) {
  if (static_cast<int>(Vs.size()) != w.degree()) throw Error(ErrorCode::DimensionMismatch, "d T(w) takes p fields");
  NumForm nw(w);
  auto eval = [&](const Nodes& n, const std::vector<VectorField>& Ys) { return integrate(nw, n, compile(Ys)); };
  auto deformed = [&](const VectorField& V, double e) { return path_nodes(path, &V, e); };
  return global_d(w, Vs, eps, eval, deformed);
}

cplx boundary_term(const PolyForm& w, const PolyPath& path, const std::vector<VectorField>& Vs) {
  if (static_cast<int>(Vs.size()) != w.degree()) throw Error(ErrorCode::DimensionMismatch, "boundary term takes p fields");
  NumForm nw(w);
  auto value = [&](double t) {
    RVector x(path.dim());
    for (int i = 0; i < path.dim(); ++i) x(i) = path.comps[i].eval(&t).real();
    std::vector<RVector> vals;
    std::vector<const double*> vs;
    for (const auto& V : Vs) vals.push_back(NumField(V)(x.data()));
    for (const auto& v : vals) vs.push_back(v.data());
    return nw(x.data(), vs);
  };
  double sign = (w.degree() - 1) % 2 == 0 ? 1.0 : -1.0;
  return sign * (value(1.0) - value(0.0));
}

cplx transgression_lie(const PolyForm& w, const SampledLoop& gamma, const VectorField& X,
                       const std::vector<VectorField>& Ys, double eps) {
  if (static_cast<int>(Ys.size()) != w.degree() - 1) throw Error(ErrorCode::DimensionMismatch, "T(w) takes p-1 fields");
  NumForm nw(w);
  auto eval = [&](const SampledLoop& g, const std::vector<VectorField>& Zs) {
    std::vector<LoopTangent> Xs;
    for (const auto& Z : Zs) Xs.push_back(pullback_tangent(Z, g));
    return transgress_form(nw, g, Xs);
  };
  cplx out = (eval(gamma.deformed(X, eps), Ys) - eval(gamma.deformed(X, -eps), Ys)) / (2 * eps);
  for (size_t i = 0; i < Ys.size(); ++i) {
    std::vector<VectorField> Zs = Ys;
    Zs[i] = lie_bracket(X, Ys[i]);
    out -= eval(gamma, Zs);
  }
  return out;
}

LoopFunctional LoopFunctional::constant(cplx v) {
  LoopFunctional f;
  f.kind_ = Kind::Constant;
  f.v_ = v;
  return f;
}

LoopFunctional LoopFunctional::exp_transgression(const Scalar& c, const PolyForm& theta) {
  if (theta.degree() != 1 && !theta.is_zero()) throw Error(ErrorCode::DegreeMismatch, "loop functionals use 1-forms");
  LoopFunctional f;
  f.kind_ = Kind::Exp;
  f.c_ = c;
  f.theta_ = theta;
  return f;
}

LoopFunctional LoopFunctional::product(std::vector<LoopFunctional> parts) {
  LoopFunctional f;
  f.kind_ = Kind::Product;
  f.parts_ = std::move(parts);
  return f;
}

LoopFunctional LoopFunctional::sum(std::vector<LoopFunctional> parts) {
  LoopFunctional f;
  f.kind_ = Kind::Sum;
  f.parts_ = std::move(parts);
  return f;
}

cplx LoopFunctional::operator()(const SampledLoop& gamma) const {
  switch (kind_) {
    case Kind::Constant:
      return v_;
    case Kind::Exp:
      return std::exp(c_.to_complex() * transgress_form(theta_, gamma, {}));
    case Kind::Product: {
      cplx v = 1;
      for (const auto& p : parts_) v *= p(gamma);
      return v;
    }
    case Kind::Sum: {
      cplx v = 0;
      for (const auto& p : parts_) v += p(gamma);
      return v;
    }
  }
  return 0;
}

cplx LoopFunctional::derivative(const SampledLoop& gamma, const LoopTangent& X) const {
  switch (kind_) {
    case Kind::Constant:
      return 0;
    case Kind::Exp:
      return c_.to_complex() * transgress_form(exterior_derivative(theta_), gamma, {X}) * (*this)(gamma);
    case Kind::Product: {
      cplx d = 0;
      for (size_t i = 0; i < parts_.size(); ++i) {
        cplx term = parts_[i].derivative(gamma, X);
        for (size_t j = 0; j < parts_.size(); ++j)
          if (j != i) term *= parts_[j](gamma);
        d += term;
      }
      return d;
    }
    case Kind::Sum: {
      cplx d = 0;
      for (const auto& p : parts_) d += p.derivative(gamma, X);
      return d;
    }
  }
  return 0;
}

LoopFn LoopFunctional::fn() const {
  LoopFunctional self = *this;
  return [self](const SampledLoop& g) { return self(g); };
}

cplx deform_derivative(const LoopFunctional& F, const SampledLoop& gamma, const LoopTangent& X, double eps,
                       bool richardson) {
  return deform_derivative(F.fn(), gamma, X, eps, richardson);
}

LocalLineBundle make_line_bundle(const CoverPtr& cover, CechCochain f, CechCochain A) {
  if (!same_cover(cover, f.cover) || !same_cover(cover, A.cover))
    throw Error(ErrorCode::CoverMismatch, "line bundle data on different covers");
  if (f.kind != ValueKind::U1 || f.k != 1 || A.k != 0 || A.form_degree != 1)
    throw Error(ErrorCode::DegreeMismatch, "line bundle needs U1 transitions and patch 1-forms");
  std::vector<Residual> res;
  for (const auto& s : cover->simplices(1)) {
    PolyForm r = A.at({s[0]}) - A.at({s[1]}) - dlog(f.at(s).as_poly());
    if (!r.is_zero()) res.push_back({"connection", cover->names(s), r.str()});
  }
  if (!res.empty()) throw Error(ErrorCode::ConnectionMismatch, "A_a - A_b != dlog f_ab", res);
  return {cover, std::move(f), std::move(A)};
}

cplx line_holonomy(const PolyForm& A, const SampledLoop& gamma) { return std::exp(-transgress_form(A, gamma, {})); }

cplx line_holonomy(const LocalLineBundle& L, const SampledLoop& gamma, const ArcAssignment& arcs) {
  const int N = gamma.size();
  const size_t K = arcs.start.size();
  if (K == 0 || arcs.patch.size() != K) throw Error(ErrorCode::PatchGap, "empty arc assignment");
  for (size_t k = 0; k < K; ++k) {
    if (arcs.start[k] < 0 || arcs.start[k] >= N || (k > 0 && arcs.start[k] <= arcs.start[k - 1]))
      throw Error(ErrorCode::PatchGap, "arc starts must increase within the sample range");
    if (arcs.patch[k] < 0 || arcs.patch[k] >= L.cover->size()) throw Error(ErrorCode::PatchGap, "unknown patch");
  }
  const double h = 1.0 / N;
  std::map<int, std::vector<cplx>> integrand;
  auto samples = [&](int a) -> const std::vector<cplx>& {
    auto it = integrand.find(a);
    if (it != integrand.end()) return it->second;
    NumForm w(L.A.at({a}));
    std::vector<cplx> g(N);
    for (int j = 0; j < N; ++j) g[j] = w(gamma.points().row(j).data(), {gamma.velocity().row(j).data()});
    return integrand.emplace(a, std::move(g)).first->second;
  };
  auto at = [&](const std::vector<cplx>& g, int j) { return g[((j % N) + N) % N]; };
  auto d1 = [&](const std::vector<cplx>& g, int j) {
    return (-at(g, j + 2) + 8.0 * at(g, j + 1) - 8.0 * at(g, j - 1) + at(g, j - 2)) / (12.0 * h);
  };
  auto d3 = [&](const std::vector<cplx>& g, int j) {
    return (at(g, j + 2) - 2.0 * at(g, j + 1) + 2.0 * at(g, j - 1) - at(g, j - 2)) / (2.0 * h * h * h);
  };

  cplx log_hol = 0;
  for (size_t k = 0; k < K; ++k) {
    const int a = arcs.patch[k];
    const int s = arcs.start[k];
    int e = K == 1 ? s + N : arcs.start[(k + 1) % K];
    if (e <= s) e += N;
    const auto& g = samples(a);
    // trapezoid with Euler-Maclaurin end corrections
    cplx I = 0.5 * (at(g, s) + at(g, e));
    for (int j = s + 1; j < e; ++j) I += at(g, j);
    I *= h;
    I -= h * h / 12.0 * (d1(g, e) - d1(g, s));
    I += h * h * h * h / 720.0 * (d3(g, e) - d3(g, s));
    log_hol -= I;

    const int b = arcs.patch[(k + 1) % K];
    if (a != b) {
      Simplex pair{std::min(a, b), std::max(a, b)};
      if (!L.cover->contains(pair))
        throw Error(ErrorCode::PatchGap, "consecutive arcs in non-overlapping patches", {{"arcs", L.cover->names(pair), ""}});
      Poly q = alternating_value(L.f, {a, b}).as_poly();
      log_hol += kTwoPiI * q.eval(gamma.points().row(e % N).data());
    }
  }
  return std::exp(log_hol);
}

cplx holonomy_variation(const PolyForm& A, const SampledLoop& gamma, const LoopTangent& X) {
  return -line_holonomy(A, gamma) * transgress_form(exterior_derivative(A), gamma, {X});
}

TriangulatedSurface icosphere(int subdivisions, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<RVector> v;
  auto push = [&](double x, double y, double z) {
    RVector p(3);
    p << x, y, z;
    v.push_back(p.normalized());
  };
  push(-1, t, 0), push(1, t, 0), push(-1, -t, 0), push(1, -t, 0);
  push(0, -1, t), push(0, 1, t), push(0, -1, -t), push(0, 1, -t);
  push(t, 0, -1), push(t, 0, 1), push(-t, 0, -1), push(-t, 0, 1);
  std::vector<std::array<int, 3>> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = edge_key(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      int id = static_cast<int>(v.size()) - 1;
      mid[key] = id;
      return id;
    };
    std::vector<std::array<int, 3>> g;
    for (const auto& tri : f) {
      int a = midpoint(tri[0], tri[1]), b = midpoint(tri[1], tri[2]), c = midpoint(tri[2], tri[0]);
      g.push_back({tri[0], a, c});
      g.push_back({tri[1], b, a});
      g.push_back({tri[2], c, b});
      g.push_back({a, b, c});
    }
    f = std::move(g);
  }
  TriangulatedSurface S;
  S.vertices.resize(static_cast<Eigen::Index>(v.size()), 3);
  for (size_t i = 0; i < v.size(); ++i) S.vertices.row(i) = radius * v[i].transpose();
  S.triangles = std::move(f);
  S.sphere = SphereChart{RVector::Zero(3), radius};
  return S;
}

TriangulatedSurface flat_disc(int rings, int segments, double radius) {
  if (rings < 1 || segments < 3) throw Error(ErrorCode::InvalidArgument, "disc needs rings >= 1 and segments >= 3");
  TriangulatedSurface S;
  S.vertices = RMatrix::Zero(1 + rings * segments, 3);
  auto id = [&](int r, int k) { return 1 + (r - 1) * segments + ((k % segments) + segments) % segments; };
  for (int r = 1; r <= rings; ++r)
    for (int k = 0; k < segments; ++k) {
      double phi = 2 * kPi * k / segments, rho = radius * r / rings;
      S.vertices(id(r, k), 0) = rho * std::cos(phi);
      S.vertices(id(r, k), 1) = rho * std::sin(phi);
    }
  for (int k = 0; k < segments; ++k) S.triangles.push_back({0, id(1, k), id(1, k + 1)});
  for (int r = 1; r < rings; ++r)
    for (int k = 0; k < segments; ++k) {
      S.triangles.push_back({id(r, k), id(r + 1, k), id(r + 1, k + 1)});
      S.triangles.push_back({id(r, k), id(r + 1, k + 1), id(r, k + 1)});
    }
  return S;
}

bool is_closed(const TriangulatedSurface& S) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : S.triangles)
    for (int i = 0; i < 3; ++i) ++count[{t[i], t[(i + 1) % 3]}];
  for (const auto& [e, c] : count) {
    auto rev = count.find({e.second, e.first});
    if (c != 1 || rev == count.end() || rev->second != 1) return false;
  }
  return !S.triangles.empty();
}

std::vector<int> boundary_loop(const TriangulatedSurface& S) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : S.triangles)
    for (int i = 0; i < 3; ++i) ++count[{t[i], t[(i + 1) % 3]}];
  std::map<int, int> next;
  for (const auto& [e, c] : count)
    if (!count.count({e.second, e.first})) {
      if (next.count(e.first)) throw Error(ErrorCode::InvalidArgument, "boundary is not a simple loop");
      next[e.first] = e.second;
    }
  if (next.empty()) throw Error(ErrorCode::InvalidArgument, "surface has no boundary");
  std::vector<int> loop{next.begin()->first};
  while (true) {
    auto it = next.find(loop.back());
    if (it == next.end()) throw Error(ErrorCode::InvalidArgument, "boundary is not a closed loop");
    if (it->second == loop.front()) break;
    loop.push_back(it->second);
    if (loop.size() > next.size()) throw Error(ErrorCode::InvalidArgument, "boundary is not a simple loop");
  }
  if (loop.size() != next.size()) throw Error(ErrorCode::InvalidArgument, "boundary has several components");
  return loop;
}

cplx integrate_surface(const PolyForm& w, const TriangulatedSurface& S) {
  if (w.degree() != 2 && !w.is_zero()) throw Error(ErrorCode::DegreeMismatch, "surface integrals take 2-forms");
  if (w.dim() != S.vertices.cols()) throw Error(ErrorCode::DimensionMismatch, "form and surface dimensions differ");
  NumForm nw(w);
  cplx sum = 0;
  for (const auto& t : S.triangles) sum += triangle_integral(nw, S, t);
  return sum;
}

cplx surface_holonomy(const PolyForm& rho, const TriangulatedSurface& S) {
  require_closed(S);
  return std::exp(-integrate_surface(rho, S));
}

cplx surface_holonomy(const LocalGerbe& L, const TriangulatedSurface& S, HolonomyMode mode) {
  require_closed(S);
  const Cover& cov = *L.cover;
  if (mode == HolonomyMode::Trivialized) {
    if (cov.size() == 1) return surface_holonomy(L.B.at({0}), S);
    auto T = find_trivialization(L);
    if (!T) throw Error(ErrorCode::InvalidArgument, "no trivialization found; use local mode");
    return surface_holonomy(T->rho, S);
  }
  if (!S.patches) throw Error(ErrorCode::PatchGap, "local mode needs a patch assignment");
  const SurfacePatches& P = *S.patches;
  if (P.triangle.size() != S.triangles.size() || P.vertex.size() != static_cast<size_t>(S.vertices.rows()))
    throw Error(ErrorCode::PatchGap, "patch assignment does not cover the surface");
  auto check = [&](Simplex s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (int a : s)
      if (a < 0 || a >= cov.size()) throw Error(ErrorCode::PatchGap, "unknown patch index");
    if (!cov.contains(s)) throw Error(ErrorCode::PatchGap, "assigned patches do not overlap", {{"surface", cov.names(s), ""}});
  };

  std::map<int, NumForm> B;
  std::map<std::pair<int, int>, NumForm> A;
  cplx log_hol = 0;
  for (size_t ti = 0; ti < S.triangles.size(); ++ti) {
    const auto& t = S.triangles[ti];
    const int at = P.triangle[ti];
    check({at});
    if (!B.count(at)) B.emplace(at, NumForm(L.B.at({at})));
    log_hol -= triangle_integral(B.at(at), S, t);
    for (int i = 0; i < 3; ++i) {
      const int u = t[i], w = t[(i + 1) % 3];
      auto eit = P.edge.find(edge_key(u, w));
      if (eit == P.edge.end()) throw Error(ErrorCode::PatchGap, "edge without patch");
      const int ae = eit->second;
      check({ae, at});
      if (ae != at) {
        auto key = std::make_pair(ae, at);
        if (!A.count(key)) A.emplace(key, NumForm(alternating_value(L.A, {ae, at})));
        log_hol -= edge_integral(A.at(key), S, u, w);
      }
      for (int end = 0; end < 2; ++end) {
        const int v = end == 0 ? u : w;
        const int av = P.vertex[v];
        check({av, ae, at});
        Poly q = alternating_value(L.g, {av, ae, at}).as_poly();
        if (q.is_zero()) continue;
        RVector x = S.vertices.row(v).transpose();
        double s = end == 0 ? 1.0 : -1.0;
        log_hol += s * kTwoPiI * q.eval(x.data());
      }
    }
  }
  return std::exp(log_hol);
}

cplx dbrane_holonomy(const PolyForm& rho, const MatForm& a, const TriangulatedSurface& D, int steps_per_edge) {
  std::vector<int> b = boundary_loop(D);
  CMatrix U = CMatrix::Identity(a.rows(), a.cols());
  for (size_t k = 0; k < b.size(); ++k) {
    RVector P = D.vertices.row(b[k]).transpose();
    RVector Q = D.vertices.row(b[(k + 1) % b.size()]).transpose();
    RVector delta = (Q - P) / steps_per_edge;
    for (int s = 0; s < steps_per_edge; ++s) U = step_transport(a, P + (s + 0.5) * delta, delta) * U;
  }
  return U.trace() * std::exp(-integrate_surface(rho, D));
}

cplx dbrane_holonomy(const PolyForm& rho, const GerbeMorphism& E, const TriangulatedSurface& D, int steps_per_edge) {
  if (E.source.cover->size() != 1) throw Error(ErrorCode::InvalidArgument, "D-brane holonomy needs a global section");
  return dbrane_holonomy(rho, E.a.at(0), D, steps_per_edge);
}

CMatrix wilson_transport(const MatForm& a, const SampledLoop& gamma) {
  if (a.dim() != gamma.dim() && !a.terms().empty()) throw Error(ErrorCode::DimensionMismatch, "connection dimension");
  // exponential midpoint rule: tau_j is the midpoint of [tau_j - 1/2N, tau_j + 1/2N]
  const int N = gamma.size();
  const double h = 1.0 / N;
  CMatrix U = CMatrix::Identity(a.rows(), a.cols());
  for (int j = 0; j < N; ++j) {
    RVector x = gamma.points().row(j).transpose();
    RVector dx = h * gamma.velocity().row(j).transpose();
    U = step_transport(a, x, dx) * U;
  }
  return U;
}

cplx transgress_section_wilson(const MatForm& a, const SampledLoop& gamma) { return wilson_transport(a, gamma).trace(); }

cplx transgress_section_wilson(const GerbeMorphism& E, const SampledLoop& gamma) {
  if (E.source.cover->size() != 1) throw Error(ErrorCode::InvalidArgument, "Wilson loops need a global section");
  return transgress_section_wilson(E.a.at(0), gamma);
}

cplx transgressed_connection(const PolyForm& rho, const SampledLoop& gamma, const LoopTangent& X) {
  return transgress_form(rho, gamma, {X});
}

cplx connection_curvature_fd(const PolyForm& rho, const SampledLoop& gamma, const LoopTangent& X1,
                             const LoopTangent& X2, double eps) {
  NumForm w(rho);
  auto A = [&](const LoopTangent& X) { return [&w, X](const SampledLoop& g) { return transgress_form(w, g, {X}); }; };
  return deform_derivative(A(X2), gamma, X1, eps) - deform_derivative(A(X1), gamma, X2, eps);
}

LoopFn ks_operator(const PlecticSpace& P, const PolyForm& rho, const PolyForm& alpha, LoopFn psi, double eps) {
  VectorField X = hamiltonian_vf(P, alpha);
  auto w = std::make_shared<NumForm>(rho);
  auto a = std::make_shared<NumForm>(alpha);
  return [X, w, a, psi, eps](const SampledLoop& g) {
    LoopTangent T = pullback_tangent(X, g);
    cplx D = X.is_zero() ? cplx(0) : (psi(g.deformed(T, eps)) - psi(g.deformed(T, -eps))) / (2 * eps);
    cplx conn = X.is_zero() ? cplx(0) : transgress_form(*w, g, {T});
    return D + (conn + kTwoPiI * transgress_form(*a, g, {})) * psi(g);
  };
}

cplx ks_apply(const PlecticSpace& P, const PolyForm& rho, const Observable& alpha, const LoopFunctional& psi,
              const SampledLoop& gamma, double eps) {
  return ks_operator(P, rho, alpha.alpha, psi.fn(), eps)(gamma);
}

}  // namespace gerbelab
