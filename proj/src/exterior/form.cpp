#include "gerbelab/exterior/form.hpp"

#include <algorithm>
#include <sstream>

#include "gerbelab/error.hpp"

namespace gerbelab {

namespace {

void same_dim(int a, int b, const char* what) {
  if (a != b)
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

template <class T>
T det_small(std::vector<std::vector<T>> m) {
  // Gaussian elimination is awkward for non-field T; cofactor expansion is fine for p <= 4.
  size_t k = m.size();
  if (k == 0) return T(1);
  if (k == 1) return m[0][0];
  T acc(0);
  for (size_t c = 0; c < k; ++c) {
    std::vector<std::vector<T>> minor;
    for (size_t r = 1; r < k; ++r) {
      std::vector<T> row;
      for (size_t j = 0; j < k; ++j)
        if (j != c) row.push_back(m[r][j]);
      minor.push_back(std::move(row));
    }
    T term = m[0][c] * det_small(std::move(minor));
    if (c % 2) acc = acc - term;
    else acc = acc + term;
  }
  return acc;
}

}  // namespace

int sort_sign(Index& idx) {
  int sign = 1;
  for (size_t i = 1; i < idx.size(); ++i)
    for (size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  return sign;
}

VectorField::VectorField(std::vector<Poly> comps) : c_(std::move(comps)) {
  for (const auto& p : c_) same_dim(p.dim(), dim(), "vector field component");
}

VectorField VectorField::coordinate(int n, int i) {
  VectorField X(n);
  X.c_.at(i) = Poly(n, Scalar(1));
  return X;
}

bool VectorField::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Poly& p) { return p.is_zero(); });
}

int VectorField::degree() const {
  int d = -1;
  for (const auto& p : c_) d = std::max(d, p.degree());
  return d;
}

Poly VectorField::apply(const Poly& f) const {
  same_dim(f.dim(), dim(), "vector field on polynomial");
  Poly r(dim());
  for (int i = 0; i < dim(); ++i)
    if (!c_[i].is_zero()) r += c_[i] * f.partial(i);
  return r;
}

VectorField& VectorField::operator+=(const VectorField& o) {
  same_dim(dim(), o.dim(), "vector field sum");
  for (int i = 0; i < dim(); ++i) c_[i] += o.c_[i];
  return *this;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  same_dim(a.dim(), b.dim(), "vector field difference");
  VectorField r = a;
  for (int i = 0; i < a.dim(); ++i) r.c_[i] -= b.c_[i];
  return r;
}

VectorField operator*(const Scalar& s, VectorField a) {
  for (auto& p : a.c_) p *= s;
  return a;
}

std::vector<std::complex<double>> VectorField::eval(const double* x) const {
  std::vector<std::complex<double>> v(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) v[i] = c_[i].eval(x);
  return v;
}

std::string VectorField::str() const {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < c_.size(); ++i) os << (i ? ", " : "") << c_[i].str();
  os << ")";
  return os.str();
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
  same_dim(X.dim(), Y.dim(), "lie bracket");
  VectorField Z(X.dim());
  for (int i = 0; i < X.dim(); ++i) Z[i] = X.apply(Y[i]) - Y.apply(X[i]);
  return Z;
}

PolyMap::PolyMap(int m, std::vector<Poly> comps) : m_(m), c_(std::move(comps)) {
  for (const auto& p : c_) same_dim(p.dim(), m_, "map component");
}

PolyMap PolyMap::identity(int n) {
  std::vector<Poly> c;
  for (int i = 0; i < n; ++i) c.push_back(Poly::var(n, i));
  return PolyMap(n, std::move(c));
}

PolyMap PolyMap::after(const PolyMap& f) const {
  same_dim(m_, f.target_dim(), "map composition");
  std::vector<Poly> c;
  for (const auto& p : c_) c.push_back(p.compose(f.c_));
  return PolyMap(f.m_, std::move(c));
}

PolyForm::PolyForm(int n, int p) : n_(n), p_(p) {
  if (p < 0) throw Error(ErrorCode::DegreeMismatch, "negative form degree");
}

PolyForm PolyForm::from_poly(const Poly& f) {
  PolyForm a(f.dim(), 0);
  a.add({}, f);
  return a;
}

PolyForm PolyForm::dx(int n, int i) { return basis(n, {i}, Poly(n, Scalar(1))); }

PolyForm PolyForm::basis(int n, Index idx, const Poly& coeff) {
  PolyForm a(n, static_cast<int>(idx.size()));
  a.add(std::move(idx), coeff);
  return a;
}

PolyForm PolyForm::volume(int n) {
  Index idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  return basis(n, idx, Poly(n, Scalar(1)));
}

Poly PolyForm::coeff(const Index& idx) const {
  auto it = t_.find(idx);
  return it == t_.end() ? Poly(n_) : it->second;
}

Poly PolyForm::as_poly() const {
  if (p_ != 0) throw Error(ErrorCode::DegreeMismatch, "form is not of degree 0");
  return coeff({});
}

int PolyForm::coeff_degree() const {
  int d = -1;
  for (const auto& [i, f] : t_) d = std::max(d, f.degree());
  return d;
}

bool PolyForm::depends_on(int i) const {
  return std::any_of(t_.begin(), t_.end(), [i](const auto& kv) { return kv.second.depends_on(i); });
}

void PolyForm::add(Index idx, const Poly& f) {
  same_dim(f.dim(), n_, "form coefficient");
  if (static_cast<int>(idx.size()) != p_) throw Error(ErrorCode::DegreeMismatch, "index length");
  for (int i : idx)
    if (i < 0 || i >= n_) throw Error(ErrorCode::DimensionMismatch, "form index out of range");
  if (f.is_zero()) return;
  int s = sort_sign(idx);
  if (s == 0) return;
  auto it = t_.find(idx);
  if (it == t_.end()) {
    t_.emplace(std::move(idx), s > 0 ? f : -f);
    return;
  }
  if (s > 0) it->second += f;
  else it->second -= f;
  if (it->second.is_zero()) t_.erase(it);
}

PolyForm& PolyForm::operator+=(const PolyForm& o) {
  same_dim(n_, o.n_, "form sum");
  if (p_ != o.p_) throw Error(ErrorCode::DegreeMismatch, "form sum degrees");
  for (const auto& [i, f] : o.t_) add(i, f);
  return *this;
}

PolyForm& PolyForm::operator-=(const PolyForm& o) {
  same_dim(n_, o.n_, "form difference");
  if (p_ != o.p_) throw Error(ErrorCode::DegreeMismatch, "form difference degrees");
  for (const auto& [i, f] : o.t_) add(i, -f);
  return *this;
}

PolyForm operator-(const PolyForm& a) {
  PolyForm r = a;
  for (auto& [i, f] : r.t_) f = -f;
  return r;
}

PolyForm operator*(const Scalar& s, const PolyForm& a) {
  PolyForm r(a.n_, a.p_);
  for (const auto& [i, f] : a.t_) r.add(i, f * s);
  return r;
}

PolyForm operator*(const Poly& g, const PolyForm& a) {
  PolyForm r(a.n_, a.p_);
  for (const auto& [i, f] : a.t_) r.add(i, g * f);
  return r;
}

PolyForm PolyForm::conj() const {
  PolyForm r = *this;
  for (auto& [i, f] : r.t_) f = f.conj();
  return r;
}

std::string PolyForm::str() const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [idx, f] : t_) {
    if (!first) os << " + ";
    first = false;
    os << "[" << f.str() << "]";
    for (size_t k = 0; k < idx.size(); ++k) os << (k ? "^" : " ") << "dx" << (idx[k] + 1);
  }
  return os.str();
}

PolyForm wedge(const PolyForm& a, const PolyForm& b) {
  same_dim(a.dim(), b.dim(), "wedge");
  PolyForm r(a.dim(), a.degree() + b.degree());
  if (r.degree() > a.dim()) return r;
  for (const auto& [I, f] : a.terms())
    for (const auto& [J, g] : b.terms()) {
      Index K = I;
      K.insert(K.end(), J.begin(), J.end());
      r.add(std::move(K), f * g);
    }
  return r;
}

PolyForm exterior_derivative(const PolyForm& a) {
  PolyForm r(a.dim(), a.degree() + 1);
  if (r.degree() > a.dim()) return r;
  for (const auto& [I, f] : a.terms())
    for (int k = 0; k < a.dim(); ++k) {
      Poly df = f.partial(k);
      if (df.is_zero()) continue;
      Index K{k};
      K.insert(K.end(), I.begin(), I.end());
      r.add(std::move(K), df);
    }
  return r;
}

PolyForm interior_product(const VectorField& X, const PolyForm& a) {
  same_dim(X.dim(), a.dim(), "interior product");
  if (a.degree() == 0) throw Error(ErrorCode::DegreeMismatch, "interior product of a 0-form");
  PolyForm r(a.dim(), a.degree() - 1);
  for (const auto& [I, f] : a.terms())
    for (size_t m = 0; m < I.size(); ++m) {
      const Poly& xi = X[I[m]];
      if (xi.is_zero()) continue;
      Index K = I;
      K.erase(K.begin() + static_cast<long>(m));
      Poly c = xi * f;
      r.add(std::move(K), m % 2 ? -c : c);
    }
  return r;
}

PolyForm lie_derivative(const VectorField& X, const PolyForm& a) {
  same_dim(X.dim(), a.dim(), "lie derivative");
  PolyForm r = interior_product(X, exterior_derivative(a));
  if (a.degree() > 0) r += exterior_derivative(interior_product(X, a));
  return r;
}

PolyForm pullback(const PolyMap& f, const PolyForm& a) {
  same_dim(f.target_dim(), a.dim(), "pullback");
  int m = f.source_dim();
  std::vector<PolyForm> dfi;
  for (const auto& c : f.components()) dfi.push_back(exterior_derivative(PolyForm::from_poly(c)));
  PolyForm r(m, a.degree());
  for (const auto& [I, g] : a.terms()) {
    PolyForm term = PolyForm::from_poly(g.compose(f.components()));
    for (int i : I) term = wedge(term, dfi[i]);
    if (term.degree() == a.degree()) r += term;
  }
  return r;
}

Scalar evaluate(const PolyForm& a, const std::vector<mpq_class>& x, const std::vector<std::vector<mpq_class>>& Xs) {
  if (static_cast<int>(Xs.size()) != a.degree()) throw Error(ErrorCode::DimensionMismatch, "number of vectors");
  for (const auto& v : Xs) same_dim(static_cast<int>(v.size()), a.dim(), "tangent vector");
  Scalar acc;
  for (const auto& [I, f] : a.terms()) {
    std::vector<std::vector<mpq_class>> m(I.size(), std::vector<mpq_class>(I.size()));
    for (size_t k = 0; k < I.size(); ++k)
      for (size_t l = 0; l < I.size(); ++l) m[k][l] = Xs[k][I[l]];
    acc += f.eval(x) * Scalar(det_small(m));
  }
  return acc;
}

std::complex<double> evaluate(const PolyForm& a, const std::vector<double>& x,
                              const std::vector<std::vector<double>>& Xs) {
  if (static_cast<int>(Xs.size()) != a.degree()) throw Error(ErrorCode::DimensionMismatch, "number of vectors");
  same_dim(static_cast<int>(x.size()), a.dim(), "evaluation point");
  for (const auto& v : Xs) same_dim(static_cast<int>(v.size()), a.dim(), "tangent vector");
  std::complex<double> acc = 0;
  for (const auto& [I, f] : a.terms()) {
    std::vector<std::vector<double>> m(I.size(), std::vector<double>(I.size()));
    for (size_t k = 0; k < I.size(); ++k)
      for (size_t l = 0; l < I.size(); ++l) m[k][l] = Xs[k][I[l]];
    acc += f.eval(x.data()) * det_small(m);
  }
  return acc;
}

}  // namespace gerbelab
