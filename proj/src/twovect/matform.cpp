#include "gerbelab/twovect/matform.hpp"

#include <cmath>

#include "gerbelab/error.hpp"

namespace gerbelab {

namespace {

double monomial_value(const Exps& e, const double* x) {
  double v = 1.0;
  for (size_t i = 0; i < e.size(); ++i)
    for (int k = 0; k < e[i]; ++k) v *= x[i];
  return v;
}

}  // namespace

MatForm MatForm::scalar(const PolyForm& f, const CMatrix& M) {
  MatForm out(f.dim(), f.degree(), static_cast<int>(M.rows()), static_cast<int>(M.cols()));
  for (const auto& [idx, poly] : f.terms())
    for (const auto& [e, s] : poly.terms()) out.add({idx, e}, s.to_complex() * M);
  return out;
}

MatForm MatForm::scalar(const PolyForm& f, int n) { return scalar(f, CMatrix::Identity(n, n)); }

MatForm MatForm::from_entries(int rows, int cols, const std::vector<PolyForm>& entries) {
  if (static_cast<int>(entries.size()) != rows * cols || entries.empty())
    throw Error(ErrorCode::DimensionMismatch, "matrix form needs rows*cols entries");
  MatForm out(entries[0].dim(), entries[0].degree(), rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      CMatrix E = CMatrix::Zero(rows, cols);
      E(r, c) = 1.0;
      out += scalar(entries[r * cols + c], E);
    }
  return out;
}

void MatForm::add(const Key& k, const CMatrix& M) {
  auto it = t_.find(k);
  if (it == t_.end()) {
    if (!M.isZero(0.0)) t_.emplace(k, M);
    return;
  }
  it->second += M;
  if (it->second.isZero(0.0)) t_.erase(it);
}

MatForm& MatForm::operator+=(const MatForm& o) {
  if (o.r_ != r_ || o.c_ != c_ || (o.p_ != p_ && !o.t_.empty() && !t_.empty()))
    throw Error(ErrorCode::DimensionMismatch, "matrix form shapes differ");
  if (t_.empty()) { n_ = o.n_; p_ = o.p_; }
  for (const auto& [k, M] : o.t_) add(k, M);
  return *this;
}

MatForm& MatForm::operator-=(const MatForm& o) { return *this += -o; }

MatForm operator-(const MatForm& a) { return std::complex<double>(-1.0) * a; }

MatForm operator*(std::complex<double> s, const MatForm& a) {
  MatForm out(a.n_, a.p_, a.r_, a.c_);
  for (const auto& [k, M] : a.t_) out.add(k, s * M);
  return out;
}

MatForm MatForm::left(const CMatrix& L) const {
  MatForm out(n_, p_, static_cast<int>(L.rows()), c_);
  for (const auto& [k, M] : t_) out.add(k, L * M);
  return out;
}

MatForm MatForm::right(const CMatrix& R) const {
  MatForm out(n_, p_, r_, static_cast<int>(R.cols()));
  for (const auto& [k, M] : t_) out.add(k, M * R);
  return out;
}

MatForm MatForm::transpose() const {
  MatForm out(n_, p_, c_, r_);
  for (const auto& [k, M] : t_) out.add(k, M.transpose());
  return out;
}

// x is real, so conjugation acts on coefficients only
MatForm MatForm::adjoint() const {
  MatForm out(n_, p_, c_, r_);
  for (const auto& [k, M] : t_) out.add(k, M.adjoint());
  return out;
}

MatForm MatForm::block(int r0, int c0, int rows, int cols) const {
  MatForm out(n_, p_, rows, cols);
  for (const auto& [k, M] : t_) out.add(k, M.block(r0, c0, rows, cols));
  return out;
}

double MatForm::norm() const {
  double m = 0.0;
  for (const auto& [k, M] : t_) m = std::max(m, M.cwiseAbs().maxCoeff());
  return m;
}

CMatrix MatForm::eval(const Index& idx, const double* x) const {
  CMatrix out = CMatrix::Zero(r_, c_);
  for (const auto& [k, M] : t_)
    if (k.first == idx) out += monomial_value(k.second, x) * M;
  return out;
}

CMatrix MatForm::component(int i, const double* x) const { return eval({i}, x); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix block_diag(const CMatrix& a, const CMatrix& b) {
  CMatrix out = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

MatForm kron(const MatForm& a, const CMatrix& M) {
  MatForm out(a.dim(), a.degree(), a.rows() * static_cast<int>(M.rows()), a.cols() * static_cast<int>(M.cols()));
  for (const auto& [k, A] : a.terms()) out.add(k, kron(A, M));
  return out;
}

MatForm kron(const CMatrix& M, const MatForm& a) {
  MatForm out(a.dim(), a.degree(), a.rows() * static_cast<int>(M.rows()), a.cols() * static_cast<int>(M.cols()));
  for (const auto& [k, A] : a.terms()) out.add(k, kron(M, A));
  return out;
}

MatForm direct_sum(const MatForm& a, const MatForm& b) {
  int dim = std::max(a.dim(), b.dim());
  int p = a.terms().empty() ? b.degree() : a.degree();
  MatForm out(dim, p, a.rows() + b.rows(), a.cols() + b.cols());
  for (const auto& [k, A] : a.terms()) out.add(k, block_diag(A, CMatrix::Zero(b.rows(), b.cols())));
  for (const auto& [k, B] : b.terms()) out.add(k, block_diag(CMatrix::Zero(a.rows(), a.cols()), B));
  return out;
}

MatForm mat_wedge(const MatForm& a, const MatForm& b) {
  MatForm out(a.dim(), a.degree() + b.degree(), a.rows(), b.cols());
  for (const auto& [ka, A] : a.terms())
    for (const auto& [kb, B] : b.terms()) {
      Index idx = ka.first;
      idx.insert(idx.end(), kb.first.begin(), kb.first.end());
      int s = sort_sign(idx);
      if (s == 0) continue;
      Exps e = ka.second;
      for (size_t i = 0; i < e.size(); ++i) e[i] += kb.second[i];
      out.add({idx, e}, static_cast<double>(s) * (A * B));
    }
  return out;
}

MatForm mat_d(const MatForm& a) {
  MatForm out(a.dim(), a.degree() + 1, a.rows(), a.cols());
  for (const auto& [k, M] : a.terms())
    for (int i = 0; i < a.dim(); ++i) {
      if (k.second[i] == 0) continue;
      Index idx{i};
      idx.insert(idx.end(), k.first.begin(), k.first.end());
      int s = sort_sign(idx);
      if (s == 0) continue;
      Exps e = k.second;
      double c = e[i];
      e[i] -= 1;
      out.add({idx, e}, s * c * M);
    }
  return out;
}

}  // namespace gerbelab
