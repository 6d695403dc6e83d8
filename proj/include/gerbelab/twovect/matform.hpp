#pragma once

#include <Eigen/Dense>
#include <map>
#include <utility>

#include "gerbelab/exterior/form.hpp"

namespace gerbelab {

using CMatrix = Eigen::MatrixXcd;

// Matrix-valued polynomial p-form with complex double coefficients:
// sum over (dx^idx, x^exps) of a rows x cols matrix.
class MatForm {
 public:
  using Key = std::pair<Index, Exps>;

  MatForm() = default;
  MatForm(int dim, int p, int rows, int cols) : n_(dim), p_(p), r_(rows), c_(cols) {}

  // f * M for a scalar form f and a constant matrix M
  static MatForm scalar(const PolyForm& f, const CMatrix& M);
  static MatForm scalar(const PolyForm& f, int n);  // f * identity
  // rows x cols grid of scalar forms (row-major)
  static MatForm from_entries(int rows, int cols, const std::vector<PolyForm>& entries);

  int dim() const { return n_; }
  int degree() const { return p_; }
  int rows() const { return r_; }
  int cols() const { return c_; }
  const std::map<Key, CMatrix>& terms() const { return t_; }

  void add(const Key& k, const CMatrix& M);
  MatForm& operator+=(const MatForm& o);
  MatForm& operator-=(const MatForm& o);
  friend MatForm operator+(MatForm a, const MatForm& b) { return a += b; }
  friend MatForm operator-(MatForm a, const MatForm& b) { return a -= b; }
  friend MatForm operator-(const MatForm& a);
  friend MatForm operator*(std::complex<double> s, const MatForm& a);

  MatForm left(const CMatrix& L) const;   // L * this
  MatForm right(const CMatrix& R) const;  // this * R
  MatForm transpose() const;
  MatForm adjoint() const;
  MatForm block(int r0, int c0, int rows, int cols) const;

  // max-abs coefficient
  double norm() const;
  // matrix of the form evaluated on the coordinate vectors idx at x
  CMatrix eval(const Index& idx, const double* x) const;
  // components along dx^i of a 1-form at x
  CMatrix component(int i, const double* x) const;

 private:
  int n_ = 0, p_ = 0, r_ = 0, c_ = 0;
  std::map<Key, CMatrix> t_;
};

MatForm kron(const MatForm& a, const CMatrix& M);  // a (x) M
MatForm kron(const CMatrix& M, const MatForm& a);  // M (x) a
MatForm direct_sum(const MatForm& a, const MatForm& b);
MatForm mat_wedge(const MatForm& a, const MatForm& b);
MatForm mat_d(const MatForm& a);
CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix block_diag(const CMatrix& a, const CMatrix& b);

}  // namespace gerbelab
