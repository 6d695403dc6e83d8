#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "gerbelab/exterior/poly.hpp"

namespace gerbelab {

using Index = std::vector<int>;

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(int n) : c_(n, Poly(n)) {}
  explicit VectorField(std::vector<Poly> comps);

  static VectorField coordinate(int n, int i);

  int dim() const { return static_cast<int>(c_.size()); }
  const std::vector<Poly>& components() const { return c_; }
  const Poly& operator[](int i) const { return c_[i]; }
  Poly& operator[](int i) { return c_[i]; }
  bool is_zero() const;
  int degree() const;

  Poly apply(const Poly& f) const;
  VectorField& operator+=(const VectorField& o);
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(const VectorField& a, const VectorField& b);
  friend VectorField operator*(const Scalar& s, VectorField a);
  friend bool operator==(const VectorField& a, const VectorField& b) { return a.c_ == b.c_; }

  std::vector<std::complex<double>> eval(const double* x) const;
  std::string str() const;

 private:
  std::vector<Poly> c_;
};

VectorField lie_bracket(const VectorField& X, const VectorField& Y);

// Polynomial map R^m -> R^n.
class PolyMap {
 public:
  PolyMap(int m, std::vector<Poly> comps);
  static PolyMap identity(int n);

  int source_dim() const { return m_; }
  int target_dim() const { return static_cast<int>(c_.size()); }
  const std::vector<Poly>& components() const { return c_; }

  // (*this) o f
  PolyMap after(const PolyMap& f) const;
  friend bool operator==(const PolyMap& a, const PolyMap& b) { return a.m_ == b.m_ && a.c_ == b.c_; }

 private:
  int m_;
  std::vector<Poly> c_;
};

class PolyForm {
 public:
  using Terms = std::map<Index, Poly>;

  PolyForm() = default;
  PolyForm(int n, int p);
  static PolyForm from_poly(const Poly& f);
  static PolyForm dx(int n, int i);
  static PolyForm basis(int n, Index idx, const Poly& coeff);
  // volume form dx^0 ^ ... ^ dx^{n-1}
  static PolyForm volume(int n);

  int dim() const { return n_; }
  int degree() const { return p_; }
  const Terms& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  Poly coeff(const Index& idx) const;
  Poly as_poly() const;
  int coeff_degree() const;
  bool depends_on(int i) const;

  // idx in any order; sorted with the permutation sign, repeated indices vanish
  void add(Index idx, const Poly& f);

  PolyForm& operator+=(const PolyForm& o);
  PolyForm& operator-=(const PolyForm& o);
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
  friend PolyForm operator-(const PolyForm& a);
  friend PolyForm operator*(const Scalar& s, const PolyForm& a);
  friend PolyForm operator*(const Poly& f, const PolyForm& a);
  friend bool operator==(const PolyForm& a, const PolyForm& b) {
    return a.n_ == b.n_ && a.p_ == b.p_ && a.t_ == b.t_;
  }
  friend bool operator!=(const PolyForm& a, const PolyForm& b) { return !(a == b); }

  PolyForm conj() const;
  std::string str() const;

 private:
  int n_ = 0;
  int p_ = 0;
  Terms t_;
};

PolyForm wedge(const PolyForm& a, const PolyForm& b);
PolyForm exterior_derivative(const PolyForm& a);
PolyForm interior_product(const VectorField& X, const PolyForm& a);
PolyForm lie_derivative(const VectorField& X, const PolyForm& a);
PolyForm pullback(const PolyMap& f, const PolyForm& a);

Scalar evaluate(const PolyForm& a, const std::vector<mpq_class>& x, const std::vector<std::vector<mpq_class>>& Xs);
std::complex<double> evaluate(const PolyForm& a, const std::vector<double>& x,
                              const std::vector<std::vector<double>>& Xs);

// Sign of the permutation sorting idx, 0 if idx has a repeat; idx is sorted in place.
int sort_sign(Index& idx);

}  // namespace gerbelab
