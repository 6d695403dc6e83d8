#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "gerbelab/exterior/scalar.hpp"

namespace gerbelab {

using Exps = std::vector<int>;

// Polynomial in n real variables x^0..x^{n-1} with Scalar coefficients.
class Poly {
 public:
  using Terms = std::map<Exps, Scalar>;

  Poly() = default;
  explicit Poly(int n) : n_(n) {}
  Poly(int n, const Scalar& c);

  static Poly var(int n, int i);
  static Poly monomial(int n, Exps e, const Scalar& c);

  int dim() const { return n_; }
  const Terms& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  int degree() const;
  bool is_constant() const { return degree() <= 0; }
  Scalar constant_term() const;
  bool depends_on(int i) const;

  void add_term(const Exps& e, const Scalar& c);

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Scalar& s);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(const Poly& a);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const Scalar& s) { return a *= s; }
  friend Poly operator*(const Scalar& s, Poly a) { return a *= s; }
  friend bool operator==(const Poly& a, const Poly& b) { return a.n_ == b.n_ && a.t_ == b.t_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  Poly partial(int i) const;
  Poly conj() const;
  Scalar eval(const std::vector<mpq_class>& x) const;
  std::complex<double> eval(const double* x) const;
  // substitute x^i -> sub[i]; all sub share a dimension m
  Poly compose(const std::vector<Poly>& sub) const;
  Poly drop_variable(int k) const;
  Poly insert_variable(int k) const;

  std::string str() const;

 private:
  int n_ = 0;
  Terms t_;
};

}  // namespace gerbelab
