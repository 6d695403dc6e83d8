#pragma once

#include <complex>
#include <gmpxx.h>
#include <string>
#include <vector>

namespace gerbelab {

struct GaussRational {
  mpq_class re{0};
  mpq_class im{0};

  GaussRational() = default;
  GaussRational(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  GaussRational conj() const { return {re, -im}; }
  GaussRational inverse() const;

  friend GaussRational operator+(const GaussRational& a, const GaussRational& b) { return {a.re + b.re, a.im + b.im}; }
  friend GaussRational operator-(const GaussRational& a, const GaussRational& b) { return {a.re - b.re, a.im - b.im}; }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
  friend GaussRational operator*(const GaussRational& a, const GaussRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const GaussRational& a, const GaussRational& b) { return a.re == b.re && a.im == b.im; }

  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
};

// Element of Q(i)[pi]: coeffs[k] multiplies pi^k.  No trailing zeros.
class Scalar {
 public:
  Scalar() = default;
  Scalar(long v) : c_{GaussRational(mpq_class(v))} { normalize(); }
  Scalar(const mpq_class& q) : c_{GaussRational(q)} { normalize(); }
  Scalar(GaussRational g) : c_{std::move(g)} { normalize(); }
  explicit Scalar(std::vector<GaussRational> coeffs) : c_(std::move(coeffs)) { normalize(); }

  static Scalar rational(long num, long den = 1);
  static Scalar i();
  static Scalar pi();
  static Scalar two_pi_i();

  const std::vector<GaussRational>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  // -1 for zero
  int pi_degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_rational() const;
  bool is_integer() const;
  const GaussRational& leading() const { return c_.back(); }
  GaussRational coeff(int k) const;

  Scalar conj() const;
  std::complex<double> to_complex() const;

  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a);
  friend bool operator==(const Scalar& a, const Scalar& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  std::string str() const;

 private:
  void normalize();
  std::vector<GaussRational> c_;
};

}  // namespace gerbelab
