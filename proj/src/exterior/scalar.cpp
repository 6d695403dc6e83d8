#include "gerbelab/exterior/scalar.hpp"

#include <numbers>
#include <sstream>

namespace gerbelab {

GaussRational GaussRational::inverse() const {
  mpq_class n = re * re + im * im;
  return {re / n, -im / n};
}

Scalar Scalar::rational(long num, long den) {
  mpq_class q(num, den);
  q.canonicalize();
  return Scalar(q);
}

Scalar Scalar::i() { return Scalar(GaussRational(0, 1)); }

Scalar Scalar::pi() { return Scalar(std::vector<GaussRational>{GaussRational(), GaussRational(1)}); }

Scalar Scalar::two_pi_i() { return Scalar(std::vector<GaussRational>{GaussRational(), GaussRational(0, 2)}); }

void Scalar::normalize() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

bool Scalar::is_rational() const { return c_.size() <= 1 && (c_.empty() || sgn(c_[0].im) == 0); }

bool Scalar::is_integer() const {
  if (!is_rational()) return false;
  return c_.empty() || c_[0].re.get_den() == 1;
}

GaussRational Scalar::coeff(int k) const {
  if (k < 0 || k >= static_cast<int>(c_.size())) return {};
  return c_[k];
}

Scalar Scalar::conj() const {
  Scalar r = *this;
  for (auto& g : r.c_) g.im = -g.im;
  return r;
}

std::complex<double> Scalar::to_complex() const {
  std::complex<double> acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * std::numbers::pi + it->to_complex();
  return acc;
}

Scalar& Scalar::operator+=(const Scalar& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (size_t k = 0; k < o.c_.size(); ++k) {
    c_[k].re += o.c_[k].re;
    c_[k].im += o.c_[k].im;
  }
  normalize();
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (size_t k = 0; k < o.c_.size(); ++k) {
    c_[k].re -= o.c_[k].re;
    c_[k].im -= o.c_[k].im;
  }
  normalize();
  return *this;
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<GaussRational> r(a.c_.size() + b.c_.size() - 1);
  for (size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i].is_zero()) continue;
    for (size_t j = 0; j < b.c_.size(); ++j) {
      const auto& x = a.c_[i];
      const auto& y = b.c_[j];
      r[i + j].re += x.re * y.re - x.im * y.im;
      r[i + j].im += x.re * y.im + x.im * y.re;
    }
  }
  return Scalar(std::move(r));
}

Scalar& Scalar::operator*=(const Scalar& o) { return *this = *this * o; }

Scalar operator-(const Scalar& a) {
  Scalar r = a;
  for (auto& g : r.c_) {
    g.re = -g.re;
    g.im = -g.im;
  }
  return r;
}

std::string Scalar::str() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (size_t k = 0; k < c_.size(); ++k) {
    const auto& g = c_[k];
    if (g.is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << g.re.get_str();
    if (sgn(g.im) != 0) os << (sgn(g.im) > 0 ? "+" : "") << g.im.get_str() << "i";
    os << ")";
    if (k == 1) os << "pi";
    if (k > 1) os << "pi^" << k;
  }
  return os.str();
}

}  // namespace gerbelab
