#include "gerbelab/exterior/poly.hpp"

#include <sstream>

#include "gerbelab/error.hpp"

namespace gerbelab {

namespace {

void check_dim(const Poly& a, const Poly& b) {
  if (a.dim() != b.dim())
    throw Error(ErrorCode::DimensionMismatch,
                "polynomial dimensions " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
}

std::complex<double> ipow(double x, int e) {
  double r = 1;
  for (int k = 0; k < e; ++k) r *= x;
  return r;
}

}  // namespace

Poly::Poly(int n, const Scalar& c) : n_(n) {
  if (!c.is_zero()) t_.emplace(Exps(n, 0), c);
}

Poly Poly::var(int n, int i) {
  Exps e(n, 0);
  e.at(i) = 1;
  return monomial(n, e, Scalar(1));
}

Poly Poly::monomial(int n, Exps e, const Scalar& c) {
  if (static_cast<int>(e.size()) != n) throw Error(ErrorCode::DimensionMismatch, "exponent vector length");
  Poly p(n);
  p.add_term(e, c);
  return p;
}

int Poly::degree() const {
  int d = -1;
  for (const auto& [e, c] : t_) {
    int s = 0;
    for (int v : e) s += v;
    d = std::max(d, s);
  }
  return d;
}

Scalar Poly::constant_term() const {
  auto it = t_.find(Exps(n_, 0));
  return it == t_.end() ? Scalar() : it->second;
}

bool Poly::depends_on(int i) const {
  for (const auto& [e, c] : t_)
    if (e[i] != 0) return true;
  return false;
}

void Poly::add_term(const Exps& e, const Scalar& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = t_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) t_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  check_dim(*this, o);
  for (const auto& [e, c] : o.t_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  check_dim(*this, o);
  for (const auto& [e, c] : o.t_) add_term(e, -c);
  return *this;
}

Poly& Poly::operator*=(const Scalar& s) {
  if (s.is_zero()) {
    t_.clear();
    return *this;
  }
  for (auto& [e, c] : t_) c *= s;
  return *this;
}

Poly operator-(const Poly& a) {
  Poly r = a;
  for (auto& [e, c] : r.t_) c = -c;
  return r;
}

Poly operator*(const Poly& a, const Poly& b) {
  check_dim(a, b);
  Poly r(a.n_);
  Exps e(a.n_);
  for (const auto& [ea, ca] : a.t_)
    for (const auto& [eb, cb] : b.t_) {
      for (int k = 0; k < a.n_; ++k) e[k] = ea[k] + eb[k];
      r.add_term(e, ca * cb);
    }
  return r;
}

Poly Poly::partial(int i) const {
  Poly r(n_);
  for (const auto& [e, c] : t_) {
    if (e[i] == 0) continue;
    Exps f = e;
    f[i] -= 1;
    r.add_term(f, c * Scalar(static_cast<long>(e[i])));
  }
  return r;
}

Poly Poly::conj() const {
  Poly r = *this;
  for (auto& [e, c] : r.t_) c = c.conj();
  return r;
}

Scalar Poly::eval(const std::vector<mpq_class>& x) const {
  if (static_cast<int>(x.size()) != n_) throw Error(ErrorCode::DimensionMismatch, "evaluation point");
  Scalar acc;
  for (const auto& [e, c] : t_) {
    mpq_class m = 1;
    for (int k = 0; k < n_; ++k)
      for (int j = 0; j < e[k]; ++j) m *= x[k];
    acc += c * Scalar(m);
  }
  return acc;
}

std::complex<double> Poly::eval(const double* x) const {
  std::complex<double> acc = 0;
  for (const auto& [e, c] : t_) {
    std::complex<double> m = c.to_complex();
    for (int k = 0; k < n_; ++k)
      if (e[k]) m *= ipow(x[k], e[k]);
    acc += m;
  }
  return acc;
}

Poly Poly::compose(const std::vector<Poly>& sub) const {
  if (static_cast<int>(sub.size()) != n_) throw Error(ErrorCode::DimensionMismatch, "substitution arity");
  int m = sub.empty() ? 0 : sub[0].dim();
  std::vector<std::vector<Poly>> powers(n_);
  Poly r(m);
  for (const auto& [e, c] : t_) {
    Poly term(m, c);
    for (int k = 0; k < n_; ++k) {
      auto& pw = powers[k];
      if (pw.empty()) pw.push_back(Poly(m, Scalar(1)));
      while (static_cast<int>(pw.size()) <= e[k]) pw.push_back(pw.back() * sub[k]);
      if (e[k]) term = term * pw[e[k]];
    }
    r += term;
  }
  return r;
}

Poly Poly::drop_variable(int k) const {
  if (depends_on(k)) throw Error(ErrorCode::NotInvariant, "polynomial depends on x^" + std::to_string(k + 1));
  Poly r(n_ - 1);
  for (const auto& [e, c] : t_) {
    Exps f;
    for (int j = 0; j < n_; ++j)
      if (j != k) f.push_back(e[j]);
    r.add_term(f, c);
  }
  return r;
}

Poly Poly::insert_variable(int k) const {
  Poly r(n_ + 1);
  for (const auto& [e, c] : t_) {
    Exps f = e;
    f.insert(f.begin() + k, 0);
    r.add_term(f, c);
  }
  return r;
}

std::string Poly::str() const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : t_) {
    if (!first) os << " + ";
    first = false;
    os << c.str();
    for (int k = 0; k < n_; ++k) {
      if (e[k] == 0) continue;
      os << "*x" << (k + 1);
      if (e[k] > 1) os << "^" << e[k];
    }
  }
  return os.str();
}

}  // namespace gerbelab
