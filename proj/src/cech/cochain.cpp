#include "gerbelab/cech/cochain.hpp"

#include <cmath>
#include <numbers>

namespace gerbelab {

std::complex<double> U1Function::eval(const double* x) const {
  return std::exp(std::complex<double>(0, 2 * std::numbers::pi) * exponent.eval(x));
}

bool is_integer_constant(const Poly& q) { return q.is_constant() && q.constant_term().is_integer(); }

bool operator==(const U1Function& a, const U1Function& b) {
  return a.exponent.dim() == b.exponent.dim() && is_integer_constant(a.exponent - b.exponent);
}

PolyForm dlog(const Poly& exponent) {
  return Scalar::two_pi_i() * exterior_derivative(PolyForm::from_poly(exponent));
}

const PolyForm& CechCochain::at(const Simplex& s) const {
  auto it = entries.find(s);
  if (it == entries.end()) throw Error(ErrorCode::CoverMismatch, "cochain has no value on requested simplex");
  return it->second;
}

bool CechCochain::is_zero() const {
  for (const auto& [s, v] : entries) {
    if (kind == ValueKind::U1 ? !is_integer_constant(v.as_poly()) : !v.is_zero()) return false;
  }
  return true;
}

CechCochain zero_cochain(const CoverPtr& cover, int k, ValueKind kind, int form_degree) {
  CechCochain c{cover, k, kind, kind == ValueKind::U1 ? 0 : form_degree, {}};
  for (const auto& s : cover->simplices(k)) c.entries.emplace(s, PolyForm(cover->dim(), c.form_degree));
  return c;
}

CechCochain make_cochain(const CoverPtr& cover, int k, ValueKind kind, int form_degree,
                         std::map<Simplex, PolyForm> entries) {
  CechCochain c = zero_cochain(cover, k, kind, form_degree);
  for (auto& [s, v] : entries) {
    auto it = c.entries.find(s);
    if (it == c.entries.end())
      throw Error(ErrorCode::CoverMismatch, "cochain value on a tuple that is not a " + std::to_string(k) +
                                                "-simplex of the nerve");
    if (v.dim() != cover->dim() || v.degree() != c.form_degree)
      throw Error(ErrorCode::DegreeMismatch, "cochain value has wrong dimension or degree");
    it->second = std::move(v);
  }
  if (entries.size() != c.entries.size())
    throw Error(ErrorCode::CoverMismatch, "cochain is missing values on some simplices");
  return c;
}

CechCochain cech_delta(const CechCochain& c) {
  CechCochain r = zero_cochain(c.cover, c.k + 1, c.kind, c.form_degree);
  for (auto& [s, v] : r.entries)
    for (size_t j = 0; j < s.size(); ++j) {
      Simplex f = s;
      f.erase(f.begin() + static_cast<long>(j));
      if (j % 2) v -= c.at(f);
      else v += c.at(f);
    }
  return r;
}

namespace {

void compatible(const CechCochain& a, const CechCochain& b) {
  if (!same_cover(a.cover, b.cover)) throw Error(ErrorCode::CoverMismatch, "cochains on different covers");
  if (a.k != b.k || a.kind != b.kind || a.form_degree != b.form_degree)
    throw Error(ErrorCode::DegreeMismatch, "cochains of different type");
}

}  // namespace

CechCochain operator+(const CechCochain& a, const CechCochain& b) {
  compatible(a, b);
  CechCochain r = a;
  for (auto& [s, v] : r.entries) v += b.at(s);
  return r;
}

CechCochain operator-(const CechCochain& a, const CechCochain& b) {
  compatible(a, b);
  CechCochain r = a;
  for (auto& [s, v] : r.entries) v -= b.at(s);
  return r;
}

CechCochain operator-(const CechCochain& a) {
  CechCochain r = a;
  for (auto& [s, v] : r.entries) v = -v;
  return r;
}

CechCochain cochain_d(const CechCochain& c) {
  CechCochain r = zero_cochain(c.cover, c.k, ValueKind::Form, c.kind == ValueKind::U1 ? 1 : c.form_degree + 1);
  for (auto& [s, v] : r.entries)
    v = c.kind == ValueKind::U1 ? dlog(c.at(s).as_poly()) : exterior_derivative(c.at(s));
  return r;
}

PolyForm alternating_value(const CechCochain& c, Simplex s) {
  int sign = sort_sign(s);
  if (sign == 0) return PolyForm(c.cover->dim(), c.form_degree);
  const PolyForm& v = c.at(s);
  return sign > 0 ? v : -v;
}

std::vector<Residual> nonzero_entries(const CechCochain& c, const std::string& layer) {
  std::vector<Residual> out;
  for (const auto& [s, v] : c.entries) {
    bool bad = c.kind == ValueKind::U1 ? !is_integer_constant(v.as_poly()) : !v.is_zero();
    if (bad) out.push_back({layer, c.cover->names(s), v.str()});
  }
  return out;
}

}  // namespace gerbelab
