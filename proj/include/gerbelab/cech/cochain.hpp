#pragma once

#include <map>
#include <vector>

#include "gerbelab/cech/cover.hpp"
#include "gerbelab/error.hpp"
#include "gerbelab/exterior/form.hpp"

namespace gerbelab {

enum class ValueKind { Form, U1 };

// exp(2 pi i q) with q a polynomial; equal iff exponents differ by an integer constant.
struct U1Function {
  Poly exponent;

  U1Function inverse() const { return {-exponent}; }
  friend U1Function operator*(const U1Function& a, const U1Function& b) { return {a.exponent + b.exponent}; }
  std::complex<double> eval(const double* x) const;
  friend bool operator==(const U1Function& a, const U1Function& b);
};

bool is_integer_constant(const Poly& q);
PolyForm dlog(const Poly& exponent);

// Cech k-cochain.  U1-valued entries store the exponent q as a 0-form.
struct CechCochain {
  CoverPtr cover;
  int k = 0;
  ValueKind kind = ValueKind::Form;
  int form_degree = 0;
  std::map<Simplex, PolyForm> entries;

  const PolyForm& at(const Simplex& s) const;
  bool is_zero() const;
};

CechCochain zero_cochain(const CoverPtr& cover, int k, ValueKind kind, int form_degree);
// Validates that entries sit exactly on the k-simplices of the nerve.
CechCochain make_cochain(const CoverPtr& cover, int k, ValueKind kind, int form_degree,
                         std::map<Simplex, PolyForm> entries);

CechCochain cech_delta(const CechCochain& c);
CechCochain operator+(const CechCochain& a, const CechCochain& b);
CechCochain operator-(const CechCochain& a, const CechCochain& b);
CechCochain operator-(const CechCochain& a);
CechCochain cochain_d(const CechCochain& c);  // d on forms, dlog on U1
// value at an arbitrary ordered tuple: sign of sorting, zero on repeats
PolyForm alternating_value(const CechCochain& c, Simplex s);

std::vector<Residual> nonzero_entries(const CechCochain& c, const std::string& layer);

}  // namespace gerbelab
