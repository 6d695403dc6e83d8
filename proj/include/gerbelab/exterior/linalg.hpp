#pragma once

#include <map>
#include <optional>
#include <vector>

#include "gerbelab/exterior/scalar.hpp"

namespace gerbelab {

// Element of the fraction field Q(i)(pi); denominator monic in pi.
class PiFrac {
 public:
  PiFrac() : den_(1) {}
  PiFrac(Scalar num) : num_(std::move(num)), den_(1) {}
  PiFrac(Scalar num, Scalar den);

  const Scalar& num() const { return num_; }
  const Scalar& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  friend PiFrac operator+(const PiFrac& a, const PiFrac& b);
  friend PiFrac operator-(const PiFrac& a, const PiFrac& b);
  friend PiFrac operator*(const PiFrac& a, const PiFrac& b);
  friend PiFrac operator/(const PiFrac& a, const PiFrac& b);
  friend PiFrac operator-(const PiFrac& a) { return PiFrac(-a.num_, a.den_, true); }
  friend bool operator==(const PiFrac& a, const PiFrac& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

 private:
  PiFrac(Scalar n, Scalar d, bool) : num_(std::move(n)), den_(std::move(d)) {}
  void normalize();
  Scalar num_;
  Scalar den_;
};

// Polynomial arithmetic in pi over Q(i).
void pi_divmod(const Scalar& a, const Scalar& b, Scalar& q, Scalar& r);
Scalar pi_gcd(Scalar a, Scalar b);

using SparseRow = std::map<int, Scalar>;

// Basis of {v : rows * v = 0} with denominators cleared.
std::vector<std::vector<Scalar>> nullspace(const std::vector<SparseRow>& rows, int ncols);
// One solution of rows * v = rhs (free variables zero), or nullopt if inconsistent.
std::optional<std::vector<PiFrac>> solve(const std::vector<SparseRow>& rows, const std::vector<Scalar>& rhs, int ncols);
int rank(const std::vector<SparseRow>& rows, int ncols);

// PiFrac known to have constant denominator (or unit) converted back to a Scalar.
std::optional<Scalar> as_scalar(const PiFrac& f);

}  // namespace gerbelab
