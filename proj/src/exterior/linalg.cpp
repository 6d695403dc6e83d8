#include "gerbelab/exterior/linalg.hpp"

#include "gerbelab/error.hpp"

namespace gerbelab {

namespace {

Scalar times(const Scalar& a, const GaussRational& g) { return a * Scalar(g); }

Scalar make_monic(const Scalar& a) {
  if (a.is_zero()) return a;
  return times(a, a.leading().inverse());
}

}  // namespace

void pi_divmod(const Scalar& a, const Scalar& b, Scalar& q, Scalar& r) {
  if (b.is_zero()) throw Error(ErrorCode::InvalidArgument, "division by zero in Q(i)[pi]");
  q = Scalar();
  r = a;
  GaussRational lead_inv = b.leading().inverse();
  int db = b.pi_degree();
  while (!r.is_zero() && r.pi_degree() >= db) {
    int shift = r.pi_degree() - db;
    std::vector<GaussRational> m(shift + 1);
    m[shift] = r.leading() * lead_inv;
    Scalar t(std::move(m));
    q += t;
    r -= t * b;
  }
}

Scalar pi_gcd(Scalar a, Scalar b) {
  while (!b.is_zero()) {
    Scalar q, r;
    pi_divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return make_monic(a);
}

PiFrac::PiFrac(Scalar num, Scalar den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  normalize();
}

void PiFrac::normalize() {
  if (num_.is_zero()) {
    den_ = Scalar(1);
    return;
  }
  if (den_.pi_degree() == 0) {
    if (!(den_ == Scalar(1))) {
      num_ = times(num_, den_.leading().inverse());
      den_ = Scalar(1);
    }
    return;
  }
  Scalar g = pi_gcd(num_, den_);
  if (g.pi_degree() > 0) {
    Scalar q, r;
    pi_divmod(num_, g, q, r);
    num_ = q;
    pi_divmod(den_, g, q, r);
    den_ = q;
  }
  GaussRational li = den_.leading().inverse();
  num_ = times(num_, li);
  den_ = times(den_, li);
}

PiFrac operator+(const PiFrac& a, const PiFrac& b) {
  if (a.den_ == b.den_) return PiFrac(a.num_ + b.num_, a.den_);
  return PiFrac(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

PiFrac operator-(const PiFrac& a, const PiFrac& b) {
  if (a.den_ == b.den_) return PiFrac(a.num_ - b.num_, a.den_);
  return PiFrac(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

PiFrac operator*(const PiFrac& a, const PiFrac& b) {
  if (a.is_zero() || b.is_zero()) return PiFrac();
  return PiFrac(a.num_ * b.num_, a.den_ * b.den_);
}

PiFrac operator/(const PiFrac& a, const PiFrac& b) {
  if (b.is_zero()) throw Error(ErrorCode::InvalidArgument, "division by zero in Q(i)(pi)");
  return PiFrac(a.num_ * b.den_, a.den_ * b.num_);
}

std::optional<Scalar> as_scalar(const PiFrac& f) {
  if (f.den().pi_degree() != 0) return std::nullopt;
  return times(f.num(), f.den().leading().inverse());
}

namespace {

using FracRow = std::map<int, PiFrac>;

// Reduced row echelon form; returns pivot column per row.
std::vector<int> rref(std::vector<FracRow>& rows) {
  std::vector<int> pivots;
  size_t done = 0;
  while (true) {
    // pick the row (among remaining) with the smallest leading column
    int best_col = -1;
    size_t best = rows.size();
    for (size_t r = done; r < rows.size(); ++r) {
      if (rows[r].empty()) continue;
      int c = rows[r].begin()->first;
      if (best_col < 0 || c < best_col || (c == best_col && rows[r].size() < rows[best].size())) {
        best_col = c;
        best = r;
      }
    }
    if (best_col < 0) break;
    std::swap(rows[done], rows[best]);
    FracRow& piv = rows[done];
    PiFrac inv = PiFrac(Scalar(1)) / piv.begin()->second;
    for (auto& [c, v] : piv) v = v * inv;
    for (size_t r = 0; r < rows.size(); ++r) {
      if (r == done) continue;
      auto it = rows[r].find(best_col);
      if (it == rows[r].end()) continue;
      PiFrac f = it->second;
      for (const auto& [c, v] : piv) {
        auto [jt, ins] = rows[r].try_emplace(c, PiFrac());
        jt->second = jt->second - f * v;
        if (jt->second.is_zero()) rows[r].erase(jt);
      }
    }
    pivots.push_back(best_col);
    ++done;
  }
  rows.resize(done);
  return pivots;
}

std::vector<FracRow> to_frac(const std::vector<SparseRow>& rows) {
  std::vector<FracRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    FracRow f;
    for (const auto& [c, v] : r)
      if (!v.is_zero()) f.emplace(c, PiFrac(v));
    if (!f.empty()) out.push_back(std::move(f));
  }
  return out;
}

Scalar pi_lcm(const Scalar& a, const Scalar& b) {
  Scalar g = pi_gcd(a, b);
  Scalar q, r;
  pi_divmod(a * b, g, q, r);
  return make_monic(q);
}

}  // namespace

std::vector<std::vector<Scalar>> nullspace(const std::vector<SparseRow>& rows, int ncols) {
  auto fr = to_frac(rows);
  auto pivots = rref(fr);
  std::vector<bool> is_pivot(ncols, false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Scalar>> basis;
  for (int f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<PiFrac> v(ncols);
    v[f] = PiFrac(Scalar(1));
    for (size_t r = 0; r < fr.size(); ++r) {
      auto it = fr[r].find(f);
      if (it != fr[r].end()) v[pivots[r]] = -it->second;
    }
    Scalar l(1);
    for (const auto& x : v)
      if (!x.is_zero() && x.den().pi_degree() > 0) l = pi_lcm(l, x.den());
    std::vector<Scalar> out(ncols);
    for (int c = 0; c < ncols; ++c) {
      if (v[c].is_zero()) continue;
      Scalar q, r;
      pi_divmod(l * v[c].num(), v[c].den(), q, r);
      out[c] = q;
    }
    basis.push_back(std::move(out));
  }
  return basis;
}

std::optional<std::vector<PiFrac>> solve(const std::vector<SparseRow>& rows, const std::vector<Scalar>& rhs,
                                         int ncols) {
  if (rhs.size() != rows.size()) throw Error(ErrorCode::DimensionMismatch, "rhs length");
  std::vector<SparseRow> aug = rows;
  for (size_t r = 0; r < aug.size(); ++r)
    if (!rhs[r].is_zero()) aug[r][ncols] = rhs[r];
  auto fr = to_frac(aug);
  auto pivots = rref(fr);
  std::vector<PiFrac> x(ncols);
  for (size_t r = 0; r < fr.size(); ++r) {
    if (pivots[r] == ncols) return std::nullopt;
    auto it = fr[r].find(ncols);
    if (it != fr[r].end()) x[pivots[r]] = it->second;
  }
  return x;
}

int rank(const std::vector<SparseRow>& rows, int ncols) {
  (void)ncols;
  auto fr = to_frac(rows);
  return static_cast<int>(rref(fr).size());
}

}  // namespace gerbelab
