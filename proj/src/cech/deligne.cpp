#include "gerbelab/cech/deligne.hpp"

#include <optional>

namespace gerbelab {

namespace {

int top_component(int n, int k) { return std::min(n, k); }

void compatible(const DeligneCochain& a, const DeligneCochain& b) {
  if (a.n != b.n || a.k != b.k) throw Error(ErrorCode::DegreeMismatch, "Deligne cochains of different degree");
  if (!same_cover(a.cover(), b.cover())) throw Error(ErrorCode::CoverMismatch, "Deligne cochains on different covers");
}

std::string layer_name(int j) { return "component " + std::to_string(j); }

}  // namespace

DeligneCochain make_deligne(int n, int k, std::vector<CechCochain> comps) {
  if (n < 1 || k < 0) throw Error(ErrorCode::DegreeMismatch, "Deligne degrees out of range");
  if (static_cast<int>(comps.size()) != top_component(n, k) + 1)
    throw Error(ErrorCode::DegreeMismatch, "wrong number of Deligne components");
  for (int j = 0; j < static_cast<int>(comps.size()); ++j) {
    const auto& c = comps[j];
    if (!same_cover(c.cover, comps[0].cover)) throw Error(ErrorCode::CoverMismatch, "components on different covers");
    bool kind_ok = j == 0 ? c.kind == ValueKind::U1 : (c.kind == ValueKind::Form && c.form_degree == j);
    if (!kind_ok || c.k != k - j) throw Error(ErrorCode::DegreeMismatch, "component " + std::to_string(j) + " layout");
  }
  return {n, k, std::move(comps)};
}

DeligneCochain zero_deligne(const CoverPtr& cover, int n, int k) {
  std::vector<CechCochain> comps;
  for (int j = 0; j <= top_component(n, k); ++j)
    comps.push_back(zero_cochain(cover, k - j, j == 0 ? ValueKind::U1 : ValueKind::Form, j));
  return make_deligne(n, k, std::move(comps));
}

DeligneCochain deligne_delta(const DeligneCochain& c) {
  // (delta_D c)_j = delta c_j + (-1)^{k+n} d c_{j-1}, with dlog out of the U1 slot
  DeligneCochain r = zero_deligne(c.cover(), c.n, c.k + 1);
  bool flip = (c.k + c.n) % 2 != 0;
  for (int j = 0; j < static_cast<int>(r.comps.size()); ++j) {
    if (j < static_cast<int>(c.comps.size())) r.comps[j] = cech_delta(c.comps[j]);
    if (j >= 1) {
      CechCochain dc = cochain_d(c.comps[j - 1]);
      r.comps[j] = flip ? r.comps[j] - dc : r.comps[j] + dc;
    }
  }
  return r;
}

CocycleReport is_deligne_cocycle(const DeligneCochain& c) {
  CocycleReport rep;
  DeligneCochain r = deligne_delta(c);
  for (int j = 0; j < static_cast<int>(r.comps.size()); ++j) {
    auto res = nonzero_entries(r.comps[j], layer_name(j));
    rep.residuals.insert(rep.residuals.end(), res.begin(), res.end());
  }
  rep.ok = rep.residuals.empty();
  return rep;
}

DeligneCochain gauge_shift(const DeligneCochain& c, const DeligneCochain& h) {
  if (h.n != c.n || h.k != c.k - 1) throw Error(ErrorCode::DegreeMismatch, "gauge parameter must have degree k-1");
  if (!same_cover(c.cover(), h.cover())) throw Error(ErrorCode::CoverMismatch, "gauge parameter on another cover");
  return c + deligne_delta(h);
}

PolyForm curv_of_class(const DeligneCochain& c) {
  if (c.k != c.n) throw Error(ErrorCode::DegreeMismatch, "curvature is defined for Deligne degree k = n");
  auto rep = is_deligne_cocycle(c);
  if (!rep.ok) throw Error(ErrorCode::NotACocycle, "curvature of a non-cocycle", rep.residuals);
  const CechCochain& top = c.comps[c.n];
  std::optional<PolyForm> beta;
  std::vector<Residual> bad;
  for (const auto& [s, v] : top.entries) {
    PolyForm dv = exterior_derivative(v);
    if (!beta) beta = dv;
    else if (!(dv == *beta)) bad.push_back({"curvature", c.cover()->names(s), (dv - *beta).str()});
  }
  if (!bad.empty()) throw Error(ErrorCode::InconsistentPatches, "patchwise curvatures disagree", bad);
  return *beta;
}

CechCochain dd_projection(const DeligneCochain& c) {
  auto rep = is_deligne_cocycle(c);
  if (!rep.ok) throw Error(ErrorCode::NotACocycle, "projection of a non-cocycle", rep.residuals);
  return c.comps[0];
}

DeligneCochain operator+(const DeligneCochain& a, const DeligneCochain& b) {
  compatible(a, b);
  DeligneCochain r = a;
  for (size_t j = 0; j < r.comps.size(); ++j) r.comps[j] = a.comps[j] + b.comps[j];
  return r;
}

DeligneCochain operator-(const DeligneCochain& a) {
  DeligneCochain r = a;
  for (auto& c : r.comps) c = -c;
  return r;
}

bool is_zero(const DeligneCochain& c) {
  for (const auto& comp : c.comps)
    if (!comp.is_zero()) return false;
  return true;
}

}  // namespace gerbelab
