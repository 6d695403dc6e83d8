#pragma once

#include "gerbelab/cech/cochain.hpp"

namespace gerbelab {

// k-cochain of the Deligne complex U(1) -> Omega^1 -> ... -> Omega^n.
// comps[j] has Cech degree k - j and form degree j (comps[0] is U1-valued).
struct DeligneCochain {
  int n = 0;
  int k = 0;
  std::vector<CechCochain> comps;

  const CoverPtr& cover() const { return comps.front().cover; }
};

struct CocycleReport {
  bool ok = true;
  std::vector<Residual> residuals;
};

DeligneCochain make_deligne(int n, int k, std::vector<CechCochain> comps);
DeligneCochain zero_deligne(const CoverPtr& cover, int n, int k);

DeligneCochain deligne_delta(const DeligneCochain& c);
CocycleReport is_deligne_cocycle(const DeligneCochain& c);
DeligneCochain gauge_shift(const DeligneCochain& c, const DeligneCochain& h);
PolyForm curv_of_class(const DeligneCochain& c);
CechCochain dd_projection(const DeligneCochain& c);

DeligneCochain operator+(const DeligneCochain& a, const DeligneCochain& b);
DeligneCochain operator-(const DeligneCochain& a);
bool is_zero(const DeligneCochain& c);

}  // namespace gerbelab
