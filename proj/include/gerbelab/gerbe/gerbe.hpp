#pragma once

#include <optional>

#include "gerbelab/cech/deligne.hpp"

namespace gerbelab {

struct LocalGerbe {
  CoverPtr cover;
  CechCochain g;  // U1, Cech degree 2
  CechCochain A;  // 1-forms on double overlaps
  CechCochain B;  // 2-forms on patches
  PolyForm H;     // cached curvature

  DeligneCochain deligne() const;
};

struct GerbeReport {
  bool ok = true;
  std::optional<ErrorCode> failure;  // first failing layer
  std::vector<Residual> residuals;
};

GerbeReport validate_gerbe(const CoverPtr& cover, const CechCochain& g, const CechCochain& A, const CechCochain& B);
LocalGerbe make_gerbe(const CoverPtr& cover, CechCochain g, CechCochain A, CechCochain B);
LocalGerbe trivial_gerbe(const PolyForm& rho, const std::string& label = "M");

const PolyForm& curvature_3form(const LocalGerbe& L);
const CechCochain& dd_cocycle(const LocalGerbe& L);
LocalGerbe tensor(const LocalGerbe& L1, const LocalGerbe& L2);
LocalGerbe dual(const LocalGerbe& L);
LocalGerbe tensor_power(const LocalGerbe& L, int n);

struct Trivialization {
  CechCochain h;  // U1 on double overlaps
  CechCochain a;  // 1-forms on patches
  PolyForm rho;   // global 2-form
};

struct TrivializationReport {
  bool ok = true;
  std::vector<Residual> residuals;  // layers "cocycle", "connection", "curving"
};

// Under the fixed convention: g = delta h, A = delta a - dlog h, da_a = rho - B_a.
TrivializationReport verify_trivialization(const LocalGerbe& L, const Trivialization& T);

// L (x) L* together with its canonical trivialization.
std::pair<LocalGerbe, Trivialization> self_trivialization(const LocalGerbe& L);

// Search restricted to constant exponents g; nullopt if no trivialization with constant h exists.
std::optional<Trivialization> find_trivialization(const LocalGerbe& L);

// Gerbe presented by delta_D(h, a) + (0, 0, rho): the local data trivialized by (h, a, rho).
LocalGerbe gerbe_from_trivialization(const Trivialization& T);

}  // namespace gerbelab
