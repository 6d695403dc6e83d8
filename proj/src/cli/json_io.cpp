#include "gerbelab/cli/json_io.hpp"

#include <algorithm>
#include <set>

namespace gerbelab::io {

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json& array_of(const Json& j, const std::string& path, size_t exact = static_cast<size_t>(-1)) {
  if (!j.is_array()) parse_fail(path, "expected an array");
  if (exact != static_cast<size_t>(-1) && j.size() != exact)
    parse_fail(path, "expected " + std::to_string(exact) + " entries");
  return j;
}

mpq_class decode_rational(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return mpq_class(j.get<long>());
  if (!j.is_string()) parse_fail(path, "expected a rational \"p/q\" or an integer");
  mpq_class q;
  if (q.set_str(j.get<std::string>(), 10) != 0) parse_fail(path, "malformed rational");
  if (q.get_den() == 0) parse_fail(path, "zero denominator");
  q.canonicalize();
  return q;
}

std::vector<int> decode_ints(const Json& j, const std::string& path, int lo, int hi) {
  std::vector<int> out;
  for (size_t i = 0; i < array_of(j, path).size(); ++i) out.push_back(get_int(j[i], at(path, i), lo, hi));
  return out;
}

RVector decode_vector(const Json& j, const std::string& path, int dim) {
  array_of(j, path, static_cast<size_t>(dim));
  RVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = get_double(j[i], at(path, i));
  return v;
}

Json encode_data(const CMatrix& M) {
  Json d = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r)
    for (Eigen::Index c = 0; c < M.cols(); ++c) d.push_back(encode(M(r, c)));
  return d;
}

CMatrix decode_data(const Json& j, int rows, int cols, const std::string& path) {
  array_of(j, path, static_cast<size_t>(rows) * cols);
  CMatrix M(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) M(r, c) = decode_complex(j[r * cols + c], at(path, r * cols + c));
  return M;
}

std::vector<std::string> labels_of(const Cover& c, const Simplex& s) { return c.names(s); }

}  // namespace

void parse_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, path + ": " + what);
}

void expect_keys(const Json& j, const std::string& path, const std::vector<std::string>& required,
                 const std::vector<std::string>& optional) {
  if (!j.is_object()) parse_fail(path, "expected an object");
  for (const auto& k : required)
    if (!j.contains(k)) parse_fail(path, "missing field \"" + k + "\"");
  for (const auto& [k, v] : j.items()) {
    if (std::find(required.begin(), required.end(), k) == required.end() &&
        std::find(optional.begin(), optional.end(), k) == optional.end())
      throw Error(ErrorCode::UnknownField, at(path, k) + ": unknown field");
  }
}

int get_int(const Json& j, const std::string& path, int lo, int hi) {
  if (!j.is_number_integer()) parse_fail(path, "expected an integer");
  long v = j.get<long>();
  if (v < lo || v > hi) parse_fail(path, "integer out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

double get_double(const Json& j, const std::string& path) {
  if (!j.is_number()) parse_fail(path, "expected a number");
  return j.get<double>();
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) parse_fail(path, "expected a string");
  return j.get<std::string>();
}

Json encode(const Scalar& s) {
  if (s.is_zero()) return "0";
  if (s.is_rational()) return s.coeff(0).re.get_str();
  Json out = Json::array();
  for (const auto& g : s.coeffs()) out.push_back(Json::array({g.re.get_str(), g.im.get_str()}));
  return out;
}

Scalar decode_scalar(const Json& j, const std::string& path) {
  if (!j.is_array()) return Scalar(decode_rational(j, path));
  std::vector<GaussRational> c;
  for (size_t k = 0; k < j.size(); ++k) {
    const Json& g = array_of(j[k], at(path, k), 2);
    c.emplace_back(decode_rational(g[0], at(at(path, k), 0)), decode_rational(g[1], at(at(path, k), 1)));
  }
  return Scalar(std::move(c));
}

Json encode(const Poly& p) {
  Json out = Json::array();
  for (const auto& [e, c] : p.terms()) out.push_back(Json::array({e, encode(c)}));
  return out;
}

Poly decode_poly(const Json& j, int dim, const std::string& path) {
  Poly p(dim);
  for (size_t k = 0; k < array_of(j, path).size(); ++k) {
    std::string pk = at(path, k);
    const Json& t = array_of(j[k], pk, 2);
    Exps e = decode_ints(t[0], at(pk, 0), 0, 64);
    if (static_cast<int>(e.size()) != dim) parse_fail(at(pk, 0), "exponent vector has the wrong length");
    p.add_term(e, decode_scalar(t[1], at(pk, 1)));
  }
  return p;
}

Json encode(const PolyForm& w) {
  Json terms = Json::array();
  for (const auto& [idx, f] : w.terms()) terms.push_back(Json::array({idx, encode(f)}));
  return Json{{"dim", w.dim()}, {"degree", w.degree()}, {"terms", terms}};
}

PolyForm decode_form(const Json& j, const std::string& path) {
  expect_keys(j, path, {"dim", "degree", "terms"});
  int n = get_int(j["dim"], at(path, "dim"), 0, 16);
  int p = get_int(j["degree"], at(path, "degree"), 0, n);
  PolyForm w(n, p);
  const Json& terms = array_of(j["terms"], at(path, "terms"));
  for (size_t k = 0; k < terms.size(); ++k) {
    std::string pk = at(at(path, "terms"), k);
    const Json& t = array_of(terms[k], pk, 2);
    Index idx = decode_ints(t[0], at(pk, 0), 0, n - 1);
    if (static_cast<int>(idx.size()) != p) parse_fail(at(pk, 0), "index count differs from the degree");
    w.add(idx, decode_poly(t[1], n, at(pk, 1)));
  }
  return w;
}

Json encode(const VectorField& V) {
  Json comps = Json::array();
  for (const auto& c : V.components()) comps.push_back(encode(c));
  return Json{{"dim", V.dim()}, {"components", comps}};
}

VectorField decode_field(const Json& j, const std::string& path) {
  expect_keys(j, path, {"dim", "components"});
  int n = get_int(j["dim"], at(path, "dim"), 1, 16);
  const Json& c = array_of(j["components"], at(path, "components"), static_cast<size_t>(n));
  std::vector<Poly> comps;
  for (int i = 0; i < n; ++i) comps.push_back(decode_poly(c[i], n, at(at(path, "components"), i)));
  return VectorField(comps);
}

Json encode(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx decode_complex(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  const Json& a = array_of(j, path, 2);
  return {get_double(a[0], at(path, 0)), get_double(a[1], at(path, 1))};
}

Json encode(const CMatrix& M) {
  return Json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", encode_data(M)}};
}

CMatrix decode_matrix(const Json& j, const std::string& path) {
  expect_keys(j, path, {"rows", "cols", "data"});
  int r = get_int(j["rows"], at(path, "rows"), 1, 4096);
  int c = get_int(j["cols"], at(path, "cols"), 1, 4096);
  return decode_data(j["data"], r, c, at(path, "data"));
}

Json encode(const MatForm& a) {
  Json terms = Json::array();
  for (const auto& [key, M] : a.terms()) terms.push_back(Json::array({key.first, key.second, encode_data(M)}));
  return Json{{"dim", a.dim()}, {"degree", a.degree()}, {"rows", a.rows()}, {"cols", a.cols()}, {"terms", terms}};
}

MatForm decode_matform(const Json& j, const std::string& path) {
  expect_keys(j, path, {"dim", "degree", "rows", "cols", "terms"});
  int n = get_int(j["dim"], at(path, "dim"), 1, 16);
  int p = get_int(j["degree"], at(path, "degree"), 0, n);
  int r = get_int(j["rows"], at(path, "rows"), 1, 4096);
  int c = get_int(j["cols"], at(path, "cols"), 1, 4096);
  MatForm a(n, p, r, c);
  const Json& terms = array_of(j["terms"], at(path, "terms"));
  for (size_t k = 0; k < terms.size(); ++k) {
    std::string pk = at(at(path, "terms"), k);
    const Json& t = array_of(terms[k], pk, 3);
    Index idx = decode_ints(t[0], at(pk, 0), 0, n - 1);
    if (static_cast<int>(idx.size()) != p || !std::is_sorted(idx.begin(), idx.end()) ||
        std::adjacent_find(idx.begin(), idx.end()) != idx.end())
      parse_fail(at(pk, 0), "expected strictly increasing indices, one per degree");
    Exps e = decode_ints(t[1], at(pk, 1), 0, 64);
    if (static_cast<int>(e.size()) != n) parse_fail(at(pk, 1), "exponent vector has the wrong length");
    a.add({idx, e}, decode_data(t[2], r, c, at(pk, 2)));
  }
  return a;
}

Json encode(const Cover& c) {
  Json nerve = Json::array();
  for (const auto& s : c.nerve())
    if (s.size() > 1) nerve.push_back(c.names(s));
  return Json{{"dim", c.dim()}, {"patches", c.labels()}, {"nerve", nerve}};
}

CoverPtr decode_cover(const Json& j, const std::string& path) {
  expect_keys(j, path, {"dim", "patches", "nerve"});
  int n = get_int(j["dim"], at(path, "dim"), 1, 16);
  std::vector<std::string> labels;
  for (size_t i = 0; i < array_of(j["patches"], at(path, "patches")).size(); ++i)
    labels.push_back(get_string(j["patches"][i], at(at(path, "patches"), i)));
  std::vector<std::vector<std::string>> nerve;
  const Json& nv = array_of(j["nerve"], at(path, "nerve"));
  for (size_t i = 0; i < nv.size(); ++i) {
    std::vector<std::string> face;
    for (size_t k = 0; k < array_of(nv[i], at(at(path, "nerve"), i)).size(); ++k)
      face.push_back(get_string(nv[i][k], at(at(at(path, "nerve"), i), k)));
    for (const auto& l : face)
      if (std::find(labels.begin(), labels.end(), l) == labels.end())
        throw Error(ErrorCode::BadReference, at(at(path, "nerve"), i) + ": unknown patch \"" + l + "\"");
    nerve.push_back(face);
  }
  try {
    return build_cover(n, labels, nerve);
  } catch (const Error& e) {
    parse_fail(path, e.what());
  }
}

Json encode(const CechCochain& c) {
  Json out = Json::array();
  for (const auto& [s, v] : c.entries) {
    if (v.is_zero()) continue;
    out.push_back(Json::array({labels_of(*c.cover, s), c.kind == ValueKind::U1 ? encode(v.as_poly()) : encode(v)}));
  }
  return out;
}

CechCochain decode_cochain(const Json& j, const CoverPtr& cover, int k, ValueKind kind, int form_degree,
                           const std::string& path) {
  CechCochain c = zero_cochain(cover, k, kind, form_degree);
  std::set<Simplex> seen;
  for (size_t i = 0; i < array_of(j, path).size(); ++i) {
    std::string pi = at(path, i);
    const Json& e = array_of(j[i], pi, 2);
    Simplex s;
    for (size_t m = 0; m < array_of(e[0], at(pi, 0)).size(); ++m) {
      std::string l = get_string(e[0][m], at(at(pi, 0), m));
      const auto& labels = cover->labels();
      if (std::find(labels.begin(), labels.end(), l) == labels.end())
        throw Error(ErrorCode::BadReference, at(at(pi, 0), m) + ": unknown patch \"" + l + "\"");
      s.push_back(cover->index_of(l));
    }
    if (static_cast<int>(s.size()) != k + 1) parse_fail(at(pi, 0), "simplex has the wrong number of patches");
    PolyForm v = kind == ValueKind::U1 ? PolyForm::from_poly(decode_poly(e[1], cover->dim(), at(pi, 1)))
                                       : decode_form(e[1], at(pi, 1));
    if (kind == ValueKind::Form && (v.degree() != form_degree || v.dim() != cover->dim()))
      parse_fail(at(pi, 1), "form has the wrong degree or dimension");
    // written in any vertex order: store with the sorting sign
    Simplex sorted = s;
    int sign = sort_sign(sorted);
    if (sign == 0) parse_fail(at(pi, 0), "repeated patch in a simplex");
    if (!cover->contains(sorted)) throw Error(ErrorCode::BadReference, at(pi, 0) + ": simplex is not in the nerve");
    if (!seen.insert(sorted).second) parse_fail(at(pi, 0), "duplicate simplex");
    c.entries[sorted] = sign > 0 ? v : -v;
  }
  return c;
}

Json encode(const ModelSection& s) {
  Json om = Json::array();
  for (const auto& w : s.omega) om.push_back(encode(w));
  return Json{{"n", s.n}, {"omega", om}};
}

ModelSection decode_section(const Json& j, const std::string& path) {
  expect_keys(j, path, {"n", "omega"});
  int n = get_int(j["n"], at(path, "n"), 1, 16);
  const Json& om = array_of(j["omega"], at(path, "omega"), static_cast<size_t>(n) * n);
  std::vector<PolyForm> w;
  for (size_t i = 0; i < om.size(); ++i) w.push_back(decode_form(om[i], at(at(path, "omega"), i)));
  try {
    return make_section(n, std::move(w));
  } catch (const Error& e) {
    parse_fail(path, e.what());
  }
}

Json encode(const SampledLoop& g) {
  Json samples = Json::array();
  for (int j = 0; j < g.size(); ++j) {
    Json row = Json::array();
    for (int i = 0; i < g.dim(); ++i) row.push_back(g.points()(j, i));
    samples.push_back(row);
  }
  return Json{{"dim", g.dim()},
              {"samples", samples},
              {"derivative", g.mode() == LoopDerivative::Spectral ? "spectral" : "fd4"}};
}

LoopDerivative decode_derivative(const Json& j, const std::string& path) {
  std::string d = get_string(j, path);
  if (d == "fd4") return LoopDerivative::FiniteDifference4;
  if (d == "spectral") return LoopDerivative::Spectral;
  parse_fail(path, "derivative must be \"fd4\" or \"spectral\"");
}

SampledLoop decode_loop_samples(const Json& j, const std::string& path) {
  expect_keys(j, path, {"dim", "samples"}, {"derivative"});
  int n = get_int(j["dim"], at(path, "dim"), 1, 16);
  const Json& s = array_of(j["samples"], at(path, "samples"));
  RMatrix x(static_cast<Eigen::Index>(s.size()), n);
  for (size_t k = 0; k < s.size(); ++k) x.row(k) = decode_vector(s[k], at(at(path, "samples"), k), n).transpose();
  LoopDerivative mode = j.contains("derivative") ? decode_derivative(j["derivative"], at(path, "derivative"))
                                                 : LoopDerivative::FiniteDifference4;
  try {
    return SampledLoop(x, mode);
  } catch (const Error& e) {
    parse_fail(path, e.what());
  }
}

Json encode(const TriangulatedSurface& S) {
  Json v = Json::array(), t = Json::array();
  for (Eigen::Index i = 0; i < S.vertices.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < S.vertices.cols(); ++c) row.push_back(S.vertices(i, c));
    v.push_back(row);
  }
  for (const auto& tri : S.triangles) t.push_back(Json::array({tri[0], tri[1], tri[2]}));
  Json out{{"vertices", v}, {"triangles", t}};
  if (S.sphere) {
    Json c = Json::array();
    for (Eigen::Index i = 0; i < S.sphere->center.size(); ++i) c.push_back(S.sphere->center(i));
    out["sphere"] = Json{{"center", c}, {"radius", S.sphere->radius}};
  }
  return out;
}

Json encode(const LoopFunctional& F) {
  switch (F.kind()) {
    case LoopFunctional::Kind::Constant:
      return Json{{"const", encode(F.value())}};
    case LoopFunctional::Kind::Exp:
      return Json{{"exp", Json{{"c", encode(F.coefficient())}, {"theta", encode(F.theta())}}}};
    case LoopFunctional::Kind::Product:
    case LoopFunctional::Kind::Sum: {
      Json parts = Json::array();
      for (const auto& p : F.parts()) parts.push_back(encode(p));
      return Json{{F.kind() == LoopFunctional::Kind::Product ? "product" : "sum", parts}};
    }
  }
  return Json();
}

LoopFunctional decode_functional(const Json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 1) parse_fail(path, "expected one of const / exp / product / sum");
  const std::string key = j.begin().key();
  const Json& v = j.begin().value();
  if (key == "const") return LoopFunctional::constant(decode_complex(v, at(path, key)));
  if (key == "exp") {
    expect_keys(v, at(path, key), {"c", "theta"});
    PolyForm theta = decode_form(v["theta"], at(at(path, key), "theta"));
    if (theta.degree() != 1) parse_fail(at(at(path, key), "theta"), "theta must be a 1-form");
    return LoopFunctional::exp_transgression(decode_scalar(v["c"], at(at(path, key), "c")), theta);
  }
  if (key == "product" || key == "sum") {
    std::vector<LoopFunctional> parts;
    for (size_t i = 0; i < array_of(v, at(path, key)).size(); ++i)
      parts.push_back(decode_functional(v[i], at(at(path, key), i)));
    return key == "product" ? LoopFunctional::product(parts) : LoopFunctional::sum(parts);
  }
  throw Error(ErrorCode::UnknownField, at(path, key) + ": unknown field");
}

Json encode(const Residual& r) { return Json{{"layer", r.layer}, {"simplex", r.simplex}, {"value", r.value}}; }

}  // namespace gerbelab::io
