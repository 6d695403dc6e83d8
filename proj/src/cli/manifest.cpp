#include "gerbelab/cli/manifest.hpp"

#include <chrono>
#include <cstdlib>
#include <random>
#include <sstream>

namespace gerbelab::cli {

using namespace io;

namespace {

const char* kVersion = "1";

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, size_t i) { return path + "[" + std::to_string(i) + "]"; }

struct CommandSpec {
  std::map<std::string, std::vector<std::string>> required, optional;  // role -> accepted object types
  std::vector<std::string> params;
};

const std::vector<std::string> kAllTypes{"cover",   "form", "field",      "gerbe",  "morphism",
                                         "plectic", "loop", "functional", "surface", "section"};

const std::map<std::string, CommandSpec>& specs() {
  static const std::map<std::string, CommandSpec> s{
      {"validate", {{{"object", kAllTypes}}, {}, {"tol", "fake_flat"}}},
      {"curvature", {{{"gerbe", {"gerbe"}}}, {{"expected", {"form"}}, {"plectic", {"plectic"}}}, {}}},
      {"dd", {{{"gerbe", {"gerbe"}}}, {}, {"trivializable"}}},
      {"hol-line", {{{"connection", {"form"}}, {"loop", {"loop"}}}, {}, {"expected", "tol"}}},
      {"hol-surface", {{{"gerbe", {"gerbe"}}, {"surface", {"surface"}}}, {}, {"mode", "expected", "tol"}}},
      {"hol-brane",
       {{{"rho", {"form"}}, {"morphism", {"morphism"}}, {"surface", {"surface"}}}, {}, {"expected", "tol", "steps"}}},
      {"transgress", {{}, {{"form", {"form"}}, {"loop", {"loop"}}}, {"tangents", "expected", "tol", "random", "eps", "samples"}}},
      {"homspace", {{{"omega", {"section"}}, {"eta", {"section"}}}, {}, {"degree", "expected"}}},
      {"ks-check",
       {{{"plectic", {"plectic"}}, {"gerbe", {"gerbe"}}},
        {{"alpha", {"form"}}, {"beta", {"form"}}, {"functional", {"functional"}}, {"loop", {"loop"}}},
        {"eps", "tol", "random", "samples"}}},
  };
  return s;
}

struct GerbeData {
  CoverPtr cover;
  CechCochain g, A, B;
};

struct SurfaceData {
  TriangulatedSurface S;
  std::optional<Json> assignment;
};

class Context {
 public:
  Context(const Manifest& m, const RunOptions& opt) : m_(m), opt_(opt) {}

  const Object& object(const std::string& name, const std::string& path) const {
    auto it = m_.objects.find(name);
    if (it == m_.objects.end()) throw Error(ErrorCode::BadReference, path + ": no object named \"" + name + "\"");
    return it->second;
  }
  const Object& typed(const std::string& name, const std::string& type, const std::string& path) const {
    const Object& o = object(name, path);
    if (o.type != type)
      throw Error(ErrorCode::BadReference, path + ": \"" + name + "\" is a " + o.type + ", expected a " + type);
    return o;
  }
  std::string opath(const std::string& name) const { return "$.objects." + name + ".value"; }

  CoverPtr cover(const std::string& name, const std::string& path) const {
    return decode_cover(typed(name, "cover", path).value, opath(name));
  }
  PolyForm form(const std::string& name, const std::string& path) const {
    return decode_form(typed(name, "form", path).value, opath(name));
  }

  GerbeData gerbe_data(const std::string& name, const std::string& path) const {
    const Json& v = typed(name, "gerbe", path).value;
    const std::string p = opath(name);
    if (v.contains("rho")) {
      expect_keys(v, p, {"rho"});
      PolyForm rho = decode_form(v["rho"], at(p, "rho"));
      if (rho.degree() != 2) parse_fail(at(p, "rho"), "rho must be a 2-form");
      LocalGerbe L = trivial_gerbe(rho);
      return {L.cover, L.g, L.A, L.B};
    }
    expect_keys(v, p, {"cover", "g", "A", "B"});
    CoverPtr c = cover(get_string(v["cover"], at(p, "cover")), at(p, "cover"));
    return {c, decode_cochain(v["g"], c, 2, ValueKind::U1, 0, at(p, "g")),
            decode_cochain(v["A"], c, 1, ValueKind::Form, 1, at(p, "A")),
            decode_cochain(v["B"], c, 0, ValueKind::Form, 2, at(p, "B"))};
  }
  LocalGerbe gerbe(const std::string& name, const std::string& path) const {
    GerbeData d = gerbe_data(name, path);
    return make_gerbe(d.cover, d.g, d.A, d.B);
  }

  // built without validation; check_morphism reports on it
  GerbeMorphism morphism(const std::string& name, const std::string& path) const {
    const Json& v = typed(name, "morphism", path).value;
    const std::string p = opath(name);
    expect_keys(v, p, {"source", "target", "rank", "alpha", "a"});
    GerbeData s = gerbe_data(get_string(v["source"], at(p, "source")), at(p, "source"));
    GerbeData t = gerbe_data(get_string(v["target"], at(p, "target")), at(p, "target"));
    if (!same_cover(s.cover, t.cover) && !(*s.cover == *t.cover))
      parse_fail(p, "source and target gerbes live on different covers");
    GerbeMorphism E;
    E.source = LocalGerbe{s.cover, s.g, s.A, s.B, {}};
    E.target = LocalGerbe{s.cover, t.g, t.A, t.B, {}};
    E.rank = get_int(v["rank"], at(p, "rank"), 1, 64);
    const Json& alpha = v["alpha"];
    if (!alpha.is_array()) parse_fail(at(p, "alpha"), "expected an array");
    for (size_t i = 0; i < alpha.size(); ++i) {
      std::string pi = at(at(p, "alpha"), i);
      if (!alpha[i].is_array() || alpha[i].size() != 2) parse_fail(pi, "expected [[patch, patch], matrix]");
      Simplex sx = simplex(s.cover, alpha[i][0], at(pi, 0), 2);
      CMatrix M = decode_matrix(alpha[i][1], at(pi, 1));
      if (M.rows() != E.rank || M.cols() != E.rank) parse_fail(at(pi, 1), "matrix size differs from the rank");
      if (sx[0] > sx[1]) {
        std::swap(sx[0], sx[1]);
        M = M.inverse().eval();
      }
      E.alpha[sx] = M;
    }
    const Json& a = v["a"];
    if (!a.is_array()) parse_fail(at(p, "a"), "expected an array");
    for (size_t i = 0; i < a.size(); ++i) {
      std::string pi = at(at(p, "a"), i);
      if (!a[i].is_array() || a[i].size() != 2) parse_fail(pi, "expected [patch, matrix form]");
      Simplex sx = simplex(s.cover, Json::array({a[i][0]}), at(pi, 0), 1);
      MatForm m = decode_matform(a[i][1], at(pi, 1));
      if (m.rows() != E.rank || m.cols() != E.rank || m.degree() != 1 || m.dim() != s.cover->dim())
        parse_fail(at(pi, 1), "connection must be a rank x rank 1-form on the cover's space");
      E.a[sx[0]] = m;
    }
    for (const auto& pair : s.cover->simplices(1))
      if (!E.alpha.count(pair)) E.alpha[pair] = CMatrix::Identity(E.rank, E.rank);
    for (int c = 0; c < s.cover->size(); ++c)
      if (!E.a.count(c)) E.a[c] = MatForm(s.cover->dim(), 1, E.rank, E.rank);
    return E;
  }

  PolyForm plectic_form(const std::string& name, const std::string& path) const {
    const Json& v = typed(name, "plectic", path).value;
    expect_keys(v, opath(name), {"omega"});
    return decode_form(v["omega"], at(opath(name), "omega"));
  }

  SampledLoop loop(const std::string& name, const std::string& path) const {
    const Json& v = typed(name, "loop", path).value;
    const std::string p = opath(name);
    if (!v.is_object() || !v.contains("fourier")) return decode_loop_samples(v, p);
    expect_keys(v, p, {"dim", "fourier"}, {"derivative"});
    int n = get_int(v["dim"], at(p, "dim"), 1, 16);
    LoopDerivative mode = LoopDerivative::FiniteDifference4;
    if (v.contains("derivative")) {
      std::string d = get_string(v["derivative"], at(p, "derivative"));
      if (d == "spectral") mode = LoopDerivative::Spectral;
      else if (d != "fd4") parse_fail(at(p, "derivative"), "derivative must be \"fd4\" or \"spectral\"");
    }
    const Json& f = v["fourier"];
    const std::string pf = at(p, "fourier");
    expect_keys(f, pf, {"N", "center", "modes"});
    int N = opt_.samples ? *opt_.samples : get_int(f["N"], at(pf, "N"), 16, 1 << 20);
    RVector c = vector(f["center"], at(pf, "center"), n);
    std::vector<std::tuple<int, RVector, RVector>> modes;
    if (!f["modes"].is_array()) parse_fail(at(pf, "modes"), "expected an array");
    for (size_t i = 0; i < f["modes"].size(); ++i) {
      const Json& md = f["modes"][i];
      std::string pm = at(at(pf, "modes"), i);
      expect_keys(md, pm, {"k", "cos", "sin"});
      modes.emplace_back(get_int(md["k"], at(pm, "k"), 1, 1 << 16), vector(md["cos"], at(pm, "cos"), n),
                         vector(md["sin"], at(pm, "sin"), n));
    }
    try {
      return SampledLoop::sample(
          n, N,
          [&](double t) {
            RVector x = c;
            for (const auto& [k, a, b] : modes) x += std::cos(2 * M_PI * k * t) * a + std::sin(2 * M_PI * k * t) * b;
            return x;
          },
          mode);
    } catch (const Error& e) {
      parse_fail(pf, e.what());
    }
  }

  SurfaceData surface(const std::string& name, const std::string& path) const {
    const Json& v = typed(name, "surface", path).value;
    const std::string p = opath(name);
    if (v.is_object() && v.contains("icosphere")) {
      expect_keys(v, p, {"icosphere"});
      const Json& g = v["icosphere"];
      expect_keys(g, at(p, "icosphere"), {"subdivisions", "radius"});
      return {icosphere(get_int(g["subdivisions"], at(at(p, "icosphere"), "subdivisions"), 0, 7),
                        get_double(g["radius"], at(at(p, "icosphere"), "radius"))),
              std::nullopt};
    }
    if (v.is_object() && v.contains("disc")) {
      expect_keys(v, p, {"disc"});
      const Json& g = v["disc"];
      const std::string pd = at(p, "disc");
      expect_keys(g, pd, {"rings", "segments", "radius"});
      return {flat_disc(get_int(g["rings"], at(pd, "rings"), 1, 1024), get_int(g["segments"], at(pd, "segments"), 3, 1 << 16),
                        get_double(g["radius"], at(pd, "radius"))),
              std::nullopt};
    }
    expect_keys(v, p, {"vertices", "triangles"}, {"sphere", "assignment"});
    SurfaceData d;
    const Json& vs = v["vertices"];
    if (!vs.is_array() || vs.empty()) parse_fail(at(p, "vertices"), "expected a non-empty array");
    const int n = vs[0].is_array() ? static_cast<int>(vs[0].size()) : 0;
    if (n < 2) parse_fail(at(p, "vertices"), "vertices need at least two coordinates");
    d.S.vertices.resize(static_cast<Eigen::Index>(vs.size()), n);
    for (size_t i = 0; i < vs.size(); ++i) d.S.vertices.row(i) = vector(vs[i], at(at(p, "vertices"), i), n).transpose();
    const Json& ts = v["triangles"];
    if (!ts.is_array()) parse_fail(at(p, "triangles"), "expected an array");
    for (size_t i = 0; i < ts.size(); ++i) {
      std::string pt = at(at(p, "triangles"), i);
      if (!ts[i].is_array() || ts[i].size() != 3) parse_fail(pt, "expected three vertex indices");
      std::array<int, 3> t{};
      for (int k = 0; k < 3; ++k) t[k] = get_int(ts[i][k], at(pt, k), 0, static_cast<int>(vs.size()) - 1);
      d.S.triangles.push_back(t);
    }
    if (v.contains("sphere")) {
      const Json& s = v["sphere"];
      expect_keys(s, at(p, "sphere"), {"center", "radius"});
      d.S.sphere = SphereChart{vector(s["center"], at(at(p, "sphere"), "center"), n),
                               get_double(s["radius"], at(at(p, "sphere"), "radius"))};
    }
    if (v.contains("assignment")) {
      const Json& a = v["assignment"];
      const std::string pa = at(p, "assignment");
      expect_keys(a, pa, {"triangle", "edge", "vertex"});
      if (!a["triangle"].is_array() || a["triangle"].size() != ts.size())
        parse_fail(at(pa, "triangle"), "one label per triangle");
      if (!a["vertex"].is_array() || a["vertex"].size() != vs.size()) parse_fail(at(pa, "vertex"), "one label per vertex");
      if (!a["edge"].is_array()) parse_fail(at(pa, "edge"), "expected an array");
      d.assignment = a;
    }
    return d;
  }

  // labelled assignment -> patch indices of the given cover
  SurfacePatches patches(const Json& a, const CoverPtr& cover, const std::string& path) const {
    auto index = [&](const Json& l, const std::string& p) {
      std::string s = get_string(l, p);
      const auto& labels = cover->labels();
      auto it = std::find(labels.begin(), labels.end(), s);
      if (it == labels.end()) throw Error(ErrorCode::BadReference, p + ": unknown patch \"" + s + "\"");
      return static_cast<int>(it - labels.begin());
    };
    SurfacePatches P;
    for (size_t i = 0; i < a["triangle"].size(); ++i) P.triangle.push_back(index(a["triangle"][i], at(at(path, "triangle"), i)));
    for (size_t i = 0; i < a["vertex"].size(); ++i) P.vertex.push_back(index(a["vertex"][i], at(at(path, "vertex"), i)));
    for (size_t i = 0; i < a["edge"].size(); ++i) {
      const Json& e = a["edge"][i];
      std::string pe = at(at(path, "edge"), i);
      if (!e.is_array() || e.size() != 2 || !e[0].is_array() || e[0].size() != 2) parse_fail(pe, "expected [[u, v], patch]");
      int u = get_int(e[0][0], at(pe, 0)), w = get_int(e[0][1], at(pe, 0));
      P.edge[{std::min(u, w), std::max(u, w)}] = index(e[1], at(pe, 1));
    }
    return P;
  }

  LoopFunctional functional(const std::string& name, const std::string& path) const {
    return decode_functional(typed(name, "functional", path).value, opath(name));
  }
  ModelSection section(const std::string& name, const std::string& path) const {
    return decode_section(typed(name, "section", path).value, opath(name));
  }

  // structural decode of any object
  void check(const std::string& name) const {
    const std::string& type = object(name, "$.objects").type;
    const std::string p = "$.objects." + name;
    if (type == "cover") cover(name, p);
    else if (type == "form") form(name, p);
    else if (type == "field") decode_field(object(name, p).value, opath(name));
    else if (type == "gerbe") gerbe_data(name, p);
    else if (type == "morphism") morphism(name, p);
    else if (type == "plectic") plectic_form(name, p);
    else if (type == "loop") loop(name, p);
    else if (type == "surface") surface(name, p);
    else if (type == "functional") functional(name, p);
    else if (type == "section") section(name, p);
    else parse_fail(at(p, "type"), "unknown object type \"" + type + "\"");
  }

 private:
  Simplex simplex(const CoverPtr& c, const Json& j, const std::string& path, size_t size) const {
    if (!j.is_array() || j.size() != size) parse_fail(path, "expected " + std::to_string(size) + " patch labels");
    Simplex s;
    for (size_t i = 0; i < size; ++i) {
      std::string l = get_string(j[i], at(path, i));
      const auto& labels = c->labels();
      auto it = std::find(labels.begin(), labels.end(), l);
      if (it == labels.end()) throw Error(ErrorCode::BadReference, at(path, i) + ": unknown patch \"" + l + "\"");
      s.push_back(static_cast<int>(it - labels.begin()));
    }
    Simplex sorted = s;
    if (sort_sign(sorted) == 0) parse_fail(path, "repeated patch");
    if (!c->contains(sorted)) throw Error(ErrorCode::BadReference, path + ": not in the nerve");
    return s;
  }
  static RVector vector(const Json& j, const std::string& path, int n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n) parse_fail(path, "expected " + std::to_string(n) + " numbers");
    RVector v(n);
    for (int i = 0; i < n; ++i) v(i) = get_double(j[i], at(path, i));
    return v;
  }

  const Manifest& m_;
  const RunOptions& opt_;
};

// ---- random instances for seeded tasks

using Rng = std::mt19937_64;

Scalar rand_coeff(Rng& rng) {
  std::uniform_int_distribution<long> num(-3, 3), den(1, 3);
  long a = num(rng);
  if (a == 0) a = 1;
  return Scalar::rational(a, den(rng));
}

Poly rand_poly(Rng& rng, int n, int max_deg, int nterms) {
  std::uniform_int_distribution<int> var(0, n - 1), deg(0, max_deg);
  Poly p(n);
  for (int t = 0; t < nterms; ++t) {
    Exps e(n, 0);
    for (int d = deg(rng); d > 0; --d) ++e[var(rng)];
    p.add_term(e, rand_coeff(rng));
  }
  return p;
}

PolyForm rand_form(Rng& rng, int n, int p, int max_deg, int nterms) {
  std::uniform_int_distribution<int> var(0, n - 1);
  PolyForm w(n, p);
  for (int t = 0; t < nterms; ++t) {
    Index idx;
    while (static_cast<int>(idx.size()) < p) {
      int i = var(rng);
      if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
    }
    w.add(idx, rand_poly(rng, n, max_deg, 1));
  }
  return Scalar::rational(1, 4) * w;
}

VectorField rand_field(Rng& rng, int n) {
  std::vector<Poly> c;
  for (int i = 0; i < n; ++i) c.push_back(Scalar::rational(1, 2) * rand_poly(rng, n, 2, 2));
  return VectorField(c);
}

SampledLoop rand_loop(Rng& rng, int n, int N) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd c(n, 7);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 7; ++k) c(i, k) = (k == 0 ? 0.5 : 0.15) * u(rng);
  return SampledLoop::sample(
      n, N,
      [&](double t) {
        RVector x = c.col(0);
        for (int k = 1; k <= 3; ++k)
          x += std::cos(2 * M_PI * k * t) * c.col(2 * k - 1) + std::sin(2 * M_PI * k * t) * c.col(2 * k);
        return x;
      },
      LoopDerivative::Spectral);
}

// ---- task runners

class Runner {
 public:
  Runner(const Context& ctx, const RunOptions& opt, const Task& t, size_t index)
      : ctx_(ctx), opt_(opt), t_(t), rng_(opt.seed ^ (0x9e3779b97f4a7c15ULL * (index + 1))) {}

  void run(TaskResult& r) {
    const std::string& c = t_.command;
    if (c == "validate") validate(r);
    else if (c == "curvature") curvature(r);
    else if (c == "dd") dd(r);
    else if (c == "hol-line") hol_line(r);
    else if (c == "hol-surface") hol_surface(r);
    else if (c == "hol-brane") hol_brane(r);
    else if (c == "transgress") transgress(r);
    else if (c == "homspace") homspace(r);
    else if (c == "ks-check") ks_check(r);
  }

 private:
  std::string ref_path(const std::string& role) const { return "task \"" + t_.name + "\" refs." + role; }
  const std::string& ref(const std::string& role) const { return t_.refs.at(role); }
  bool has_ref(const std::string& role) const { return t_.refs.count(role) > 0; }

  double tol(double def) const {
    if (opt_.tol) return *opt_.tol;
    return t_.params.contains("tol") ? t_.params["tol"].get<double>() : def;
  }
  double eps(double def) const {
    if (opt_.eps) return *opt_.eps;
    return t_.params.contains("eps") ? t_.params["eps"].get<double>() : def;
  }
  int samples(int def) const {
    if (opt_.samples) return *opt_.samples;
    return t_.params.contains("samples") ? t_.params["samples"].get<int>() : def;
  }

  // relative error against params.expected when present
  void compare(TaskResult& r, cplx v, double tolerance) const {
    r.values["value"] = encode(v);
    if (!t_.params.contains("expected")) return;
    cplx e = decode_complex(t_.params["expected"], "params.expected");
    double err = std::abs(e) > 0 ? std::abs(v - e) / std::abs(e) : std::abs(v);
    r.values["error"] = err;
    r.values["tol"] = tolerance;
    if (!(err <= tolerance)) {
      r.status = Status::Fail;
      std::ostringstream os;
      os.precision(17);
      os << "relative error " << err << " exceeds " << tolerance;
      r.message = os.str();
    }
  }

  void fail_with(TaskResult& r, std::vector<Residual> res, std::optional<ErrorCode> code) const {
    r.residuals = std::move(res);
    if (code) {
      r.status = Status::Fail;
      r.values["failure"] = gerbelab::to_string(*code);
    }
  }

  void validate(TaskResult& r) {
    const std::string& name = ref("object");
    const std::string& type = ctx_.object(name, ref_path("object")).type;
    r.values["type"] = type;
    if (type == "gerbe") {
      GerbeData d = ctx_.gerbe_data(name, ref_path("object"));
      GerbeReport rep = validate_gerbe(d.cover, d.g, d.A, d.B);
      fail_with(r, rep.residuals, rep.failure);
      if (!rep.ok && r.status == Status::Pass) r.status = Status::Fail;
    } else if (type == "morphism") {
      GerbeMorphism E = ctx_.morphism(name, ref_path("object"));
      bool fake = t_.params.value("fake_flat", false);
      MorphismReport rep = check_morphism(E, tol(kTauU), fake);
      fail_with(r, rep.residuals, rep.failure);
      if (!rep.ok && r.status == Status::Pass) r.status = Status::Fail;
    } else if (type == "plectic") {
      PlecticSpace P = make_plectic(ctx_.plectic_form(name, ref_path("object")));
      r.values["constant_coefficients"] = P.constant_coefficients;
    } else if (type == "surface") {
      SurfaceData s = ctx_.surface(name, ref_path("object"));
      r.values["closed"] = is_closed(s.S);
      r.values["triangles"] = s.S.triangles.size();
    } else if (type == "loop") {
      SampledLoop g = ctx_.loop(name, ref_path("object"));
      r.values["samples"] = g.size();
    } else {
      ctx_.check(name);
    }
  }

  void curvature(TaskResult& r) {
    LocalGerbe L = ctx_.gerbe(ref("gerbe"), ref_path("gerbe"));
    const PolyForm& H = curvature_3form(L);
    r.values["H"] = encode(H);
    if (has_ref("expected")) {
      PolyForm e = ctx_.form(ref("expected"), ref_path("expected"));
      if (H != e) {
        r.status = Status::Fail;
        r.residuals.push_back({"curvature", {}, (H - e).str()});
      }
    }
    if (has_ref("plectic")) {
      PlecticSpace P = make_plectic(ctx_.plectic_form(ref("plectic"), ref_path("plectic")));
      PrequantumReport q = prequantum_check(P, L);
      r.values["prequantum"] = q.ok;
      if (!q.ok) {
        r.status = Status::Fail;
        r.residuals.push_back({"prequantum", {}, q.difference.str()});
      }
    }
  }

  void dd(TaskResult& r) {
    LocalGerbe L = ctx_.gerbe(ref("gerbe"), ref_path("gerbe"));
    r.values["cocycle"] = encode(dd_cocycle(L));
    bool trivial = find_trivialization(L).has_value();
    r.values["trivializable"] = trivial;
    if (t_.params.contains("trivializable") && t_.params["trivializable"].get<bool>() != trivial) {
      r.status = Status::Fail;
      r.message = trivial ? "class is trivial in the constant regime" : "no constant trivialization found";
    }
  }

  void hol_line(TaskResult& r) {
    PolyForm A = ctx_.form(ref("connection"), ref_path("connection"));
    SampledLoop g = ctx_.loop(ref("loop"), ref_path("loop"));
    cplx h = line_holonomy(A, g);
    r.values["modulus"] = std::abs(h);
    compare(r, h, tol(1e-8));
  }

  void hol_surface(TaskResult& r) {
    LocalGerbe L = ctx_.gerbe(ref("gerbe"), ref_path("gerbe"));
    SurfaceData s = ctx_.surface(ref("surface"), ref_path("surface"));
    std::string mode = t_.params.value("mode", std::string("trivialized"));
    if (mode != "trivialized" && mode != "local") parse_fail("params.mode", "mode must be trivialized or local");
    if (s.assignment) s.S.patches = ctx_.patches(*s.assignment, L.cover, ctx_.opath(ref("surface")) + ".assignment");
    cplx h = surface_holonomy(L, s.S, mode == "local" ? HolonomyMode::Local : HolonomyMode::Trivialized);
    compare(r, h, tol(1e-3));
  }

  void hol_brane(TaskResult& r) {
    PolyForm rho = ctx_.form(ref("rho"), ref_path("rho"));
    GerbeMorphism E = ctx_.morphism(ref("morphism"), ref_path("morphism"));
    SurfaceData s = ctx_.surface(ref("surface"), ref_path("surface"));
    int steps = t_.params.value("steps", 8);
    compare(r, dbrane_holonomy(rho, E, s.S, steps), tol(1e-3));
  }

  void transgress(TaskResult& r) {
    if (t_.params.contains("random")) {
      int k = t_.params["random"].get<int>();
      double worst = 0;
      for (int i = 0; i < k; ++i) {
        PolyForm w = rand_form(rng_, 3, 2, 2, 3);
        SampledLoop g = rand_loop(rng_, 3, samples(256));
        std::vector<VectorField> V{rand_field(rng_, 3), rand_field(rng_, 3)};
        cplx lhs = transgression_d(w, g, V, eps(1e-4));
        cplx rhs = transgress_form(exterior_derivative(w), g, {pullback_tangent(V[0], g), pullback_tangent(V[1], g)});
        worst = std::max(worst, std::abs(lhs - rhs));
      }
      r.values["instances"] = k;
      r.values["max_residual"] = worst;
      if (!(worst <= tol(1e-5))) r.status = Status::Fail;
      return;
    }
    if (!has_ref("form") || !has_ref("loop")) parse_fail("task \"" + t_.name + "\"", "transgress needs refs form and loop");
    PolyForm w = ctx_.form(ref("form"), ref_path("form"));
    SampledLoop g = ctx_.loop(ref("loop"), ref_path("loop"));
    std::vector<LoopTangent> Xs;
    if (t_.params.contains("tangents")) {
      const Json& ts = t_.params["tangents"];
      for (size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] == "position") {
          Xs.push_back(g.points());
        } else if (ts[i] == "velocity") {
          Xs.push_back(g.velocity());
        } else {
          if (!ts[i].is_array() || static_cast<int>(ts[i].size()) != g.dim())
            parse_fail("params.tangents[" + std::to_string(i) + "]", "expected a constant vector, \"position\" or \"velocity\"");
          LoopTangent X(g.size(), g.dim());
          for (int c = 0; c < g.dim(); ++c) X.col(c).setConstant(ts[i][c].get<double>());
          Xs.push_back(X);
        }
      }
    }
    compare(r, transgress_form(w, g, Xs), tol(1e-10));
  }

  void homspace(TaskResult& r) {
    ModelSection a = ctx_.section(ref("omega"), ref_path("omega"));
    ModelSection b = ctx_.section(ref("eta"), ref_path("eta"));
    int degree = opt_.degree ? *opt_.degree : t_.params.value("degree", 2);
    int dim = static_cast<int>(hom_space(a, b, degree).size());
    r.values["dimension"] = dim;
    r.values["degree"] = degree;
    if (t_.params.contains("expected") && t_.params["expected"].get<int>() != dim) {
      r.status = Status::Fail;
      r.message = "dimension " + std::to_string(dim) + " differs from " + std::to_string(t_.params["expected"].get<int>());
    }
  }

  double ks_residual(const PlecticSpace& P, const PolyForm& rho, const PolyForm& a, const PolyForm& b,
                     const LoopFunctional& psi, const SampledLoop& g, double e) const {
    LoopFn Pa = ks_operator(P, rho, a, psi.fn(), e), Pb = ks_operator(P, rho, b, psi.fn(), e);
    cplx comm = ks_operator(P, rho, a, Pb, e)(g) - ks_operator(P, rho, b, Pa, e)(g);
    cplx br = ks_operator(P, rho, bracket_forms(P, a, b), psi.fn(), e)(g);
    return std::abs(comm - br) / std::abs(psi(g));
  }

  void ks_check(TaskResult& r) {
    PlecticSpace P = make_plectic(ctx_.plectic_form(ref("plectic"), ref_path("plectic")));
    LocalGerbe L = ctx_.gerbe(ref("gerbe"), ref_path("gerbe"));
    PolyForm rho;
    if (L.cover->size() == 1) {
      rho = L.B.at({0});
    } else {
      auto T = find_trivialization(L);
      if (!T) throw Error(ErrorCode::InvalidArgument, "ks-check needs a trivializable gerbe");
      rho = T->rho;
    }
    const double e = eps(1e-3);
    double worst = 0;
    int k = 0;
    if (t_.params.contains("random")) {
      k = t_.params["random"].get<int>();
      for (int i = 0; i < k; ++i) {
        PolyForm a = rand_form(rng_, P.n, 1, 3, 3), b = rand_form(rng_, P.n, 1, 3, 3);
        LoopFunctional psi = LoopFunctional::exp_transgression(Scalar::i(), rand_form(rng_, P.n, 1, 2, 3));
        worst = std::max(worst, ks_residual(P, rho, a, b, psi, rand_loop(rng_, P.n, samples(256)), e));
      }
    } else {
      for (const char* role : {"alpha", "beta", "functional", "loop"})
        if (!has_ref(role)) parse_fail("task \"" + t_.name + "\"", std::string("ks-check needs ref ") + role);
      k = 1;
      worst = ks_residual(P, rho, ctx_.form(ref("alpha"), ref_path("alpha")), ctx_.form(ref("beta"), ref_path("beta")),
                          ctx_.functional(ref("functional"), ref_path("functional")), ctx_.loop(ref("loop"), ref_path("loop")),
                          e);
    }
    r.values["instances"] = k;
    r.values["max_relative_residual"] = worst;
    if (!(worst <= tol(1e-3))) r.status = Status::Fail;
  }

  const Context& ctx_;
  const RunOptions& opt_;
  const Task& t_;
  Rng rng_;
};

void check_task(const Manifest& m, const Task& t, size_t i) {
  const std::string p = at("$.tasks", i);
  auto it = specs().find(t.command);
  if (it == specs().end()) parse_fail(at(p, "command"), "unknown command \"" + t.command + "\"");
  const CommandSpec& s = it->second;
  for (const auto& [role, types] : s.required)
    if (!t.refs.count(role)) parse_fail(at(p, "refs"), "missing ref \"" + role + "\"");
  for (const auto& [role, name] : t.refs) {
    const std::vector<std::string>* types = nullptr;
    if (s.required.count(role)) types = &s.required.at(role);
    else if (s.optional.count(role)) types = &s.optional.at(role);
    else throw Error(ErrorCode::UnknownField, at(at(p, "refs"), role) + ": unknown field");
    auto o = m.objects.find(name);
    if (o == m.objects.end())
      throw Error(ErrorCode::BadReference, at(at(p, "refs"), role) + ": no object named \"" + name + "\"");
    if (std::find(types->begin(), types->end(), o->second.type) == types->end())
      throw Error(ErrorCode::BadReference, at(at(p, "refs"), role) + ": \"" + name + "\" has type " + o->second.type);
  }
  for (const auto& [k, v] : t.params.items()) {
    if (std::find(s.params.begin(), s.params.end(), k) == s.params.end())
      throw Error(ErrorCode::UnknownField, at(at(p, "params"), k) + ": unknown field");
    const std::string pk = at(at(p, "params"), k);
    if (k == "tol" || k == "eps") {
      if (!v.is_number() || !(v.get<double>() > 0)) parse_fail(pk, "expected a positive number");
    } else if (k == "random" || k == "steps" || k == "degree") {
      get_int(v, pk, k == "degree" ? 0 : 1, 1000);
    } else if (k == "samples") {
      int n = get_int(v, pk, 16, 1 << 20);
      if (n % 2) parse_fail(pk, "samples must be even");
    } else if (k == "expected") {
      if (t.command == "homspace") get_int(v, pk, 0, 1 << 20);
      else decode_complex(v, pk);
    } else if (k == "fake_flat" || k == "trivializable") {
      if (!v.is_boolean()) parse_fail(pk, "expected true or false");
    } else if (k == "mode") {
      std::string mode = get_string(v, pk);
      if (mode != "trivialized" && mode != "local") parse_fail(pk, "mode must be trivialized or local");
    } else if (k == "tangents") {
      if (!v.is_array()) parse_fail(pk, "expected an array");
    }
  }
}

std::string compact(const Json& j) {
  std::string s = j.dump();
  if (s.size() > 160) s = s.substr(0, 157) + "...";
  return s;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"validate",  "curvature",  "dd",       "hol-line", "hol-surface",
                                          "hol-brane", "transgress", "homspace", "ks-check", "suite"};
  return c;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Pass:
      return "pass";
    case Status::Fail:
      return "fail";
    case Status::Error:
      return "error";
  }
  return "error";
}

Manifest parse_manifest(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("$: ") + e.what());
  }
  expect_keys(j, "$", {"version"}, {"objects", "tasks"});
  Manifest m;
  m.version = get_string(j["version"], "$.version");
  if (j.contains("objects")) {
    if (!j["objects"].is_object()) parse_fail("$.objects", "expected an object");
    for (const auto& [name, o] : j["objects"].items()) {
      const std::string p = "$.objects." + name;
      expect_keys(o, p, {"type", "value"});
      std::string type = get_string(o["type"], at(p, "type"));
      if (std::find(kAllTypes.begin(), kAllTypes.end(), type) == kAllTypes.end())
        parse_fail(at(p, "type"), "unknown object type \"" + type + "\"");
      m.objects[name] = {type, o["value"]};
    }
  }
  if (j.contains("tasks")) {
    if (!j["tasks"].is_array()) parse_fail("$.tasks", "expected an array");
    for (size_t i = 0; i < j["tasks"].size(); ++i) {
      const Json& t = j["tasks"][i];
      const std::string p = at("$.tasks", i);
      expect_keys(t, p, {"name", "command"}, {"refs", "params"});
      Task task;
      task.name = get_string(t["name"], at(p, "name"));
      task.command = get_string(t["command"], at(p, "command"));
      if (t.contains("refs")) {
        if (!t["refs"].is_object()) parse_fail(at(p, "refs"), "expected an object");
        for (const auto& [role, name] : t["refs"].items()) task.refs[role] = get_string(name, at(at(p, "refs"), role));
      }
      if (t.contains("params")) {
        if (!t["params"].is_object()) parse_fail(at(p, "params"), "expected an object");
        task.params = t["params"];
      }
      m.tasks.push_back(std::move(task));
    }
  }
  RunOptions opt;
  Context ctx(m, opt);
  for (const auto& [name, o] : m.objects) ctx.check(name);
  for (size_t i = 0; i < m.tasks.size(); ++i) check_task(m, m.tasks[i], i);
  return m;
}

Json manifest_to_json(const Manifest& m) {
  Json objects = Json::object();
  for (const auto& [name, o] : m.objects) objects[name] = Json{{"type", o.type}, {"value", o.value}};
  Json tasks = Json::array();
  for (const auto& t : m.tasks) {
    Json jt{{"name", t.name}, {"command", t.command}};
    if (!t.refs.empty()) jt["refs"] = t.refs;
    if (!t.params.empty()) jt["params"] = t.params;
    tasks.push_back(jt);
  }
  return Json{{"version", m.version}, {"objects", objects}, {"tasks", tasks}};
}

std::string serialize_manifest(const Manifest& m) { return manifest_to_json(m).dump(2) + "\n"; }

bool Report::all_pass() const {
  for (const auto& t : tasks)
    if (t.status != Status::Pass) return false;
  return true;
}

uint64_t seed_from_env() {
  const char* s = std::getenv("GERBELAB_SEED");
  if (!s || !*s) return kDefaultSeed;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "GERBELAB_SEED must be an unsigned integer");
  }
}

Report run(const Manifest& m, const RunOptions& opt) {
  Report rep;
  rep.version = kVersion;
  Context ctx(m, opt);
  for (size_t i = 0; i < m.tasks.size(); ++i) {
    const Task& t = m.tasks[i];
    if (opt.only_command && t.command != *opt.only_command) continue;
    TaskResult r;
    r.name = t.name;
    r.command = t.command;
    auto start = std::chrono::steady_clock::now();
    try {
      Runner(ctx, opt, t, i).run(r);
    } catch (const Error& e) {
      r.status = Status::Error;
      r.message = e.what();
      r.residuals = e.residuals();
      r.values["failure"] = gerbelab::to_string(e.code());
    } catch (const std::exception& e) {
      r.status = Status::Error;
      r.message = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.tasks.push_back(std::move(r));
  }
  return rep;
}

std::string emit_report(const Report& r, Format f, bool timings) {
  int pass = 0, fail = 0, error = 0;
  for (const auto& t : r.tasks) (t.status == Status::Pass ? pass : t.status == Status::Fail ? fail : error)++;
  if (f == Format::Json) {
    Json tasks = Json::array();
    for (const auto& t : r.tasks) {
      Json res = Json::array();
      for (const auto& x : t.residuals) res.push_back(encode(x));
      Json jt{{"name", t.name}, {"command", t.command}, {"status", to_string(t.status)}, {"values", t.values}, {"residuals", res}};
      if (!t.message.empty()) jt["message"] = t.message;
      if (timings) jt["seconds"] = t.seconds;
      tasks.push_back(jt);
    }
    Json out{{"version", r.version}, {"summary", Json{{"pass", pass}, {"fail", fail}, {"error", error}}}, {"tasks", tasks}};
    return out.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "gerbelab report v" << r.version << "\n";
  for (const auto& t : r.tasks) {
    std::string tag = t.status == Status::Pass ? "PASS " : t.status == Status::Fail ? "FAIL " : "ERROR";
    os << tag << " " << t.name << " (" << t.command << ")";
    if (timings) os << " " << t.seconds << "s";
    os << "\n";
    for (const auto& [k, v] : t.values.items()) os << "    " << k << ": " << compact(v) << "\n";
    if (!t.message.empty()) os << "    message: " << t.message << "\n";
    for (const auto& x : t.residuals) {
      os << "    residual " << x.layer << " {";
      for (size_t i = 0; i < x.simplex.size(); ++i) os << (i ? "," : "") << x.simplex[i];
      os << "}: " << x.value << "\n";
    }
  }
  os << pass << " passed, " << fail << " failed, " << error << " errors\n";
  return os.str();
}

}  // namespace gerbelab::cli
