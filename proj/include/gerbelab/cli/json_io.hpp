#pragma once

#include <json.hpp>
#include <string>

#include "gerbelab/loopspace/loopspace.hpp"

namespace gerbelab::io {

using Json = nlohmann::json;  // keys sorted: canonical order

// Decoders throw ParseError / UnknownField with the JSON path of the offending value.
[[noreturn]] void parse_fail(const std::string& path, const std::string& what);
void expect_keys(const Json& j, const std::string& path, const std::vector<std::string>& required,
                 const std::vector<std::string>& optional = {});
int get_int(const Json& j, const std::string& path, int lo = INT32_MIN, int hi = INT32_MAX);
double get_double(const Json& j, const std::string& path);
std::string get_string(const Json& j, const std::string& path);

// rationals as "p/q" strings; otherwise [[re, im], ...] by powers of pi
Json encode(const Scalar& s);
Scalar decode_scalar(const Json& j, const std::string& path);

// [[exponents, scalar], ...]
Json encode(const Poly& p);
Poly decode_poly(const Json& j, int dim, const std::string& path);

// {"dim", "degree", "terms": [[dx indices, poly], ...]}
Json encode(const PolyForm& w);
PolyForm decode_form(const Json& j, const std::string& path);

Json encode(const VectorField& V);
VectorField decode_field(const Json& j, const std::string& path);

Json encode(cplx z);
cplx decode_complex(const Json& j, const std::string& path);

// {"rows", "cols", "data": row-major [re, im] pairs}
Json encode(const CMatrix& M);
CMatrix decode_matrix(const Json& j, const std::string& path);

// {"dim", "degree", "rows", "cols", "terms": [[dx indices, exponents, row-major [re, im] pairs], ...]}
Json encode(const MatForm& a);
MatForm decode_matform(const Json& j, const std::string& path);

// {"dim", "patches", "nerve": faces of two or more patches}
Json encode(const Cover& c);
CoverPtr decode_cover(const Json& j, const std::string& path);

// [[patch labels, value], ...]; U1 values are exponent polynomials
Json encode(const CechCochain& c);
CechCochain decode_cochain(const Json& j, const CoverPtr& cover, int k, ValueKind kind, int form_degree,
                           const std::string& path);

Json encode(const ModelSection& s);
ModelSection decode_section(const Json& j, const std::string& path);

// {"dim", "samples", "derivative": "fd4" | "spectral"}
Json encode(const SampledLoop& g);
SampledLoop decode_loop_samples(const Json& j, const std::string& path);

// {"vertices", "triangles", "sphere"?}; patch assignments are labelled in manifests
Json encode(const TriangulatedSurface& S);

// {"const": z} | {"exp": {"c", "theta"}} | {"product": [...]} | {"sum": [...]}
Json encode(const LoopFunctional& F);
LoopFunctional decode_functional(const Json& j, const std::string& path);

Json encode(const Residual& r);

}  // namespace gerbelab::io
