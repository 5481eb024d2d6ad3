#pragma once

#include <string>

#include "json.hpp"
#include "whitham/deformation.hpp"
#include "whitham/flow.hpp"
#include "whitham/spectral.hpp"

namespace whitham {

using Json = nlohmann::ordered_json;

// Complex numbers are [re, im]; polynomials are arrays of them by power of zeta.
Json to_json(cplx z);
Json to_json(const Polynomial& p);
Json to_json(const SpectralTriple& t);
Json to_json(const CheckEntry& e);
Json to_json(const ValidationReport& r);
Json to_json(const PsiVector& p);
Json to_json(const FactorStructure& f);
Json to_json(const CaseLabel& l);
Json to_json(const TangentVector& v);
Json to_json(const PathSample& s);

cplx complex_from_json(const Json& j);
Polynomial polynomial_from_json(const Json& j, int bound);
// Throws Parse on any schema violation (including degree overflow).
SpectralTriple triple_from_json(const Json& j);

SpectralTriple read_triple(const std::string& path);
void write_triple(const std::string& path, const SpectralTriple& t);

// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

}  // namespace whitham
