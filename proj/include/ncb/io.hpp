// SPDX-License-Identifier: Apache-2.0
//
// JSON ingestion and emission, schema "opspace/1". Complex numbers are
// [re, im] pairs (a bare number is read as real); matrices are row-major
// nested arrays. Every parse error carries the JSON path of the offending
// value.

#ifndef NCB_IO_HPP
#define NCB_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "ncb/banach.hpp"
#include "ncb/cbmap.hpp"
#include "ncb/gamma.hpp"
#include "ncb/mideal.hpp"
#include "ncb/ossys.hpp"

namespace ncb::io {

using Json = nlohmann::json;

inline constexpr const char* kSchema = "opspace/1";

class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

Json read_file(const std::filesystem::path& file);
/// Requires "schema": "opspace/1" at the top level.
void check_schema(const Json& j);

cplx parse_complex(const Json& j, const std::string& path);
CVec parse_vector(const Json& j, const std::string& path);
CMat parse_matrix(const Json& j, const std::string& path);

/// {"label", "d", "basis": [matrices], "u": coefficients?} or a preset
/// {"preset": "M_d" | "diag_d" | "span_I_E12", "d"?}.
OperatorSpaceSpec parse_space(const Json& j, const std::string& path);

/// {"kind": "linf", "m", "u"?} | {"kind": "polytope" | "sup_over_points",
/// "functionals" | "points", "u"?} | {"kind": "matrix", "space"} |
/// {"kind": "l1_sum" | "linf_sum", "left", "right", "u"?}.
NormedSpaceSpec parse_normed(const Json& j, const std::string& path);

/// {"k", "entries": k×k nested arrays of coefficient vectors} or
/// {"matrix": realized kd × kd matrix}; a bare array is a level-1 element.
LevelElement parse_element(const OperatorSpaceSpec& v, const Json& j, const std::string& path);

/// {"named": "identity" | "transpose" | "trace", "d"} or {"d", "n", "choi"}.
ChoiMatrix parse_map(const Json& j, const std::string& path);

/// {"kind": "psd", "levels"} or {"kind": "generators", "levels": [[elements]]}.
ConeSpec parse_cones(const OperatorSpaceSpec& v, const Json& j, const std::string& path);

/// {"P": matrix} or {"trailing": w}.
CMat parse_projection(const OperatorSpaceSpec& v, const Json& j, const std::string& path);

Json to_json(cplx z);
Json to_json(const CVec& v);
Json to_json(const CMat& m);
Json to_json(const LevelElement& x);
Json to_json(const OperatorSpaceSpec& v);
Json to_json(const ChoiMatrix& phi);
Json to_json(const GammaEstimate& g);
Json to_json(const NcbEstimate& e);
Json to_json(const ConeVerdict& c);
Json to_json(const MProjection& p);

}  // namespace ncb::io

#endif  // NCB_IO_HPP
