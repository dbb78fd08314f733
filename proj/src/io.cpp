// SPDX-License-Identifier: Apache-2.0

#include "ncb/io.hpp"

#include <fstream>

namespace ncb::io {

namespace {

const Json& member(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "." + key, "missing");
  return *it;
}

int parse_int(const Json& j, const std::string& path, int lo) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  const int v = j.get<int>();
  if (v < lo) throw SchemaError(path, "must be at least " + std::to_string(lo));
  return v;
}

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::vector<CMat> full_basis(int d) {
  std::vector<CMat> b;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b.push_back(matrix_unit(d, i, j));
  return b;
}

std::optional<CVec> optional_u(const Json& j, const std::string& path) {
  if (!j.contains("u")) return std::nullopt;
  return parse_vector(j["u"], path + ".u");
}

// Wraps library contract violations raised while building from valid JSON.
template <class F>
auto guarded(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ContractViolation& e) {
    throw SchemaError(path, e.what());
  }
}

}  // namespace

Json read_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SchemaError(file.string(), "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(file.string(), e.what());
  }
}

void check_schema(const Json& j) {
  const Json& s = member(j, "schema", "$");
  if (!s.is_string() || s.get<std::string>() != kSchema)
    throw SchemaError("$.schema", std::string("expected \"") + kSchema + "\"");
}

cplx parse_complex(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw SchemaError(path, "expected a number or an [re, im] pair");
}

CVec parse_vector(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a non-empty array");
  CVec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_complex(j[i], idx(path, i));
  return v;
}

CMat parse_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a non-empty array of rows");
  const auto rows = j.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].empty()) throw SchemaError(idx(path, i), "expected a non-empty row");
    if (i == 0) cols = j[i].size();
    if (j[i].size() != cols) throw SchemaError(idx(path, i), "row length differs from row 0");
  }
  CMat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = parse_complex(j[i][c], idx(idx(path, i), c));
  return m;
}

OperatorSpaceSpec parse_space(const Json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  if (j.contains("preset")) {
    const Json& p = j["preset"];
    if (!p.is_string()) throw SchemaError(path + ".preset", "expected a string");
    const std::string name = p.get<std::string>();
    const int d = j.contains("d") ? parse_int(j["d"], path + ".d", 1) : 2;
    if (name == "M_d") {
      CVec u = CVec::Zero(d * d);
      for (int i = 0; i < d; ++i) u(i * d + i) = 1.0;
      return guarded(path, [&] { return make_space("M_" + std::to_string(d), full_basis(d), u); });
    }
    if (name == "diag_d") {
      std::vector<CMat> b;
      for (int i = 0; i < d; ++i) b.push_back(matrix_unit(d, i, i));
      return guarded(path, [&] { return make_space("diag_" + std::to_string(d), b, CVec::Ones(d)); });
    }
    if (name == "span_I_E12") {
      CVec u = CVec::Zero(2);
      u(0) = 1.0;
      return make_space("span{I,E12}", {CMat::Identity(2, 2), matrix_unit(2, 0, 1)}, u);
    }
    if (name == "min_linf") return min_quantization(linf(d, CVec::Ones(d)));
    throw SchemaError(path + ".preset", "unknown preset \"" + name + "\"");
  }
  const int d = parse_int(member(j, "d", path), path + ".d", 1);
  const Json& basis = member(j, "basis", path);
  if (!basis.is_array() || basis.empty()) throw SchemaError(path + ".basis", "expected a non-empty array");
  std::vector<CMat> b;
  for (std::size_t t = 0; t < basis.size(); ++t) {
    CMat g = parse_matrix(basis[t], idx(path + ".basis", t));
    if (g.rows() != d || g.cols() != d) throw SchemaError(idx(path + ".basis", t), "expected a d×d matrix");
    b.push_back(std::move(g));
  }
  const std::string label = j.contains("label") && j["label"].is_string() ? j["label"].get<std::string>() : "V";
  std::optional<CVec> u = optional_u(j, path);
  if (u && u->size() != static_cast<Eigen::Index>(b.size()))
    throw SchemaError(path + ".u", "length must equal the number of basis elements");
  return guarded(path, [&] { return make_space(label, std::move(b), u); });
}

NormedSpaceSpec parse_normed(const Json& j, const std::string& path) {
  const Json& kind = member(j, "kind", path);
  if (!kind.is_string()) throw SchemaError(path + ".kind", "expected a string");
  const std::string k = kind.get<std::string>();
  const std::optional<CVec> u = optional_u(j, path);
  const auto list = [&](const char* key) {
    const Json& a = member(j, key, path);
    if (!a.is_array() || a.empty()) throw SchemaError(path + "." + key, "expected a non-empty array");
    std::vector<CVec> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(parse_vector(a[i], idx(path + "." + key, i)));
    return out;
  };
  return guarded(path, [&]() -> NormedSpaceSpec {
    if (k == "linf") return linf(parse_int(member(j, "m", path), path + ".m", 1), u);
    if (k == "polytope") return make_polytope("X", list("functionals"), u);
    if (k == "sup_over_points") return make_sup_over_points("X", list("points"), u);
    if (k == "matrix") {
      const OperatorSpaceSpec v = parse_space(member(j, "space", path), path + ".space");
      NormedSpaceSpec x = make_matrix_realized(v);
      x.u = u ? u : v.u;
      return x;
    }
    if (k == "l1_sum" || k == "linf_sum") {
      const NormedSpaceSpec a = parse_normed(member(j, "left", path), path + ".left");
      const NormedSpaceSpec b = parse_normed(member(j, "right", path), path + ".right");
      if (k == "l1_sum" && !u) return direct_sum_1(a, b);
      return make_sum(k == "l1_sum" ? NormedKind::l1_sum : NormedKind::linf_sum, a, b, u);
    }
    throw SchemaError(path + ".kind", "unknown normed space kind \"" + k + "\"");
  });
}

LevelElement parse_element(const OperatorSpaceSpec& v, const Json& j, const std::string& path) {
  if (j.is_array()) {
    const CVec c = parse_vector(j, path);
    if (c.size() != v.dim()) throw SchemaError(path, "coefficient length must equal dim V");
    return LevelElement::scalar(c);
  }
  if (j.contains("matrix")) {
    const CMat a = parse_matrix(j["matrix"], path + ".matrix");
    if (a.rows() != a.cols() || a.rows() % v.d != 0)
      throw SchemaError(path + ".matrix", "expected a square matrix of size k·d");
    double residual = 0.0;
    LevelElement x = level_element_of(v, static_cast<int>(a.rows()) / v.d, a, &residual);
    if (residual > 1e-9 * std::max(1.0, spec_norm(a))) throw SchemaError(path + ".matrix", "matrix is not in M_k(V)");
    return x;
  }
  const int k = parse_int(member(j, "k", path), path + ".k", 1);
  const Json& e = member(j, "entries", path);
  if (!e.is_array() || e.size() != static_cast<std::size_t>(k)) throw SchemaError(path + ".entries", "expected k rows");
  LevelElement x = LevelElement::zero(k, v.dim());
  for (int a = 0; a < k; ++a) {
    const std::string row = idx(path + ".entries", static_cast<std::size_t>(a));
    if (!e[a].is_array() || e[a].size() != static_cast<std::size_t>(k)) throw SchemaError(row, "expected k entries");
    for (int b = 0; b < k; ++b) {
      const std::string p = idx(row, static_cast<std::size_t>(b));
      x.at(a, b) = parse_vector(e[a][b], p);
      if (x.at(a, b).size() != v.dim()) throw SchemaError(p, "coefficient length must equal dim V");
    }
  }
  return x;
}

ChoiMatrix parse_map(const Json& j, const std::string& path) {
  if (j.contains("named")) {
    const std::string name = j["named"].is_string() ? j["named"].get<std::string>() : "";
    const int d = parse_int(member(j, "d", path), path + ".d", 1);
    if (name == "identity") return identity_map(d);
    if (name == "transpose") return transpose_map(d);
    if (name == "trace") return trace_map(d);
    throw SchemaError(path + ".named", "expected identity, transpose or trace");
  }
  const int d = parse_int(member(j, "d", path), path + ".d", 1);
  const int n = parse_int(member(j, "n", path), path + ".n", 1);
  ChoiMatrix phi;
  phi.d = d;
  phi.n = n;
  phi.c = parse_matrix(member(j, "choi", path), path + ".choi");
  if (phi.c.rows() != d * n || phi.c.cols() != d * n) throw SchemaError(path + ".choi", "expected a dn × dn matrix");
  return phi;
}

ConeSpec parse_cones(const OperatorSpaceSpec& v, const Json& j, const std::string& path) {
  const Json& kind = member(j, "kind", path);
  if (!kind.is_string()) throw SchemaError(path + ".kind", "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "psd")
    return guarded(path, [&] { return psd_cones(v, parse_int(member(j, "levels", path), path + ".levels", 1)); });
  if (k != "generators") throw SchemaError(path + ".kind", "expected psd or generators");
  const Json& levels = member(j, "levels", path);
  if (!levels.is_array() || levels.empty()) throw SchemaError(path + ".levels", "expected a non-empty array");
  ConeSpec c;
  c.label = j.contains("label") && j["label"].is_string() ? j["label"].get<std::string>() : "declared";
  c.kind = ConeSpec::Kind::generators;
  c.declared_levels = static_cast<int>(levels.size());
  for (std::size_t m = 0; m < levels.size(); ++m) {
    const std::string lp = idx(path + ".levels", m);
    if (!levels[m].is_array()) throw SchemaError(lp, "expected an array of elements");
    std::vector<LevelElement> gens;
    for (std::size_t g = 0; g < levels[m].size(); ++g) {
      LevelElement x = parse_element(v, levels[m][g], idx(lp, g));
      if (x.k != static_cast<int>(m) + 1) throw SchemaError(idx(lp, g), "generator level does not match its list");
      gens.push_back(std::move(x));
    }
    c.generators.push_back(std::move(gens));
  }
  guarded(path, [&] {
    validate(v, c);
    return 0;
  });
  return c;
}

CMat parse_projection(const OperatorSpaceSpec& v, const Json& j, const std::string& path) {
  if (j.contains("trailing")) return trailing_projection(v.dim(), parse_int(j["trailing"], path + ".trailing", 0));
  CMat p = parse_matrix(member(j, "P", path), path + ".P");
  if (p.rows() != v.dim() || p.cols() != v.dim()) throw SchemaError(path + ".P", "expected a dim V × dim V matrix");
  return p;
}

// ---------------------------------------------------------------------------

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CVec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

Json to_json(const CMat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) r.push_back(to_json(m(i, c)));
    rows.push_back(std::move(r));
  }
  return rows;
}

Json to_json(const LevelElement& x) {
  Json rows = Json::array();
  for (int a = 0; a < x.k; ++a) {
    Json r = Json::array();
    for (int b = 0; b < x.k; ++b) r.push_back(to_json(x.at(a, b)));
    rows.push_back(std::move(r));
  }
  return {{"k", x.k}, {"entries", std::move(rows)}};
}

Json to_json(const OperatorSpaceSpec& v) {
  Json basis = Json::array();
  for (const auto& g : v.basis) basis.push_back(to_json(g));
  Json j = {{"label", v.label}, {"d", v.d}, {"basis", std::move(basis)}};
  if (v.u) j["u"] = to_json(*v.u);
  return j;
}

Json to_json(const ChoiMatrix& phi) { return {{"d", phi.d}, {"n", phi.n}, {"choi", to_json(phi.c)}}; }

Json to_json(const GammaEstimate& g) {
  Json j = {{"value", g.value},          {"kind", to_string(g.kind)}, {"k", g.k},
            {"level_n", g.level_n},      {"norm", g.norm_bound},      {"history", g.history},
            {"sdp_solves", g.sdp_solves}, {"failed_restarts", g.failed_restarts}};
  if (g.witness.d > 0) {
    j["witness"] = to_json(g.witness);
    j["xi"] = to_json(g.xi);
    j["eta"] = to_json(g.eta);
  }
  return j;
}

Json to_json(const NcbEstimate& e) {
  Json j = {{"value", e.value},
            {"kind", to_string(e.kind)},
            {"shortcut", e.unitary_shortcut ? "unitary_conjugation" : "none"},
            {"gamma_evaluations", e.gamma_evaluations}};
  if (e.witness_x) j["witness_x"] = to_json(*e.witness_x);
  if (e.gamma_at_witness) j["gamma_at_witness"] = to_json(*e.gamma_at_witness);
  return j;
}

Json to_json(const ConeVerdict& c) {
  Json j = {{"member", c.member},   {"margin", c.margin},         {"exact", c.exact},
            {"level_n", c.level_n}, {"sdp_solves", c.sdp_solves}};
  if (c.witness) j["witness"] = to_json(*c.witness);
  return j;
}

Json to_json(const MProjection& p) {
  return {{"P", to_json(p.p)},
          {"verified_levels", p.verified_levels},
          {"samples_per_level", p.samples_per_level},
          {"max_residual", p.max_residual}};
}

}  // namespace ncb::io
