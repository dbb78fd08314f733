// SPDX-License-Identifier: Apache-2.0

#include "ncb/sdp_cache.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ncb::sdp {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

SolutionCache::SolutionCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string SolutionCache::key(const Problem& p, const Settings& s) const {
  std::ostringstream os;
  os.precision(17);
  os << p.canonical_json() << '|' << s.gap_tol << '|' << s.feas_tol << '|' << s.max_iter;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(os.str())));
  return buf;
}

namespace {

nlohmann::json mat_json(const CMat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

CMat mat_from_json(const nlohmann::json& j) {
  const auto r = static_cast<Eigen::Index>(j.size());
  const auto c = r > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  CMat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k)
      m(i, k) = cplx(j[i][k][0].get<double>(), j[i][k][1].get<double>());
  return m;
}

Status status_from(const std::string& s) {
  if (s == "optimal") return Status::optimal;
  if (s == "infeasible") return Status::infeasible;
  return Status::max_iterations;
}

}  // namespace

std::optional<Solution> SolutionCache::lookup(const Problem& p, const Settings& s) {
  const auto path = dir_ / (key(p, s) + ".json");
  std::lock_guard<std::mutex> lock(mu_);
  std::ifstream in(path);
  if (!in) {
    ++misses_;
    return std::nullopt;
  }
  Solution sol;
  try {
    nlohmann::json j;
    in >> j;
    if (j.at("problem").get<std::string>() != p.canonical_json()) {
      ++rejected_;
      return std::nullopt;
    }
    sol.status = status_from(j.at("status").get<std::string>());
    for (const auto& b : j.at("blocks")) sol.blocks.push_back(mat_from_json(b));
    sol.primal_objective = j.at("primal_objective").get<double>();
    sol.dual_objective = j.at("dual_objective").get<double>();
    sol.gap = j.at("gap").get<double>();
    sol.primal_infeasibility = j.at("primal_infeasibility").get<double>();
    sol.dual_infeasibility = j.at("dual_infeasibility").get<double>();
    sol.min_block_eigenvalue = j.at("min_block_eigenvalue").get<double>();
    sol.iterations = j.at("iterations").get<int>();
    sol.dual = j.at("dual").get<std::vector<double>>();
    if (j.contains("certificate")) {
      InfeasibilityCertificate c;
      c.multipliers = j["certificate"].at("multipliers").get<std::vector<double>>();
      c.max_violation = j["certificate"].at("max_violation").get<double>();
      sol.certificate = c;
    }
  } catch (const std::exception&) {
    ++rejected_;
    return std::nullopt;
  }
  // Re-verify the stored point before trusting it.
  if (sol.blocks.size() != p.blocks().size()) {
    ++rejected_;
    return std::nullopt;
  }
  if (sol.status != Status::infeasible) {
    const double res = constraint_residual(p, sol.blocks);
    if (res > std::max(1e-7, 10.0 * sol.primal_infeasibility)) {
      ++rejected_;
      return std::nullopt;
    }
    for (const auto& b : sol.blocks) {
      if (psd_check(herm_part(b), 1e-7).psd) continue;
      ++rejected_;
      return std::nullopt;
    }
  }
  sol.from_cache = true;
  ++hits_;
  return sol;
}

void SolutionCache::store(const Problem& p, const Settings& s, const Solution& sol) {
  nlohmann::json j;
  j["problem"] = p.canonical_json();
  j["status"] = to_string(sol.status);
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : sol.blocks) blocks.push_back(mat_json(b));
  j["blocks"] = blocks;
  j["primal_objective"] = sol.primal_objective;
  j["dual_objective"] = sol.dual_objective;
  j["gap"] = sol.gap;
  j["primal_infeasibility"] = sol.primal_infeasibility;
  j["dual_infeasibility"] = sol.dual_infeasibility;
  j["min_block_eigenvalue"] = sol.min_block_eigenvalue;
  j["iterations"] = sol.iterations;
  j["dual"] = sol.dual;
  if (sol.certificate) {
    j["certificate"] = {{"multipliers", sol.certificate->multipliers},
                        {"max_violation", sol.certificate->max_violation}};
  }
  const auto final_path = dir_ / (key(p, s) + ".json");
  const auto tmp = final_path.string() + ".tmp";
  std::lock_guard<std::mutex> lock(mu_);
  {
    std::ofstream out(tmp);
    out << j.dump();
  }
  std::error_code ec;
  std::filesystem::rename(tmp, final_path, ec);
}

}  // namespace ncb::sdp
