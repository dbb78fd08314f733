// SPDX-License-Identifier: Apache-2.0
//
// The acceptance suite: eleven criteria, each evaluated at its stated
// tolerance. Criterion 11 re-runs criteria 1 to 10 and compares the report
// bodies byte for byte.

#ifndef NCB_SUITE_HPP
#define NCB_SUITE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ncb/io.hpp"

namespace ncb {

struct SuiteConfig {
  std::uint64_t seed = 0;
  int n_max = 0;             // > 0 truncates the unital-exactness sweep (criterion 2)
  int restarts = 0;          // > 0 overrides seesaw restarts
  int determinism_runs = 2;  // runs of criteria 1-10 compared by criterion 11
  sdp::Settings sdp;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string summary;
  io::Json data;          // deterministic part
  double seconds = 0.0;   // excluded from the body
};

struct SuiteReport {
  std::vector<CriterionResult> criteria;
  bool passed = false;
  io::Json body() const;  // everything except timing
};

SuiteReport run_suite(const SuiteConfig& config = {});

}  // namespace ncb

#endif  // NCB_SUITE_HPP
