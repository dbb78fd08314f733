// Runs the eleven acceptance criteria and prints one PASS/FAIL line each.

#include <cstdio>
#include <cstdlib>

#include "ncb/suite.hpp"

int main(int argc, char** argv) {
  ncb::SuiteConfig config;
  if (argc > 1) config.seed = std::strtoull(argv[1], nullptr, 10);
  const ncb::SuiteReport rep = ncb::run_suite(config);
  for (const auto& c : rep.criteria)
    std::printf("%s criterion %2d (%s): %s [%.1f s]\n", c.passed ? "PASS" : "FAIL", c.id, c.title.c_str(),
                c.summary.c_str(), c.seconds);
  std::printf("%s\n", rep.passed ? "ALL PASS" : "SOME CRITERIA FAILED");
  return rep.passed ? 0 : 1;
}
