// Acceptance runner. Without arguments runs criteria 1..8; with a numeric
// argument runs that criterion only. Prints one line per criterion and
// exits nonzero if any of them fails.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "plimit/suite.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int a = 1; a < argc; ++a) ids.push_back(std::atoi(argv[a]));
  if (ids.empty()) ids = {1, 2, 3, 4, 5, 6, 7, 8};

  const plimit::SuiteConfig cfg;
  bool ok = true;
  for (int id : ids) {
    const plimit::CriterionRecord r = plimit::run_criterion(id, cfg);
    std::printf("%s\n", r.line().c_str());
    std::fflush(stdout);
    ok = ok && r.pass();
  }
  return ok ? 0 : 1;
}
