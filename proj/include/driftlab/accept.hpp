#pragma once
#include <iosfwd>
#include <string>
#include <vector>

namespace driftlab::accept {

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  std::string detail;  // measured vs expected values
};

// Run the numbered verification criteria (all of them when `only` is empty).
// Expensive shared artifacts (continuation branches) are computed once and
// reused across criteria.
std::vector<CriterionResult> run(const std::vector<int>& only = {});

// Print one "criterion <id> <PASS|FAIL> <name>: <detail>" line per criterion;
// returns the number of failures.
int run_and_print(std::ostream& out, const std::vector<int>& only = {});

}  // namespace driftlab::accept
