// Runs the acceptance criteria and fails the process if any criterion fails.
// The same suite backs the `selftest` CLI command.

#include <iostream>

#include "manirad/selftest.hpp"

int main() {
  const auto results = manirad::run_selftest(std::cout);
  return manirad::selftest_passed(results) ? 0 : 1;
}
