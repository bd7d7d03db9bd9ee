#include <iostream>
#include "manirad/selftest.hpp"
int main() {
  const auto rs = manirad::run_selftest(std::cout);
  return manirad::selftest_passed(rs) ? 0 : 1;
}
