#include <algorithm>
#include <iostream>

#include "criteria.hpp"

int main() {
  const auto results = aqnpe::acceptance::run_all(&std::cout);
  const auto passed = std::count_if(results.begin(), results.end(),
                                    [](const auto& r) { return r.pass; });
  std::cout << passed << "/" << results.size() << " acceptance criteria passed\n";
  return passed == static_cast<long>(results.size()) ? 0 : 1;
}
