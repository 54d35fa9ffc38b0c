#include <algorithm>
#include <iostream>

#include "ssf/acceptance.hpp"

int main() {
  const auto results = ssf::run_acceptance({}, &std::cout);
  const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.pass; });
  std::cout << (results.size() - static_cast<std::size_t>(failed)) << "/" << results.size() << " criteria passed\n";
  return static_cast<int>(failed);
}
