#include "acceptance.hpp"

#include <cstdio>
#include <iostream>

int main() {
  const auto results = pel::acceptance::run_all({});
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.id << " " << r.name << ": " << r.detail;
    std::printf(" [%.2fs]\n", r.seconds);
  }
  return pel::acceptance::all_passed(results) ? 0 : 1;
}
