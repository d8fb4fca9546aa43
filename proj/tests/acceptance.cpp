// Acceptance suite: criteria 1-8 at the pinned tolerances, one verdict line each.

#include <cstdio>
#include <iostream>

#include "heptamap/selftest.hpp"

int main() {
    hepta::selftest::Options o;
    const auto checks = hepta::selftest::run_all(o);
    int failed = 0;
    for (const auto& c : checks) {
        std::cout << hepta::selftest::format(c);
        failed += c.pass ? 0 : 1;
    }
    std::cout << "\n";
    for (const auto& c : checks)
        std::printf("criterion %d: %s  %s\n", c.id, c.pass ? "PASS" : "FAIL", c.name.c_str());
    std::printf("%zu/%zu criteria passed\n", checks.size() - failed, checks.size());
    return failed == 0 ? 0 : 1;
}
