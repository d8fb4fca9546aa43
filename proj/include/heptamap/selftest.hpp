#pragma once

// Acceptance battery: one check per criterion, thresholds scaled by tol / 1e-9.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hepta::selftest {

struct Options {
    double tol = 1e-9;
    std::uint64_t seed = 20240607;
    unsigned threads = 0;  // 0: hardware concurrency
    std::ostream* log = nullptr;
};

struct Check {
    int id = 0;
    std::string name;
    bool pass = false;
    std::vector<std::string> metrics;  // "name=value (limit)"
    double seconds = 0;
    std::string failure;
};

Check theta_correctness(const Options& o);
Check periods_and_aj(const Options& o);
Check rosenhain_round_trip(const Options& o);
Check divisor_and_projection(const Options& o);
Check third_kind(const Options& o);
Check end_to_end(const Options& o);
Check humbert_edge(const Options& o);
Check conformality(const Options& o);

std::vector<Check> run_all(const Options& o);
std::string format(const Check& c);

}  // namespace hepta::selftest
