// Batch acceptance runner: prints one PASS/FAIL line per criterion.
// With a numeric argument it runs that single criterion (the CMake test
// matrix registers one invocation per criterion).

#include <cstdlib>
#include <iostream>

#include "intcomp/verify.hpp"

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) {
        only = std::atoi(argv[1]);
        if (only < 1 || only > 10) {
            std::cerr << "usage: acceptance [1-10]\n";
            return 2;
        }
    }
    const auto results = intcomp::run_acceptance(FIXTURES_DIR, only);
    const int failures = intcomp::report_acceptance(results, std::cout);
    return failures == 0 ? 0 : 1;
}
