// Acceptance gate runner: one line per criterion, nonzero exit when any
// criterion fails. The seed pins every stochastic input.
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "agingmimo/validation.hpp"

int main(int argc, char** argv) {
    std::uint64_t seed = 1;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--seed" && i + 1 < argc) {
            seed = std::strtoull(argv[++i], nullptr, 10);
        } else {
            std::cerr << "usage: acceptance [--seed N]\n";
            return 2;
        }
    }

    const auto results = agingmimo::run_acceptance(seed, &std::cout);
    int failed = 0;
    for (const auto& r : results)
        if (!r.passed) ++failed;
    if (failed == 0)
        std::cout << "all " << results.size() << " checks passed (seed " << seed << ")\n";
    else
        std::cout << failed << " of " << results.size() << " checks failed (seed " << seed
                  << ")\n";
    return failed == 0 ? 0 : 1;
}
