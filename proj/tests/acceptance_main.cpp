// Acceptance runner: executes the ten gate checks at their pinned tolerances
// and prints one pass/fail line per criterion.  Exits nonzero if any fail.

#include "qcav/validation.hpp"

#include <chrono>
#include <cstdio>

int main() {
    qcav::validation::Config cfg;  // cutoff 32, dt 1e-4 (chi = 1 units)

    const auto t0 = std::chrono::steady_clock::now();
    const auto results = qcav::validation::acceptance_checks(cfg);
    const auto t1 = std::chrono::steady_clock::now();

    int failures = 0;
    int index = 0;
    for (const auto& r : results) {
        ++index;
        std::printf("criterion %02d %s\n", index,
                    qcav::validation::format_line(r).c_str());
        if (!r.pass) ++failures;
    }
    const double seconds = std::chrono::duration<double>(t1 - t0).count();
    std::printf("%d/%zu criteria passed in %.1f s\n", index - failures, results.size(),
                seconds);
    return failures == 0 ? 0 : 1;
}
