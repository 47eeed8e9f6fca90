#pragma once

#include <string>
#include <vector>

// The cross-check suite behind `qcav validate` and the acceptance runner:
// exact-math identities, oracle-equivalence sweeps and property checks, each
// reported as a named pass/fail line with its measured error.

namespace qcav::validation {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;  // measured error / statistic
    double bound = 0.0;     // tolerance it was compared against
    std::string note;
};

struct Config {
    int cutoff = 32;
    double dt = 1e-4;  // RK4 step, chi = 1 units
};

/// The ten acceptance checks, in order.  Throws std::invalid_argument before
/// running anything if cfg violates a precondition (cutoff < 8, dt outside
/// the integrator stability guard).
std::vector<CheckResult> acceptance_checks(const Config& cfg);

/// Additional named module cross-checks run by the validate command on top
/// of the acceptance set.
std::vector<CheckResult> consistency_checks(const Config& cfg);

std::string format_line(const CheckResult& r);

}  // namespace qcav::validation
