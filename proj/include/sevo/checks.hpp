#ifndef SEVO_CHECKS_HPP
#define SEVO_CHECKS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sevo {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CheckDef {
    std::string name;
    std::function<CheckResult(std::uint64_t seed)> run;
};

/// The full invariant suite: model identities, spectral properties, per-mode
/// propagator oracles, solver invariants, diagnostic calibrations, and the
/// reproducibility properties, each at desk-mini scale.
const std::vector<CheckDef>& all_checks();

std::vector<CheckResult> run_checks(std::uint64_t seed,
                                    const std::string& filter = std::string());

}  // namespace sevo

#endif
