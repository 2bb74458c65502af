#pragma once

#include <string>
#include <vector>

namespace hw {

struct SelfTestCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SelfTestResult {
    std::vector<SelfTestCheck> checks;
    bool all_pass = true;
    double seconds = 0.0;
};

/// Fast invariant battery: geometry identities at sampled collar points,
/// structural-derivative spot checks against finite differences, quadrature
/// closed forms, catalog residuals, frozen weight values, and a projection
/// sanity check. Designed to finish in well under a minute.
///
/// inject_delta_fault scales the distance expression by 1.01, which must make
/// the unit-gradient invariant fail; used to prove the harness can detect a
/// broken geometry.
SelfTestResult run_self_tests(bool inject_delta_fault);

}  // namespace hw
