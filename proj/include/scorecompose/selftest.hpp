#ifndef SCORECOMPOSE_SELFTEST_HPP
#define SCORECOMPOSE_SELFTEST_HPP

#include <ostream>

namespace scorecompose {

struct SelfTestOptions {
    /// Test hook: added to one side of the Bayes-identity comparison so a
    /// broken identity is observable end to end. Zero in production.
    double bayes_identity_offset = 0.0;
};

/// Runs the fast invariant suite, printing one line per check
/// ("ok <name>" / "FAIL <name>: <detail>"). Returns true iff all pass.
bool run_selftest(std::ostream& out, const SelfTestOptions& options = {});

}  // namespace scorecompose

#endif
