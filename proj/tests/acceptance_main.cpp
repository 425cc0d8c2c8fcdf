// Acceptance gate: runs every end-to-end criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.  Exits nonzero if any fails.
#include <cstdio>
#include <exception>

#include "logvisc/verify.hpp"

int main() {
    try {
        const auto suite = logvisc::verify::run_suite("acceptance");
        int        failed = 0;
        for (const auto& c : suite.checks) {
            std::printf("%s %s - %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                        c.detail.c_str());
            std::fflush(stdout);
            if (!c.pass) ++failed;
        }
        std::printf("acceptance: %d/%d criteria passed\n",
                    static_cast<int>(suite.checks.size()) - failed,
                    static_cast<int>(suite.checks.size()));
        return failed == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance: aborted: %s\n", e.what());
        return 2;
    }
}
