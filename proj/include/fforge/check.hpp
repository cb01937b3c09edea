#ifndef FFORGE_CHECK_HPP
#define FFORGE_CHECK_HPP

#include <array>
#include <string>

namespace fforge {

enum class CheckStatus { Pass, Fail, Skipped, Vacuous };

inline const char* status_label(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Skipped: return "skipped";
        default: return "vacuous";
    }
}

// Uniform outcome record for every verification step.
//   worstMargin:   signed distance from failure (>= 0 when passing);
//   worstResidual: largest measured deviation from an identity;
// checks fill whichever is meaningful and leave the other at 0.
struct CheckResult {
    std::string name;
    std::string paperRef;
    CheckStatus status = CheckStatus::Fail;
    double worstMargin = 0.0;
    double worstResidual = 0.0;
    std::array<double, 5> witnessPoint{};
    int witnessDim = 0;
    std::string gridUsed;
    std::string notes;

    bool passed() const { return status == CheckStatus::Pass || status == CheckStatus::Vacuous; }
};

}  // namespace fforge

#endif  // FFORGE_CHECK_HPP
