#ifndef FFORGE_VERIFY_SUITE_HPP
#define FFORGE_VERIFY_SUITE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fforge/check.hpp"
#include "fforge/constructions.hpp"
#include "fforge/link_model.hpp"
#include "fforge/sl2z.hpp"

namespace fforge::suite {

inline constexpr const char* kToolName = "foliation-forge";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "report/v1";

struct SuiteConfig {
    std::int64_t p = 2, q = 3, r = 7;
    int nGrid = 16;        // periodic samples per fiber axis
    int endRhoCount = 64;  // bounded rho samples on [1, 10]
    double identityTol = 1e-12;
    double agreeTol = 1e-10;
    double delta = 1e-6;           // positivity margin
    double lambdaTol = 1e-8;       // closed-form agreement for lambda and constants
    double circularLOffset = 1.0;  // circular family uses L = lambda + offset
    std::vector<std::string> only;  // substring filters on check names; empty = all
};

struct TripleSummary {
    std::int64_t p = 0, q = 0, r = 0;
    std::string kind;      // "simple elliptic" / "cusp" / "other"
    std::string geometry;  // "nil" / "solv" / ""
    std::int64_t trace = 0;
    std::string reciprocalSum;
    std::int64_t mu = 0, chiFiber = 0, chiGlued = 0;
    bool hasEuler = false;
    std::int64_t eulerNumber = 0;
    bool conjugateToInverse = false;
};

struct VerificationReport {
    SuiteConfig config;
    TripleSummary triple;
    std::vector<CheckResult> checks;
    bool overall = false;  // no enabled check failed (skipped/vacuous do not fail)
};

// Runs every enabled check for the configured triple.  An unsupported triple
// yields a report with a single failed classification record.  Double-gluing
// checks are skipped (with a note) when the monodromy is not conjugate to
// its inverse; the unipotent normal form is skipped on cusp triples.
VerificationReport run_suite(const SuiteConfig& cfg);

// (h, residual, fitted order) per level for each FD-validated closed form.
// Levels halve the spacing; orders compare consecutive levels.
struct ConvergenceLevel {
    double h = 0.0;
    double residual = 0.0;
    double order = 0.0;  // vs the previous level; 0 on the first row
};
struct ConvergenceTable {
    std::string name;
    std::vector<ConvergenceLevel> rows;
    CheckStatus status = CheckStatus::Fail;
    std::string notes;
};
std::vector<ConvergenceTable> convergence_study(const SuiteConfig& cfg, int levels);

// Margin curves along the leading coordinate, for external plotting.
struct MarginCurve {
    std::string check;
    std::vector<double> coord, minMargin, maxResidual;
};
std::vector<MarginCurve> margin_curves(const SuiteConfig& cfg);

std::uint64_t config_hash(const SuiteConfig& cfg);  // FNV-1a over the canonical config line
std::string report_to_json(const VerificationReport& rep);  // deterministic, 2-space indent
std::string report_schema_json();
std::string curves_to_csv(const std::vector<MarginCurve>& curves);

}  // namespace fforge::suite

#endif  // FFORGE_VERIFY_SUITE_HPP
