#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fforge/errors.hpp"
#include "fforge/verify_suite.hpp"

namespace {

using namespace fforge;
using json = nlohmann::ordered_json;

std::string fmt6(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

std::string geometry_of(sl2z::SingularityKind k) {
    switch (k) {
        case sl2z::SingularityKind::SimpleElliptic: return "nil";
        case sl2z::SingularityKind::Cusp: return "solv";
        default: return "";
    }
}

json matrix_json(const sl2z::Sl2Matrix& m) {
    return json::array({json::array({m.a, m.b}), json::array({m.c, m.d})});
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

int run_classify(std::int64_t p, std::int64_t q, std::int64_t r, bool asJson) {
    sl2z::Sl2Matrix A = sl2z::monodromy_matrix(p, q, r);
    sl2z::SingularityClass cls = sl2z::classify_singularity(p, q, r);
    std::string kind = cls.kind == sl2z::SingularityKind::SimpleElliptic ? "simple elliptic"
                       : cls.kind == sl2z::SingularityKind::Cusp         ? "cusp"
                                                                         : "other";
    std::string recip =
        std::to_string(cls.reciprocalSum.num) + "/" + std::to_string(cls.reciprocalSum.den);

    json j;
    j["p"] = p;
    j["q"] = q;
    j["r"] = r;
    j["monodromy"] = matrix_json(A);
    j["trace"] = A.trace();
    j["kind"] = kind;
    j["geometry"] = geometry_of(cls.kind);
    j["reciprocalSum"] = recip;

    if (cls.kind != sl2z::SingularityKind::Other) {
        sl2z::TopologicalInvariants topo = sl2z::topological_invariants(p, q, r);
        sl2z::ConjugacyResult conj = sl2z::are_conjugate(A, A.inverse());
        j["mu"] = topo.mu;
        j["chiFiber"] = topo.chiFiber;
        j["chiGlued"] = topo.chiGlued;
        if (topo.eulerNumberIfNil)
            j["eulerNumber"] = *topo.eulerNumberIfNil;
        else
            j["eulerNumber"] = nullptr;
        j["conjugateToInverse"] = conj.conjugate;
        if (conj.witness)
            j["conjugator"] = matrix_json(*conj.witness);
        else
            j["conjugator"] = nullptr;
    }

    if (asJson) {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "triple                (" << p << ", " << q << ", " << r << ")\n";
    std::cout << "monodromy             " << A.str() << "\n";
    std::cout << "trace                 " << A.trace() << "\n";
    std::cout << "class                 " << kind << "\n";
    if (cls.kind == sl2z::SingularityKind::Other) {
        std::cout << "reciprocal sum        " << recip << " (> 1: outside this tool's scope)\n";
        return 0;
    }
    std::cout << "geometry              " << geometry_of(cls.kind) << "\n";
    std::cout << "reciprocal sum        " << recip << "\n";
    std::cout << "milnor number         " << j["mu"].get<std::int64_t>() << "\n";
    std::cout << "fiber euler char      " << j["chiFiber"].get<std::int64_t>() << "\n";
    std::cout << "glued euler char      " << j["chiGlued"].get<std::int64_t>() << "\n";
    if (!j["eulerNumber"].is_null())
        std::cout << "euler number          " << j["eulerNumber"].get<std::int64_t>() << "\n";
    std::cout << "conjugate to inverse  " << (j["conjugateToInverse"].get<bool>() ? "yes" : "no");
    if (!j["conjugator"].is_null()) {
        sl2z::ConjugacyResult conj = sl2z::are_conjugate(A, A.inverse());
        std::cout << "  (B = " << conj.witness->str() << ")";
    }
    std::cout << "\n";
    return 0;
}

int run_verify(const suite::SuiteConfig& cfg, bool asJson, const std::string& outPath,
               const std::string& csvPath) {
    suite::VerificationReport rep = suite::run_suite(cfg);
    std::ostream& human = asJson ? std::cerr : std::cout;

    int nPass = 0, nFail = 0, nSkip = 0, nVac = 0;
    for (const auto& c : rep.checks) {
        human << std::left << std::setw(9) << status_label(c.status) << std::setw(34) << c.name
              << "  margin " << std::setw(12) << fmt6(c.worstMargin) << "  residual "
              << fmt6(c.worstResidual) << "\n";
        switch (c.status) {
            case CheckStatus::Pass: ++nPass; break;
            case CheckStatus::Fail: ++nFail; break;
            case CheckStatus::Skipped: ++nSkip; break;
            case CheckStatus::Vacuous: ++nVac; break;
        }
    }
    human << "overall: " << (rep.overall ? "pass" : "fail") << " (" << rep.checks.size()
          << " checks: " << nPass << " pass, " << nFail << " fail, " << nSkip << " skipped, "
          << nVac << " vacuous)\n";

    std::string payload = suite::report_to_json(rep);
    if (!outPath.empty()) {
        std::ofstream out(outPath, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << outPath << "\n";
            return 2;
        }
        out << payload;
        human << "report written to " << outPath << "\n";
    }
    if (!csvPath.empty()) {
        std::ofstream out(csvPath, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << csvPath << "\n";
            return 2;
        }
        out << suite::curves_to_csv(suite::margin_curves(cfg));
        human << "margin curves written to " << csvPath << "\n";
    }
    if (asJson) std::cout << payload;
    return rep.overall ? 0 : 1;
}

int run_constants(std::int64_t p, std::int64_t q, std::int64_t r, int grid, bool asJson) {
    link::LinkModel m =
        link::build_link_model(static_cast<int>(p), static_cast<int>(q), static_cast<int>(r));
    link::GeometryConstants gc = link::geometry_constants(m, link::default_link_grid(grid));
    cons::EndConstants ec = cons::choose_constants(gc);

    if (asJson) {
        json j;
        j["p"] = p;
        j["q"] = q;
        j["r"] = r;
        j["geometry"] = m.kind_label();
        j["bigA"] = m.bigA;
        j["measured"] = {{"aMin", gc.aMin}, {"aMax", gc.aMax}, {"cMax", gc.cMax},
                         {"mMin", gc.mMin}, {"gridUsed", gc.gridUsed}};
        j["chosen"] = {{"a", ec.a}, {"b", ec.b}, {"aBound", ec.aBound}, {"bBound", ec.bBound}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "triple     (" << p << ", " << q << ", " << r << ")  " << m.kind_label() << "\n";
    std::cout << "closed form  A = " << std::setprecision(12) << m.bigA << "\n";
    std::cout << "measured on " << gc.gridUsed << ":\n";
    std::cout << "  min |alpha ^ dalpha| / vol  " << gc.aMin << "\n";
    std::cout << "  max |alpha ^ dalpha| / vol  " << gc.aMax << "\n";
    std::cout << "  max |alpha ^ omega|  / vol  " << gc.cMax << "\n";
    std::cout << "  min |dx ^ omega|     / vol  " << gc.mMin << "\n";
    std::cout << "chosen constants:\n";
    std::cout << "  a = " << ec.a << "  (strict bound " << ec.aBound << ")\n";
    std::cout << "  b = " << ec.b << "  (cap " << ec.bBound << ")\n";
    return 0;
}

int run_convergence(const suite::SuiteConfig& cfg, int levels, bool asJson) {
    auto tables = suite::convergence_study(cfg, levels);
    bool anyFail = false;
    if (asJson) {
        json arr = json::array();
        for (const auto& t : tables) {
            json rows = json::array();
            for (const auto& r : t.rows)
                rows.push_back({{"h", r.h}, {"residual", r.residual}, {"order", r.order}});
            arr.push_back({{"name", t.name},
                           {"status", status_label(t.status)},
                           {"notes", t.notes},
                           {"rows", rows}});
            anyFail = anyFail || t.status == CheckStatus::Fail;
        }
        std::cout << arr.dump(2) << "\n";
    } else {
        for (const auto& t : tables) {
            std::cout << t.name << ": " << status_label(t.status) << "\n";
            std::cout << "  " << std::left << std::setw(14) << "h" << std::setw(14) << "residual"
                      << "order\n";
            for (std::size_t i = 0; i < t.rows.size(); ++i) {
                std::cout << "  " << std::setw(14) << fmt6(t.rows[i].h) << std::setw(14)
                          << fmt6(t.rows[i].residual)
                          << (i == 0 ? std::string("-") : fmt6(t.rows[i].order)) << "\n";
            }
            std::cout << "  " << t.notes << "\n";
            anyFail = anyFail || t.status == CheckStatus::Fail;
        }
    }
    return anyFail ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical verification of the cylindrical-end and foliation constructions "
                 "on Milnor-link torus bundles"};
    app.require_subcommand(1);

    std::int64_t p = 2, q = 3, r = 7;
    int grid = 16;
    int levels = 3;
    bool asJson = false;
    std::string checksList, outPath, csvPath;
    double circularLOffset = 1.0;

    auto addTriple = [&](CLI::App* sub) {
        sub->add_option("--p", p, "first exponent")->required()->check(CLI::Range(std::int64_t(2), std::int64_t(1000000)));
        sub->add_option("--q", q, "second exponent")->required()->check(CLI::Range(std::int64_t(2), std::int64_t(1000000)));
        sub->add_option("--r", r, "third exponent")->required()->check(CLI::Range(std::int64_t(2), std::int64_t(1000000)));
    };

    CLI::App* classify = app.add_subcommand("classify", "monodromy, singularity class, and invariants of a triple");
    addTriple(classify);
    classify->add_flag("--json", asJson, "machine-readable output on stdout");

    CLI::App* verify = app.add_subcommand("verify", "run the verification suite for a triple");
    addTriple(verify);
    verify->add_option("--grid", grid, "periodic samples per fiber axis")->check(CLI::Range(4, 512));
    verify->add_option("--checks", checksList, "comma-separated name filters (substring match)");
    verify->add_option("--out", outPath, "write the JSON report to this file");
    verify->add_option("--csv", csvPath, "write margin curves to this CSV file");
    verify->add_option("--circular-l-offset", circularLOffset,
                       "offset of L over lambda in the circular family (negative to probe failure)");
    verify->add_flag("--json", asJson, "report JSON on stdout, check lines on stderr");

    CLI::App* constants = app.add_subcommand("constants", "measured geometry constants and the chosen end constants");
    addTriple(constants);
    constants->add_option("--grid", grid, "periodic samples per fiber axis")->check(CLI::Range(4, 512));
    constants->add_flag("--json", asJson, "machine-readable output on stdout");

    CLI::App* convergence = app.add_subcommand("convergence", "finite-difference refinement study of the closed forms");
    addTriple(convergence);
    convergence->add_option("--levels", levels, "number of h-halving levels")->check(CLI::Range(3, 12));
    convergence->add_flag("--json", asJson, "machine-readable output on stdout");

    CLI::App* schema = app.add_subcommand("report-schema", "print the versioned JSON schema of the verification report");
    (void)schema;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*classify) return run_classify(p, q, r, asJson);
        if (*verify) {
            suite::SuiteConfig cfg;
            cfg.p = p;
            cfg.q = q;
            cfg.r = r;
            cfg.nGrid = grid;
            cfg.circularLOffset = circularLOffset;
            cfg.only = split_list(checksList);
            return run_verify(cfg, asJson, outPath, csvPath);
        }
        if (*constants) return run_constants(p, q, r, grid, asJson);
        if (*convergence) {
            suite::SuiteConfig cfg;
            cfg.p = p;
            cfg.q = q;
            cfg.r = r;
            return run_convergence(cfg, levels, asJson);
        }
        std::cout << suite::report_schema_json();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
