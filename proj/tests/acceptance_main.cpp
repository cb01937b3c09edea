// Acceptance harness: one line per criterion, [PASS]/[FAIL], exit 1 on any failure.
// Run with --cli <path-to-foliation-forge> so criterion 15 can drive the real binary.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fforge/constructions.hpp"
#include "fforge/errors.hpp"
#include "fforge/link_model.hpp"
#include "fforge/profiles.hpp"
#include "fforge/sl2z.hpp"
#include "fforge/verify_suite.hpp"

using namespace fforge;

namespace {

int g_failures = 0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int idx, const std::string& label, bool ok, double elapsed, double budget,
            const std::string& detail = "") {
    bool inBudget = elapsed < budget;
    std::cout << ((ok && inBudget) ? "[PASS] " : "[FAIL] ") << idx << ". " << label;
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << elapsed << " s";
    std::cout << "  (" << os.str();
    if (!inBudget) std::cout << ", over the " << budget << " s budget";
    if (!detail.empty()) std::cout << "; " << detail;
    std::cout << ")\n";
    if (!(ok && inBudget)) ++g_failures;
}

const CheckResult* find(const std::vector<CheckResult>& rs, const std::string& name) {
    for (const auto& r : rs)
        if (r.name == name) return &r;
    return nullptr;
}

bool all_passed(const std::vector<CheckResult>& rs, std::string& firstBad) {
    for (const auto& r : rs)
        if (!r.passed()) {
            firstBad = r.name;
            return false;
        }
    return true;
}

prof::Profile zero_profile() {
    auto z = [](double) { return 0.0; };
    return prof::raw_profile("zero", 1.0, 10.0, z, z, z);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];

    // 1. frozen monodromy matrices
    {
        auto t0 = Clock::now();
        bool ok = sl2z::monodromy_matrix(2, 3, 7) == sl2z::Sl2Matrix(5, -11, 1, -2) &&
                  sl2z::monodromy_matrix(4, 4, 4) == sl2z::Sl2Matrix(21, -8, 8, -3);
        report(1, "monodromy matrices for (2,3,7) and (4,4,4) are exact", ok,
               seconds_since(t0), 1.0);
    }

    // 2. trace identity across the whole small range
    {
        auto t0 = Clock::now();
        bool ok = true;
        for (std::int64_t p = 2; p <= 12 && ok; ++p)
            for (std::int64_t q = p; q <= 12 && ok; ++q)
                for (std::int64_t r = q; r <= 12 && ok; ++r)
                    ok = sl2z::trace_identity_check(p, q, r).equal;
        report(2, "trace identity exact for all 2 <= p <= q <= r <= 12", ok,
               seconds_since(t0), 1.0);
    }

    // 3. conjugate-to-inverse by the word route, cross-checked by brute force
    {
        auto t0 = Clock::now();
        bool ok = true;
        std::string detail;
        for (auto [p, q, r] : {std::array<int, 3>{2, 3, 7}, std::array<int, 3>{4, 4, 4}}) {
            sl2z::Sl2Matrix A = sl2z::monodromy_matrix(p, q, r);
            sl2z::ConjugacyResult byWord = sl2z::are_conjugate(A, A.inverse());
            auto byForce = sl2z::brute_force_conjugator(A, A.inverse(), 60);
            bool wordOk = byWord.conjugate && byWord.witness &&
                          *byWord.witness * A * byWord.witness->inverse() == A.inverse();
            bool forceOk = byForce && *byForce * A * byForce->inverse() == A.inverse();
            if (!(wordOk && forceOk)) {
                ok = false;
                detail = "route disagreement on (" + std::to_string(p) + "," +
                         std::to_string(q) + "," + std::to_string(r) + ")";
            }
        }
        report(3, "A_{2,3,7} and A_{4,4,4} conjugate to their inverses (both routes)", ok,
               seconds_since(t0), 5.0, detail);
    }

    // 4. unipotent normal forms on the three nil triples
    {
        auto t0 = Clock::now();
        bool ok = true;
        const std::array<std::array<std::int64_t, 4>, 3> cases = {
            {{3, 3, 3, 3}, {2, 4, 4, 2}, {2, 3, 6, 1}}};
        for (const auto& c : cases) {
            sl2z::Sl2Matrix A = sl2z::monodromy_matrix(c[0], c[1], c[2]);
            sl2z::Sl2Matrix target(1, 0, c[3], 1);
            ok = ok && sl2z::unipotent_invariant(A) == c[3] &&
                 sl2z::are_conjugate(A, target).conjugate;
        }
        report(4, "nil monodromies conjugate to [[1,0],[l,1]] with l = 3, 2, 1", ok,
               seconds_since(t0), 1.0);
    }

    // 5. topological invariants of the two reference cusp links
    {
        auto t0 = Clock::now();
        bool ok = true;
        for (auto [p, q, r] : {std::array<int, 3>{2, 3, 7}, std::array<int, 3>{4, 4, 4}}) {
            sl2z::TopologicalInvariants topo = sl2z::topological_invariants(p, q, r);
            ok = ok && topo.mu == 11 && topo.chiFiber == 12 && topo.chiGlued == 24;
        }
        report(5, "mu = 11, chi_fiber = 12, chi_glued = 24 for (2,3,7) and (4,4,4)", ok,
               seconds_since(t0), 1.0);
    }

    // 6. contact model checks for both geometries on 16^3 grids
    {
        auto t0 = Clock::now();
        bool ok = true;
        std::string detail;
        for (auto [p, q, r] : {std::array<int, 3>{3, 3, 3}, std::array<int, 3>{2, 3, 7}}) {
            link::LinkModel m = link::build_link_model(p, q, r);
            ext::Grid g = link::default_link_grid(16);
            CheckResult contact = link::check_contact(m, g, 1e-6);
            CheckResult reeb = link::check_reeb_tangent_to_fibers(m, g, 1e-10);
            CheckResult div = link::check_dx_divisibility(m, g, 1e-12);
            CheckResult deck = link::check_deck_invariance(m, 16, 1e-10);
            bool here = contact.passed() && contact.worstMargin > 0.0 && reeb.passed() &&
                        reeb.worstResidual <= 1e-10 && div.passed() &&
                        div.worstResidual <= 1e-12 && deck.passed() &&
                        deck.worstResidual <= 1e-10;
            if (!here) {
                ok = false;
                detail = m.kind_label();
            }
        }
        report(6, "contact, Reeb tangency, dx divisibility, deck invariance (both kinds)", ok,
               seconds_since(t0), 10.0, detail);
    }

    // 7. nil closed-form constants from the grid
    {
        auto t0 = Clock::now();
        link::LinkModel m = link::build_link_model(3, 3, 3);
        link::GeometryConstants gc = link::geometry_constants(m, link::default_link_grid(16));
        const double twoPi = 2.0 * 3.14159265358979323846;
        double expected = 3.0 / twoPi;
        bool ok = std::abs(gc.aMin - expected) <= 1e-8 && std::abs(gc.aMax - expected) <= 1e-8 &&
                  gc.cMax <= 1e-12 && std::abs(gc.mMin - 1.0) <= 1e-8 &&
                  link::check_constants_closed_form(m, link::default_link_grid(16), 1e-8).passed();
        report(7, "nil constants a = A = l/2pi, C = 0, m = 1 on the grid", ok,
               seconds_since(t0), 5.0);
    }

    // 8. end form verified on all five triples at full resolution
    {
        auto t0 = Clock::now();
        bool ok = true;
        std::string detail;
        const std::array<std::array<int, 3>, 5> triples = {
            {{2, 3, 7}, {4, 4, 4}, {3, 3, 3}, {2, 4, 4}, {2, 3, 6}}};
        for (const auto& tr : triples) {
            link::LinkModel m = link::build_link_model(tr[0], tr[1], tr[2]);
            link::GeometryConstants gc =
                link::geometry_constants(m, link::default_link_grid(16));
            cons::EndConstants ec = cons::choose_constants(gc);
            prof::Profile K = prof::make_profile_K();
            prof::Profile L = prof::make_profile_L(ec.a);
            ext::Grid g = cons::default_end_grid(64, 16);
            auto rs = cons::verify_end_form(m, K, L, ec.a, ec.b, g, 1e-12, 1e-6);
            std::string bad;
            if (!all_passed(rs, bad)) {
                ok = false;
                detail = bad + " on (" + std::to_string(tr[0]) + "," + std::to_string(tr[1]) +
                         "," + std::to_string(tr[2]) + ")";
            }
        }
        report(8, "end form passes on all five triples at 64x16^3", ok, seconds_since(t0),
               60.0, detail);
    }

    // 9. L = 0 must fail on the descent interval with a witness
    {
        auto t0 = Clock::now();
        link::LinkModel m = link::build_link_model(3, 3, 3);
        link::GeometryConstants gc = link::geometry_constants(m, link::default_link_grid(16));
        cons::EndConstants ec = cons::choose_constants(gc);
        prof::Profile K = prof::make_profile_K();
        auto rs = cons::verify_end_form(m, K, zero_profile(), ec.a, ec.b,
                                        cons::default_end_grid(64, 16), 1e-12, 1e-6);
        const CheckResult* band = find(rs, "end-form-positivity-3-8");
        bool ok = band && band->status == CheckStatus::Fail && band->witnessDim == 4 &&
                  band->witnessPoint[0] >= 4.0 && band->witnessPoint[0] <= 8.0;
        std::string detail =
            band ? "witness rho = " + std::to_string(band->witnessPoint[0]) : "record missing";
        report(9, "L = 0 fails positivity on [4,8] with a witness point", ok,
               seconds_since(t0), 10.0, detail);
    }

    // 10. circular family: lambda closed form, passing and failing L choices
    {
        auto t0 = Clock::now();
        link::LinkModel m = link::build_link_model(3, 3, 3);
        prof::Profile K = prof::make_profile_K_circular();
        ext::Grid g = cons::default_circular_grid(16, 16);
        cons::SampledLambda lam = cons::lambda_profile(m, K, g);
        bool lamOk = lam.worstDiff <= 1e-8;

        const double twoPi = 2.0 * 3.14159265358979323846;
        auto good = cons::verify_circular(m, K, prof::make_profile_L_circular(m.bigA, 1.0), g,
                                          1e-8, 1e-6, twoPi);
        std::string bad;
        bool goodOk = all_passed(good, bad);

        auto tight = cons::verify_circular(m, K, prof::make_profile_L_circular(m.bigA, -0.1), g,
                                           1e-8, 1e-6, -0.1 * twoPi);
        const CheckResult* pos = find(tight, "circular-positivity");
        bool badOk = pos && pos->status == CheckStatus::Fail;

        report(10, "circular: lambda matches closed form; L = lambda+1 passes, lambda-0.1 fails",
               lamOk && goodOk && badOk, seconds_since(t0), 20.0, bad);
    }

    // 11. turbulization on both geometries
    {
        auto t0 = Clock::now();
        bool ok = true;
        std::string detail;
        for (auto [p, q, r] : {std::array<int, 3>{3, 3, 3}, std::array<int, 3>{2, 3, 7}}) {
            link::LinkModel m = link::build_link_model(p, q, r);
            link::GeometryConstants gc =
                link::geometry_constants(m, link::default_link_grid(16));
            cons::EndConstants ec = cons::choose_constants(gc);
            auto rs = cons::verify_tubular(m, prof::make_profile_psi(), ec.a, ec.b,
                                           cons::default_tubular_grid(9, 8), 1e-10, 1e-6);
            const CheckResult* integ = find(rs, "turbulization-integrability");
            const CheckResult* leaf = find(rs, "turbulization-leaf-pfaffian");
            const CheckResult* bdry = find(rs, "turbulization-boundary-match");
            bool here = integ && integ->passed() && integ->worstResidual <= 1e-12 && leaf &&
                        leaf->passed() && leaf->worstMargin >= 1e-6 && bdry && bdry->passed() &&
                        bdry->worstResidual <= 1e-10;
            if (!here) {
                ok = false;
                detail = m.kind_label();
            }
        }
        report(11, "turbulization: integrability, leaf Pfaffian, boundary Pfaffian = ab", ok,
               seconds_since(t0), 20.0, detail);
    }

    // 12. b-form degeneration orders and the parity gates
    {
        auto t0 = Clock::now();
        link::LinkModel m = link::build_link_model(3, 3, 3);
        ext::Grid g = cons::default_bsymplectic_grid(32, 8);
        bool ok = true;
        std::string detail;
        for (int ell : {1, 2, 3}) {
            cons::BGluingMode mode =
                (ell % 2 == 1) ? cons::BGluingMode::Double : cons::BGluingMode::SameSign;
            auto rs = cons::verify_bsymplectic(m, ell, prof::make_profile_p(ell), mode, g, 1e-12);
            const CheckResult* fit = find(rs, "b-degeneration-order");
            std::string bad;
            if (!(fit && fit->worstResidual <= 0.05 && all_passed(rs, bad))) {
                ok = false;
                detail = "l = " + std::to_string(ell) + (bad.empty() ? "" : " " + bad);
            }
        }
        bool rejectedEvenDouble = false, rejectedOddSame = false;
        try {
            cons::verify_bsymplectic(m, 2, prof::make_profile_p(2), cons::BGluingMode::Double, g,
                                     1e-12);
        } catch (const ParityError&) {
            rejectedEvenDouble = true;
        }
        try {
            cons::verify_bsymplectic(m, 3, prof::make_profile_p(3), cons::BGluingMode::SameSign,
                                     g, 1e-12);
        } catch (const ParityError&) {
            rejectedOddSame = true;
        }
        ok = ok && rejectedEvenDouble && rejectedOddSame;
        report(12, "b-form degeneration order = l +- 0.05 for l = 1,2,3; parity gates reject",
               ok, seconds_since(t0), 10.0, detail);
    }

    // 13. foliated cylinder: overlaps and leafwise Pfaffians
    {
        auto t0 = Clock::now();
        link::LinkModel m = link::build_link_model(3, 3, 3);
        auto rs = cons::verify_foliated(m, prof::make_profile_phi(),
                                        cons::default_foliated_grid(25, 8), 1e-10, 1e-6);
        bool ok = true;
        std::string bad;
        for (const char* name : {"foliated-overlap-minus-zero", "foliated-overlap-zero-plus"}) {
            const CheckResult* c = find(rs, name);
            ok = ok && c && c->passed() && c->worstResidual <= 1e-10;
        }
        for (const char* name : {"foliated-leaf-pfaffian-minus", "foliated-leaf-pfaffian-zero",
                                 "foliated-leaf-pfaffian-plus"}) {
            const CheckResult* c = find(rs, name);
            ok = ok && c && c->passed() && c->worstMargin >= 1e-6;
        }
        ok = ok && all_passed(rs, bad);
        report(13, "foliated cylinder: both overlaps agree, Pfaffian positive on all three bands",
               ok, seconds_since(t0), 20.0, bad);
    }

    // 14. double gluing on the two cusp references
    {
        auto t0 = Clock::now();
        bool ok = true;
        std::string detail;
        const double twoPi = 2.0 * 3.14159265358979323846;
        for (auto [p, q, r] : {std::array<int, 3>{2, 3, 7}, std::array<int, 3>{4, 4, 4}}) {
            link::LinkModel m = link::build_link_model(p, q, r);
            link::GeometryConstants gc =
                link::geometry_constants(m, link::default_link_grid(16));
            cons::EndConstants ec = cons::choose_constants(gc);
            ext::Grid g = ext::make_grid(4, {ext::GridAxis{"rho", 8.0, 12.0, 9, false},
                                             ext::GridAxis{"x", 0.0, twoPi, 8, true},
                                             ext::GridAxis{"u", 0.0, 1.0, 4, true},
                                             ext::GridAxis{"v", 0.0, 1.0, 4, true}});
            auto rs = cons::verify_double_gluing(m, ec.a, ec.b, g, 1e-12);
            const CheckResult* seam = find(rs, "double-gluing-seam-match");
            const CheckResult* orient = find(rs, "double-gluing-orientation");
            bool here = seam && seam->passed() && seam->worstResidual <= 1e-12 && orient &&
                        orient->passed();
            if (!here) {
                ok = false;
                detail = "(" + std::to_string(p) + "," + std::to_string(q) + "," +
                         std::to_string(r) + ")";
            }
        }
        report(14, "double gluing seam and orientation on (2,3,7) and (4,4,4)", ok,
               seconds_since(t0), 10.0, detail);
    }

    // 15. the shipped binary, full default run, twice, byte-identical reports
    {
        auto t0 = Clock::now();
        bool ok = false;
        std::string detail;
        if (cli.empty()) {
            detail = "missing --cli <path>";
        } else {
            std::string cmd1 = cli + " verify --p 2 --q 3 --r 7 --out acceptance_rep1.json";
            std::string cmd2 = cli + " verify --p 2 --q 3 --r 7 --out acceptance_rep2.json";
#ifdef _WIN32
            cmd1 += " > NUL";
            cmd2 += " > NUL";
#else
            cmd1 += " > /dev/null";
            cmd2 += " > /dev/null";
#endif
            int rc1 = std::system(cmd1.c_str());
            int rc2 = std::system(cmd2.c_str());
            std::string rep1 = read_file("acceptance_rep1.json");
            std::string rep2 = read_file("acceptance_rep2.json");
            ok = rc1 == 0 && rc2 == 0 && !rep1.empty() && rep1 == rep2;
            if (rc1 != 0 || rc2 != 0) detail = "nonzero exit";
            else if (rep1.empty()) detail = "empty report";
            else if (rep1 != rep2) detail = "reports differ between runs";
        }
        report(15, "cli verify --p 2 --q 3 --r 7 exits 0 twice with identical reports", ok,
               seconds_since(t0), 120.0, detail);
    }

    std::cout << (g_failures == 0 ? "all criteria passed\n"
                                  : std::to_string(g_failures) + " criteria failed\n");
    return g_failures == 0 ? 0 : 1;
}
