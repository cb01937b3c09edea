#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fforge/errors.hpp"
#include "fforge/profiles.hpp"

using namespace fforge;
using namespace fforge::prof;

namespace {

constexpr double kPi = 3.14159265358979323846;

// dense scan of |f.deriv * f.value| over [lo,hi]
double max_slope_load(const Profile& p, double lo, double hi, int n = 20000) {
    double worst = 0.0;
    for (int i = 0; i <= n; ++i) {
        double x = lo + (hi - lo) * i / n;
        worst = std::max(worst, std::abs(p.deriv(x) * p.value(x)));
    }
    return worst;
}

}  // namespace

TEST_CASE("smoothstep kernel basics") {
    CHECK(smoothstep(0.0) == 0.0);
    CHECK(smoothstep(1.0) == 1.0);
    CHECK(smoothstep(-3.0) == 0.0);
    CHECK(smoothstep(7.0) == 1.0);
    CHECK(smoothstep(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(smoothstep_d1(0.5) == doctest::Approx(1.875).epsilon(1e-15));
    CHECK(smoothstep_d1(0.0) == 0.0);
    CHECK(smoothstep_d1(1.0) == 0.0);
    CHECK(smoothstep_d2(0.0) == 0.0);
    CHECK(smoothstep_d2(1.0) == 0.0);
    CHECK(smoothstep_int(1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(smoothstep_int(2.0) == doctest::Approx(1.5).epsilon(1e-15));
    // integral really integrates the step
    double acc = 0.0, h = 1e-4;
    for (int i = 0; i < 10000; ++i) acc += smoothstep((i + 0.5) * h) * h;
    CHECK(acc == doctest::Approx(smoothstep_int(1.0)).epsilon(1e-6));
}

TEST_CASE("K profile: identity zone, plateau, controlled descent, dead tail") {
    Profile K = make_profile_K();
    CHECK(K.value(1.0) == 1.0);
    CHECK(K.value(2.0) == 2.0);
    CHECK(K.value(2.7) == 2.7);
    CHECK(K.deriv(1.5) == 1.0);
    CHECK(K.value(3.6) == doctest::Approx(3.1).epsilon(1e-15));
    CHECK(K.deriv(3.7) == 0.0);
    CHECK(K.value(8.0) == 0.0);
    CHECK(K.value(9.3) == 0.0);
    CHECK(K.deriv(8.5) == 0.0);
    // monotone up then down
    CHECK(K.deriv(3.1) > 0.0);
    CHECK(K.deriv(4.3) < 0.0);
    CHECK(K.deriv(6.0) == -1.0);

    // the load |K'K| that the end-form positivity budget pays for
    double descent = max_slope_load(K, 4.0, 8.0);
    CHECK(descent < 2.1);
    CHECK(descent > 2.0);  // the design rides close to its own budget
    CHECK(max_slope_load(K, 1.0, 10.0) < 4.0);
}

TEST_CASE("K audit rejects broken descents") {
    // too-steep straight descent: |K'K| blows past 2.1 (and 4 eventually)
    Profile bad = raw_profile(
        "K", 1.0, 10.0, [](double r) { return r <= 3.0 ? r : std::max(0.0, 3.0 - 1.0 * (r - 3.0)); },
        [](double r) { return r <= 3.0 ? 1.0 : (r < 6.0 ? -1.0 : 0.0); },
        [](double) { return 0.0; }, {3.0, 6.0});
    CHECK_THROWS_AS(audit_profile_K(bad), ProfileConstraintError);

    // nonzero tail
    Profile tail = raw_profile(
        "K", 1.0, 10.0, [](double r) { return r <= 3.0 ? r : 0.1; },
        [](double) { return 0.0; }, [](double) { return 0.0; }, {3.0});
    CHECK_THROWS_AS(audit_profile_K(tail), ProfileConstraintError);

    // identity zone off by a shift
    Profile shifted = raw_profile(
        "K", 1.0, 10.0, [](double r) { return r - 0.5; },
        [](double) { return 1.0; }, [](double) { return 0.0; }, {});
    CHECK_THROWS_AS(audit_profile_K(shifted), ProfileConstraintError);
}

TEST_CASE("L profile rises from 0 to its plateau") {
    Profile L = make_profile_L(0.7);
    CHECK(L.value(1.0) == 0.0);
    CHECK(L.value(1.5) == 0.0);
    CHECK(L.value(2.0) == 0.0);
    CHECK(L.value(3.0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(L.value(9.0) == 0.7);
    CHECK(L.value(2.5) == doctest::Approx(0.35).epsilon(1e-15));
    CHECK(L.deriv(2.5) > 0.0);
    CHECK_THROWS_AS(make_profile_L(0.0), ProfileConstraintError);
    CHECK_THROWS_AS(make_profile_L(-1.0), ProfileConstraintError);

    Profile dip = raw_profile(
        "L", 1.0, 10.0, [](double r) { return r < 2.0 ? 0.0 : (r < 3.0 ? -0.1 : 0.7); },
        [](double) { return 0.0; }, [](double) { return 0.0; }, {2.0, 3.0});
    CHECK_THROWS_AS(audit_profile_L(dip, 0.7), ProfileConstraintError);
}

TEST_CASE("psi profile: full near the core, zero at the boundary") {
    Profile psi = make_profile_psi();
    CHECK(psi.value(0.0) == 1.0);
    CHECK(psi.value(0.25) == 1.0);
    CHECK(psi.value(0.5) == 1.0);
    CHECK(psi.value(1.0) == 0.0);
    CHECK(psi.value(0.75) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(psi.deriv(0.75) < -1.0);

    Profile rising = raw_profile(
        "psi", 0.0, 1.0, [](double r) { return r; }, [](double) { return 1.0; },
        [](double) { return 0.0; }, {});
    CHECK_THROWS_AS(audit_profile_psi(rising), ProfileConstraintError);

    // derivative closure lying about the slope is caught by the FD cross-check
    Profile lying = raw_profile(
        "psi", 0.0, 1.0,
        [](double r) { return r < 0.5 ? 1.0 : (r < 1.0 ? 1.0 - smoothstep(2.0 * (r - 0.5)) : 0.0); },
        [](double r) { return r < 0.5 || r >= 1.0 ? 0.0 : -1.5 * smoothstep_d1(2.0 * (r - 0.5)); },
        [](double r) { return r < 0.5 || r >= 1.0 ? 0.0 : -4.0 * smoothstep_d2(2.0 * (r - 0.5)); },
        {0.5, 1.0});
    CHECK_THROWS_AS(audit_profile_psi(lying), ProfileConstraintError);
}

TEST_CASE("phi profile: quarter-turn staircase with exact midpoints") {
    Profile phi = make_profile_phi();
    CHECK(phi.value(-2.0) == 0.0);
    CHECK(phi.value(-1.0) == 0.0);
    CHECK(phi.value(0.0) == kPi / 2.0);
    CHECK(phi.value(2.0) == kPi);
    CHECK(phi.value(-0.5) == doctest::Approx(kPi / 4.0).epsilon(1e-15));
    CHECK(phi.value(0.5) == doctest::Approx(3.0 * kPi / 4.0).epsilon(1e-15));
    CHECK(phi.deriv(-0.5) == 0.0);
    CHECK(phi.deriv(0.5) == 0.0);
    CHECK(phi.deriv(0.15) > 0.0);

    // plateau distortion phi(-0.5) = 0.3 pi is rejected
    Profile off = raw_profile(
        "phi", -2.0, 2.0,
        [&phi](double t) {
            double bump = (t > -2.0 / 3.0 && t < -1.0 / 3.0) ? 0.3 * kPi - kPi / 4.0 : 0.0;
            return phi.value(t) + bump;
        },
        phi.deriv, phi.deriv2, phi.knots);
    CHECK_THROWS_AS(audit_profile_phi(off), ProfileConstraintError);
}

TEST_CASE("p_ell profile: exact singular zone, Hermite bridge, parity") {
    for (int ell : {1, 2, 3}) {
        Profile p = make_profile_p(ell);
        CHECK(p.value(0.5) == std::pow(2.0, ell));
        CHECK(p.value(0.25) == doctest::Approx(std::pow(4.0, ell)).epsilon(1e-15));
        CHECK(p.value(1.5) == 1.0);
        CHECK(p.value(1.9) == 1.0);
        CHECK(p.deriv(1.7) == 0.0);
        // monotone bridge
        CHECK(p.deriv(1.0) <= 0.0);
        CHECK(p.value(0.6) > p.value(1.4));
    }
    // frozen Hermite midpoint values (hand-solved coefficients)
    CHECK(make_profile_p(1).value(1.0) == doctest::Approx(1.125).epsilon(1e-15));
    CHECK(make_profile_p(2).value(1.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(make_profile_p(3).value(1.0) == doctest::Approx(3.0).epsilon(1e-15));

    // parity: odd orders are odd, even orders are even
    Profile p1 = make_profile_p(1);
    CHECK(p1.value(-0.25) == -4.0);
    CHECK(p1.value(-1.8) == -1.0);
    Profile p2 = make_profile_p(2);
    CHECK(p2.value(-0.25) == 16.0);
    CHECK(p2.value(-1.8) == 1.0);

    // ell = 0 degenerates to the constant 1
    Profile p0 = make_profile_p(0);
    CHECK(p0.value(0.01) == 1.0);
    CHECK(p0.value(-1.2) == 1.0);
    CHECK(p0.deriv(0.7) == 0.0);

    CHECK_THROWS_AS(make_profile_p(-1), ProfileConstraintError);
}

TEST_CASE("circular profiles are smooth and periodic") {
    Profile K = make_profile_K_circular();
    CHECK(K.value(0.0) == 1.5);
    CHECK(K.value(kPi) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(K.value(2.0 * kPi) == doctest::Approx(K.value(0.0)).epsilon(1e-14));
    CHECK(K.deriv(0.0) == doctest::Approx(0.0));

    double A = 3.0 / (2.0 * kPi);
    Profile L = make_profile_L_circular(A, 1.0);
    // at theta = pi/2: lambda = A/2 * 1 * (1 + 0) = A/2
    CHECK(L.value(kPi / 2.0) == doctest::Approx(1.0 + 0.5 * A).epsilon(1e-14));
    CHECK(L.value(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    // FD sanity of the hand-differentiated trig
    double h = 1e-6;
    for (double th : {0.3, 1.1, 2.9, 4.2, 5.9}) {
        double fd = (L.value(th + h) - L.value(th - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(L.deriv(th)).epsilon(1e-7));
        double fd2 = (L.deriv(th + h) - L.deriv(th - h)) / (2.0 * h);
        CHECK(fd2 == doctest::Approx(L.deriv2(th)).epsilon(1e-6));
    }
}
