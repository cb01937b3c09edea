#ifndef FFORGE_PROFILES_HPP
#define FFORGE_PROFILES_HPP

#include <functional>
#include <string>
#include <vector>

namespace fforge::prof {

// Quintic smoothstep and friends; the only transition kernel used anywhere.
double smoothstep(double t);        // 6t^5 - 15t^4 + 10t^3 clamped to [0,1]
double smoothstep_d1(double t);
double smoothstep_d2(double t);
double smoothstep_int(double t);    // integral of smoothstep from 0, S(1) = 1/2

// One-dimensional C^2 piecewise profile with analytic derivatives.  `knots`
// lists the stitch points so finite-difference cross-checks can stay clear
// of the (bounded) jumps in the third derivative.
struct Profile {
    std::string name;
    double lo = 0.0, hi = 1.0;
    std::function<double(double)> value, deriv, deriv2;
    std::vector<double> knots;
};

// End profile K on [1,10]: identity near the contact end, plateau, controlled
// descent, identically zero from 8 on.  The descent keeps |K'K| <= 2.1.
Profile make_profile_K();

// Interpolation profile L: 0 on [1,2], rises to the constant a on [3,inf).
Profile make_profile_L(double a);

// Turbulization profile psi on [0,1]: 1 near the core, 0 at the boundary.
Profile make_profile_psi();

// Foliation angle phi on [-2,2]: 0 -> pi in quarter-turn steps with plateaus
// at pi/4 and 3pi/4 on [-2/3,-1/3] and [1/3,2/3]; phi(0) = pi/2 exactly.
Profile make_profile_phi();

// Degeneration profile p_ell on (-2,2) \ {0}: tau^{-ell} near 0, +-1 plateaus
// at the ends (sign parity that of ell), monotone quintic Hermite in between.
Profile make_profile_p(int ell);

// Circular-coordinate profiles on [0,2pi], smooth and periodic.
Profile make_profile_K_circular();
// L = offset - bigA*K'(theta)*K(theta), i.e. the closed-form lambda plus a
// constant; negative offsets build deliberate violations for negative tests.
Profile make_profile_L_circular(double bigA, double offset);

// Unaudited profile for negative tests and ad-hoc overrides.
Profile raw_profile(std::string name, double lo, double hi,
                    std::function<double(double)> v,
                    std::function<double(double)> d1,
                    std::function<double(double)> d2,
                    std::vector<double> knots = {});

// Constraint audits; each factory runs its own and throws
// ProfileConstraintError on violation.  Public so tests can feed them
// deliberately broken profiles.
void audit_profile_K(const Profile& k);
void audit_profile_L(const Profile& l, double a);
void audit_profile_psi(const Profile& psi);
void audit_profile_phi(const Profile& phi);
void audit_profile_p(const Profile& p, int ell);

}  // namespace fforge::prof

#endif  // FFORGE_PROFILES_HPP
