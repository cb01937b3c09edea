#ifndef FFORGE_CONSTRUCTIONS_HPP
#define FFORGE_CONSTRUCTIONS_HPP

#include <string>
#include <vector>

#include "fforge/check.hpp"
#include "fforge/exterior.hpp"
#include "fforge/link_model.hpp"
#include "fforge/profiles.hpp"

namespace fforge::cons {

// offset + scale * p(x_axis) as a scalar field with full derivative data
ext::ScalarField scalar_of_profile(const prof::Profile& p, int axis, double scale = 1.0,
                                   double offset = 0.0);

// Constants for the end form.  b is capped by the alpha-omega coupling when
// that coupling is nonzero (cap reported as "+inf" otherwise); a then sits
// 10% above its strict lower bound.
struct EndConstants {
    double a = 0.0, b = 0.0;
    double aBound = 0.0;  // strict lower bound (2A + bC) / (b m)
    std::string bBound;   // "+inf" or the numeric cap
};
EndConstants choose_constants(const link::GeometryConstants& gc);

// ---- end form ----------------------------------------------------------
// omega_E = d(K alpha_N) + b omega_Sigma + L drho ^ dx on (rho, x, u, v).
ext::FormField assemble_end_form(const link::LinkModel& m, const prof::Profile& K,
                                 const prof::Profile& L, double b);

// [1,10] x N^3; rho bounded, the rest periodic.
ext::Grid default_end_grid(int rhoCount, int nCount);

// Checks, in order: annihilation identity, positivity on [1,2] / [2,3] /
// [3,8] against the closed-form square, exact cylindrical tail on [8,10],
// and finite-difference closedness order.
std::vector<CheckResult> verify_end_form(const link::LinkModel& m, const prof::Profile& K,
                                         const prof::Profile& L, double a, double b,
                                         const ext::Grid& g, double identityTol, double delta);

// ---- circular family ---------------------------------------------------
// lambda(theta) = -min over N of [K' alpha ^ (K dalpha + omega)] / [dx ^ omega]
struct SampledLambda {
    std::vector<double> theta, value, closedForm;
    double worstDiff = 0.0;
};
SampledLambda lambda_profile(const link::LinkModel& m, const prof::Profile& K,
                             const ext::Grid& g);

// omega = d(K(theta) alpha_N) + omega_Sigma + L(theta) dtheta ^ dx
ext::FormField assemble_circular_form(const link::LinkModel& m, const prof::Profile& K,
                                      const prof::Profile& L);

ext::Grid default_circular_grid(int thetaCount, int nCount);  // all periodic

// Checks: lambda against its closed form, pointwise positivity of omega^2
// (fails with a witness theta when L <= lambda somewhere), the cohomology
// coefficient integral of L, and finite-difference closedness order.
std::vector<CheckResult> verify_circular(const link::LinkModel& m, const prof::Profile& K,
                                         const prof::Profile& L, const ext::Grid& g, double tol,
                                         double delta, double expectedIntegral);

// ---- turbulization -----------------------------------------------------
struct TubularForms {
    ext::FormField alphaU;  // psi dx + (1 - psi) dr
    ext::FormField omegaU;  // a dtheta ^ ((1-psi)dx - psi dr) + b omega_Sigma
};
TubularForms assemble_tubular(const link::LinkModel& m, const prof::Profile& psi, double a,
                              double b);

ext::Grid default_tubular_grid(int rCount, int nCount);  // (r,theta,x,u,v)

// Checks: integrability of alpha_U (a structural zero), the leafwise
// Pfaffian against a((1-psi)^2 + psi^2)b, and the boundary restriction at
// r = 1 against the cylindrical form.
std::vector<CheckResult> verify_tubular(const link::LinkModel& m, const prof::Profile& psi,
                                        double a, double b, const ext::Grid& g, double tol,
                                        double delta);

// ---- b-type degeneration -----------------------------------------------
enum class BGluingMode { Double, SameSign };

// Omega_b = p(tau) dtau ^ dx + omega_Sigma on (tau, x, u, v)
ext::FormField assemble_bsymplectic(const link::LinkModel& m, const prof::Profile& p);

// Even tau count straddles 0 without sampling it.
ext::Grid default_bsymplectic_grid(int tauCount, int nCount);

// Checks: nondegeneracy off tau = 0, the log-log order fit of the inverse
// Pfaffian at tau = 2^-j (slope ell), and coefficientwise end matching in
// the requested gluing mode.  Mode/parity mismatch throws ParityError.
std::vector<CheckResult> verify_bsymplectic(const link::LinkModel& m, int ell,
                                            const prof::Profile& p, BGluingMode mode,
                                            const ext::Grid& g, double tol);

// ---- foliated cylinder -------------------------------------------------
struct FoliatedForms {
    ext::FormField alphaPrime;  // cos(phi) dtheta - sin(phi) dtau
    ext::FormField omegaMinus;  // +dtau ^ dx + omega_Sigma   on (-2, -1/3)
    ext::FormField omegaZero;   //  dtheta ^ dx + omega_Sigma on (-2/3, 2/3)
    ext::FormField omegaPlus;   // -dtau ^ dx + omega_Sigma   on (1/3, 2)
};
FoliatedForms assemble_foliated_cylinder(const link::LinkModel& m, const prof::Profile& phi);

ext::Grid default_foliated_grid(int tauCount, int nCount);  // (tau,theta,x,u,v)

// Checks: integrability of alpha' (structural zero), entrywise agreement of
// the overlapping leaf restrictions on both plateau bands, and the leafwise
// Pfaffian of each form on its own band.
std::vector<CheckResult> verify_foliated(const link::LinkModel& m, const prof::Profile& phi,
                                         const ext::Grid& g, double tol, double delta);

// ---- double gluing -----------------------------------------------------
// Seam identification rho -> 20 - rho, x -> -x, fiber via a conjugator B
// with B A B^-1 = A^-1.  Throws GluingUnavailableError when the monodromy is
// not conjugate to its inverse.
std::vector<CheckResult> verify_double_gluing(const link::LinkModel& m, double a, double b,
                                              const ext::Grid& g, double tol);

// ---- shared FD convergence helper --------------------------------------
// Residuals of d_fd(omega) at fixed probe points over nested grids whose
// spacings halve; passes when consecutive orders sit in [orderLo, orderHi].
// Residuals at or below `floor` on every level report Vacuous.
struct FdOrderConfig {
    std::vector<ext::Grid> levels;    // coarse to fine
    std::vector<ext::Point> probes;   // fixed evaluation points
    double orderLo = 1.9, orderHi = 2.3;
    double floor = 1e-13;
};
CheckResult check_closedness_fd_order(const std::string& name, const std::string& ref,
                                      const ext::FormField& omega, const FdOrderConfig& cfg);

// Quarter points of K's wide ease pieces.  Midpoints are blind spots: K
// eases its slope, so its value integrates a smoothstep, and the symmetry
// s(t) + s(1-t) = 1 makes the central difference exact there for every h.
std::vector<ext::Point> end_form_probes(const prof::Profile& K);

// max |d_fd(omega)| over cfg.probes, one entry per grid level
std::vector<double> fd_residuals(const ext::FormField& omega, const FdOrderConfig& cfg);

}  // namespace fforge::cons

#endif  // FFORGE_CONSTRUCTIONS_HPP
