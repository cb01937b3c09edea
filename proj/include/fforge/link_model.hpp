#ifndef FFORGE_LINK_MODEL_HPP
#define FFORGE_LINK_MODEL_HPP

#include <array>
#include <string>
#include <vector>

#include "fforge/check.hpp"
#include "fforge/exterior.hpp"
#include "fforge/sl2z.hpp"

namespace fforge::link {

enum class LinkKind { Nil, Solv };

// Coordinate model of the torus-bundle link on the chart
// (x, u, v) in [0, 2pi) x [0,1)^2.  Forms are produced on demand for any
// ambient chart whose LAST three axes are (x, u, v); `dim` = 3 gives the
// bundle itself, 4 and 5 the product charts used by the constructions.
struct LinkModel {
    LinkKind kind = LinkKind::Nil;
    int p = 0, q = 0, r = 0;
    sl2z::Sl2Matrix monodromy = sl2z::Sl2Matrix::identity();
    int ell = 0;             // nil: twist = |euler number|
    double lambdaHat = 0.0;  // solv: log(larger eigenvalue) / 2pi
    double bigA = 0.0;       // closed-form value of a = A = |alpha ^ dalpha|

    // solv eigen-rows (ds, dt) expressed in (du, dv); unused for nil
    std::array<double, 2> sigmaS{}, sigmaT{};

    ext::FormField alpha_form(int dim) const;   // contact form alpha_N
    ext::FormField omega_form(int dim) const;   // fiber area form du ^ dv
    ext::FormField dx_form(int dim) const;      // the fibration 1-form dx
    ext::Coframe coframe_at(const ext::Point& p3) const;     // 3-chart only
    std::array<double, 5> reeb_closed_form(const ext::Point& p3) const;
    std::vector<ext::ChartMap> deck_maps() const;            // T_u, T_v, T_x

    std::string kind_label() const { return kind == LinkKind::Nil ? "nil" : "solv"; }
};

// Constants of the chosen metric, measured on a grid.
struct GeometryConstants {
    double aMin = 0.0;  // min |alpha ^ dalpha|
    double aMax = 0.0;  // max |alpha ^ dalpha|
    double cMax = 0.0;  // max |alpha ^ omega|
    double mMin = 0.0;  // min |dx ^ omega|
    std::string gridUsed;
};

LinkModel build_link_model(int p, int q, int r);

ext::Grid default_link_grid(int n);  // n^3 nodes, all axes periodic

// alpha ^ dalpha / coframe volume: positive and bounded away from 0.
CheckResult check_contact(const LinkModel& m, const ext::Grid& g, double delta);
CheckResult check_contact(const LinkModel& m, const ext::FormField& alpha, const ext::Grid& g,
                          double delta);

// Reeb field from the pointwise 3x3 linear solve: tangent to the fibers and
// matching the closed form.  `alphaOverride` lets negative tests swap in a
// perturbed contact form while keeping the model's closed-form oracle.
CheckResult check_reeb_tangent_to_fibers(const LinkModel& m, const ext::Grid& g, double tol);
CheckResult check_reeb_tangent_to_fibers(const LinkModel& m, const ext::FormField& alpha,
                                         const ext::Grid& g, double tol);

// dx ^ dalpha = 0 (divisibility of dalpha by dx).
CheckResult check_dx_divisibility(const LinkModel& m, const ext::Grid& g, double tol);
CheckResult check_dx_divisibility(const LinkModel& m, const ext::FormField& alpha,
                                  const ext::Grid& g, double tol);

// alpha, omega, and the coframe rows are invariant under all deck maps.
CheckResult check_deck_invariance(const LinkModel& m, int samples, double tol);

// integral of omega over the fiber {x = 0} equals 1.
CheckResult check_fiber_area(const LinkModel& m, int n, double tol);

GeometryConstants geometry_constants(const LinkModel& m, const ext::Grid& g);

// Grid constants against the closed forms (a = A = bigA, C = 0, m = 1).
CheckResult check_constants_closed_form(const LinkModel& m, const ext::Grid& g, double tol);

}  // namespace fforge::link

#endif  // FFORGE_LINK_MODEL_HPP
