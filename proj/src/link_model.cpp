#include "fforge/link_model.hpp"

#include <cmath>
#include <sstream>

#include "fforge/errors.hpp"

namespace fforge::link {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

struct Ax {
    int x, u, v;
};

Ax axes_for(int dim) {
    if (dim < 3 || dim > 5) throw DomainError("link forms need a chart of dimension 3..5");
    return {dim - 3, dim - 2, dim - 1};
}

std::string grid_label(const ext::Grid& g) {
    std::ostringstream os;
    for (int a = 0; a < g.dim; ++a) {
        if (a) os << "x";
        os << g.axes[static_cast<std::size_t>(a)].count;
    }
    return os.str();
}

double det3(const ext::Coframe& e) {
    const auto& r = e.rows;
    return r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
           r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
           r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
}

// 1-form field for coframe row i (0: dx, 1/2: metric fiber directions).
ext::FormField coframe_row_form(const LinkModel& m, int row) {
    if (row == 0) return m.dx_form(3);
    if (m.kind == LinkKind::Nil) {
        if (row == 1) return ext::coordinate_1form(3, 1);
        return m.alpha_form(3);
    }
    double lh = m.lambdaHat;
    double sgn = (row == 1) ? 1.0 : -1.0;  // e^{+lx} ds vs e^{-lx} dt
    std::array<double, 2> sig = (row == 1) ? m.sigmaS : m.sigmaT;
    ext::FormField f;
    f.dim = 3;
    f.degree = 1;
    f.eval = [lh, sgn, sig](const ext::Point& p, ext::Coeffs& c) {
        double e = std::exp(sgn * lh * p[0]);
        c[1] += e * sig[0];
        c[2] += e * sig[1];
    };
    return f;
}

CheckResult base_result(std::string name, std::string ref, const std::string& grid) {
    CheckResult r;
    r.name = std::move(name);
    r.paperRef = std::move(ref);
    r.gridUsed = grid;
    return r;
}

}  // namespace

ext::FormField LinkModel::alpha_form(int dim) const {
    Ax ax = axes_for(dim);
    ext::FormField f;
    f.dim = dim;
    f.degree = 1;
    if (kind == LinkKind::Nil) {
        double tw = static_cast<double>(ell) / kTwoPi;
        int axx = ax.x, axu = ax.u, axv = ax.v;
        f.eval = [tw, axx, axu, axv](const ext::Point& p, ext::Coeffs& c) {
            c[static_cast<std::size_t>(axv)] += 1.0;
            c[static_cast<std::size_t>(axu)] += tw * p[static_cast<std::size_t>(axx)];
        };
        f.evalDeriv = [tw, axx, axu](const ext::Point&, ext::DerivCoeffs& d) {
            d[static_cast<std::size_t>(axx)][static_cast<std::size_t>(axu)] += tw;
        };
        f.evalDeriv2 = [](const ext::Point&, ext::Deriv2Coeffs&) {};
    } else {
        double lh = lambdaHat;
        std::array<double, 2> ss = sigmaS, st = sigmaT;
        int axx = ax.x, axu = ax.u, axv = ax.v;
        auto parts = [lh, ss, st, axx](const ext::Point& p, double& cu, double& cv, double& du,
                                       double& dv, double& ddu, double& ddv) {
            double ep = std::exp(lh * p[static_cast<std::size_t>(axx)]);
            double em = 1.0 / ep;
            cu = ep * ss[0] + em * st[0];
            cv = ep * ss[1] + em * st[1];
            du = lh * (ep * ss[0] - em * st[0]);
            dv = lh * (ep * ss[1] - em * st[1]);
            ddu = lh * lh * cu;
            ddv = lh * lh * cv;
        };
        f.eval = [parts, axu, axv](const ext::Point& p, ext::Coeffs& c) {
            double cu, cv, du, dv, ddu, ddv;
            parts(p, cu, cv, du, dv, ddu, ddv);
            c[static_cast<std::size_t>(axu)] += cu;
            c[static_cast<std::size_t>(axv)] += cv;
        };
        f.evalDeriv = [parts, axx, axu, axv](const ext::Point& p, ext::DerivCoeffs& d) {
            double cu, cv, du, dv, ddu, ddv;
            parts(p, cu, cv, du, dv, ddu, ddv);
            d[static_cast<std::size_t>(axx)][static_cast<std::size_t>(axu)] += du;
            d[static_cast<std::size_t>(axx)][static_cast<std::size_t>(axv)] += dv;
        };
        f.evalDeriv2 = [parts, axx, axu, axv](const ext::Point& p, ext::Deriv2Coeffs& dd) {
            double cu, cv, du, dv, ddu, ddv;
            parts(p, cu, cv, du, dv, ddu, ddv);
            dd[static_cast<std::size_t>(axx)][static_cast<std::size_t>(axx)][static_cast<std::size_t>(axu)] += ddu;
            dd[static_cast<std::size_t>(axx)][static_cast<std::size_t>(axx)][static_cast<std::size_t>(axv)] += ddv;
        };
    }
    return f;
}

ext::FormField LinkModel::omega_form(int dim) const {
    Ax ax = axes_for(dim);
    const ext::ComboTable& t = ext::combo_table(dim, 2);
    int idx = t.maskToIndex[(1u << ax.u) | (1u << ax.v)];
    ext::Coeffs c{};
    c[static_cast<std::size_t>(idx)] = 1.0;
    return ext::constant_form(dim, 2, c);
}

ext::FormField LinkModel::dx_form(int dim) const { return ext::coordinate_1form(dim, axes_for(dim).x); }

ext::Coframe LinkModel::coframe_at(const ext::Point& p3) const {
    ext::Coframe e;
    e.dim = 3;
    e.rows[0] = {1.0, 0.0, 0.0, 0.0, 0.0};
    if (kind == LinkKind::Nil) {
        double tw = static_cast<double>(ell) / kTwoPi;
        e.rows[1] = {0.0, 1.0, 0.0, 0.0, 0.0};
        e.rows[2] = {0.0, tw * p3[0], 1.0, 0.0, 0.0};
    } else {
        double ep = std::exp(lambdaHat * p3[0]);
        double em = 1.0 / ep;
        e.rows[1] = {0.0, ep * sigmaS[0], ep * sigmaS[1], 0.0, 0.0};
        e.rows[2] = {0.0, em * sigmaT[0], em * sigmaT[1], 0.0, 0.0};
    }
    return e;
}

std::array<double, 5> LinkModel::reeb_closed_form(const ext::Point& p3) const {
    if (kind == LinkKind::Nil) return {0.0, 0.0, 1.0, 0.0, 0.0};
    double ep = std::exp(lambdaHat * p3[0]);
    double em = 1.0 / ep;
    // dual vectors of (ds, dt) in (u,v); the eigen-row matrix has det 1
    std::array<double, 2> dels{sigmaT[1], -sigmaT[0]};
    std::array<double, 2> delt{-sigmaS[1], sigmaS[0]};
    return {0.0, 0.5 * (em * dels[0] + ep * delt[0]), 0.5 * (em * dels[1] + ep * delt[1]), 0.0, 0.0};
}

std::vector<ext::ChartMap> LinkModel::deck_maps() const {
    std::vector<ext::ChartMap> out;
    auto translate = [](int axis, double by) {
        ext::ChartMap t;
        t.dimFrom = 3;
        t.dimTo = 3;
        t.affine = true;
        t.apply = [axis, by](const ext::Point& p) {
            ext::Point q = p;
            q[static_cast<std::size_t>(axis)] += by;
            return q;
        };
        t.jacobian = [](const ext::Point&, std::array<std::array<double, 5>, 5>& J) {
            J[0][0] = J[1][1] = J[2][2] = 1.0;
        };
        return t;
    };
    out.push_back(translate(1, 1.0));
    out.push_back(translate(2, 1.0));

    ext::ChartMap tx;
    tx.dimFrom = 3;
    tx.dimTo = 3;
    tx.affine = true;
    if (kind == LinkKind::Nil) {
        int l = ell;
        tx.apply = [l](const ext::Point& p) {
            return ext::Point{p[0] + kTwoPi, p[1], p[2] - l * p[1], 0.0, 0.0};
        };
        tx.jacobian = [l](const ext::Point&, std::array<std::array<double, 5>, 5>& J) {
            J[0][0] = 1.0;
            J[1][1] = 1.0;
            J[2][1] = -static_cast<double>(l);
            J[2][2] = 1.0;
        };
    } else {
        double a = static_cast<double>(monodromy.a), b = static_cast<double>(monodromy.b);
        double c = static_cast<double>(monodromy.c), d = static_cast<double>(monodromy.d);
        tx.apply = [a, b, c, d](const ext::Point& p) {
            return ext::Point{p[0] + kTwoPi, a * p[1] + b * p[2], c * p[1] + d * p[2], 0.0, 0.0};
        };
        tx.jacobian = [a, b, c, d](const ext::Point&, std::array<std::array<double, 5>, 5>& J) {
            J[0][0] = 1.0;
            J[1][1] = a;
            J[1][2] = b;
            J[2][1] = c;
            J[2][2] = d;
        };
    }
    out.push_back(tx);
    return out;
}

LinkModel build_link_model(int p, int q, int r) {
    sl2z::SingularityClass cls = sl2z::classify_singularity(p, q, r);
    if (cls.kind == sl2z::SingularityKind::Other)
        throw DomainError("unsupported singularity class: need a simple-elliptic or cusp triple");

    LinkModel m;
    m.p = p;
    m.q = q;
    m.r = r;
    m.monodromy = sl2z::monodromy_matrix(p, q, r);

    if (cls.kind == sl2z::SingularityKind::SimpleElliptic) {
        m.kind = LinkKind::Nil;
        m.ell = static_cast<int>(sl2z::unipotent_invariant(m.monodromy));
        if (m.ell <= 0) throw std::logic_error("nil twist must be positive for these triples");
        m.bigA = static_cast<double>(m.ell) / kTwoPi;
    } else {
        m.kind = LinkKind::Solv;
        double t = static_cast<double>(m.monodromy.trace());
        double sq = std::sqrt(t * t - 4.0);
        double a = static_cast<double>(m.monodromy.a);
        double c = static_cast<double>(m.monodromy.c);
        // c != 0 for any hyperbolic integer matrix (c = 0 forces trace +-2)
        double muS = (t - sq) / 2.0, muT = (t + sq) / 2.0;
        m.lambdaHat = std::log(muT) / kTwoPi;
        m.bigA = 2.0 * m.lambdaHat;
        double k = 1.0 / std::sqrt(std::abs(c) * sq);
        double flip = (c < 0.0) ? -1.0 : 1.0;
        m.sigmaS = {k * c, k * (muS - a)};
        m.sigmaT = {flip * k * c, flip * k * (muT - a)};
        double det = m.sigmaS[0] * m.sigmaT[1] - m.sigmaS[1] * m.sigmaT[0];
        if (std::abs(det - 1.0) > 1e-12)
            throw std::logic_error("eigen-row normalization failed to reach det 1");
    }
    return m;
}

ext::Grid default_link_grid(int n) {
    return ext::make_grid(3, {ext::GridAxis{"x", 0.0, kTwoPi, n, true},
                              ext::GridAxis{"u", 0.0, 1.0, n, true},
                              ext::GridAxis{"v", 0.0, 1.0, n, true}});
}

CheckResult check_contact(const LinkModel& m, const ext::Grid& g, double delta) {
    return check_contact(m, m.alpha_form(3), g, delta);
}

CheckResult check_contact(const LinkModel& m, const ext::FormField& alpha, const ext::Grid& g,
                          double delta) {
    CheckResult res = base_result("contact-positivity",
                                  "contact form on the torus-bundle link: alpha ^ dalpha > 0",
                                  grid_label(g));
    ext::FormField w = ext::wedge(alpha, ext::d_analytic(alpha));
    auto ratio = [&m, &w](const ext::Point& p) {
        return w.at(p)[0] / det3(m.coframe_at(p));
    };
    ext::GridScan s = ext::scan_grid(g, ratio);
    res.worstMargin = s.minValue;
    res.witnessPoint = s.argminPoint;
    res.witnessDim = 3;
    res.status = (s.minValue >= delta) ? CheckStatus::Pass : CheckStatus::Fail;
    std::ostringstream os;
    os << "ratio range [" << s.minValue << ", " << s.maxValue << "], closed form " << m.bigA;
    res.notes = os.str();
    return res;
}

CheckResult check_reeb_tangent_to_fibers(const LinkModel& m, const ext::Grid& g, double tol) {
    return check_reeb_tangent_to_fibers(m, m.alpha_form(3), g, tol);
}

CheckResult check_reeb_tangent_to_fibers(const LinkModel& m, const ext::FormField& alpha,
                                         const ext::Grid& g, double tol) {
    CheckResult res = base_result("reeb-fiber-tangency",
                                  "Reeb field of alpha_N stays tangent to the torus fibers",
                                  grid_label(g));
    ext::FormField da = ext::d_analytic(alpha);
    auto residual = [&m, &alpha, &da](const ext::Point& p) {
        ext::Coeffs a = alpha.at(p);
        ext::Coeffs d = da.at(p);
        // kernel of the antisymmetric 3x3 [d01, d02, d12], then scale by alpha
        double kx = d[2], ku = -d[1], kv = d[0];
        double ak = a[0] * kx + a[1] * ku + a[2] * kv;
        double scale = std::abs(a[0]) + std::abs(a[1]) + std::abs(a[2]) +
                       std::abs(kx) + std::abs(ku) + std::abs(kv);
        if (std::abs(ak) < 1e-12 * std::max(scale, 1.0))
            throw DegenerateGeometryError("degenerate contact data: Reeb system is singular");
        double rx = kx / ak, ru = ku / ak, rv = kv / ak;
        std::array<double, 5> closed = m.reeb_closed_form(p);
        double worst = std::abs(rx);  // |dx(R)|
        worst = std::max(worst, std::abs(rx - closed[0]));
        worst = std::max(worst, std::abs(ru - closed[1]));
        worst = std::max(worst, std::abs(rv - closed[2]));
        return worst;
    };
    ext::GridScan s = ext::scan_grid(g, residual);
    res.worstResidual = s.maxValue;
    res.witnessPoint = s.argmaxPoint;
    res.witnessDim = 3;
    res.status = (s.maxValue <= tol) ? CheckStatus::Pass : CheckStatus::Fail;
    res.notes = "pointwise linear solve vs closed form, and |dx(R)|";
    return res;
}

CheckResult check_dx_divisibility(const LinkModel& m, const ext::Grid& g, double tol) {
    return check_dx_divisibility(m, m.alpha_form(3), g, tol);
}

CheckResult check_dx_divisibility(const LinkModel& m, const ext::FormField& alpha,
                                  const ext::Grid& g, double tol) {
    CheckResult res = base_result("dalpha-dx-divisibility", "dalpha_N is divisible by dx",
                                  grid_label(g));
    ext::FormField w = ext::wedge(m.dx_form(3), ext::d_analytic(alpha));
    auto f = [&w](const ext::Point& p) { return std::abs(w.at(p)[0]); };
    ext::GridScan s = ext::scan_grid(g, f);
    res.worstResidual = s.maxValue;
    res.witnessPoint = s.argmaxPoint;
    res.witnessDim = 3;
    res.status = (s.maxValue <= tol) ? CheckStatus::Pass : CheckStatus::Fail;
    return res;
}

CheckResult check_deck_invariance(const LinkModel& m, int samples, double tol) {
    CheckResult res = base_result("deck-invariance",
                                  "alpha_N, omega_Sigma, and the coframe survive all deck maps",
                                  std::to_string(samples) + " samples");
    std::vector<ext::FormField> forms;
    forms.push_back(m.alpha_form(3));
    forms.push_back(m.omega_form(3));
    for (int i = 0; i < 3; ++i) forms.push_back(coframe_row_form(m, i));

    unsigned long long seed = 0x2545F4914F6CDD1Dull;
    auto next = [&seed]() {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        return static_cast<double>(seed % 1000000) / 1000000.0;
    };
    std::vector<ext::Point> pts;
    for (int i = 0; i < samples; ++i)
        pts.push_back(ext::Point{kTwoPi * next(), next(), next(), 0.0, 0.0});

    double worst = 0.0;
    ext::Point witness{};
    for (const ext::ChartMap& t : m.deck_maps()) {
        for (const ext::FormField& f : forms) {
            ext::FormField pulled = ext::pullback(f, t);
            for (const ext::Point& p : pts) {
                ext::Coeffs c0 = f.at(p), c1 = pulled.at(p);
                for (int i = 0; i < f.ncoeffs(); ++i) {
                    double d = std::abs(c0[static_cast<std::size_t>(i)] - c1[static_cast<std::size_t>(i)]);
                    if (d > worst) {
                        worst = d;
                        witness = p;
                    }
                }
            }
        }
    }
    res.worstResidual = worst;
    res.witnessPoint = witness;
    res.witnessDim = 3;
    res.status = (worst <= tol) ? CheckStatus::Pass : CheckStatus::Fail;
    return res;
}

CheckResult check_fiber_area(const LinkModel& m, int n, double tol) {
    CheckResult res = base_result("fiber-area-normalization",
                                  "omega_Sigma integrates to 1 over the fiber torus",
                                  std::to_string(n) + "x" + std::to_string(n));
    if (n < 4) throw DomainError("grid too coarse: need at least 4 samples per axis");
    ext::FormField w = m.omega_form(3);
    const ext::ComboTable& t = ext::combo_table(3, 2);
    int idx = t.maskToIndex[(1u << 1) | (1u << 2)];
    double h = 1.0 / n, acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            acc += w.at(ext::Point{0.0, i * h, j * h, 0.0, 0.0})[static_cast<std::size_t>(idx)] * h * h;
    res.worstResidual = std::abs(acc - 1.0);
    res.status = (res.worstResidual <= tol) ? CheckStatus::Pass : CheckStatus::Fail;
    std::ostringstream os;
    os << "integral = " << acc;
    res.notes = os.str();
    return res;
}

GeometryConstants geometry_constants(const LinkModel& m, const ext::Grid& g) {
    GeometryConstants gc;
    gc.gridUsed = grid_label(g);
    ext::FormField alpha = m.alpha_form(3);
    ext::FormField ada = ext::wedge(alpha, ext::d_analytic(alpha));
    ext::FormField aw = ext::wedge(alpha, m.omega_form(3));
    ext::FormField dxw = ext::wedge(m.dx_form(3), m.omega_form(3));
    auto norm_of = [&m](const ext::FormField* f) {
        return [&m, f](const ext::Point& p) { return ext::pointwise_norm(*f, m.coframe_at(p), p); };
    };
    ext::GridScan sa = ext::scan_grid(g, norm_of(&ada));
    ext::GridScan sc = ext::scan_grid(g, norm_of(&aw));
    ext::GridScan sm = ext::scan_grid(g, norm_of(&dxw));
    gc.aMin = sa.minValue;
    gc.aMax = sa.maxValue;
    gc.cMax = sc.maxValue;
    gc.mMin = sm.minValue;
    return gc;
}

CheckResult check_constants_closed_form(const LinkModel& m, const ext::Grid& g, double tol) {
    CheckResult res = base_result("geometry-constants-closed-form",
                                  "grid constants match the metric's closed forms",
                                  grid_label(g));
    GeometryConstants gc = geometry_constants(m, g);
    double worst = std::max({std::abs(gc.aMin - m.bigA), std::abs(gc.aMax - m.bigA),
                             std::abs(gc.mMin - 1.0)});
    bool cOk = gc.cMax <= 1e-12;
    res.worstResidual = std::max(worst, gc.cMax);
    res.status = (worst <= tol && cOk) ? CheckStatus::Pass : CheckStatus::Fail;
    std::ostringstream os;
    os << "a=" << gc.aMin << " A=" << gc.aMax << " C=" << gc.cMax << " m=" << gc.mMin
       << " closed-form a=A=" << m.bigA << ", C=0, m=1";
    res.notes = os.str();
    return res;
}

}  // namespace fforge::link
