#include "fforge/profiles.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "fforge/errors.hpp"

namespace fforge::prof {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& profile, const std::string& what, double where) {
    std::ostringstream os;
    os << profile << ": " << what << " at " << where;
    throw ProfileConstraintError(os.str());
}

struct V3 {
    double v, d1, d2;
};

Profile wrap(std::string name, double lo, double hi, std::function<V3(double)> f,
             std::vector<double> knots) {
    Profile p;
    p.name = std::move(name);
    p.lo = lo;
    p.hi = hi;
    p.value = [f](double x) { return f(x).v; };
    p.deriv = [f](double x) { return f(x).d1; };
    p.deriv2 = [f](double x) { return f(x).d2; };
    p.knots = std::move(knots);
    return p;
}

bool near_any(const std::vector<double>& knots, double x, double w) {
    for (double k : knots)
        if (std::abs(x - k) < w) return true;
    return false;
}

// Central-difference audit of the analytic derivatives, staying clear of the
// knots where the third derivative jumps.
void fd_consistency(const Profile& p, double lo, double hi, int n, double relTol) {
    const double h = 1e-5;
    for (int i = 0; i < n; ++i) {
        double x = lo + (hi - lo) * (i + 0.5) / n;
        if (x - h < lo || x + h > hi || near_any(p.knots, x, 4.0 * h)) continue;
        double fd1 = (p.value(x + h) - p.value(x - h)) / (2.0 * h);
        double d1 = p.deriv(x);
        if (std::abs(fd1 - d1) > relTol * (1.0 + std::abs(d1)))
            fail(p.name, "analytic first derivative disagrees with finite differences", x);
        double fd2 = (p.deriv(x + h) - p.deriv(x - h)) / (2.0 * h);
        double d2 = p.deriv2(x);
        if (std::abs(fd2 - d2) > relTol * (1.0 + std::abs(d2)))
            fail(p.name, "analytic second derivative disagrees with finite differences", x);
    }
}

// |f(x+dx) - f(x)| <= lip*dx + slack across a dense sweep: catches stitch
// discontinuities in the value or first derivative.
void continuity_sweep(const Profile& p, double lo, double hi, int n, double lipV, double lipD) {
    double step = (hi - lo) / n;
    double pv = p.value(lo), pd = p.deriv(lo);
    for (int i = 1; i <= n; ++i) {
        double x = lo + step * i;
        double v = p.value(x), d = p.deriv(x);
        if (std::abs(v - pv) > lipV * step + 1e-9) fail(p.name, "value stitch discontinuity", x);
        if (std::abs(d - pd) > lipD * step + 1e-9) fail(p.name, "derivative stitch discontinuity", x);
        pv = v;
        pd = d;
    }
}

}  // namespace

double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep_d1(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    double u = t * (1.0 - t);
    return 30.0 * u * u;
}

double smoothstep_d2(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 60.0 * t * (2.0 * t - 1.0) * (t - 1.0);
}

double smoothstep_int(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return t - 0.5;
    return t * t * t * t * (2.5 + t * (-3.0 + t));
}

Profile make_profile_K() {
    // Descent bookkeeping: slope eases 0 -> -0.71, runs straight, eases on to
    // -1, runs straight, and lands flat at K(8) = 0.  The straight-segment
    // lengths 51/58 and 47/29 make the drops close up exactly.
    const double t1 = 4.5 + 51.0 / 58.0;
    const double t2 = t1 + 0.5;
    const double k45 = 3.1 - 0.355 * 0.5;              // after first ease-in
    const double kt1 = k45 - 0.71 * (t1 - 4.5);
    const double kt2 = kt1 - 0.355 - 0.0725;           // after ease to slope -1
    const double k75 = kt2 - (7.5 - t2);               // = 0.25 up to roundoff

    auto f = [=](double r) -> V3 {
        if (r < 3.0) return {r, 1.0, 0.0};
        if (r < 3.2) {
            double t = (r - 3.0) / 0.2;
            return {3.0 + (r - 3.0) - 0.2 * smoothstep_int(t), 1.0 - smoothstep(t),
                    -smoothstep_d1(t) / 0.2};
        }
        if (r < 4.0) return {3.1, 0.0, 0.0};
        if (r < 4.5) {
            double t = (r - 4.0) / 0.5;
            return {3.1 - 0.355 * smoothstep_int(t), -0.71 * smoothstep(t),
                    -1.42 * smoothstep_d1(t)};
        }
        if (r < t1) return {k45 - 0.71 * (r - 4.5), -0.71, 0.0};
        if (r < t2) {
            double t = (r - t1) / 0.5;
            return {kt1 - 0.71 * (r - t1) - 0.145 * smoothstep_int(t),
                    -0.71 - 0.29 * smoothstep(t), -0.58 * smoothstep_d1(t)};
        }
        if (r < 7.5) return {kt2 - (r - t2), -1.0, 0.0};
        if (r < 8.0) {
            double t = (r - 7.5) / 0.5;
            return {k75 - (r - 7.5) + 0.5 * smoothstep_int(t), -1.0 + smoothstep(t),
                    2.0 * smoothstep_d1(t)};
        }
        return {0.0, 0.0, 0.0};
    };
    Profile p = wrap("K", 1.0, 10.0, f, {3.0, 3.2, 4.0, 4.5, t1, t2, 7.5, 8.0});
    audit_profile_K(p);
    return p;
}

Profile make_profile_L(double a) {
    if (!(a > 0.0)) throw ProfileConstraintError("L: plateau constant must be positive");
    auto f = [a](double r) -> V3 {
        if (r < 2.0) return {0.0, 0.0, 0.0};
        if (r < 3.0) {
            double t = r - 2.0;
            return {a * smoothstep(t), a * smoothstep_d1(t), a * smoothstep_d2(t)};
        }
        return {a, 0.0, 0.0};
    };
    Profile p = wrap("L", 1.0, 10.0, f, {2.0, 3.0});
    audit_profile_L(p, a);
    return p;
}

Profile make_profile_psi() {
    auto f = [](double r) -> V3 {
        if (r < 0.5) return {1.0, 0.0, 0.0};
        if (r < 1.0) {
            double t = 2.0 * (r - 0.5);
            return {1.0 - smoothstep(t), -2.0 * smoothstep_d1(t), -4.0 * smoothstep_d2(t)};
        }
        return {0.0, 0.0, 0.0};
    };
    Profile p = wrap("psi", 0.0, 1.0, f, {0.5, 1.0});
    audit_profile_psi(p);
    return p;
}

Profile make_profile_phi() {
    const double q = kPi / 4.0;
    auto ramp = [q](double base, double t) -> V3 {
        return {base + q * smoothstep(t), 3.0 * q * smoothstep_d1(t), 9.0 * q * smoothstep_d2(t)};
    };
    auto f = [=](double t) -> V3 {
        if (t < -1.0) return {0.0, 0.0, 0.0};
        if (t < -2.0 / 3.0) return ramp(0.0, 3.0 * (t + 1.0));
        if (t < -1.0 / 3.0) return {q, 0.0, 0.0};
        if (t < 0.0) return ramp(q, 3.0 * t + 1.0);
        if (t < 1.0 / 3.0) return ramp(2.0 * q, 3.0 * t);
        if (t < 2.0 / 3.0) return {3.0 * q, 0.0, 0.0};
        if (t < 1.0) return ramp(3.0 * q, 3.0 * t - 2.0);
        return {kPi, 0.0, 0.0};
    };
    Profile p = wrap("phi", -2.0, 2.0, f,
                     {-1.0, -2.0 / 3.0, -1.0 / 3.0, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0});
    audit_profile_phi(p);
    return p;
}

Profile make_profile_p(int ell) {
    if (ell < 0) throw ProfileConstraintError("p: order must be nonnegative");
    const double le = static_cast<double>(ell);
    // Hermite quintic on [1/2,3/2] matching tau^{-ell} data on the left and
    // the constant 1 on the right; in sigma = tau - 1/2 with
    // h = c0 + c1 s + c2 s^2 + c3 s^3 + c4 s^4 + c5 s^5.
    const double c0 = std::pow(2.0, le);
    const double c1 = -le * std::pow(2.0, le + 1.0);
    const double c2 = le * (le + 1.0) * std::pow(2.0, le + 1.0);  // dd0/2 with dd0 = l(l+1)2^{l+2}
    const double A = 1.0 - (c0 + c1 + c2);
    const double B = -(c1 + 2.0 * c2);
    const double C = -2.0 * c2;
    const double c3 = (20.0 * A - 8.0 * B + C) / 2.0;
    const double c4 = (-30.0 * A + 14.0 * B - 2.0 * C) / 2.0;
    const double c5 = (12.0 * A - 6.0 * B + C) / 2.0;
    const double sign = (ell % 2 == 0) ? 1.0 : -1.0;

    auto base = [=](double t) -> V3 {  // t > 0
        if (t <= 0.5)
            return {std::pow(t, -le), -le * std::pow(t, -le - 1.0),
                    le * (le + 1.0) * std::pow(t, -le - 2.0)};
        if (t < 1.5) {
            double s = t - 0.5;
            double v = c0 + s * (c1 + s * (c2 + s * (c3 + s * (c4 + s * c5))));
            double d1 = c1 + s * (2.0 * c2 + s * (3.0 * c3 + s * (4.0 * c4 + s * 5.0 * c5)));
            double d2 = 2.0 * c2 + s * (6.0 * c3 + s * (12.0 * c4 + s * 20.0 * c5));
            return {v, d1, d2};
        }
        return {1.0, 0.0, 0.0};
    };
    auto f = [=](double t) -> V3 {
        if (t > 0.0) return base(t);
        V3 m = base(-t);
        return {sign * m.v, -sign * m.d1, sign * m.d2};
    };
    Profile p = wrap("p_" + std::to_string(ell), -2.0, 2.0, f, {-1.5, -0.5, 0.0, 0.5, 1.5});
    audit_profile_p(p, ell);
    return p;
}

Profile make_profile_K_circular() {
    auto f = [](double th) -> V3 {
        return {1.0 + 0.5 * std::cos(th), -0.5 * std::sin(th), -0.5 * std::cos(th)};
    };
    return wrap("K_circ", 0.0, 2.0 * kPi, f, {});
}

Profile make_profile_L_circular(double bigA, double offset) {
    auto f = [=](double th) -> V3 {
        double s = std::sin(th), c = std::cos(th);
        // lambda(theta) = -A K'K = A/2 sin(1 + cos/2); derivatives are trig
        double v = offset + 0.5 * bigA * s * (1.0 + 0.5 * c);
        double d1 = 0.5 * bigA * (c + 0.5 * (c * c - s * s));
        double d2 = 0.5 * bigA * (-s - 2.0 * s * c);
        return {v, d1, d2};
    };
    return wrap("L_circ", 0.0, 2.0 * kPi, f, {});
}

Profile raw_profile(std::string name, double lo, double hi, std::function<double(double)> v,
                    std::function<double(double)> d1, std::function<double(double)> d2,
                    std::vector<double> knots) {
    Profile p;
    p.name = std::move(name);
    p.lo = lo;
    p.hi = hi;
    p.value = std::move(v);
    p.deriv = std::move(d1);
    p.deriv2 = std::move(d2);
    p.knots = std::move(knots);
    return p;
}

void audit_profile_K(const Profile& k) {
    if (k.lo > 1.0 || k.hi < 10.0) fail(k.name, "domain must cover [1,10]", k.lo);
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
        double r = 1.0 + 9.0 * i / n;
        double v = k.value(r), d = k.deriv(r);
        if (r <= 3.0 && std::abs(v - r) > 1e-12) fail(k.name, "identity zone violated", r);
        if (r >= 3.0 && r <= 4.0 && (d < -1e-12 || d > 1.0 + 1e-12))
            fail(k.name, "ascent slope out of [0,1]", r);
        if (r >= 4.0 && r <= 8.0 && (d > 1e-12 || d < -1.0 - 1e-12))
            fail(k.name, "descent slope out of [-1,0]", r);
        if (r >= 8.0 && std::abs(v) > 1e-14) fail(k.name, "tail not identically zero", r);
        if (v < -1e-14) fail(k.name, "negative value", r);
        if (std::abs(d * v) >= 4.0) fail(k.name, "|K'K| exceeds 4", r);
        if (r >= 4.0 && r <= 8.0 && std::abs(d * v) > 2.1)
            fail(k.name, "descent slope-load |K'K| exceeds 2.1", r);
    }
    if (k.value(2.0) != 2.0) fail(k.name, "K(2) must be exactly 2", 2.0);
    continuity_sweep(k, 1.0, 10.0, n, 1.05, 9.5);
    fd_consistency(k, 1.0, 10.0, 2000, 5e-4);
}

void audit_profile_L(const Profile& l, double a) {
    if (!(a > 0.0)) fail(l.name, "plateau constant must be positive", a);
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
        double r = 1.0 + 9.0 * i / n;
        double v = l.value(r);
        if (r <= 2.0 && std::abs(v) > 1e-14) fail(l.name, "must vanish on [1,2]", r);
        if (r >= 3.0 && std::abs(v - a) > 1e-12) fail(l.name, "plateau value wrong", r);
        if (v < -1e-14 || v > a + 1e-12) fail(l.name, "value out of [0,a]", r);
        if (l.deriv(r) < -1e-12) fail(l.name, "must be nondecreasing", r);
    }
    continuity_sweep(l, 1.0, 10.0, n, 1.9 * a, 6.0 * a);
    fd_consistency(l, 1.0, 10.0, 2000, 5e-4);
}

void audit_profile_psi(const Profile& psi) {
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
        double r = static_cast<double>(i) / n;
        double v = psi.value(r), d = psi.deriv(r);
        if (v < -1e-14 || v > 1.0 + 1e-14) fail(psi.name, "value out of [0,1]", r);
        if (d > 1e-12) fail(psi.name, "must be nonincreasing", r);
        if (v > 0.01 && v < 0.99 && d > -0.01)
            fail(psi.name, "transition must be strictly decreasing", r);
    }
    if (psi.value(0.0) != 1.0) fail(psi.name, "psi(0) must be exactly 1", 0.0);
    if (psi.value(0.25) != 1.0) fail(psi.name, "core plateau must be exactly 1", 0.25);
    if (psi.value(1.0) != 0.0) fail(psi.name, "psi(1) must be exactly 0", 1.0);
    continuity_sweep(psi, 0.0, 1.0, n, 4.0, 24.0);
    fd_consistency(psi, 0.0, 1.0, 2000, 5e-4);
}

void audit_profile_phi(const Profile& phi) {
    const double q = kPi / 4.0;
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
        double t = -2.0 + 4.0 * i / n;
        double v = phi.value(t);
        if (v < -1e-14 || v > kPi + 1e-14) fail(phi.name, "value out of [0,pi]", t);
        if (phi.deriv(t) < -1e-12) fail(phi.name, "must be nondecreasing", t);
        if (t <= -1.0 && std::abs(v) > 1e-14) fail(phi.name, "left plateau must be 0", t);
        if (t >= 1.0 && std::abs(v - kPi) > 1e-14) fail(phi.name, "right plateau must be pi", t);
        if (t >= -2.0 / 3.0 + 1e-9 && t <= -1.0 / 3.0 - 1e-9 && std::abs(v - q) > 1e-12)
            fail(phi.name, "pi/4 plateau violated", t);
        if (t >= 1.0 / 3.0 + 1e-9 && t <= 2.0 / 3.0 - 1e-9 && std::abs(v - 3.0 * q) > 1e-12)
            fail(phi.name, "3pi/4 plateau violated", t);
    }
    if (phi.value(0.0) != kPi / 2.0) fail(phi.name, "phi(0) must be exactly pi/2", 0.0);
    continuity_sweep(phi, -2.0, 2.0, n, 4.5, 42.0);
    fd_consistency(phi, -2.0, 2.0, 2000, 5e-4);
}

void audit_profile_p(const Profile& p, int ell) {
    if (ell < 0) fail(p.name, "order must be nonnegative", ell);
    const double le = static_cast<double>(ell);
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
        double t = 5e-3 + (2.0 - 2 * 5e-3) * i / n;
        double v = p.value(t);
        if (v <= 0.0) fail(p.name, "must be positive on (0,2)", t);
        if (t <= 0.5 && std::abs(v - std::pow(t, -le)) > 1e-9 * v)
            fail(p.name, "singular zone must equal tau^-ell", t);
        if (t >= 1.5 && v != 1.0) fail(p.name, "right plateau must be exactly 1", t);
        if (p.deriv(t) > 1e-9) fail(p.name, "must be nonincreasing on (0,2)", t);
        // parity ties the negative side to the positive side exactly
        double mirror = (ell % 2 == 0) ? p.value(-t) : -p.value(-t);
        if (mirror != v) fail(p.name, "parity extension broken", t);
    }
    if (p.value(0.5) != std::pow(2.0, le)) fail(p.name, "p(1/2) must be exactly 2^ell", 0.5);
    fd_consistency(p, 0.05, 1.95, 2000, 5e-4);
    // stitch continuity at the two Hermite knots
    for (double kn : {0.5, 1.5}) {
        double eps = 1e-9;
        if (std::abs(p.value(kn + eps) - p.value(kn - eps)) > 1e-6)
            fail(p.name, "value stitch discontinuity", kn);
        if (std::abs(p.deriv(kn + eps) - p.deriv(kn - eps)) > 1e-5)
            fail(p.name, "derivative stitch discontinuity", kn);
    }
}

}  // namespace fforge::prof
