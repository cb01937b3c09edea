#include "fforge/exterior.hpp"

#include <cmath>
#include <mutex>

#include "fforge/parallel.hpp"

// Closure convention used throughout: evaluators ACCUMULATE (+=) into
// zero-filled arrays supplied by the caller.  Sums then compose by calling the
// children on the same array, and every second-derivative closure writes
// bitwise-identical values into [a][b] and [b][a], which is what lets
// d_analytic applied twice cancel to exactly zero.

namespace fforge::ext {

namespace {

int popcount(unsigned m) { return __builtin_popcount(m); }

struct WedgeTerm {
    int ia, ib, out;
    double sign;
};
struct DTerm {
    int out, axis, in;
    double sign;
};

struct Tables {
    ComboTable combos[3][7];                 // [dim-3][k], k = 0..6
    std::vector<WedgeTerm> wedgeProg[3][6][6];  // [dim-3][ka][kb]
    std::vector<DTerm> dProg[3][6];          // [dim-3][k]

    Tables() {
        for (int dim = 3; dim <= 5; ++dim) {
            const int di = dim - 3;
            for (int k = 0; k <= 6; ++k) build_combo(combos[di][k], dim, k);
            for (int ka = 0; ka <= 5; ++ka)
                for (int kb = 0; kb <= 5; ++kb) build_wedge(di, ka, kb);
            for (int k = 0; k <= 5; ++k) build_d(di, dim, k);
        }
    }

    static void build_combo(ComboTable& t, int dim, int k) {
        t.dim = dim;
        t.k = k;
        t.count = 0;
        t.maskToIndex.fill(-1);
        if (k > dim || k < 0) return;
        for (unsigned m = 0; m < (1u << dim); ++m) {
            if (popcount(m) != k) continue;
            auto& ax = t.axes[static_cast<std::size_t>(t.count)];
            int pos = 0;
            for (int a = 0; a < dim; ++a)
                if (m & (1u << a)) ax[static_cast<std::size_t>(pos++)] = a;
            t.masks[static_cast<std::size_t>(t.count)] = m;
            t.maskToIndex[m] = t.count;
            ++t.count;
        }
    }

    void build_wedge(int di, int ka, int kb) {
        const ComboTable& A = combos[di][ka];
        const ComboTable& B = combos[di][kb];
        if (ka + kb > 6) return;
        const ComboTable& O = combos[di][ka + kb];
        auto& prog = wedgeProg[di][ka][kb];
        for (int ia = 0; ia < A.count; ++ia)
            for (int ib = 0; ib < B.count; ++ib) {
                const unsigned ma = A.masks[static_cast<std::size_t>(ia)];
                const unsigned mb = B.masks[static_cast<std::size_t>(ib)];
                if (ma & mb) continue;
                const int out = O.maskToIndex[ma | mb];
                int inv = 0;  // pairs (a in A, b in B) with a > b
                for (int i = 0; i < ka; ++i)
                    for (int j = 0; j < kb; ++j)
                        if (A.axes[static_cast<std::size_t>(ia)][static_cast<std::size_t>(i)] >
                            B.axes[static_cast<std::size_t>(ib)][static_cast<std::size_t>(j)])
                            ++inv;
                prog.push_back({ia, ib, out, (inv % 2 == 0) ? 1.0 : -1.0});
            }
    }

    void build_d(int di, int dim, int k) {
        const ComboTable& I = combos[di][k];
        const ComboTable& O = combos[di][k + 1];
        auto& prog = dProg[di][k];
        for (int out = 0; out < O.count; ++out) {
            const auto& ax = O.axes[static_cast<std::size_t>(out)];
            for (int m = 0; m <= k; ++m) {
                const int axis = ax[static_cast<std::size_t>(m)];
                const unsigned rest = O.masks[static_cast<std::size_t>(out)] & ~(1u << axis);
                const int in = I.maskToIndex[rest];
                prog.push_back({out, axis, in, (m % 2 == 0) ? 1.0 : -1.0});
            }
        }
        (void)dim;
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

void validate_dim(int dim) {
    if (dim < 3 || dim > 5) throw DomainError("chart dimension must be 3..5");
}

const std::vector<WedgeTerm>& wedge_program(int dim, int ka, int kb) {
    return tables().wedgeProg[dim - 3][ka][kb];
}

const std::vector<DTerm>& d_program(int dim, int k) {
    return tables().dProg[dim - 3][k];
}

// determinant of the k x k minor M[r][c] = src(rows[r], cols[c])
template <typename Src>
double minor_det(const Src& entry, const std::array<int, 5>& rows, const std::array<int, 5>& cols,
                 int k) {
    if (k == 0) return 1.0;
    double m[5][5];
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) m[r][c] = entry(rows[static_cast<std::size_t>(r)],
                                                    cols[static_cast<std::size_t>(c)]);
    // Gaussian elimination with partial pivoting
    double det = 1.0;
    for (int col = 0; col < k; ++col) {
        int piv = col;
        for (int r = col + 1; r < k; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
        if (m[piv][col] == 0.0) return 0.0;
        if (piv != col) {
            for (int c = col; c < k; ++c) std::swap(m[piv][c], m[col][c]);
            det = -det;
        }
        det *= m[col][col];
        for (int r = col + 1; r < k; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < k; ++c) m[r][c] -= f * m[col][c];
        }
    }
    return det;
}

// invert a dim x dim matrix (rows layout) by Gauss-Jordan
void invert_matrix(const std::array<std::array<double, 5>, 5>& in, int dim,
                   std::array<std::array<double, 5>, 5>& out) {
    double a[5][10];
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) a[r][c] = in[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        for (int c = 0; c < dim; ++c) a[r][dim + c] = (r == c) ? 1.0 : 0.0;
    }
    for (int col = 0; col < dim; ++col) {
        int piv = col;
        for (int r = col + 1; r < dim; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-14)
            throw DegenerateGeometryError("singular coframe matrix");
        if (piv != col)
            for (int c = 0; c < 2 * dim; ++c) std::swap(a[piv][c], a[col][c]);
        const double d = a[col][col];
        for (int c = 0; c < 2 * dim; ++c) a[col][c] /= d;
        for (int r = 0; r < dim; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (int c = 0; c < 2 * dim; ++c) a[r][c] -= f * a[col][c];
        }
    }
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = a[r][dim + c];
}

}  // namespace

int binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long acc = 1;
    for (int i = 0; i < k; ++i) acc = acc * (n - i) / (i + 1);
    return static_cast<int>(acc);
}

const ComboTable& combo_table(int dim, int k) {
    validate_dim(dim);
    if (k < 0 || k > 6) throw DomainError("combo_table degree out of range");
    return tables().combos[dim - 3][k];
}

ScalarField constant_scalar(double value) {
    ScalarField f;
    f.eval = [value](const Point&) { return value; };
    f.grad = [](const Point&, std::array<double, 5>&) {};
    f.hess = [](const Point&, std::array<std::array<double, 5>, 5>&) {};
    return f;
}

ScalarField axis_scalar(int axis, std::function<double(double)> f,
                        std::function<double(double)> fp, std::function<double(double)> fpp) {
    ScalarField s;
    s.eval = [axis, f](const Point& p) { return f(p[static_cast<std::size_t>(axis)]); };
    if (fp)
        s.grad = [axis, fp](const Point& p, std::array<double, 5>& g) {
            g[static_cast<std::size_t>(axis)] += fp(p[static_cast<std::size_t>(axis)]);
        };
    if (fpp)
        s.hess = [axis, fpp](const Point& p, std::array<std::array<double, 5>, 5>& h) {
            h[static_cast<std::size_t>(axis)][static_cast<std::size_t>(axis)] +=
                fpp(p[static_cast<std::size_t>(axis)]);
        };
    return s;
}

FormField zero_form(int dim, int degree) {
    validate_dim(dim);
    if (degree < 0 || degree > 6) throw DomainError("form degree out of range");
    FormField f;
    f.dim = dim;
    f.degree = degree;
    f.eval = [](const Point&, Coeffs&) {};
    f.evalDeriv = [](const Point&, DerivCoeffs&) {};
    f.evalDeriv2 = [](const Point&, Deriv2Coeffs&) {};
    return f;
}

FormField constant_form(int dim, int degree, const Coeffs& coeffs) {
    FormField f = zero_form(dim, degree);
    const int n = binom(dim, degree);
    f.eval = [coeffs, n](const Point&, Coeffs& out) {
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] += coeffs[static_cast<std::size_t>(i)];
    };
    return f;
}

FormField coordinate_1form(int dim, int axis) {
    validate_dim(dim);
    if (axis < 0 || axis >= dim) throw DomainError("coordinate axis out of range");
    Coeffs c{};
    const int idx = combo_table(dim, 1).maskToIndex[1u << axis];
    c[static_cast<std::size_t>(idx)] = 1.0;
    return constant_form(dim, 1, c);
}

FormField scalar_form(int dim, const ScalarField& f) {
    validate_dim(dim);
    FormField out;
    out.dim = dim;
    out.degree = 0;
    ScalarField sf = f;
    out.eval = [sf](const Point& p, Coeffs& c) { c[0] += sf.eval(p); };
    if (sf.grad)
        out.evalDeriv = [sf](const Point& p, DerivCoeffs& d) {
            std::array<double, 5> g{};
            sf.grad(p, g);
            for (int ax = 0; ax < 5; ++ax) d[static_cast<std::size_t>(ax)][0] += g[static_cast<std::size_t>(ax)];
        };
    if (sf.hess)
        out.evalDeriv2 = [sf](const Point& p, Deriv2Coeffs& d2) {
            std::array<std::array<double, 5>, 5> h{};
            sf.hess(p, h);
            for (int a = 0; a < 5; ++a)
                for (int b = 0; b < 5; ++b)
                    d2[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][0] +=
                        h[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        };
    return out;
}

FormField add(const FormField& a, const FormField& b) {
    if (a.dim != b.dim || a.degree != b.degree)
        throw DomainError("add: chart or degree mismatch");
    FormField out;
    out.dim = a.dim;
    out.degree = a.degree;
    const FormField fa = a, fb = b;
    out.eval = [fa, fb](const Point& p, Coeffs& c) {
        fa.eval(p, c);
        fb.eval(p, c);
    };
    if (fa.hasDeriv() && fb.hasDeriv())
        out.evalDeriv = [fa, fb](const Point& p, DerivCoeffs& d) {
            fa.evalDeriv(p, d);
            fb.evalDeriv(p, d);
        };
    if (fa.hasDeriv2() && fb.hasDeriv2())
        out.evalDeriv2 = [fa, fb](const Point& p, Deriv2Coeffs& d2) {
            fa.evalDeriv2(p, d2);
            fb.evalDeriv2(p, d2);
        };
    return out;
}

FormField multiply(const ScalarField& f, const FormField& a) {
    FormField out;
    out.dim = a.dim;
    out.degree = a.degree;
    const ScalarField sf = f;
    const FormField fa = a;
    const int n = a.ncoeffs();
    out.eval = [sf, fa, n](const Point& p, Coeffs& c) {
        Coeffs tmp{};
        fa.eval(p, tmp);
        const double fv = sf.eval(p);
        for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] += fv * tmp[static_cast<std::size_t>(i)];
    };
    if (fa.hasDeriv() && sf.grad) {
        out.evalDeriv = [sf, fa, n](const Point& p, DerivCoeffs& d) {
            Coeffs tc{};
            DerivCoeffs td{};
            std::array<double, 5> g{};
            fa.eval(p, tc);
            fa.evalDeriv(p, td);
            sf.grad(p, g);
            const double fv = sf.eval(p);
            for (int ax = 0; ax < fa.dim; ++ax)
                for (int i = 0; i < n; ++i)
                    d[static_cast<std::size_t>(ax)][static_cast<std::size_t>(i)] +=
                        g[static_cast<std::size_t>(ax)] * tc[static_cast<std::size_t>(i)] +
                        fv * td[static_cast<std::size_t>(ax)][static_cast<std::size_t>(i)];
        };
    }
    if (fa.hasDeriv() && fa.hasDeriv2() && sf.grad && sf.hess) {
        out.evalDeriv2 = [sf, fa, n](const Point& p, Deriv2Coeffs& d2) {
            Coeffs tc{};
            DerivCoeffs td{};
            Deriv2Coeffs td2{};
            std::array<double, 5> g{};
            std::array<std::array<double, 5>, 5> h{};
            fa.eval(p, tc);
            fa.evalDeriv(p, td);
            fa.evalDeriv2(p, td2);
            sf.grad(p, g);
            sf.hess(p, h);
            const double fv = sf.eval(p);
            for (int ax = 0; ax < fa.dim; ++ax)
                for (int bx = ax; bx < fa.dim; ++bx) {
                    const auto A = static_cast<std::size_t>(ax);
                    const auto B = static_cast<std::size_t>(bx);
                    for (int i = 0; i < n; ++i) {
                        const auto I = static_cast<std::size_t>(i);
                        const double v = h[A][B] * tc[I] + g[A] * td[B][I] + g[B] * td[A][I] +
                                         fv * td2[A][B][I];
                        d2[A][B][I] += v;
                        if (ax != bx) d2[B][A][I] += v;  // keep bitwise symmetry
                    }
                }
        };
    }
    return out;
}

FormField scale(const FormField& a, double s) { return multiply(constant_scalar(s), a); }

FormField wedge(const FormField& a, const FormField& b) {
    if (a.dim != b.dim) throw DomainError("wedge: chart mismatch");
    if (a.degree > 5 || b.degree > 5)
        return zero_form(a.dim, std::min(6, a.degree + b.degree));
    FormField out;
    out.dim = a.dim;
    out.degree = a.degree + b.degree;
    const FormField fa = a, fb = b;
    const auto& prog = wedge_program(a.dim, a.degree, b.degree);
    out.eval = [fa, fb, &prog](const Point& p, Coeffs& c) {
        Coeffs ca{}, cb{};
        fa.eval(p, ca);
        fb.eval(p, cb);
        for (const auto& t : prog)
            c[static_cast<std::size_t>(t.out)] += t.sign * ca[static_cast<std::size_t>(t.ia)] *
                                                  cb[static_cast<std::size_t>(t.ib)];
    };
    if (fa.hasDeriv() && fb.hasDeriv()) {
        const int dim = a.dim;
        out.evalDeriv = [fa, fb, &prog, dim](const Point& p, DerivCoeffs& d) {
            Coeffs ca{}, cb{};
            DerivCoeffs da{}, db{};
            fa.eval(p, ca);
            fb.eval(p, cb);
            fa.evalDeriv(p, da);
            fb.evalDeriv(p, db);
            for (int ax = 0; ax < dim; ++ax) {
                const auto A = static_cast<std::size_t>(ax);
                for (const auto& t : prog)
                    d[A][static_cast<std::size_t>(t.out)] +=
                        t.sign * (da[A][static_cast<std::size_t>(t.ia)] * cb[static_cast<std::size_t>(t.ib)] +
                                  ca[static_cast<std::size_t>(t.ia)] * db[A][static_cast<std::size_t>(t.ib)]);
            }
        };
    }
    return out;
}

FormField d_analytic(const FormField& a) {
    if (!a.hasDeriv()) throw DomainError("d_analytic: missing derivative data");
    FormField out;
    out.dim = a.dim;
    out.degree = a.degree + 1;
    const FormField fa = a;
    if (a.degree >= a.dim) {  // structural zero one degree up
        out.eval = [](const Point&, Coeffs&) {};
        out.evalDeriv = [](const Point&, DerivCoeffs&) {};
        return out;
    }
    const auto& prog = d_program(a.dim, a.degree);
    out.eval = [fa, &prog](const Point& p, Coeffs& c) {
        DerivCoeffs d{};
        fa.evalDeriv(p, d);
        for (const auto& t : prog)
            c[static_cast<std::size_t>(t.out)] +=
                t.sign * d[static_cast<std::size_t>(t.axis)][static_cast<std::size_t>(t.in)];
    };
    if (fa.hasDeriv2()) {
        const int dim = a.dim;
        out.evalDeriv = [fa, &prog, dim](const Point& p, DerivCoeffs& d) {
            Deriv2Coeffs d2{};
            fa.evalDeriv2(p, d2);
            for (int ax = 0; ax < dim; ++ax) {
                const auto A = static_cast<std::size_t>(ax);
                for (const auto& t : prog)
                    d[A][static_cast<std::size_t>(t.out)] +=
                        t.sign *
                        d2[A][static_cast<std::size_t>(t.axis)][static_cast<std::size_t>(t.in)];
            }
        };
    }
    return out;
}

double Grid::spacing(int axis) const {
    const GridAxis& A = axes[static_cast<std::size_t>(axis)];
    return A.periodic ? (A.hi - A.lo) / A.count : (A.hi - A.lo) / (A.count - 1);
}

double Grid::coord(int axis, int idx) const {
    return axes[static_cast<std::size_t>(axis)].lo + spacing(axis) * idx;
}

std::size_t Grid::node_count() const {
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(axes[static_cast<std::size_t>(a)].count);
    return n;
}

std::array<int, 5> Grid::node_index(std::size_t flat) const {
    std::array<int, 5> idx{};
    for (int a = dim - 1; a >= 0; --a) {
        const auto count = static_cast<std::size_t>(axes[static_cast<std::size_t>(a)].count);
        idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % count);
        flat /= count;
    }
    return idx;
}

Point Grid::node_point(std::size_t flat) const {
    const std::array<int, 5> idx = node_index(flat);
    Point p{};
    for (int a = 0; a < dim; ++a) p[static_cast<std::size_t>(a)] = coord(a, idx[static_cast<std::size_t>(a)]);
    return p;
}

Grid make_grid(int dim, const std::vector<GridAxis>& axes) {
    if (dim < 1 || dim > 5 || static_cast<int>(axes.size()) != dim)
        throw DomainError("make_grid: need one axis spec per dimension, dim 1..5");
    Grid g;
    g.dim = dim;
    for (int a = 0; a < dim; ++a) {
        const GridAxis& ax = axes[static_cast<std::size_t>(a)];
        if (ax.count < 4) throw DomainError("grid too coarse: need at least 4 samples per axis");
        if (!(ax.lo < ax.hi)) throw DomainError("grid axis range must be nonempty");
        g.axes[static_cast<std::size_t>(a)] = ax;
    }
    return g;
}

FormField d_fd(const FormField& a, const Grid& grid) {
    if (a.dim != grid.dim) throw DomainError("d_fd: form/grid dimension mismatch");
    FormField out;
    out.dim = a.dim;
    out.degree = a.degree + 1;
    if (a.degree >= a.dim) {
        out.eval = [](const Point&, Coeffs&) {};
        return out;
    }
    const FormField fa = a;
    const Grid g = grid;
    const auto& prog = d_program(a.dim, a.degree);
    out.eval = [fa, g, &prog](const Point& p, Coeffs& c) {
        DerivCoeffs dc{};
        const int n = fa.ncoeffs();
        for (int ax = 0; ax < g.dim; ++ax) {
            const auto A = static_cast<std::size_t>(ax);
            const GridAxis& spec = g.axes[A];
            const double h = g.spacing(ax);
            const double x = p[A];
            Coeffs f0{}, f1{}, f2{};
            if (!spec.periodic && x < spec.lo + h * (1.0 - 1e-9)) {
                Point p1 = p, p2 = p;
                p1[A] = x + h;
                p2[A] = x + 2 * h;
                fa.eval(p, f0);
                fa.eval(p1, f1);
                fa.eval(p2, f2);
                for (int i = 0; i < n; ++i) {
                    const auto I = static_cast<std::size_t>(i);
                    dc[A][I] = (-3.0 * f0[I] + 4.0 * f1[I] - f2[I]) / (2.0 * h);
                }
            } else if (!spec.periodic && x > spec.hi - h * (1.0 - 1e-9)) {
                Point p1 = p, p2 = p;
                p1[A] = x - h;
                p2[A] = x - 2 * h;
                fa.eval(p, f0);
                fa.eval(p1, f1);
                fa.eval(p2, f2);
                for (int i = 0; i < n; ++i) {
                    const auto I = static_cast<std::size_t>(i);
                    dc[A][I] = (3.0 * f0[I] - 4.0 * f1[I] + f2[I]) / (2.0 * h);
                }
            } else {
                Point p1 = p, p2 = p;
                p1[A] = x + h;
                p2[A] = x - h;
                fa.eval(p1, f1);
                fa.eval(p2, f2);
                for (int i = 0; i < n; ++i) {
                    const auto I = static_cast<std::size_t>(i);
                    dc[A][I] = (f1[I] - f2[I]) / (2.0 * h);
                }
            }
        }
        for (const auto& t : prog)
            c[static_cast<std::size_t>(t.out)] +=
                t.sign * dc[static_cast<std::size_t>(t.axis)][static_cast<std::size_t>(t.in)];
    };
    return out;
}

double pointwise_norm(const FormField& a, const Coframe& coframe, const Point& p) {
    if (a.dim != coframe.dim) throw DomainError("pointwise_norm: coframe dimension mismatch");
    Coeffs c{};
    a.eval(p, c);
    if (a.degree == 0) return std::fabs(c[0]);
    const int n = a.ncoeffs();
    if (n == 0) return 0.0;
    std::array<std::array<double, 5>, 5> F{};
    invert_matrix(coframe.rows, a.dim, F);
    const ComboTable& T = combo_table(a.dim, a.degree);
    const auto entry = [&F](int r, int cc) {
        return F[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)];
    };
    double sum = 0.0;
    for (int K = 0; K < T.count; ++K) {
        double acc = 0.0;
        for (int J = 0; J < T.count; ++J)
            acc += c[static_cast<std::size_t>(J)] *
                   minor_det(entry, T.axes[static_cast<std::size_t>(J)],
                             T.axes[static_cast<std::size_t>(K)], a.degree);
        sum += acc * acc;
    }
    return std::sqrt(sum);
}

double evaluate_on_vectors(const FormField& a, const Point& p,
                           const std::vector<std::array<double, 5>>& vectors) {
    if (static_cast<int>(vectors.size()) != a.degree)
        throw FrameMismatchError("evaluate_on_vectors: need exactly degree-many vectors");
    Coeffs c{};
    a.eval(p, c);
    if (a.degree == 0) return c[0];
    const ComboTable& T = combo_table(a.dim, a.degree);
    const auto entry = [&vectors](int axis, int vec) {
        return vectors[static_cast<std::size_t>(vec)][static_cast<std::size_t>(axis)];
    };
    std::array<int, 5> cols{};
    for (int i = 0; i < a.degree; ++i) cols[static_cast<std::size_t>(i)] = i;
    double acc = 0.0;
    for (int J = 0; J < T.count; ++J)
        acc += c[static_cast<std::size_t>(J)] *
               minor_det(entry, T.axes[static_cast<std::size_t>(J)], cols, a.degree);
    return acc;
}

FrameRestriction restrict_to_frame(const FormField& a, const Point& p,
                                   const std::vector<std::array<double, 5>>& frame) {
    if (a.degree != 2) throw DomainError("restrict_to_frame handles degree-2 forms");
    if (static_cast<int>(frame.size()) < a.degree)
        throw FrameMismatchError("frame smaller than the form degree");
    if (frame.size() > 5) throw DomainError("frame larger than any chart");
    const int m = static_cast<int>(frame.size());
    Coeffs c{};
    a.eval(p, c);
    const ComboTable& T = combo_table(a.dim, 2);
    FrameRestriction res;
    res.frameSize = m;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double v = 0.0;
            for (int J = 0; J < T.count; ++J) {
                const int p0 = T.axes[static_cast<std::size_t>(J)][0];
                const int p1 = T.axes[static_cast<std::size_t>(J)][1];
                const auto P0 = static_cast<std::size_t>(p0), P1 = static_cast<std::size_t>(p1);
                v += c[static_cast<std::size_t>(J)] *
                     (frame[static_cast<std::size_t>(i)][P0] * frame[static_cast<std::size_t>(j)][P1] -
                      frame[static_cast<std::size_t>(j)][P0] * frame[static_cast<std::size_t>(i)][P1]);
            }
            res.matrix[static_cast<std::size_t>(i * m + j)] = v;
        }
    if (m == 2) res.pfaffian = res.entry(0, 1);
    if (m == 4)
        res.pfaffian = res.entry(0, 1) * res.entry(2, 3) - res.entry(0, 2) * res.entry(1, 3) +
                       res.entry(0, 3) * res.entry(1, 2);
    return res;
}

FormField pullback(const FormField& a, const ChartMap& map) {
    validate_dim(map.dimFrom);
    validate_dim(map.dimTo);
    if (a.dim != map.dimTo) throw DomainError("pullback: form must live on the map target chart");
    if (a.degree > map.dimFrom)
        throw DomainError("pullback: form degree exceeds source chart dimension");
    FormField out;
    out.dim = map.dimFrom;
    out.degree = a.degree;
    const FormField fa = a;
    const ChartMap mp = map;
    const int k = a.degree;
    const ComboTable& TO = combo_table(map.dimFrom, k);  // output combos (source chart)
    const ComboTable& TI = combo_table(map.dimTo, k);    // input combos (target chart)
    out.eval = [fa, mp, k, &TO, &TI](const Point& p, Coeffs& c) {
        const Point y = mp.apply(p);
        Coeffs cy{};
        fa.eval(y, cy);
        std::array<std::array<double, 5>, 5> J{};
        mp.jacobian(p, J);
        const auto entry = [&J](int to, int from) {
            return J[static_cast<std::size_t>(to)][static_cast<std::size_t>(from)];
        };
        for (int o = 0; o < TO.count; ++o)
            for (int i = 0; i < TI.count; ++i)
                c[static_cast<std::size_t>(o)] +=
                    cy[static_cast<std::size_t>(i)] *
                    minor_det(entry, TI.axes[static_cast<std::size_t>(i)],
                              TO.axes[static_cast<std::size_t>(o)], k);
    };
    if (fa.hasDeriv() && mp.affine) {
        out.evalDeriv = [fa, mp, k, &TO, &TI](const Point& p, DerivCoeffs& d) {
            const Point y = mp.apply(p);
            DerivCoeffs dy{};
            fa.evalDeriv(y, dy);
            std::array<std::array<double, 5>, 5> J{};
            mp.jacobian(p, J);
            const auto entry = [&J](int to, int from) {
                return J[static_cast<std::size_t>(to)][static_cast<std::size_t>(from)];
            };
            // chain rule: d/dx_i (A_K ∘ φ) = Σ_l (∂_l A_K) J[l][i]
            for (int i = 0; i < mp.dimFrom; ++i) {
                const auto I = static_cast<std::size_t>(i);
                for (int o = 0; o < TO.count; ++o)
                    for (int ci = 0; ci < TI.count; ++ci) {
                        double chain = 0.0;
                        for (int l = 0; l < mp.dimTo; ++l)
                            chain += dy[static_cast<std::size_t>(l)][static_cast<std::size_t>(ci)] *
                                     J[static_cast<std::size_t>(l)][I];
                        d[I][static_cast<std::size_t>(o)] +=
                            chain * minor_det(entry, TI.axes[static_cast<std::size_t>(ci)],
                                              TO.axes[static_cast<std::size_t>(o)], k);
                    }
            }
        };
    }
    if (fa.hasDeriv2() && mp.affine) {
        out.evalDeriv2 = [fa, mp, k, &TO, &TI](const Point& p, Deriv2Coeffs& d2) {
            const Point y = mp.apply(p);
            Deriv2Coeffs dy2{};
            fa.evalDeriv2(y, dy2);
            std::array<std::array<double, 5>, 5> J{};
            mp.jacobian(p, J);
            const auto entry = [&J](int to, int from) {
                return J[static_cast<std::size_t>(to)][static_cast<std::size_t>(from)];
            };
            for (int i = 0; i < mp.dimFrom; ++i)
                for (int j = i; j < mp.dimFrom; ++j) {
                    const auto I = static_cast<std::size_t>(i), Jj = static_cast<std::size_t>(j);
                    for (int o = 0; o < TO.count; ++o)
                        for (int ci = 0; ci < TI.count; ++ci) {
                            double chain = 0.0;
                            for (int l = 0; l < mp.dimTo; ++l)
                                for (int m = 0; m < mp.dimTo; ++m)
                                    chain += dy2[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)]
                                                [static_cast<std::size_t>(ci)] *
                                             J[static_cast<std::size_t>(l)][I] *
                                             J[static_cast<std::size_t>(m)][Jj];
                            const double v =
                                chain * minor_det(entry, TI.axes[static_cast<std::size_t>(ci)],
                                                  TO.axes[static_cast<std::size_t>(o)], k);
                            d2[I][Jj][static_cast<std::size_t>(o)] += v;
                            if (i != j) d2[Jj][I][static_cast<std::size_t>(o)] += v;
                        }
                }
        };
    }
    return out;
}

GridScan scan_grid(const Grid& grid, const std::function<double(const Point&)>& f) {
    const std::size_t n = grid.node_count();
    std::mutex mx;
    GridScan best;
    bool seeded = false;
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        double lmin = 0.0, lmax = 0.0;
        std::size_t imin = lo, imax = lo;
        bool local = false;
        for (std::size_t s = lo; s < hi; ++s) {
            const double v = f(grid.node_point(s));
            if (!local) {
                lmin = lmax = v;
                imin = imax = s;
                local = true;
                continue;
            }
            if (v < lmin) {
                lmin = v;
                imin = s;
            }
            if (v > lmax) {
                lmax = v;
                imax = s;
            }
        }
        if (!local) return;
        std::lock_guard<std::mutex> lk(mx);
        if (!seeded) {
            best.minValue = lmin;
            best.argminFlat = imin;
            best.maxValue = lmax;
            best.argmaxFlat = imax;
            seeded = true;
            return;
        }
        if (lmin < best.minValue || (lmin == best.minValue && imin < best.argminFlat)) {
            best.minValue = lmin;
            best.argminFlat = imin;
        }
        if (lmax > best.maxValue || (lmax == best.maxValue && imax < best.argmaxFlat)) {
            best.maxValue = lmax;
            best.argmaxFlat = imax;
        }
    });
    if (!seeded) throw DomainError("scan_grid over an empty grid");
    best.argminPoint = grid.node_point(best.argminFlat);
    best.argmaxPoint = grid.node_point(best.argmaxFlat);
    return best;
}

}  // namespace fforge::ext
