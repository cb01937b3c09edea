#ifndef FFORGE_EXTERIOR_HPP
#define FFORGE_EXTERIOR_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fforge/errors.hpp"

namespace fforge::ext {

// Charts are products with dimension 3..5; points always carry 5 slots, the
// first `dim` of which are meaningful.
using Point = std::array<double, 5>;

// Coefficients of a k-form over the strictly increasing multi-indices of the
// chart, in the fixed table order.  C(5,2) = C(5,3) = 10 is the maximum.
inline constexpr int kMaxCoeffs = 10;
using Coeffs = std::array<double, kMaxCoeffs>;

using DerivCoeffs = std::array<Coeffs, 5>;                 // [axis][coeff]
using Deriv2Coeffs = std::array<std::array<Coeffs, 5>, 5>; // [axis][axis][coeff]

int binom(int n, int k);

// Table of increasing multi-indices for (dim, k), in ascending-bitmask order.
struct ComboTable {
    int dim = 0, k = 0;
    int count = 0;
    std::array<std::array<int, 5>, kMaxCoeffs> axes{};   // combo -> sorted axis list
    std::array<unsigned, kMaxCoeffs> masks{};            // combo -> bitmask
    std::array<int, 32> maskToIndex{};                   // bitmask -> combo (-1 if absent)
};
const ComboTable& combo_table(int dim, int k);

// A differential form given by global closures on the covering chart.
// Conventions:
//   - eval receives a zero-filled Coeffs and writes the nonzero entries;
//   - evalDeriv / evalDeriv2 likewise, writing d(coeff)/d(axis) slots;
//   - evalDeriv2 must fill [a][b] and [b][a] with the identical value, which
//     makes d_analytic∘d_analytic cancel exactly, not just approximately.
struct FormField {
    int dim = 0;
    int degree = 0;
    std::function<void(const Point&, Coeffs&)> eval;
    std::function<void(const Point&, DerivCoeffs&)> evalDeriv;
    std::function<void(const Point&, Deriv2Coeffs&)> evalDeriv2;

    int ncoeffs() const { return binom(dim, degree); }
    bool hasDeriv() const { return static_cast<bool>(evalDeriv); }
    bool hasDeriv2() const { return static_cast<bool>(evalDeriv2); }

    Coeffs at(const Point& p) const {
        Coeffs c{};
        eval(p, c);
        return c;
    }
};

// Scalar fields multiply forms with full Leibniz bookkeeping.
struct ScalarField {
    std::function<double(const Point&)> eval;
    std::function<void(const Point&, std::array<double, 5>&)> grad;  // optional
    std::function<void(const Point&, std::array<std::array<double, 5>, 5>&)> hess;  // optional
};

ScalarField constant_scalar(double value);
// f(x_axis) with the supplied one-dimensional derivatives.
ScalarField axis_scalar(int axis, std::function<double(double)> f,
                        std::function<double(double)> fp, std::function<double(double)> fpp);

FormField zero_form(int dim, int degree);
FormField constant_form(int dim, int degree, const Coeffs& coeffs);
FormField coordinate_1form(int dim, int axis);  // dx^axis
FormField scalar_form(int dim, const ScalarField& f);  // degree 0

FormField add(const FormField& a, const FormField& b);
FormField scale(const FormField& a, double s);
FormField multiply(const ScalarField& f, const FormField& a);
FormField wedge(const FormField& a, const FormField& b);
FormField d_analytic(const FormField& a);

struct GridAxis {
    std::string name;
    double lo = 0.0, hi = 1.0;
    int count = 0;
    bool periodic = false;
};

// Sample lattice: periodic axes place count points on [lo, hi) with spacing
// (hi-lo)/count; bounded axes place count points on [lo, hi] inclusive.
struct Grid {
    int dim = 0;
    std::array<GridAxis, 5> axes{};

    double spacing(int axis) const;
    double coord(int axis, int idx) const;
    std::size_t node_count() const;
    Point node_point(std::size_t flat) const;
    std::array<int, 5> node_index(std::size_t flat) const;
};

Grid make_grid(int dim, const std::vector<GridAxis>& axes);

// Finite-difference exterior derivative: second-order central differences of
// the closure, one-sided at bounded axis ends.  Independent oracle for
// d_analytic; never used to build anything.
FormField d_fd(const FormField& a, const Grid& grid);

// Orthonormal coframe rows e^i = sum_j rows[i][j] dx^j.
struct Coframe {
    int dim = 0;
    std::array<std::array<double, 5>, 5> rows{};
};

double pointwise_norm(const FormField& a, const Coframe& coframe, const Point& p);

// A(v1,...,vk) with the vectors as columns.
double evaluate_on_vectors(const FormField& a, const Point& p,
                           const std::vector<std::array<double, 5>>& vectors);

struct FrameRestriction {
    int frameSize = 0;
    std::array<double, 25> matrix{};  // row-major frameSize x frameSize
    std::optional<double> pfaffian;   // frame sizes 2 and 4
    double entry(int i, int j) const { return matrix[static_cast<std::size_t>(i * frameSize + j)]; }
};

// Degree-2 restriction A(f_i, f_j); throws FrameMismatchError when the frame
// is smaller than the degree.
FrameRestriction restrict_to_frame(const FormField& a, const Point& p,
                                   const std::vector<std::array<double, 5>>& frame);

struct ChartMap {
    int dimFrom = 0, dimTo = 0;
    std::function<Point(const Point&)> apply;
    // jac[to][from] = d(apply_to)/d(x_from)
    std::function<void(const Point&, std::array<std::array<double, 5>, 5>&)> jacobian;
    bool affine = false;  // constant Jacobian: derivative data can be pulled back exactly
};

FormField pullback(const FormField& a, const ChartMap& map);

// Deterministic grid extrema of a pointwise scalar; ties break toward the
// smaller flat index regardless of thread count.
struct GridScan {
    double minValue = 0.0, maxValue = 0.0;
    std::size_t argminFlat = 0, argmaxFlat = 0;
    Point argminPoint{}, argmaxPoint{};
};

GridScan scan_grid(const Grid& grid, const std::function<double(const Point&)>& f);

}  // namespace fforge::ext

#endif  // FFORGE_EXTERIOR_HPP
