#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pfront/cell.hpp"

namespace pfront {

/// Symmetric 2x2 (or 1x1) matrix value: {a11, a12, a22}.
using TensorValue = std::array<double, 3>;

/// Cell-periodic scalar samples on a uniform grid over the cell; node j sits
/// at x = j*L/res (no duplicated right edge).
struct ScalarField {
    PeriodicCell cell;
    std::array<std::size_t, 2> res{1, 1};
    std::vector<double> values;

    std::size_t count() const { return res[0] * (cell.dim > 1 ? res[1] : 1); }
    std::size_t idx(std::size_t i, std::size_t j = 0) const { return j * res[0] + i; }
    Point node(std::size_t flat) const;
    double min() const;
    double max() const;
};

/// Cell-periodic vector samples. zero_mean_exempt marks test-only flows that
/// deliberately violate the zero-mean hypothesis (e.g. constant drift).
struct VectorField {
    PeriodicCell cell;
    std::array<std::size_t, 2> res{1, 1};
    std::array<std::vector<double>, 2> comp;
    bool zero_mean_exempt = false;

    std::size_t count() const { return res[0] * (cell.dim > 1 ? res[1] : 1); }
    std::size_t idx(std::size_t i, std::size_t j = 0) const { return j * res[0] + i; }
    double max_abs(int axis) const;
};

/// Cell-periodic symmetric tensor samples with ellipticity bounds
/// a1 <= eig(A(x)) <= a2 and per-node column divergences
/// divcol[d] = sum_i d/dx_i A_{i,d} (so div(A n) = divcol . n), analytic for
/// the built-in families.
struct TensorField {
    PeriodicCell cell;
    std::array<std::size_t, 2> res{1, 1};
    std::vector<double> a11, a12, a22;  // a12/a22 empty in 1D
    std::array<std::vector<double>, 2> divcol;
    double a1 = 1.0, a2 = 1.0;

    std::size_t count() const { return res[0] * (cell.dim > 1 ? res[1] : 1); }
    std::size_t idx(std::size_t i, std::size_t j = 0) const { return j * res[0] + i; }
    TensorValue at(std::size_t flat) const {
        return {a11[flat], cell.dim > 1 ? a12[flat] : 0.0, cell.dim > 1 ? a22[flat] : 0.0};
    }
};

/// Coefficient pair (A, q) over one periodicity cell.
struct PeriodicMedium {
    PeriodicCell cell;
    TensorField A;
    VectorField q;

    double a1() const { return A.a1; }
    double a2() const { return A.a2; }
    bool has_advection() const;
    /// Content hash over both coefficient grids; provenance key in outputs.
    std::uint64_t hash() const;
};

// --- sampling of the built-in closed-form families ---

TensorField tensor_constant(const PeriodicCell& cell, std::array<std::size_t, 2> res,
                            double a11, double a12 = 0.0, double a22 = 1.0);
/// diag(base1 + amp1*cos(2 pi x/L1), base2 + amp2*cos(2 pi y/L2)); second
/// entry ignored in 1D.
TensorField tensor_cosine_diag(const PeriodicCell& cell, std::array<std::size_t, 2> res,
                               double base1, double amp1, double base2 = 1.0, double amp2 = 0.0);
/// Divergence-free cellular flow from the stream function
/// psi = amp/(2 pi) sin(2 pi x/L1) sin(2 pi y/L2); 2D only.
VectorField flow_cellular(const PeriodicCell& cell, std::array<std::size_t, 2> res, double amp);
VectorField flow_zero(const PeriodicCell& cell, std::array<std::size_t, 2> res);
/// Constant drift; violates the zero-mean hypothesis unless q0 = 0, so it
/// requires the test-only exemption flag.
VectorField flow_constant(const PeriodicCell& cell, std::array<std::size_t, 2> res,
                          std::array<double, 2> q0, bool test_only_bypass);
ScalarField scalar_constant(const PeriodicCell& cell, std::array<std::size_t, 2> res, double v);
/// base + amp1*cos(2 pi x/L1) + amp2*cos(2 pi y/L2).
ScalarField scalar_cosine(const PeriodicCell& cell, std::array<std::size_t, 2> res,
                          double base, double amp1, double amp2 = 0.0);

// --- periodic evaluation (bilinear interpolation, exact at nodes) ---

double evaluate_periodic(const ScalarField& f, const Point& x);
std::array<double, 2> evaluate_periodic(const VectorField& f, const Point& x);
TensorValue evaluate_periodic(const TensorField& f, const Point& x);
std::array<double, 2> evaluate_divcol(const TensorField& f, const Point& x);

// --- invariant verification (sampling-based, tolerances per contract) ---

struct FieldCheck {
    bool ok = true;
    double worst = 0.0;     // largest violation magnitude observed
    std::string detail;
};

FieldCheck verify_tensor(const TensorField& f, double tol_eig = 1e-10);
FieldCheck verify_vector(const VectorField& f, double tol_div = 1e-8, double tol_mean = 1e-10);

}  // namespace pfront
