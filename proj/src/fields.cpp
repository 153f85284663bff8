#include "pfront/fields.hpp"

#include <algorithm>
#include <cmath>

#include "pfront/util.hpp"

namespace pfront {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::size_t flat_count(const PeriodicCell& cell, std::array<std::size_t, 2> res) {
    if (res[0] < 2) throw config_error("field resolution must be >= 2 per axis");
    if (cell.dim > 1 && res[1] < 2) throw config_error("field resolution must be >= 2 per axis");
    return res[0] * (cell.dim > 1 ? res[1] : 1);
}

Point node_point(const PeriodicCell& cell, std::array<std::size_t, 2> res, std::size_t flat) {
    std::size_t i = flat % res[0], j = flat / res[0];
    return {double(i) * cell.length(0) / double(res[0]),
            cell.dim > 1 ? double(j) * cell.length(1) / double(res[1]) : 0.0};
}

struct InterpWeights {
    std::size_t i0, i1, j0, j1;
    double fx, fy;
};

InterpWeights weights(const PeriodicCell& cell, std::array<std::size_t, 2> res, const Point& x) {
    InterpWeights w{0, 0, 0, 0, 0.0, 0.0};
    double tx = wrap_coord(x[0], cell.length(0)) / cell.length(0) * double(res[0]);
    w.i0 = std::min(std::size_t(tx), res[0] - 1);
    w.fx = tx - double(w.i0);
    w.i1 = (w.i0 + 1) % res[0];
    if (cell.dim > 1) {
        double ty = wrap_coord(x[1], cell.length(1)) / cell.length(1) * double(res[1]);
        w.j0 = std::min(std::size_t(ty), res[1] - 1);
        w.fy = ty - double(w.j0);
        w.j1 = (w.j0 + 1) % res[1];
    }
    return w;
}

double interp(const std::vector<double>& v, const PeriodicCell& cell,
              std::array<std::size_t, 2> res, const InterpWeights& w) {
    auto id = [&](std::size_t i, std::size_t j) { return j * res[0] + i; };
    if (cell.dim == 1) {
        if (w.fx == 0.0) return v[w.i0];  // exact at nodes, bitwise
        return (1.0 - w.fx) * v[w.i0] + w.fx * v[w.i1];
    }
    if (w.fx == 0.0 && w.fy == 0.0) return v[id(w.i0, w.j0)];
    double v00 = v[id(w.i0, w.j0)], v10 = v[id(w.i1, w.j0)];
    double v01 = v[id(w.i0, w.j1)], v11 = v[id(w.i1, w.j1)];
    return (1.0 - w.fy) * ((1.0 - w.fx) * v00 + w.fx * v10) +
           w.fy * ((1.0 - w.fx) * v01 + w.fx * v11);
}

}  // namespace

Point ScalarField::node(std::size_t flat) const { return node_point(cell, res, flat); }

double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }
double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }

double VectorField::max_abs(int axis) const {
    double m = 0.0;
    for (double v : comp[std::size_t(axis)]) m = std::max(m, std::fabs(v));
    return m;
}

bool PeriodicMedium::has_advection() const {
    for (int d = 0; d < cell.dim; ++d)
        if (q.max_abs(d) > 0.0) return true;
    return false;
}

std::uint64_t PeriodicMedium::hash() const {
    std::uint64_t h = fnv1a(A.a11.data(), A.a11.size() * sizeof(double));
    if (cell.dim > 1) {
        h = fnv1a(A.a12.data(), A.a12.size() * sizeof(double), h);
        h = fnv1a(A.a22.data(), A.a22.size() * sizeof(double), h);
    }
    for (int d = 0; d < cell.dim; ++d)
        h = fnv1a(q.comp[std::size_t(d)].data(), q.comp[std::size_t(d)].size() * sizeof(double), h);
    return h;
}

TensorField tensor_constant(const PeriodicCell& cell, std::array<std::size_t, 2> res,
                            double a11, double a12, double a22) {
    std::size_t n = flat_count(cell, res);
    TensorField f;
    f.cell = cell;
    f.res = res;
    f.a11.assign(n, a11);
    if (cell.dim > 1) {
        f.a12.assign(n, a12);
        f.a22.assign(n, a22);
        double tr = a11 + a22, det = a11 * a22 - a12 * a12;
        double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        f.a1 = tr / 2.0 - disc;
        f.a2 = tr / 2.0 + disc;
    } else {
        f.a1 = f.a2 = a11;
    }
    if (!(f.a1 > 0.0)) throw config_error("tensor_constant: not elliptic (a1 <= 0)");
    for (int d = 0; d < cell.dim; ++d) f.divcol[std::size_t(d)].assign(n, 0.0);
    return f;
}

TensorField tensor_cosine_diag(const PeriodicCell& cell, std::array<std::size_t, 2> res,
                               double base1, double amp1, double base2, double amp2) {
    double lo = base1 - std::fabs(amp1), hi = base1 + std::fabs(amp1);
    if (cell.dim > 1) {
        lo = std::min(lo, base2 - std::fabs(amp2));
        hi = std::max(hi, base2 + std::fabs(amp2));
    }
    if (!(lo > 0.0)) throw config_error("tensor_cosine_diag: not elliptic (a1 <= 0)");
    std::size_t n = flat_count(cell, res);
    TensorField f;
    f.cell = cell;
    f.res = res;
    f.a1 = lo;
    f.a2 = hi;
    f.a11.resize(n);
    if (cell.dim > 1) {
        f.a12.assign(n, 0.0);
        f.a22.resize(n);
    }
    for (int d = 0; d < cell.dim; ++d) f.divcol[std::size_t(d)].assign(n, 0.0);
    double k1 = kTwoPi / cell.length(0);
    double k2 = cell.dim > 1 ? kTwoPi / cell.length(1) : 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        Point x = node_point(cell, res, m);
        f.a11[m] = base1 + amp1 * std::cos(k1 * x[0]);
        f.divcol[0][m] = -amp1 * k1 * std::sin(k1 * x[0]);  // d a11 / dx
        if (cell.dim > 1) {
            f.a22[m] = base2 + amp2 * std::cos(k2 * x[1]);
            f.divcol[1][m] = -amp2 * k2 * std::sin(k2 * x[1]);  // d a22 / dy
        }
    }
    return f;
}

VectorField flow_cellular(const PeriodicCell& cell, std::array<std::size_t, 2> res, double amp) {
    if (cell.dim != 2) throw config_error("flow_cellular: 2D cells only");
    std::size_t n = flat_count(cell, res);
    VectorField f;
    f.cell = cell;
    f.res = res;
    f.comp[0].resize(n);
    f.comp[1].resize(n);
    double k1 = kTwoPi / cell.length(0), k2 = kTwoPi / cell.length(1);
    for (std::size_t m = 0; m < n; ++m) {
        Point x = node_point(cell, res, m);
        // q = (-d psi/dy, d psi/dx), psi = amp/(2 pi) sin(k1 x) sin(k2 y)
        f.comp[0][m] = -amp * k2 / kTwoPi * std::sin(k1 * x[0]) * std::cos(k2 * x[1]);
        f.comp[1][m] = amp * k1 / kTwoPi * std::cos(k1 * x[0]) * std::sin(k2 * x[1]);
    }
    return f;
}

VectorField flow_zero(const PeriodicCell& cell, std::array<std::size_t, 2> res) {
    std::size_t n = flat_count(cell, res);
    VectorField f;
    f.cell = cell;
    f.res = res;
    for (int d = 0; d < cell.dim; ++d) f.comp[std::size_t(d)].assign(n, 0.0);
    return f;
}

VectorField flow_constant(const PeriodicCell& cell, std::array<std::size_t, 2> res,
                          std::array<double, 2> q0, bool test_only_bypass) {
    bool nonzero = q0[0] != 0.0 || (cell.dim > 1 && q0[1] != 0.0);
    if (nonzero && !test_only_bypass)
        throw config_error("flow_constant: nonzero constant drift violates the zero-mean hypothesis");
    std::size_t n = flat_count(cell, res);
    VectorField f;
    f.cell = cell;
    f.res = res;
    f.zero_mean_exempt = nonzero;
    for (int d = 0; d < cell.dim; ++d) f.comp[std::size_t(d)].assign(n, q0[std::size_t(d)]);
    return f;
}

ScalarField scalar_constant(const PeriodicCell& cell, std::array<std::size_t, 2> res, double v) {
    ScalarField f;
    f.cell = cell;
    f.res = res;
    f.values.assign(flat_count(cell, res), v);
    return f;
}

ScalarField scalar_cosine(const PeriodicCell& cell, std::array<std::size_t, 2> res,
                          double base, double amp1, double amp2) {
    std::size_t n = flat_count(cell, res);
    ScalarField f;
    f.cell = cell;
    f.res = res;
    f.values.resize(n);
    double k1 = kTwoPi / cell.length(0);
    double k2 = cell.dim > 1 ? kTwoPi / cell.length(1) : 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        Point x = node_point(cell, res, m);
        f.values[m] = base + amp1 * std::cos(k1 * x[0]) +
                      (cell.dim > 1 ? amp2 * std::cos(k2 * x[1]) : 0.0);
    }
    return f;
}

double evaluate_periodic(const ScalarField& f, const Point& x) {
    return interp(f.values, f.cell, f.res, weights(f.cell, f.res, x));
}

std::array<double, 2> evaluate_periodic(const VectorField& f, const Point& x) {
    auto w = weights(f.cell, f.res, x);
    return {interp(f.comp[0], f.cell, f.res, w),
            f.cell.dim > 1 ? interp(f.comp[1], f.cell, f.res, w) : 0.0};
}

TensorValue evaluate_periodic(const TensorField& f, const Point& x) {
    auto w = weights(f.cell, f.res, x);
    return {interp(f.a11, f.cell, f.res, w),
            f.cell.dim > 1 ? interp(f.a12, f.cell, f.res, w) : 0.0,
            f.cell.dim > 1 ? interp(f.a22, f.cell, f.res, w) : 0.0};
}

std::array<double, 2> evaluate_divcol(const TensorField& f, const Point& x) {
    auto w = weights(f.cell, f.res, x);
    return {interp(f.divcol[0], f.cell, f.res, w),
            f.cell.dim > 1 ? interp(f.divcol[1], f.cell, f.res, w) : 0.0};
}

FieldCheck verify_tensor(const TensorField& f, double tol_eig) {
    FieldCheck r;
    // Quadratic-form sampling over 16 unit vectors per node: the ellipticity
    // sandwich a1 |xi|^2 <= xi.A xi <= a2 |xi|^2.
    const int nxi = 16;
    for (std::size_t m = 0; m < f.count(); ++m) {
        TensorValue A = f.at(m);
        if (f.cell.dim == 1) {
            double lo = A[0] - f.a1, hi = f.a2 - A[0];
            if (lo < -tol_eig || hi < -tol_eig) {
                r.ok = false;
                r.worst = std::max({r.worst, -lo, -hi});
            }
            continue;
        }
        for (int k = 0; k < nxi; ++k) {
            double th = kTwoPi * double(k) / double(nxi);
            double c = std::cos(th), s = std::sin(th);
            double qf = A[0] * c * c + 2.0 * A[1] * c * s + A[2] * s * s;
            double lo = qf - f.a1, hi = f.a2 - qf;
            if (lo < -tol_eig || hi < -tol_eig) {
                r.ok = false;
                r.worst = std::max({r.worst, -lo, -hi});
            }
        }
    }
    if (!r.ok) r.detail = "ellipticity bounds violated";
    return r;
}

FieldCheck verify_vector(const VectorField& f, double tol_div, double tol_mean) {
    FieldCheck r;
    if (f.zero_mean_exempt) {
        r.detail = "zero-mean exemption set; checks skipped";
        return r;
    }
    const std::size_t nx = f.res[0], ny = f.cell.dim > 1 ? f.res[1] : 1;
    auto id = [&](std::size_t i, std::size_t j) { return j * nx + i; };
    double hx = f.cell.length(0) / double(nx);
    double hy = f.cell.dim > 1 ? f.cell.length(1) / double(ny) : 1.0;
    double max_div = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            std::size_t ip = (i + 1) % nx, im = (i + nx - 1) % nx;
            double div = (f.comp[0][id(ip, j)] - f.comp[0][id(im, j)]) / (2.0 * hx);
            if (f.cell.dim > 1) {
                std::size_t jp = (j + 1) % ny, jm = (j + ny - 1) % ny;
                div += (f.comp[1][id(i, jp)] - f.comp[1][id(i, jm)]) / (2.0 * hy);
            }
            max_div = std::max(max_div, std::fabs(div));
        }
    }
    if (max_div > tol_div) {
        r.ok = false;
        r.worst = max_div;
        r.detail = "discrete divergence too large";
    }
    for (int d = 0; d < f.cell.dim; ++d) {
        double mean = 0.0;
        for (double v : f.comp[std::size_t(d)]) mean += v;
        mean /= double(f.count());
        if (std::fabs(mean) > tol_mean) {
            r.ok = false;
            r.worst = std::max(r.worst, std::fabs(mean));
            r.detail = "component mean nonzero";
        }
    }
    return r;
}

}  // namespace pfront
