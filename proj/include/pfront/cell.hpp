#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace pfront {

using Point = std::array<double, 2>;  // 1D problems use component 0 only

/// Fundamental domain (0,L1)x...x(0,L_dim) of the coefficient fields.
struct PeriodicCell {
    int dim = 1;                       // 1 or 2
    std::array<double, 2> lengths{1.0, 1.0};

    PeriodicCell() = default;
    PeriodicCell(int d, std::array<double, 2> L);  // validates invariants

    double length(int axis) const { return lengths[std::size_t(axis)]; }
};

/// Unit vector in R^dim.
struct Direction {
    int dim = 1;
    std::array<double, 2> c{1.0, 0.0};

    Direction() = default;
    Direction(int d, std::array<double, 2> comps);  // validates |n| = 1 within 1e-12
    static Direction from_angle(double theta);      // 2D, (cos t, sin t), renormalized
    static Direction axis(int dim, int axis, double sign = 1.0);

    double dot(const Point& x) const { return c[0] * x[0] + (dim > 1 ? c[1] * x[1] : 0.0); }
    double operator[](int i) const { return c[std::size_t(i)]; }
};

enum class Bc { periodic, noflux };

/// Uniform computational grid. Periodic axes cover [lo, lo+extent) with
/// spacing extent/nodes; no-flux axes cover [lo, lo+extent] with spacing
/// extent/(nodes-1).
struct GridSpec {
    int dim = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> extent{1.0, 1.0};
    std::array<std::size_t, 2> nodes{64, 1};
    std::array<Bc, 2> bc{Bc::periodic, Bc::periodic};

    GridSpec() = default;
    GridSpec(int d, std::array<double, 2> lo_, std::array<double, 2> ext,
             std::array<std::size_t, 2> n, std::array<Bc, 2> b);

    double dx(int axis) const {
        auto a = std::size_t(axis);
        return bc[a] == Bc::periodic ? extent[a] / double(nodes[a])
                                     : extent[a] / double(nodes[a] - 1);
    }
    double coord(int axis, std::size_t i) const { return lo[std::size_t(axis)] + dx(axis) * double(i); }
    std::size_t count() const { return nodes[0] * (dim > 1 ? nodes[1] : 1); }
    std::size_t idx(std::size_t i, std::size_t j = 0) const { return j * nodes[0] + i; }
    Point point(std::size_t flat) const {
        std::size_t i = flat % nodes[0], j = flat / nodes[0];
        return {coord(0, i), dim > 1 ? coord(1, j) : 0.0};
    }

    /// True when the cell fits an integer number of spacings on every axis
    /// (required before sampling cell-periodic coefficients on this grid).
    bool resolves_cell(const PeriodicCell& cell, double tol = 1e-9) const;
};

std::string to_string(const Direction& n);

}  // namespace pfront
