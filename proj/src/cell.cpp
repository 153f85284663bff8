#include "pfront/cell.hpp"

#include <cmath>

#include "pfront/util.hpp"

namespace pfront {

PeriodicCell::PeriodicCell(int d, std::array<double, 2> L) : dim(d), lengths(L) {
    if (dim != 1 && dim != 2) throw config_error("PeriodicCell: dim must be 1 or 2");
    for (int a = 0; a < dim; ++a)
        if (!(lengths[std::size_t(a)] > 0.0) || !std::isfinite(lengths[std::size_t(a)]))
            throw config_error("PeriodicCell: period lengths must be positive and finite");
}

Direction::Direction(int d, std::array<double, 2> comps) : dim(d), c(comps) {
    if (dim != 1 && dim != 2) throw config_error("Direction: dim must be 1 or 2");
    if (dim == 1) c[1] = 0.0;
    double n2 = c[0] * c[0] + c[1] * c[1];
    if (std::fabs(std::sqrt(n2) - 1.0) > 1e-12) throw config_error("Direction: not a unit vector");
}

Direction Direction::from_angle(double theta) {
    double cx = std::cos(theta), cy = std::sin(theta);
    double r = std::sqrt(cx * cx + cy * cy);
    return Direction(2, {cx / r, cy / r});
}

Direction Direction::axis(int dim, int ax, double sign) {
    std::array<double, 2> c{0.0, 0.0};
    c[std::size_t(ax)] = sign;
    return Direction(dim, c);
}

GridSpec::GridSpec(int d, std::array<double, 2> lo_, std::array<double, 2> ext,
                   std::array<std::size_t, 2> n, std::array<Bc, 2> b)
    : dim(d), lo(lo_), extent(ext), nodes(n), bc(b) {
    if (dim != 1 && dim != 2) throw config_error("GridSpec: dim must be 1 or 2");
    if (dim == 1) nodes[1] = 1;
    for (int a = 0; a < dim; ++a) {
        auto ai = std::size_t(a);
        if (!(extent[ai] > 0.0)) throw config_error("GridSpec: extent must be positive");
        std::size_t need = bc[ai] == Bc::periodic ? 2 : 3;
        if (nodes[ai] < need) throw config_error("GridSpec: too few nodes");
    }
}

bool GridSpec::resolves_cell(const PeriodicCell& cell, double tol) const {
    for (int a = 0; a < std::min(dim, cell.dim); ++a) {
        double ratio = cell.length(a) / dx(a);
        if (std::fabs(ratio - std::round(ratio)) > tol * ratio) return false;
    }
    return true;
}

std::string to_string(const Direction& n) {
    if (n.dim == 1) return n.c[0] > 0 ? "(+1)" : "(-1)";
    return "(" + fmt_g17(n.c[0]) + "," + fmt_g17(n.c[1]) + ")";
}

}  // namespace pfront
