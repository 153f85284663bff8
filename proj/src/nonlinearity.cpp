#include "pfront/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

#include "pfront/util.hpp"

namespace pfront {

std::string to_string(NlKind k) {
    switch (k) {
        case NlKind::kpp_monostable: return "kpp_monostable";
        case NlKind::general_monostable: return "general_monostable";
        case NlKind::ignition: return "ignition";
        case NlKind::ignition_approx: return "ignition_approx";
    }
    return "?";
}

double Nonlinearity::eval_local(double r, double u) const {
    switch (kind) {
        case NlKind::kpp_monostable:
            if (u <= 0.0 || u > 1.0 + rho) return 0.0;
            return r * u * (1.0 - u);
        case NlKind::general_monostable:
            if (u <= 0.0 || u > 1.0 + rho) return 0.0;
            return r * u * (1.0 - u) * (1.0 + push * u);
        case NlKind::ignition:
            if (u <= theta || u > 1.0 + rho) return 0.0;
            return (u - theta) * (1.0 - u);
        case NlKind::ignition_approx: {
            if (u <= 0.0) return 0.0;  // dead zone [-eps,0] and anything below
            double ueff;
            if (u <= 1.0 - eps)
                ueff = u;
            else if (u <= 1.0 - eps / 2.0)
                ueff = 1.0 - eps + 2.0 * (u - (1.0 - eps));
            else
                return 0.0;
            return base->eval_local(r, ueff);
        }
    }
    return 0.0;
}

double Nonlinearity::eval(const Point& x, double u) const {
    return eval_local(evaluate_periodic(linzero, x), u);
}

std::string Nonlinearity::describe() const {
    std::string s = "{\"kind\":\"" + to_string(kind) + "\"";
    if (kind == NlKind::ignition) s += ",\"theta\":" + fmt_g17(theta);
    if (kind == NlKind::ignition_approx) s += ",\"eps\":" + fmt_g17(eps) + ",\"base\":" + base->describe();
    if (kind == NlKind::general_monostable) s += ",\"push\":" + fmt_g17(push);
    s += "}";
    return s;
}

Nonlinearity make_kpp(const ScalarField& r_field) {
    if (!(r_field.min() > 0.0))
        throw config_error("make_kpp: r(x) must be positive (zero would make the rest state linearly neutral)");
    Nonlinearity nl;
    nl.kind = NlKind::kpp_monostable;
    nl.cell = r_field.cell;
    nl.rho = 0.5;  // r u(1-u) is nonincreasing in u on [0.5, 1]
    nl.linzero = r_field;
    nl.lipschitz_M = estimate_lipschitz_M(nl);
    return nl;
}

Nonlinearity make_general_monostable(const ScalarField& r_field, double push) {
    if (!(r_field.min() > 0.0)) throw config_error("make_general_monostable: r(x) must be positive");
    if (push < 0.0 || push > 2.0) throw config_error("make_general_monostable: push outside [0,2]");
    Nonlinearity nl;
    nl.kind = NlKind::general_monostable;
    nl.cell = r_field.cell;
    nl.push = push;
    // u(1-u)(1+pu) peaks at u* = ((p-1)+sqrt(p^2+p+1))/(3p) <= 0.608 over
    // p in (0,2], so the family is nonincreasing on [0.69, 1].
    nl.rho = 0.31;
    nl.linzero = r_field;
    nl.lipschitz_M = estimate_lipschitz_M(nl);
    return nl;
}

Nonlinearity make_ignition(const PeriodicCell& cell, double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw config_error("make_ignition: theta outside (0,1)");
    Nonlinearity nl;
    nl.kind = NlKind::ignition;
    nl.cell = cell;
    nl.theta = theta;
    nl.rho = (1.0 - theta) / 2.0;  // (u-theta)(1-u) is nonincreasing past the midpoint
    nl.linzero = scalar_constant(cell, {8, 8}, 0.0);
    nl.lipschitz_M = estimate_lipschitz_M(nl);
    return nl;
}

Nonlinearity make_ignition_approx(const Nonlinearity& base, double eps) {
    if (!base.is_monostable()) throw config_error("make_ignition_approx: base must be monostable");
    if (!(eps > 0.0 && eps < std::min(base.rho, 0.5)))
        throw config_error("make_ignition_approx: eps must lie in (0, min(rho, 1/2)) for the upper splice");
    Nonlinearity nl;
    nl.kind = NlKind::ignition_approx;
    nl.cell = base.cell;
    nl.eps = eps;
    nl.rho = base.rho - eps / 2.0;
    nl.linzero = base.linzero;
    nl.base = std::make_shared<Nonlinearity>(base);
    nl.lipschitz_M = estimate_lipschitz_M(nl);
    return nl;
}

bool AssumptionReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.pass; });
}

namespace {

std::vector<Point> x_samples(const Nonlinearity& nl, std::size_t nx) {
    std::vector<Point> xs;
    if (nl.cell.dim == 1) {
        xs.reserve(nx);
        for (std::size_t i = 0; i < nx; ++i)
            xs.push_back({nl.cell.length(0) * double(i) / double(nx), 0.0});
    } else {
        std::size_t side = std::max<std::size_t>(2, std::size_t(std::sqrt(double(nx))));
        xs.reserve(side * side);
        for (std::size_t j = 0; j < side; ++j)
            for (std::size_t i = 0; i < side; ++i)
                xs.push_back({nl.cell.length(0) * double(i) / double(side),
                              nl.cell.length(1) * double(j) / double(side)});
    }
    return xs;
}

}  // namespace

AssumptionReport check_assumptions(const Nonlinearity& nl, std::size_t nx, std::size_t nu) {
    AssumptionReport rep;
    auto xs = x_samples(nl, nx);
    const double lo = nl.bottom(), hi = nl.top();

    AssumptionCheck rest{"rest_states_zero", true, 0.0};
    for (const auto& x : xs) {
        rest.worst = std::max(rest.worst, std::fabs(nl.eval(x, lo)));
        rest.worst = std::max(rest.worst, std::fabs(nl.eval(x, hi)));
    }
    rest.pass = rest.worst <= 1e-12;
    rep.checks.push_back(rest);

    AssumptionCheck sign{"nonnegative_between_rest_states", true, 0.0};
    for (const auto& x : xs)
        for (std::size_t k = 0; k <= nu - 1; ++k) {
            double u = lo + (hi - lo) * double(k) / double(nu - 1);
            double v = nl.eval(x, u);
            if (v < -1e-12) {
                sign.pass = false;
                sign.worst = std::max(sign.worst, -v);
            }
        }
    rep.checks.push_back(sign);

    if (nl.kind == NlKind::ignition || nl.kind == NlKind::ignition_approx) {
        AssumptionCheck cut{"cutoff_zone_exact_zero", true, 0.0};
        double czlo = nl.bottom(), czhi = nl.threshold();
        for (const auto& x : xs)
            for (std::size_t k = 0; k < 101; ++k) {
                double u = czlo + (czhi - czlo) * double(k) / 100.0;
                cut.worst = std::max(cut.worst, std::fabs(nl.eval(x, u)));
            }
        cut.pass = cut.worst == 0.0;
        rep.checks.push_back(cut);

        AssumptionCheck pos{"positive_above_threshold", true, 0.0};
        double best = 0.0;
        for (const auto& x : xs)
            for (std::size_t k = 1; k < 100; ++k) {
                double u = czhi + (hi - czhi) * double(k) / 100.0;
                best = std::max(best, nl.eval(x, u));
            }
        pos.pass = best > 0.0;
        pos.worst = best;
        rep.checks.push_back(pos);
    }

    AssumptionCheck mono{"nonincreasing_near_top", true, 0.0};
    const double du = 1e-3;
    for (const auto& x : xs)
        for (double u = hi - nl.rho; u < hi - du / 2.0; u += du) {
            double d = nl.eval(x, u + du) - nl.eval(x, u);
            if (d > 1e-12) {
                mono.pass = false;
                mono.worst = std::max(mono.worst, d);
            }
        }
    rep.checks.push_back(mono);
    return rep;
}

double estimate_lipschitz_M(const Nonlinearity& nl, std::size_t nx, std::size_t nu) {
    auto xs = x_samples(nl, nx);
    const double th = nl.threshold(), hi = nl.top();
    double M = 0.0;
    for (const auto& x : xs)
        for (std::size_t k = 1; k <= nu; ++k) {
            double u = th + (hi - th) * double(k) / double(nu);
            double denom = std::fabs(u - th);
            if (denom < 1e-9) continue;
            M = std::max(M, nl.eval(x, u) / denom);
        }
    return M;
}

}  // namespace pfront
