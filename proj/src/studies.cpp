#include "pfront/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pfront/util.hpp"

namespace pfront {

std::string to_string(SpeedMethod m, double eps) {
    switch (m) {
        case SpeedMethod::eigen_lin: return "eigen_lin";
        case SpeedMethod::sim_direct: return "sim_direct";
        case SpeedMethod::sim_ignition_approx: {
            std::ostringstream os;
            os << "sim_ignition_approx(" << eps << ")";
            return os.str();
        }
    }
    return "unknown";
}

std::size_t SpeedCurve::n_ok() const {
    std::size_t k = 0;
    for (const auto& e : entries) k += e.ok ? 1 : 0;
    return k;
}

double SpeedCurve::kappa() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& e : entries)
        if (e.ok) v = std::min(v, e.c);
    return v;
}

double SpeedCurve::K_sup() const {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& e : entries)
        if (e.ok) v = std::max(v, e.c);
    return v;
}

double SpeedCurve::max_adjacent_jump() const {
    double j = 0.0;
    std::size_t m = entries.size();
    if (m < 2) return 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const SpeedEntry& a = entries[k];
        const SpeedEntry& b = entries[(k + 1) % m];
        if (!a.ok || !b.ok) continue;
        j = std::max(j, std::abs(b.c - a.c));
    }
    return j;
}

double SpeedCurve::max_uncertainty() const {
    double u = 0.0;
    for (const auto& e : entries)
        if (e.ok) u = std::max(u, e.uncertainty);
    return u;
}

std::vector<Direction> direction_sample(int dim, std::size_t n_samples) {
    std::vector<Direction> out;
    if (dim == 1) {
        out.push_back(Direction::axis(1, 0, 1.0));
        if (n_samples > 1) out.push_back(Direction::axis(1, 0, -1.0));
        return out;
    }
    out.reserve(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k)
        out.push_back(Direction::from_angle(2.0 * M_PI * double(k) / double(n_samples)));
    return out;
}

namespace {

bool power_of_two(std::size_t v) { return v > 0 && (v & (v - 1)) == 0; }

SpeedEntry evaluate_direction(const PeriodicMedium& medium, const Nonlinearity& nl,
                              SpeedMethod method, const Direction& n, double angle,
                              const ScanConfig& cfg) {
    SpeedEntry e;
    e.angle = angle;
    e.n = n;
    try {
        switch (method) {
            case SpeedMethod::eigen_lin: {
                LinearSpeed ls = linear_speed(medium, nl, n, cfg.eigen_resolution);
                e.c = ls.c_lin;
                e.uncertainty = cfg.eigen_uncertainty +
                                ls.residual / std::max(ls.lambda_min, 1e-3);
                break;
            }
            case SpeedMethod::sim_direct: {
                MeasuredSpeed ms = measure_speed(medium, nl, n, cfg.sim);
                e.c = ms.c;
                e.uncertainty = ms.trace.uncertainty;
                break;
            }
            case SpeedMethod::sim_ignition_approx: {
                Nonlinearity feps = make_ignition_approx(nl, cfg.eps);
                MeasuredSpeed ms = measure_speed(medium, feps, n, cfg.sim);
                e.c = ms.c;
                e.uncertainty = ms.trace.uncertainty;
                break;
            }
        }
        e.ok = true;
    } catch (const std::exception& ex) {
        e.ok = false;
        e.error = ex.what();
    }
    return e;
}

}  // namespace

SpeedCurve scan_directions(const PeriodicMedium& medium, const Nonlinearity& nl,
                           SpeedMethod method, std::size_t n_samples, const ScanConfig& cfg) {
    if (n_samples < 4 || !power_of_two(n_samples))
        throw config_error("scan_directions: n_samples must be a power of two >= 4");
    if (medium.cell.dim != 2)
        throw config_error("scan_directions: direction scans need a 2D medium");
    if (method == SpeedMethod::sim_ignition_approx && !nl.is_monostable())
        throw config_error("scan_directions: sim_ignition_approx needs a monostable base");

    SpeedCurve curve;
    curve.method = method;
    curve.eps = method == SpeedMethod::sim_ignition_approx ? cfg.eps : 0.0;
    curve.medium_hash = medium.hash();
    curve.nl_descriptor = nl.describe();
    curve.entries.resize(n_samples);

    std::vector<Direction> dirs = direction_sample(2, n_samples);
    parallel_for(n_samples, cfg.threads, [&](std::size_t k) {
        double angle = 2.0 * M_PI * double(k) / double(n_samples);
        curve.entries[k] = evaluate_direction(medium, nl, method, dirs[k], angle, cfg);
    });
    return curve;
}

ContinuityReport continuity_report(const SpeedCurve& coarse, const SpeedCurve& fine) {
    if (fine.entries.size() != 2 * coarse.entries.size())
        throw config_error("continuity_report: fine scan must have exactly 2x samples");
    for (std::size_t k = 0; k < coarse.entries.size(); ++k)
        if (std::abs(coarse.entries[k].angle - fine.entries[2 * k].angle) > 1e-12)
            throw config_error("continuity_report: scans are not angle-nested");
    ContinuityReport r;
    r.jump_coarse = coarse.max_adjacent_jump();
    r.jump_fine = fine.max_adjacent_jump();
    r.max_uncertainty = std::max(coarse.max_uncertainty(), fine.max_uncertainty());
    r.pass = r.jump_fine <= 0.75 * r.jump_coarse + 2.0 * r.max_uncertainty;
    return r;
}

ApproxTable ignition_approx_study(const PeriodicMedium& medium, const Nonlinearity& base_nl,
                                  const std::vector<Direction>& n_set,
                                  const std::vector<double>& eps_list, const ApproxConfig& cfg) {
    if (!base_nl.is_monostable())
        throw config_error("ignition_approx_study: base nonlinearity must be monostable");
    if (n_set.empty() || eps_list.empty())
        throw config_error("ignition_approx_study: empty direction or eps list");
    for (std::size_t k = 1; k < eps_list.size(); ++k)
        if (!(eps_list[k] < eps_list[k - 1]))
            throw config_error("ignition_approx_study: eps_list must be strictly decreasing");

    ApproxTable tab;
    tab.n_set = n_set;
    tab.eps_list = eps_list;
    for (const auto& n : n_set) tab.angles.push_back(std::atan2(n.dim > 1 ? n[1] : 0.0, n[0]));
    tab.cells.assign(n_set.size(), std::vector<ApproxCell>(eps_list.size()));
    tab.reference.assign(n_set.size(), 0.0);
    tab.reference_method =
        base_nl.kind == NlKind::kpp_monostable ? "eigen_lin" : "sim_direct";

    // Reference speeds: the linearized eigen speed is exact for KPP bases;
    // otherwise a direct simulation on a finer grid stands in.
    std::size_t nd = n_set.size(), ne = eps_list.size();
    std::vector<std::string> ref_err(nd);
    parallel_for(nd, cfg.threads, [&](std::size_t i) {
        try {
            if (base_nl.kind == NlKind::kpp_monostable) {
                tab.reference[i] =
                    linear_speed(medium, base_nl, n_set[i], cfg.eigen_resolution).c_lin;
            } else {
                SpeedRunConfig fine = cfg.sim;
                fine.h = 0.5 * cfg.sim.h;
                tab.reference[i] = measure_speed(medium, base_nl, n_set[i], fine).c;
            }
        } catch (const std::exception& ex) {
            ref_err[i] = ex.what();
        }
    });

    parallel_for(nd * ne, cfg.threads, [&](std::size_t flat) {
        std::size_t i = flat / ne, j = flat % ne;
        ApproxCell& cell = tab.cells[i][j];
        try {
            Nonlinearity feps = make_ignition_approx(base_nl, eps_list[j]);
            MeasuredSpeed ms = measure_speed(medium, feps, n_set[i], cfg.sim);
            cell.c = ms.c;
            cell.uncertainty = ms.trace.uncertainty;
            cell.ok = true;
        } catch (const std::exception& ex) {
            cell.ok = false;
            cell.error = ex.what();
        }
    });
    for (std::size_t i = 0; i < nd; ++i)
        if (!ref_err[i].empty())
            for (std::size_t j = 0; j < ne; ++j)
                if (tab.cells[i][j].ok) {
                    tab.cells[i][j].ok = false;
                    tab.cells[i][j].error = "reference speed failed: " + ref_err[i];
                }

    // Monotonicity in eps: smaller eps must not be slower, up to twice the
    // combined fit uncertainties.
    tab.monotonicity_violations = 0;
    for (std::size_t i = 0; i < nd; ++i) {
        for (std::size_t j = 1; j < ne; ++j) {
            const ApproxCell& prev = tab.cells[i][j - 1];  // larger eps
            const ApproxCell& cur = tab.cells[i][j];
            if (!prev.ok || !cur.ok) continue;
            double tol = 2.0 * (prev.uncertainty + cur.uncertainty);
            if (cur.c < prev.c - tol) ++tab.monotonicity_violations;
        }
    }

    tab.sup_gap.assign(ne, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = 0; j < ne; ++j) {
        double g = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (std::size_t i = 0; i < nd; ++i) {
            if (!tab.cells[i][j].ok || !ref_err[i].empty()) continue;
            g = std::max(g, tab.reference[i] - tab.cells[i][j].c);
            any = true;
        }
        if (any) tab.sup_gap[j] = g;
    }
    tab.gap_decreasing = true;
    for (std::size_t j = 1; j < ne; ++j) {
        if (!std::isfinite(tab.sup_gap[j]) || !std::isfinite(tab.sup_gap[j - 1]) ||
            !(tab.sup_gap[j] < tab.sup_gap[j - 1]))
            tab.gap_decreasing = false;
    }
    return tab;
}

}  // namespace pfront
