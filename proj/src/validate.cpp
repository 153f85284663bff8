#include "pfront/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pfront/util.hpp"

namespace pfront {

namespace {

/// sup over cell nodes of |div(An) . n| and |q . n| for one direction.
std::pair<double, double> direction_bounds(const PeriodicMedium& medium, const Direction& n) {
    double bdiv = 0.0, bq = 0.0;
    const TensorField& A = medium.A;
    for (std::size_t m = 0; m < A.count(); ++m) {
        double d = A.divcol[0][m] * n[0] + (A.cell.dim > 1 ? A.divcol[1][m] * n[1] : 0.0);
        bdiv = std::max(bdiv, std::abs(d));
    }
    const VectorField& q = medium.q;
    for (std::size_t m = 0; m < q.count(); ++m) {
        double d = q.comp[0][m] * n[0] + (q.cell.dim > 1 ? q.comp[1][m] * n[1] : 0.0);
        bq = std::max(bq, std::abs(d));
    }
    return {bdiv, bq};
}

double invariant_lhs(double a1, double lambda, double bdiv, double bq, double M) {
    return a1 * lambda * lambda - lambda * bdiv - lambda * bq - M;
}

}  // namespace

bool SupersolutionSpec::invariant_holds() const { return invariant_margin() > 0.0; }

double SupersolutionSpec::invariant_margin() const {
    if (!medium) throw config_error("SupersolutionSpec: medium not set");
    auto [bdiv, bq] = direction_bounds(*medium, n);
    return invariant_lhs(a1, lambda, bdiv, bq, M);
}

SupersolutionSpec make_supersolution_spec(const PeriodicMedium& medium, const Nonlinearity& nl,
                                          const Direction& n, double lambda, double C_init) {
    if (nl.kind != NlKind::ignition)
        throw config_error("make_supersolution_spec: certificate applies to ignition kinds");
    if (!(lambda > 0.0)) throw config_error("make_supersolution_spec: lambda must be positive");
    SupersolutionSpec s;
    s.theta = nl.theta;
    s.lambda = lambda;
    s.a1 = medium.a1();
    s.M = nl.lipschitz_M;
    s.n = n;
    s.medium = &medium;
    s.nl = &nl;
    s.C = (1.0 + nl.theta) * std::exp(lambda * C_init);
    return s;
}

double choose_lambda(const PeriodicMedium& medium, const Nonlinearity& nl, int n_dirs) {
    if (nl.kind != NlKind::ignition)
        throw config_error("choose_lambda: certificate applies to ignition kinds");
    if (!(nl.lipschitz_M >= 0.0) || !std::isfinite(nl.lipschitz_M))
        throw config_error("choose_lambda: nonlinearity lacks a finite Lipschitz bound");
    double a1 = medium.a1();
    double M = nl.lipschitz_M;

    std::vector<Direction> dirs;
    if (medium.cell.dim == 1) {
        dirs = {Direction::axis(1, 0, 1.0), Direction::axis(1, 0, -1.0)};
    } else {
        for (int k = 0; k < n_dirs; ++k)
            dirs.push_back(Direction::from_angle(2.0 * M_PI * double(k) / double(n_dirs)));
    }

    double chosen = 1e-3;
    for (const auto& n : dirs) {
        auto [bdiv, bq] = direction_bounds(medium, n);
        auto g = [&](double lam) { return invariant_lhs(a1, lam, bdiv, bq, M); };
        if (g(1e-3) > 0.0) continue;  // degenerate: any positive lambda works
        // Doubling to bracket the threshold, then bisection to 0.1%.
        double hi = 1e-3;
        while (g(hi) <= 0.0) {
            hi *= 2.0;
            if (hi > 1e6)
                throw numeric_error(
                    "choose_lambda: no admissible lambda below 1e6; medium bounds inconsistent");
        }
        double lo = hi / 2.0;
        while (hi - lo > 1e-3 * hi) {
            double mid = 0.5 * (lo + hi);
            (g(mid) > 0.0 ? hi : lo) = mid;
        }
        chosen = std::max(chosen, 1.1 * hi);
    }
    return chosen;
}

SupersolutionReport check_supersolution(const SupersolutionSpec& spec, const GridSpec& grid,
                                        const TimeWindow& window, bool enforce_invariant) {
    if (!spec.medium || !spec.nl) throw config_error("check_supersolution: spec not fully built");
    if (enforce_invariant && !spec.invariant_holds()) {
        std::ostringstream os;
        os << "check_supersolution: certificate inequality violated (margin "
           << spec.invariant_margin() << " <= 0); lambda too small for this medium";
        throw config_error(os.str());
    }
    if (window.nt < 1 || !(window.t1 >= window.t0))
        throw config_error("check_supersolution: bad time window");

    const PeriodicMedium& med = *spec.medium;
    const Nonlinearity& nl = *spec.nl;
    double lam = spec.lambda, a1 = spec.a1, C = spec.C, theta = spec.theta;

    SupersolutionReport rep;
    rep.min_residual = std::numeric_limits<double>::infinity();
    double worst_t = window.t0;

    for (std::size_t kt = 0; kt < window.nt; ++kt) {
        double t = window.nt == 1
                       ? window.t0
                       : window.t0 + (window.t1 - window.t0) * double(kt) / double(window.nt - 1);
        double slice_min = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < grid.count(); ++m) {
            Point x = grid.point(m);
            double s = spec.n.dot(x);
            double E = std::exp(-lam * (s - 2.0 * a1 * lam * t));
            double v = theta + C * E;
            if (v >= 1.0) {
                rep.v1_max_abs_f = std::max(rep.v1_max_abs_f, std::abs(nl.eval(x, 1.0)));
                continue;
            }
            TensorValue Av = evaluate_periodic(med.A, x);
            double nAn = Av[0] * spec.n[0] * spec.n[0] +
                         (med.cell.dim > 1 ? 2.0 * Av[1] * spec.n[0] * spec.n[1] +
                                                 Av[2] * spec.n[1] * spec.n[1]
                                           : 0.0);
            std::array<double, 2> dc = evaluate_divcol(med.A, x);
            double divAn = dc[0] * spec.n[0] + (med.cell.dim > 1 ? dc[1] * spec.n[1] : 0.0);
            std::array<double, 2> qv = evaluate_periodic(med.q, x);
            double qn = qv[0] * spec.n[0] + (med.cell.dim > 1 ? qv[1] * spec.n[1] : 0.0);

            double term = C * E *
                          (2.0 * a1 * lam * lam - lam * lam * nAn + lam * divAn + lam * qn);
            double residual = term - nl.eval(x, v);
            rep.scale = std::max(rep.scale, std::abs(term));
            ++rep.n_points;
            if (residual < slice_min) slice_min = residual;
            if (residual < rep.min_residual) {
                rep.min_residual = residual;
                rep.t_at_min = t;
                rep.x_at_min = x;
            }
        }
        if (slice_min <= rep.min_residual + 1e-300) worst_t = t;
    }
    if (rep.n_points == 0)
        throw numeric_error("check_supersolution: v >= 1 everywhere on the grid; enlarge it");

    // Residual slice at the worst time, for CSV emission.
    for (std::size_t m = 0; m < grid.count(); ++m) {
        Point x = grid.point(m);
        double s = spec.n.dot(x);
        double E = std::exp(-lam * (s - 2.0 * a1 * lam * worst_t));
        double v = theta + C * E;
        if (v >= 1.0) continue;
        TensorValue Av = evaluate_periodic(med.A, x);
        double nAn = Av[0] * spec.n[0] * spec.n[0] +
                     (med.cell.dim > 1
                          ? 2.0 * Av[1] * spec.n[0] * spec.n[1] + Av[2] * spec.n[1] * spec.n[1]
                          : 0.0);
        std::array<double, 2> dc = evaluate_divcol(med.A, x);
        double divAn = dc[0] * spec.n[0] + (med.cell.dim > 1 ? dc[1] * spec.n[1] : 0.0);
        std::array<double, 2> qv = evaluate_periodic(med.q, x);
        double qn = qv[0] * spec.n[0] + (med.cell.dim > 1 ? qv[1] * spec.n[1] : 0.0);
        double term =
            C * E * (2.0 * a1 * lam * lam - lam * lam * nAn + lam * divAn + lam * qn);
        rep.worst_slice.push_back({worst_t, x[0], x[1], term - nl.eval(x, v)});
    }
    rep.pass = rep.min_residual >= -1e-8 * rep.scale;
    return rep;
}

namespace {

/// Forward box for a planar run in direction n: covers x.n in
/// [-(K + back), reach] on every axis, corners aligned with the cell.
GridSpec planar_box(const PeriodicMedium& medium, const Direction& n, double h, double reach,
                    double back, double* domain_top) {
    int dim = medium.cell.dim;
    std::array<double, 2> lo{0.0, 0.0}, ext{1.0, 1.0};
    std::array<std::size_t, 2> nn{1, 1};
    for (int d = 0; d < dim; ++d) {
        double Ld = medium.cell.length(d);
        double down = std::min(0.0, n[d] * reach) - back;
        double up = std::max(0.0, n[d] * reach) + back;
        lo[std::size_t(d)] = -std::ceil(-down / Ld) * Ld;
        auto nd = std::size_t(std::ceil((up - lo[std::size_t(d)]) / h)) + 2;
        nn[std::size_t(d)] = nd;
        ext[std::size_t(d)] = double(nd - 1) * h;
    }
    GridSpec g(dim, lo, ext, nn,
               {Bc::noflux, dim > 1 ? Bc::noflux : Bc::periodic});
    if (domain_top) {
        double top = 0.0;
        for (int d = 0; d < dim; ++d) {
            auto du = std::size_t(d);
            top += std::max(n[d] * lo[du], n[d] * (lo[du] + ext[du]));
        }
        *domain_top = top;
    }
    return g;
}

SpreadingEntry spreading_one(const PeriodicMedium& medium, const Nonlinearity& nl,
                             const Direction& n, double c_ref, const SpreadingParams& p) {
    SpreadingEntry e;
    e.n = n;
    e.angle = std::atan2(n.dim > 1 ? n[1] : 0.0, n[0]);
    e.c_ref = c_ref;
    e.tau = std::numeric_limits<double>::infinity();

    // Constant-coefficient media evolve planar data exactly as the 1D
    // problem along n. Besides being cheap, the reduction removes the
    // oblique no-flux walls of the 2D box: their contact wake lags the
    // planar front by a region that grows with t, which would contaminate
    // the behind-cone sample for non-axis directions at any fixed margin.
    const PeriodicMedium* run_medium = &medium;
    const Nonlinearity* run_nl = &nl;
    Direction run_n = n;
    PlanarReduction red;
    if (planar_reduction(medium, nl, n, p.h, red)) {
        run_medium = &red.medium;
        run_nl = &red.nl;
        run_n = Direction::axis(1, 0, 1.0);
    }

    double reach = (c_ref + p.alpha) * p.t_end + p.window_margin + 5.0;
    double back = p.K + p.window_margin + 5.0;
    double top = 0.0;
    GridSpec grid = planar_box(*run_medium, run_n, p.h, reach, back, &top);

    // Precompute s = x.n and the boundary-safe mask.
    std::size_t N = grid.count();
    std::vector<double> s(N);
    std::vector<char> safe(N);
    for (std::size_t m = 0; m < N; ++m) {
        Point x = grid.point(m);
        s[m] = run_n.dot(x);
        bool ok = true;
        for (int d = 0; d < grid.dim; ++d) {
            auto du = std::size_t(d);
            double a = x[du] - grid.lo[du];
            double b = grid.lo[du] + grid.extent[du] - x[du];
            if (a < p.window_margin || b < p.window_margin) ok = false;
        }
        safe[m] = ok ? 1 : 0;
    }

    struct Sample {
        double t;
        bool both;
        bool evaluable;
    };
    std::vector<Sample> samples;
    Observer obs{p.record_dt, [&](const SimState& st) {
                     double lo_cut = (c_ref - p.alpha) * st.t;
                     double hi_cut = (c_ref + p.alpha) * st.t;
                     double min1 = std::numeric_limits<double>::infinity();
                     double max2 = -std::numeric_limits<double>::infinity();
                     std::size_t n2 = 0;
                     for (std::size_t m = 0; m < N; ++m) {
                         if (!safe[m]) continue;
                         if (s[m] <= lo_cut) min1 = std::min(min1, st.u[m]);
                         if (s[m] >= hi_cut) {
                             max2 = std::max(max2, st.u[m]);
                             ++n2;
                         }
                     }
                     bool evaluable = n2 > 0 && std::isfinite(min1);
                     bool both = evaluable && min1 >= 1.0 - p.delta && max2 <= p.delta;
                     samples.push_back({st.t, both, evaluable});
                 }};

    InitialData init = InitialData::planar(run_n, 0.0, p.K, p.mu, 0.0);
    run(*run_medium, *run_nl, init, grid, p.t_end, {obs});

    // Last prefix of evaluable samples bounds the decidable window.
    double t_eval = 0.0;
    std::size_t last_eval = 0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (!samples[k].evaluable) break;
        t_eval = samples[k].t;
        last_eval = k;
    }
    e.t_evaluable = t_eval;

    // tau = earliest time whose suffix (within the evaluable window) is all
    // true; require at least 3 suffix samples so "holds thereafter" has bite.
    std::size_t run_start = last_eval + 1;
    for (std::size_t k = last_eval + 1; k-- > 0;) {
        if (samples[k].t < p.t_min) break;
        if (samples[k].both) run_start = k;
        else break;
    }
    if (run_start + 2 <= last_eval) {
        e.tau = samples[run_start].t;
        e.found = true;
    }
    e.inconclusive = !e.found && t_eval < p.t_end - 0.5 * p.record_dt;
    e.ok = true;
    return e;
}

}  // namespace

SpreadingReport uniform_spreading_check(const PeriodicMedium& medium, const Nonlinearity& nl,
                                        const std::vector<Direction>& dirs,
                                        const std::vector<double>& c_refs,
                                        const SpreadingParams& params) {
    if (dirs.empty() || dirs.size() != c_refs.size())
        throw config_error("uniform_spreading_check: directions and reference speeds mismatch");
    if (!(params.alpha > 0.0) || !(params.delta > 0.0) || params.delta >= 0.5)
        throw config_error("uniform_spreading_check: need alpha > 0 and delta in (0, 0.5)");
    for (std::size_t k = 0; k < dirs.size(); ++k)
        if (!(c_refs[k] > params.alpha))
            throw config_error("uniform_spreading_check: reference speed must exceed alpha");

    SpreadingReport rep;
    rep.alpha = params.alpha;
    rep.delta = params.delta;
    rep.ratio_gate = params.ratio_gate;
    rep.entries.resize(dirs.size());

    parallel_for(dirs.size(), params.threads, [&](std::size_t k) {
        try {
            rep.entries[k] = spreading_one(medium, nl, dirs[k], c_refs[k], params);
        } catch (const std::exception& ex) {
            rep.entries[k].n = dirs[k];
            rep.entries[k].c_ref = c_refs[k];
            rep.entries[k].tau = std::numeric_limits<double>::infinity();
            rep.entries[k].ok = false;
            rep.entries[k].error = ex.what();
        }
    });

    rep.max_tau = 0.0;
    rep.min_tau = std::numeric_limits<double>::infinity();
    rep.all_finite = true;
    for (const auto& e : rep.entries) {
        rep.any_inconclusive = rep.any_inconclusive || e.inconclusive;
        if (!e.ok || !e.found) {
            rep.all_finite = false;
            continue;
        }
        rep.max_tau = std::max(rep.max_tau, e.tau);
        rep.min_tau = std::min(rep.min_tau, e.tau);
    }
    rep.ratio = rep.all_finite && rep.min_tau > 0.0 ? rep.max_tau / rep.min_tau
                                                    : std::numeric_limits<double>::infinity();
    rep.pass = rep.all_finite && !rep.any_inconclusive && rep.ratio <= rep.ratio_gate;
    return rep;
}

OrderingReport twin_ordering_run(const PeriodicMedium& medium, const Nonlinearity& nl_low,
                                 const Nonlinearity& nl_high, const InitialData& init,
                                 const GridSpec& grid, double t_end) {
    if (!(t_end > 0.0)) throw config_error("twin_ordering_run: t_end must be positive");
    Stepper low(medium, nl_low, grid);
    Stepper high(medium, nl_high, grid);
    double dt = std::min(low.dt_run(), high.dt_run());
    auto nsteps = long(std::ceil(t_end / dt - 1e-12));
    dt = t_end / double(nsteps);

    SimState a, b;
    a.grid = b.grid = grid;
    a.u = build_initial(init, grid);
    b.u = a.u;

    OrderingReport rep;
    rep.min_diff = std::numeric_limits<double>::infinity();
    auto scan = [&](double t) {
        for (std::size_t m = 0; m < a.u.size(); ++m) {
            double d = b.u[m] - a.u[m];
            if (d < rep.min_diff) {
                rep.min_diff = d;
                rep.t_argmin = t;
            }
        }
    };
    scan(0.0);
    for (long k = 0; k < nsteps; ++k) {
        low.step(a, dt);
        high.step(b, dt);
        scan(a.t);
    }
    return rep;
}

OrderingReport ignition_lower_bound_check(const PeriodicMedium& medium,
                                          const Nonlinearity& base_nl, double eps,
                                          const Direction& n, const LowerBoundParams& params) {
    if (!base_nl.is_monostable())
        throw config_error("ignition_lower_bound_check: base must be monostable");
    Nonlinearity low = eps > 0.0 ? make_ignition_approx(base_nl, eps) : base_nl;

    double c_up = 2.0 * std::sqrt(medium.a2() * std::max(base_nl.linzero.max(), 0.25)) +
                  std::hypot(medium.q.max_abs(0), medium.q.max_abs(1)) + 0.5;
    double top = 0.0;
    GridSpec grid = planar_box(medium, n, params.h, c_up * params.t_end + 10.0, 11.0, &top);
    InitialData init = InitialData::planar(n, 0.0, 5.0, 0.9, 0.0);
    return twin_ordering_run(medium, low, base_nl, init, grid, params.t_end);
}

}  // namespace pfront
