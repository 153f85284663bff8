#include "pfront/fronts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "pfront/util.hpp"

namespace pfront {

namespace {

// Quiet-NaN marker for "level set empty".
constexpr double kNoFront = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double front_position(const SimState& state, const Direction& n, double level) {
    const GridSpec& g = state.grid;
    if (n.dim != g.dim) throw config_error("front_position: direction/grid dimension mismatch");
    // Refine along the axis most aligned with n; crossings on that axis bound
    // the sub-grid error by h*|n_d| <= h.
    int ds = (g.dim > 1 && std::abs(n[1]) > std::abs(n[0])) ? 1 : 0;
    double sgn = n[ds] >= 0.0 ? 1.0 : -1.0;
    double h = g.dx(ds);
    std::size_t nx = g.nodes[0], ny = g.dim > 1 ? g.nodes[1] : 1;
    double best = kNoFront;
    bool any = false;
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            std::size_t m = g.idx(i, j);
            double um = state.u[m];
            if (!(um >= level)) continue;
            any = true;
            Point x = {g.coord(0, i), g.dim > 1 ? g.coord(1, j) : 0.0};
            double pos = n.dot(x);
            // Neighbor one node toward increasing x.n along the scan axis.
            std::size_t cnt = ds == 0 ? nx : ny;
            std::size_t k = ds == 0 ? i : j;
            bool fwd_ok = true;
            std::size_t kf = k;
            if (sgn > 0.0) {
                if (k + 1 < cnt) kf = k + 1;
                else if (g.bc[std::size_t(ds)] == Bc::periodic) kf = 0, fwd_ok = false;
                else fwd_ok = false;
            } else {
                if (k > 0) kf = k - 1;
                else if (g.bc[std::size_t(ds)] == Bc::periodic) kf = cnt - 1, fwd_ok = false;
                else fwd_ok = false;
            }
            if (fwd_ok) {
                std::size_t mf = ds == 0 ? g.idx(kf, j) : g.idx(i, kf);
                double uf = state.u[mf];
                if (uf < level) {
                    double frac = (um - level) / (um - uf);
                    pos += frac * h * std::abs(n[ds]);
                }
            }
            if (std::isnan(best) || pos > best) best = pos;
        }
    }
    return any ? best : kNoFront;
}

FrontTrace fit_front_trace(const Direction& n, double level, std::vector<double> times,
                           std::vector<double> positions, double transient_cut, bool log_basis) {
    if (times.size() != positions.size() || times.empty())
        throw config_error("fit_front_trace: empty or mismatched series");
    FrontTrace tr;
    tr.n = n;
    tr.level = level;
    tr.transient_cut = transient_cut;
    tr.fit_basis = log_basis ? "t,log(t),1" : "t,1";
    tr.times = std::move(times);
    tr.positions = std::move(positions);

    double T = tr.times.back();
    double t0 = transient_cut * T;
    std::vector<double> ts, ys;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        double t = tr.times[k], p = tr.positions[k];
        if (t < t0 || !std::isfinite(p)) continue;
        if (log_basis && t <= 1e-9) continue;
        ts.push_back(t);
        ys.push_back(p);
    }
    if (ts.size() < 4) {
        std::ostringstream os;
        os << "front fit window has " << ts.size() << " usable samples (need >= 4); "
           << "the level set may never have crossed the grid";
        throw numeric_error(os.str());
    }
    std::size_t ncols = log_basis ? 3 : 2;
    std::vector<double> basis(ts.size() * ncols);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        basis[k * ncols + 0] = ts[k];
        if (log_basis) basis[k * ncols + 1] = std::log(ts[k]);
        basis[k * ncols + ncols - 1] = 1.0;
    }
    double rms = 0.0;
    std::vector<double> coef = lstsq(basis, ncols, ys, &rms);
    tr.speed = coef[0];
    tr.log_coef = log_basis ? coef[1] : 0.0;
    tr.intercept = coef[ncols - 1];
    tr.rms_residual = rms;
    double window = std::max(ts.back() - ts.front(), 1e-12);
    tr.uncertainty = rms / window;
    return tr;
}

FrontTrace track_front(const std::vector<SimState>& states, const Direction& n, double level,
                       double transient_cut) {
    std::vector<double> ts, ps;
    ts.reserve(states.size());
    ps.reserve(states.size());
    for (const auto& s : states) {
        ts.push_back(s.t);
        ps.push_back(front_position(s, n, level));
    }
    return fit_front_trace(n, level, std::move(ts), std::move(ps), transient_cut, false);
}

namespace {

bool nearly_constant(const std::vector<double>& v) {
    if (v.empty()) return true;
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo <= 1e-13 * (1.0 + std::abs(*hi));
}

bool constant_tensor(const TensorField& A) {
    return nearly_constant(A.a11) && nearly_constant(A.a12) && nearly_constant(A.a22);
}

bool constant_vector(const VectorField& q) {
    return nearly_constant(q.comp[0]) && nearly_constant(q.comp[1]);
}

/// True when f(x, u) has no genuine x-dependence. The linearization field
/// alone is not enough: ignition approximations have linzero identically
/// zero regardless of their base rate, so look through to the base.
bool reaction_constant(const Nonlinearity& nl) {
    switch (nl.kind) {
        case NlKind::ignition: return true;
        case NlKind::ignition_approx: return reaction_constant(*nl.base);
        default: return nearly_constant(nl.linzero.values);
    }
}

/// Rebuild a nonlinearity on another cell; valid only when its reaction has
/// no genuine x-dependence (constant linearization field).
Nonlinearity rebind_cell(const Nonlinearity& nl, const PeriodicCell& cell) {
    switch (nl.kind) {
        case NlKind::kpp_monostable:
            return make_kpp(scalar_constant(cell, {2, 2}, nl.linzero.values.front()));
        case NlKind::general_monostable:
            return make_general_monostable(scalar_constant(cell, {2, 2}, nl.linzero.values.front()),
                                           nl.push);
        case NlKind::ignition:
            return make_ignition(cell, nl.theta);
        case NlKind::ignition_approx:
            return make_ignition_approx(rebind_cell(*nl.base, cell), nl.eps);
    }
    throw config_error("rebind_cell: unknown nonlinearity kind");
}

double behind_value(const Nonlinearity& nl) {
    switch (nl.kind) {
        case NlKind::ignition: return 0.5 * (1.0 + nl.theta);
        case NlKind::ignition_approx: return 0.5 * nl.top();
        default: return 0.9;
    }
}

/// Crude upper bound on the propagation speed used only to size domains.
double speed_bound(const PeriodicMedium& medium, const Nonlinearity& nl) {
    double r_up = std::max(nl.linzero.max(), nl.lipschitz_M);
    r_up = std::max(r_up, 0.25);
    double qmax = std::hypot(medium.q.max_abs(0), medium.q.max_abs(1));
    return 2.0 * std::sqrt(medium.a2() * r_up) + qmax + 0.5;
}

struct TraceCollector {
    Direction n;
    double level;
    std::vector<double> times, positions;
    Observer observer(double cadence) {
        return Observer{cadence, [this](const SimState& s) {
                            times.push_back(s.t);
                            positions.push_back(front_position(s, n, level));
                        }};
    }
};

}  // namespace

bool planar_reduction(const PeriodicMedium& medium, const Nonlinearity& nl, const Direction& n,
                      double h, PlanarReduction& out) {
    if (medium.cell.dim != 2 || !constant_tensor(medium.A) || !constant_vector(medium.q) ||
        !reaction_constant(nl))
        return false;
    TensorValue Av = medium.A.at(0);
    double nAn = Av[0] * n[0] * n[0] + 2.0 * Av[1] * n[0] * n[1] + Av[2] * n[1] * n[1];
    double qn = medium.q.comp[0].front() * n[0] + medium.q.comp[1].front() * n[1];
    PeriodicCell cell1(1, {32.0 * h, 1.0});
    TensorField A1 = tensor_constant(cell1, {2, 1}, nAn);
    A1.a1 = nAn;
    A1.a2 = nAn;
    VectorField q1 = std::abs(qn) > 0.0 ? flow_constant(cell1, {2, 1}, {qn, 0.0}, true)
                                        : flow_zero(cell1, {2, 1});
    out.medium = PeriodicMedium{cell1, A1, q1};
    out.nl = rebind_cell(nl, cell1);
    return true;
}

MeasuredSpeed measure_speed(const PeriodicMedium& medium, const Nonlinearity& nl,
                            const Direction& n, const SpeedRunConfig& cfg) {
    if (n.dim != medium.cell.dim) throw config_error("measure_speed: direction dimension mismatch");
    if (!(cfg.h > 0.0) || !(cfg.t_end > 0.0))
        throw config_error("measure_speed: h and t_end must be positive");
    bool log_fit = nl.is_monostable();
    double floor = nl.kind == NlKind::ignition_approx ? nl.bottom() : 0.0;
    double mu = behind_value(nl);
    const double C = 0.0, K = 5.0;

    PlanarReduction red;
    bool reducible = planar_reduction(medium, nl, n, cfg.h, red);

    PeriodicMedium run_medium = medium;
    Nonlinearity run_nl = nl;
    Direction run_n = n;
    if (reducible) {
        run_medium = red.medium;
        run_nl = red.nl;
        run_n = Direction::axis(1, 0, 1.0);
    }

    double c_up = speed_bound(run_medium, run_nl);
    double s_lo = -(K + 6.0), s_hi = C + c_up * cfg.t_end + 10.0;

    GridSpec grid;
    MeasuredSpeed out;
    out.reduced = reducible;
    double domain_top = 0.0;  // largest x.n over the domain

    if (run_medium.cell.dim == 1) {
        // 1D run (native 1D problem or the reduction above); orient the
        // domain so the front travels toward +n.
        // Align the lower corner with the periodicity cell so phase indexing
        // in downstream profile extraction is exact.
        double L = run_medium.cell.length(0);
        double x_lo = run_n[0] > 0.0 ? s_lo : -s_hi;
        double x_hi = run_n[0] > 0.0 ? s_hi : -s_lo;
        x_lo = -std::ceil(-x_lo / L) * L;
        std::size_t nnode = std::size_t(std::ceil((x_hi - x_lo) / cfg.h)) + 2;
        if (nnode > cfg.max_nodes_1d)
            throw config_error("measure_speed: 1D grid exceeds max_nodes_1d; increase h");
        grid = GridSpec(1, {x_lo, 0.0}, {double(nnode - 1) * cfg.h, 1.0}, {nnode, 1},
                        {Bc::noflux, Bc::periodic});
        domain_top = run_n[0] > 0.0 ? grid.coord(0, nnode - 1) : -x_lo;
    } else {
        // Full 2D rectangle with no-flux sides. Sized so the slab swept by
        // the front stays away from the boundary over the horizon.
        double reach = s_hi + K + 8.0;
        std::array<double, 2> lo{}, ext{};
        std::array<std::size_t, 2> nn{};
        for (int d = 0; d < 2; ++d) {
            double Ld = run_medium.cell.length(d);
            double down = std::min(0.0, run_n[d] * reach) - (K + 8.0);
            double up = std::max(0.0, run_n[d] * reach) + K + 8.0;
            lo[std::size_t(d)] = -std::ceil(-down / Ld) * Ld;
            double span_d = up - lo[std::size_t(d)];
            std::size_t nd = std::size_t(std::ceil(span_d / cfg.h)) + 2;
            nn[std::size_t(d)] = nd;
            ext[std::size_t(d)] = double(nd - 1) * cfg.h;
        }
        grid = GridSpec(2, lo, ext, nn, {Bc::noflux, Bc::noflux});
        domain_top = std::max(run_n[0] * lo[0], run_n[0] * (lo[0] + ext[0])) +
                     std::max(run_n[1] * lo[1], run_n[1] * (lo[1] + ext[1]));
    }

    InitialData init = InitialData::planar(run_n, C, K, mu, floor);
    TraceCollector coll{run_n, cfg.level, {}, {}};
    std::vector<Observer> obs{coll.observer(cfg.record_dt)};
    if (cfg.snapshot_dt > 0.0)
        obs.push_back(Observer{cfg.snapshot_dt, [&out](const SimState& s) {
                                   out.snapshots.push_back({s.t, s.u});
                               }});
    run(run_medium, run_nl, init, grid, cfg.t_end, obs);
    out.grid = grid;
    out.run_cell = run_medium.cell;

    out.trace = fit_front_trace(run_n, cfg.level, std::move(coll.times), std::move(coll.positions),
                                cfg.transient_cut, log_fit);
    out.c = out.trace.speed;
    double final_pos = out.trace.positions.back();
    out.boundary_margin = std::isfinite(final_pos)
                              ? domain_top - final_pos
                              : std::numeric_limits<double>::infinity();
    if (out.boundary_margin < 2.0)
        throw numeric_error("measure_speed: front reached the domain boundary before t_end");
    return out;
}

WaveProfile extract_profile(const std::vector<Snapshot>& snaps, const GridSpec& grid,
                            const Direction& n, double c, const PeriodicCell& cell,
                            double transient_cut) {
    if (grid.dim != 1 || n.dim != 1)
        throw config_error("extract_profile: implemented for 1D grids and axis directions");
    if (!(c > 0.0)) throw numeric_error("extract_profile: needs a positive propagation speed");
    if (snaps.size() < 3) throw config_error("extract_profile: need at least 3 snapshots");
    for (std::size_t k = 1; k < snaps.size(); ++k)
        if (!(snaps[k].t > snaps[k - 1].t))
            throw config_error("extract_profile: snapshot times must increase");
    if (!grid.resolves_cell(cell))
        throw config_error("extract_profile: grid spacing does not divide the cell length");

    double h = grid.dx(0);
    double L = cell.length(0);
    auto phases = std::size_t(std::llround(L / h));
    double T = snaps.back().t;
    double t0 = transient_cut * T;

    WaveProfile prof;
    prof.n = n;
    prof.c = c;
    prof.phases = phases;

    // z range over the used window.
    double x_a = grid.coord(0, 0), x_b = grid.coord(0, grid.nodes[0] - 1);
    double s_a = n[0] * x_a, s_b = n[0] * x_b;
    double z_min = std::min(s_a, s_b) - c * T;
    double z_max = std::max(s_a, s_b) - c * t0;
    double bw = 0.5 * h;
    auto nbins = std::size_t(std::floor((z_max - z_min) / bw)) + 2;

    std::vector<double> sum(nbins, 0.0);
    std::vector<std::size_t> cnt(nbins, 0);
    std::vector<std::vector<double>> psum(phases, std::vector<double>(nbins, 0.0));
    std::vector<std::vector<std::size_t>> pcnt(phases, std::vector<std::size_t>(nbins, 0));

    std::size_t used = 0;
    for (const auto& s : snaps) {
        if (s.t < t0) continue;
        ++used;
        for (std::size_t i = 0; i < grid.nodes[0]; ++i) {
            double x = grid.coord(0, i);
            double z = n[0] * x - c * s.t;
            auto b = std::size_t(std::floor((z - z_min) / bw));
            if (b >= nbins) continue;
            double ph = wrap_coord(x, L) / h;
            auto p = std::size_t(std::llround(ph)) % phases;
            if (std::abs(ph - std::llround(ph)) > 1e-6) p = phases;  // off-lattice, z-bin only
            sum[b] += s.u[i];
            cnt[b] += 1;
            if (p < phases) {
                psum[p][b] += s.u[i];
                pcnt[p][b] += 1;
            }
        }
    }
    if (used < 2) throw numeric_error("extract_profile: post-transient window has < 2 snapshots");

    for (std::size_t b = 0; b < nbins; ++b) {
        if (cnt[b] == 0) continue;
        prof.z.push_back(z_min + (double(b) + 0.5) * bw);
        prof.U.push_back(sum[b] / double(cnt[b]));
    }
    prof.U_phase.assign(phases, {});
    double viol = 0.0;
    for (std::size_t p = 0; p < phases; ++p) {
        double prev = std::numeric_limits<double>::quiet_NaN();
        std::vector<double>& row = prof.U_phase[p];
        for (std::size_t b = 0; b < nbins; ++b) {
            if (pcnt[p][b] == 0) continue;
            double v = psum[p][b] / double(pcnt[p][b]);
            row.push_back(v);
            if (std::isfinite(prev)) viol = std::max(viol, v - prev);
            prev = v;
        }
    }
    prof.monotone_violation = viol;

    // Pulsating relation: u(t + L/c, x + sgn(n) L) agrees with u(t, x).
    double tau = L / c;
    long shift = std::llround(L / h) * (n[0] > 0.0 ? 1 : -1);
    double worst = 0.0;
    std::size_t pairs = 0;
    for (const auto& s : snaps) {
        if (s.t < t0) continue;
        double target = s.t + tau;
        if (target > T + 1e-12) break;
        std::size_t k = 0;
        while (k + 1 < snaps.size() && snaps[k + 1].t < target) ++k;
        if (k + 1 >= snaps.size()) break;
        double t_a = snaps[k].t, t_b = snaps[k + 1].t;
        double w = (target - t_a) / (t_b - t_a);
        for (std::size_t i = 0; i < grid.nodes[0]; ++i) {
            long j = long(i) + shift;
            if (j < 0 || j >= long(grid.nodes[0])) continue;
            double u_tau = (1.0 - w) * snaps[k].u[std::size_t(j)] + w * snaps[k + 1].u[std::size_t(j)];
            worst = std::max(worst, std::abs(u_tau - s.u[i]));
            ++pairs;
        }
    }
    if (pairs == 0)
        throw numeric_error("extract_profile: window too short to test the pulsating relation");
    prof.r_puls = worst;
    return prof;
}

double decay_rate(const WaveProfile& profile) {
    std::vector<double> zs, ls;
    for (std::size_t k = 0; k < profile.z.size(); ++k) {
        double u = profile.U[k];
        if (u > 1e-12 && u < 0.1) {
            zs.push_back(profile.z[k]);
            ls.push_back(std::log(u));
        }
    }
    if (zs.size() < 4) throw numeric_error("decay_rate: fewer than 4 tail samples in (1e-12, 0.1)");
    std::vector<double> basis(zs.size() * 2);
    for (std::size_t k = 0; k < zs.size(); ++k) {
        basis[k * 2] = zs[k];
        basis[k * 2 + 1] = 1.0;
    }
    std::vector<double> coef = lstsq(basis, 2, ls);
    return -coef[0];
}

}  // namespace pfront
