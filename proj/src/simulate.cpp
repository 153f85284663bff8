#include "pfront/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pfront/util.hpp"

namespace pfront {

InitialData InitialData::planar(const Direction& n, double C, double K, double mu,
                                double floor_ahead) {
    InitialData d;
    d.kind = Kind::planar;
    d.n = n;
    d.C = C;
    d.K = K;
    d.mu = mu;
    d.floor_ahead = floor_ahead;
    if (!(K > -C)) throw config_error("planar data: need -K < C");
    return d;
}

InitialData InitialData::ball(double R, double mu, Point center) {
    InitialData d;
    d.kind = Kind::ball;
    d.R = R;
    d.mu = mu;
    d.center = center;
    if (!(R > 0.0)) throw config_error("ball data: radius must be positive");
    return d;
}

InitialData InitialData::custom(std::vector<double> values) {
    InitialData d;
    d.kind = Kind::custom;
    d.values = std::move(values);
    return d;
}

std::vector<double> build_initial(const InitialData& init, const GridSpec& grid) {
    std::vector<double> u(grid.count());
    switch (init.kind) {
        case InitialData::Kind::planar: {
            double w = init.ramp_width > 0.0 ? init.ramp_width : (init.C + init.K);
            for (std::size_t m = 0; m < u.size(); ++m) {
                double s = init.n.dot(grid.point(m));
                double frac = std::clamp((init.C - s) / w, 0.0, 1.0);
                u[m] = init.floor_ahead + (init.mu - init.floor_ahead) * frac;
            }
            break;
        }
        case InitialData::Kind::ball:
            for (std::size_t m = 0; m < u.size(); ++m) {
                Point p = grid.point(m);
                double d2 = (p[0] - init.center[0]) * (p[0] - init.center[0]);
                if (grid.dim > 1) d2 += (p[1] - init.center[1]) * (p[1] - init.center[1]);
                u[m] = d2 <= init.R * init.R ? init.mu : 0.0;
            }
            break;
        case InitialData::Kind::custom:
            if (init.values.size() != grid.count())
                throw config_error("custom initial data size does not match grid");
            u = init.values;
            break;
    }
    return u;
}

Stepper::Stepper(const PeriodicMedium& medium, const Nonlinearity& nl, const GridSpec& grid)
    : grid_(grid), nl_(&nl) {
    dim_ = grid.dim;
    nx_ = grid.nodes[0];
    ny_ = dim_ > 1 ? grid.nodes[1] : 1;
    hx_ = grid.dx(0);
    hy_ = dim_ > 1 ? grid.dx(1) : 1.0;
    if (!grid.resolves_cell(medium.cell))
        throw config_error("simulation grid does not resolve the periodicity cell");
    double per0 = medium.cell.length(0) / hx_;
    if (per0 < 16.0 - 1e-9) throw config_error("grid must resolve the cell with >= 16 nodes per period");
    if (dim_ > 1 && medium.cell.dim > 1 && medium.cell.length(1) / hy_ < 16.0 - 1e-9)
        throw config_error("grid must resolve the cell with >= 16 nodes per period");

    const std::size_t n = nx_ * ny_;
    af1_.resize(n);
    q1_.resize(n);
    rloc_.resize(n);
    if (dim_ > 1) {
        af2_.resize(n);
        a12_.resize(n);
        q2_.resize(n);
    }
    std::vector<double> a11n(n), a22n(dim_ > 1 ? n : 0);
    for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t i = 0; i < nx_; ++i) {
            std::size_t m = j * nx_ + i;
            Point x = grid.point(m);
            TensorValue A = evaluate_periodic(medium.A, x);
            auto qv = evaluate_periodic(medium.q, x);
            a11n[m] = A[0];
            q1_[m] = qv[0];
            if (dim_ > 1) {
                a12_[m] = A[1];
                a22n[m] = A[2];
                q2_[m] = qv[1];
            }
            rloc_[m] = evaluate_periodic(nl.linzero, x);
        }
    // Face coefficients (arithmetic means); the wrapped face is used only on
    // periodic axes.
    for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t i = 0; i < nx_; ++i) {
            std::size_t m = j * nx_ + i;
            std::size_t ie = (i + 1 < nx_) ? i + 1 : 0;
            af1_[m] = 0.5 * (a11n[m] + a11n[j * nx_ + ie]);
            if (dim_ > 1) {
                std::size_t je = (j + 1 < ny_) ? j + 1 : 0;
                af2_[m] = 0.5 * (a22n[m] + a22n[je * nx_ + i]);
            }
        }

    dt_diff_ = 0.2 * std::min(hx_ * hx_, dim_ > 1 ? hy_ * hy_ : std::numeric_limits<double>::infinity()) /
               (medium.a2() * double(dim_));
    double qm1 = 0.0, qm2 = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        qm1 = std::max(qm1, std::fabs(q1_[m]));
        if (dim_ > 1) qm2 = std::max(qm2, std::fabs(q2_[m]));
    }
    double qmax = std::max(qm1, qm2);
    dt_adv_ = qmax > 0.0 ? 0.5 * std::min(hx_, dim_ > 1 ? hy_ : hx_) / qmax
                         : std::numeric_limits<double>::infinity();
    double l1 = qm1 / hx_ + (dim_ > 1 ? qm2 / hy_ : 0.0);
    dt_adv_l1_ = l1 > 0.0 ? 0.5 / l1 : std::numeric_limits<double>::infinity();

    guard_lo_ = nl.bottom() - 1e-9;
    guard_hi_ = nl.top() + nl.rho + 1e-9;
}

void Stepper::step(SimState& state, double dt) const {
    if (dt > dt_diff_ * (1.0 + 1e-12) || dt > dt_adv_ * (1.0 + 1e-12))
        throw config_error("step: dt violates the CFL preconditions");
    const std::vector<double>& u = state.u;
    if (u.size() != nx_ * ny_) throw config_error("step: state size does not match grid");
    scratch_.resize(u.size());
    std::vector<double>& un = scratch_;
    const double ihx = 1.0 / hx_;
    const double ihy = dim_ > 1 ? 1.0 / hy_ : 0.0;
    const bool perx = grid_.bc[0] == Bc::periodic;
    const bool pery = dim_ > 1 && grid_.bc[1] == Bc::periodic;
    double max_du = 0.0;

    auto kernel = [&](std::size_t i, std::size_t j) {
        const std::size_t m = j * nx_ + i;
        // neighbor indices with periodic wrap or mirror reflection
        std::size_t ie = i + 1 < nx_ ? i + 1 : (perx ? 0 : i - 1);
        std::size_t iw = i > 0 ? i - 1 : (perx ? nx_ - 1 : 1);
        const std::size_t me = j * nx_ + ie, mw = j * nx_ + iw;
        double div;
        {
            // flux form; zero flux through no-flux domain faces
            double fe = (perx || i + 1 < nx_) ? af1_[m] * (u[me] - u[m]) * ihx : 0.0;
            double fw = (perx || i > 0) ? af1_[mw] * (u[m] - u[mw]) * ihx : 0.0;
            div = (fe - fw) * ihx;
        }
        double adv;
        {
            double q = q1_[m];
            adv = q > 0.0 ? q * (u[me] - u[m]) * ihx : q * (u[m] - u[mw]) * ihx;
        }
        if (dim_ > 1) {
            std::size_t je = j + 1 < ny_ ? j + 1 : (pery ? 0 : j - 1);
            std::size_t js = j > 0 ? j - 1 : (pery ? ny_ - 1 : 1);
            const std::size_t mn = je * nx_ + i, ms = js * nx_ + i;
            double fn = (pery || j + 1 < ny_) ? af2_[m] * (u[mn] - u[m]) * ihy : 0.0;
            double fs = (pery || j > 0) ? af2_[ms] * (u[m] - u[ms]) * ihy : 0.0;
            div += (fn - fs) * ihy;
            if (a12_[m] != 0.0 || a12_[me] != 0.0 || a12_[mw] != 0.0) {
                // mixed term, centered composites with mirrored neighbors
                double d2e = (u[je * nx_ + ie] - u[js * nx_ + ie]) * 0.5 * ihy;
                double d2w = (u[je * nx_ + iw] - u[js * nx_ + iw]) * 0.5 * ihy;
                double d1n = (u[je * nx_ + ie] - u[je * nx_ + iw]) * 0.5 * ihx;
                double d1s = (u[js * nx_ + ie] - u[js * nx_ + iw]) * 0.5 * ihx;
                div += (a12_[me] * d2e - a12_[mw] * d2w) * 0.5 * ihx +
                       (a12_[mn] * d1n - a12_[ms] * d1s) * 0.5 * ihy;
            }
            double q = q2_[m];
            adv += q > 0.0 ? q * (u[mn] - u[m]) * ihy : q * (u[m] - u[ms]) * ihy;
        }
        double du = div + adv + nl_->eval_local(rloc_[m], u[m]);
        double v = u[m] + dt * du;
        if (!std::isfinite(v))
            throw numeric_error("step: NaN/Inf at step " + std::to_string(state.step_index));
        if (v < guard_lo_ || v > guard_hi_)
            throw numeric_error("step: range guard violated at step " + std::to_string(state.step_index) +
                                " (u=" + fmt_g17(v) + ")");
        un[m] = v;
        max_du = std::max(max_du, std::fabs(du));
    };

    for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t i = 0; i < nx_; ++i) kernel(i, j);

    state.u.swap(scratch_);
    state.t += dt;
    state.max_dudt = max_du;
    state.step_index += 1;
}

SimState step(const SimState& state, const PeriodicMedium& medium, const Nonlinearity& nl, double dt) {
    Stepper st(medium, nl, state.grid);
    SimState next = state;
    st.step(next, dt);
    next.cfl_margin = dt / std::min(st.dt_diffusion(), st.dt_advection());
    return next;
}

SimState run(const PeriodicMedium& medium, const Nonlinearity& nl, const InitialData& init,
             const GridSpec& grid, double t_end, const std::vector<Observer>& observers) {
    if (!(t_end > 0.0)) throw config_error("run: t_end must be positive");
    Stepper st(medium, nl, grid);
    SimState state;
    state.grid = grid;
    state.u = build_initial(init, grid);

    double dt = st.dt_run();
    long nsteps = std::max<long>(1, long(std::ceil(t_end / dt - 1e-12)));
    dt = t_end / double(nsteps);
    state.cfl_margin = dt / std::min(st.dt_diffusion(), st.dt_advection());

    std::vector<double> next_fire(observers.size(), 0.0);
    auto fire = [&](std::size_t k) {
        observers[k].fn(state);
        next_fire[k] += std::max(observers[k].cadence, dt);
    };
    for (std::size_t k = 0; k < observers.size(); ++k) fire(k);

    for (long s = 0; s < nsteps; ++s) {
        st.step(state, dt);
        for (std::size_t k = 0; k < observers.size(); ++k)
            if (state.t >= next_fire[k] - 0.5 * dt || s + 1 == nsteps) fire(k);
    }
    return state;
}

ComparisonReport comparison_run(const PeriodicMedium& medium, const Nonlinearity& nl,
                                const InitialData& init_low, const InitialData& init_high,
                                const GridSpec& grid, double t_end) {
    Stepper st(medium, nl, grid);
    SimState lo, hi;
    lo.grid = hi.grid = grid;
    lo.u = build_initial(init_low, grid);
    hi.u = build_initial(init_high, grid);
    for (std::size_t m = 0; m < lo.u.size(); ++m)
        if (lo.u[m] > hi.u[m] + 1e-15)
            throw config_error("comparison_run: initial data not ordered (low > high)");

    double dt = st.dt_run();
    long nsteps = std::max<long>(1, long(std::ceil(t_end / dt - 1e-12)));
    dt = t_end / double(nsteps);

    ComparisonReport rep;
    rep.min_diff = std::numeric_limits<double>::infinity();
    auto scan = [&](double t) {
        for (std::size_t m = 0; m < lo.u.size(); ++m) {
            double d = hi.u[m] - lo.u[m];
            if (d < rep.min_diff) {
                rep.min_diff = d;
                rep.t_argmin = t;
            }
        }
    };
    scan(0.0);
    for (long s = 0; s < nsteps; ++s) {
        st.step(lo, dt);
        st.step(hi, dt);
        scan(lo.t);
    }
    return rep;
}

}  // namespace pfront
