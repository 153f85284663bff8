#include "pfront/eigenprob.hpp"

#include <algorithm>
#include <cmath>

#include "pfront/util.hpp"

namespace pfront {

CellOperator::CellOperator(const PeriodicMedium& medium, const EigenOperatorSpec& spec) {
    const PeriodicCell& cell = medium.cell;
    dim_ = cell.dim;
    nx_ = spec.resolution[0];
    ny_ = dim_ > 1 ? spec.resolution[1] : 1;
    // Coarser grids cannot resolve the cell operator; classified as a
    // numerical failure (the config shape is fine, the discretization isn't).
    if (nx_ < 16 || (dim_ > 1 && ny_ < 16))
        throw numeric_error("eigen solver: resolution " + std::to_string(nx_) +
                            " per axis is below the minimum 16; the discrete cell operator "
                            "cannot converge to the principal eigenpair at this resolution");
    hx_ = cell.length(0) / double(nx_);
    hy_ = dim_ > 1 ? cell.length(1) / double(ny_) : 1.0;
    const double lam = spec.lambda;
    if (lam < 0.0) throw config_error("eigen operator: lambda must be >= 0");

    const std::size_t n = nx_ * ny_;
    af1_.resize(n);
    af2_.resize(dim_ > 1 ? n : 0);
    a12_.resize(dim_ > 1 ? n : 0);
    c0_.resize(n);
    w1_.resize(n);
    w2_.resize(dim_ > 1 ? n : 0);
    ip_.resize(nx_), im_.resize(nx_);
    for (std::size_t i = 0; i < nx_; ++i) {
        ip_[i] = (i + 1) % nx_;
        im_[i] = (i + nx_ - 1) % nx_;
    }
    jp_.resize(ny_), jm_.resize(ny_);
    for (std::size_t j = 0; j < ny_; ++j) {
        jp_[j] = (j + 1) % ny_;
        jm_[j] = (j + ny_ - 1) % ny_;
    }

    // Node samples first; faces are arithmetic means of adjacent nodes.
    std::vector<double> a11n(n), a22n(dim_ > 1 ? n : 0);
    for (std::size_t j = 0; j < ny_; ++j) {
        for (std::size_t i = 0; i < nx_; ++i) {
            std::size_t m = j * nx_ + i;
            Point x{double(i) * hx_, dim_ > 1 ? double(j) * hy_ : 0.0};
            TensorValue A = evaluate_periodic(medium.A, x);
            auto dc = evaluate_divcol(medium.A, x);
            auto qv = evaluate_periodic(medium.q, x);
            a11n[m] = A[0];
            double nAn, div_An, q_n;
            std::array<double, 2> An;
            if (dim_ > 1) {
                a12_[m] = A[1];
                a22n[m] = A[2];
                An = {A[0] * spec.n[0] + A[1] * spec.n[1], A[1] * spec.n[0] + A[2] * spec.n[1]};
                nAn = spec.n[0] * An[0] + spec.n[1] * An[1];
                div_An = dc[0] * spec.n[0] + dc[1] * spec.n[1];
                q_n = qv[0] * spec.n[0] + qv[1] * spec.n[1];
            } else {
                An = {A[0] * spec.n[0], 0.0};
                nAn = spec.n[0] * An[0];
                div_An = dc[0] * spec.n[0];
                q_n = qv[0] * spec.n[0];
            }
            double Vx = spec.V ? evaluate_periodic(*spec.V, x) : 0.0;
            c0_[m] = lam * lam * nAn - lam * div_An - lam * q_n - lam * spec.drift_shift + Vx;
            w1_[m] = qv[0] - 2.0 * lam * An[0];
            if (dim_ > 1) w2_[m] = qv[1] - 2.0 * lam * An[1];
        }
    }
    for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t i = 0; i < nx_; ++i) {
            std::size_t m = j * nx_ + i;
            af1_[m] = 0.5 * (a11n[m] + a11n[j * nx_ + ip_[i]]);
            if (dim_ > 1) af2_[m] = 0.5 * (a22n[m] + a22n[jp_[j] * nx_ + i]);
        }

    double c0max = 0.0, wmax1 = 0.0, wmax2 = 0.0, a12max = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        c0max = std::max(c0max, std::fabs(c0_[m]));
        wmax1 = std::max(wmax1, std::fabs(w1_[m]));
        if (dim_ > 1) {
            wmax2 = std::max(wmax2, std::fabs(w2_[m]));
            a12max = std::max(a12max, std::fabs(a12_[m]));
        }
    }
    double diff = 2.0 * medium.a2() * (1.0 / (hx_ * hx_) + (dim_ > 1 ? 1.0 / (hy_ * hy_) : 0.0));
    double mixed = dim_ > 1 ? 2.0 * a12max / (hx_ * hy_) : 0.0;
    norm_ = 2.0 * (diff + mixed) + wmax1 / hx_ + (dim_ > 1 ? wmax2 / hy_ : 0.0) + c0max;
    // Propagator step: the diffusion bound, shrunk further when the
    // zeroth-order term competes (large lambda on coarse grids).
    double hmin = dim_ > 1 ? std::min(hx_, hy_) : hx_;
    tau_ = 0.2 * hmin * hmin / (medium.a2() * double(dim_));
    if (c0max > 0.0) tau_ = std::min(tau_, 0.45 / c0max);
}

void CellOperator::apply(const std::vector<double>& in, std::vector<double>& out) const {
    out.resize(in.size());
    const double ihx2 = 1.0 / (hx_ * hx_);
    const double ihx = 1.0 / (2.0 * hx_);
    if (dim_ == 1) {
        for (std::size_t i = 0; i < nx_; ++i) {
            double lap = (af1_[i] * (in[ip_[i]] - in[i]) - af1_[im_[i]] * (in[i] - in[im_[i]])) * ihx2;
            double d1 = (in[ip_[i]] - in[im_[i]]) * ihx;
            out[i] = lap + w1_[i] * d1 + c0_[i] * in[i];
        }
        return;
    }
    const double ihy2 = 1.0 / (hy_ * hy_);
    const double ihy = 1.0 / (2.0 * hy_);
    for (std::size_t j = 0; j < ny_; ++j) {
        const std::size_t r = j * nx_, rp = jp_[j] * nx_, rm = jm_[j] * nx_;
        for (std::size_t i = 0; i < nx_; ++i) {
            const std::size_t m = r + i, e = r + ip_[i], w = r + im_[i];
            const std::size_t nn = rp + i, s = rm + i;
            double lap = (af1_[m] * (in[e] - in[m]) - af1_[w] * (in[m] - in[w])) * ihx2 +
                         (af2_[m] * (in[nn] - in[m]) - af2_[s] * (in[m] - in[s])) * ihy2;
            // mixed fluxes d1(a12 d2 u) + d2(a12 d1 u), centered composites
            double d2_e = (in[rp + ip_[i]] - in[rm + ip_[i]]) * ihy;
            double d2_w = (in[rp + im_[i]] - in[rm + im_[i]]) * ihy;
            double d1_n = (in[rp + ip_[i]] - in[rp + im_[i]]) * ihx;
            double d1_s = (in[rm + ip_[i]] - in[rm + im_[i]]) * ihx;
            lap += (a12_[e] * d2_e - a12_[w] * d2_w) * ihx + (a12_[nn] * d1_n - a12_[s] * d1_s) * ihy;
            double d1 = (in[e] - in[w]) * ihx;
            double d2 = (in[nn] - in[s]) * ihy;
            out[m] = lap + w1_[m] * d1 + w2_[m] * d2 + c0_[m] * in[m];
        }
    }
}

EigenResult principal_eigenpair(const PeriodicMedium& medium, const EigenOperatorSpec& spec,
                                long max_iters) {
    CellOperator op(medium, spec);
    const std::size_t n = op.size();
    std::vector<double> v(n, 1.0), Lv(n);
    const double tau = op.tau_stable();
    const double res_tol = 1e-8 * std::max(1.0, op.norm_estimate());

    double mu_prev = 0.0;
    long it = 0;
    const int inner = 16;
    while (it < max_iters) {
        // Rayleigh quotient and residual on the current iterate.
        op.apply(v, Lv);
        ++it;
        double num = 0.0, den = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            num += v[m] * Lv[m];
            den += v[m] * v[m];
        }
        double mu = num / den;
        double rinf = 0.0, vinf = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            rinf = std::max(rinf, std::fabs(Lv[m] - mu * v[m]));
            vinf = std::max(vinf, std::fabs(v[m]));
        }
        rinf /= vinf;
        bool settled = it > 1 && std::fabs(mu - mu_prev) <= 1e-12 * std::max(1.0, std::fabs(mu));
        if (rinf <= res_tol && settled) {
            EigenResult res;
            res.mu0 = -mu;
            res.resolution = op.resolution();
            res.iterations = it;
            res.residual = rinf;
            res.phi = std::move(v);
            double sup = *std::max_element(res.phi.begin(), res.phi.end());
            if (!(sup > 0.0)) throw numeric_error("principal_eigenpair: eigenfunction lost positivity");
            for (double& p : res.phi) p /= sup;
            for (double p : res.phi)
                if (!(p > 0.0))
                    throw numeric_error("principal_eigenpair: eigenfunction not strictly positive");
            return res;
        }
        mu_prev = mu;
        // Propagator sweep (I + tau L)^inner with sup renormalization.
        for (int k = 0; k < inner && it < max_iters; ++k) {
            if (k > 0) {
                op.apply(v, Lv);
                ++it;
            }
            double sup = 0.0;
            for (std::size_t m = 0; m < n; ++m) {
                v[m] += tau * Lv[m];
                sup = std::max(sup, std::fabs(v[m]));
            }
            if (!(sup > 0.0) || !std::isfinite(sup))
                throw numeric_error("principal_eigenpair: iterate degenerated");
            for (std::size_t m = 0; m < n; ++m) v[m] /= sup;
        }
    }
    throw numeric_error("principal_eigenpair: no convergence within max_iters (last rel residual above tolerance)");
}

LinearSpeed linear_speed(const PeriodicMedium& medium, const Nonlinearity& nl, const Direction& n,
                         std::array<std::size_t, 2> resolution, double lambda_lo, double lambda_hi) {
    EigenOperatorSpec spec;
    spec.n = n;
    spec.V = &nl.linzero;
    spec.resolution = resolution;

    spec.lambda = 0.0;
    EigenResult at0 = principal_eigenpair(medium, spec);
    if (!(at0.mu0 < 0.0))
        throw numeric_error("linear_speed: zero state not linearly unstable (mu0(n,0) >= 0)");

    auto g = [&](double lam) {
        EigenOperatorSpec s = spec;
        s.lambda = lam;
        return -principal_eigenpair(medium, s).mu0 / lam;
    };

    double lo = std::max(lambda_lo, 1e-3), hi = lambda_hi;
    for (;;) {
        auto [lmin, gmin] = golden_min(g, lo, hi, 1e-4);
        if (hi - lmin > 1e-2 * (hi - lo) || hi >= 1e3) {
            EigenOperatorSpec s = spec;
            s.lambda = lmin;
            EigenResult at_min = principal_eigenpair(medium, s);
            return {gmin, lmin, at_min.mu0, at_min.residual};
        }
        // Minimum pinned at the top of the bracket: expand.
        hi *= 2.0;
        if (hi > 1e3) hi = 1e3;
    }
}

Lambda0Result find_lambda0(const PeriodicMedium& medium, double kappa,
                           std::array<std::size_t, 2> resolution, int n_dirs) {
    if (!(kappa > 0.0)) throw config_error("find_lambda0: kappa must be positive");
    std::vector<Direction> dirs;
    if (medium.cell.dim == 1) {
        dirs.push_back(Direction::axis(1, 0, +1.0));
        dirs.push_back(Direction::axis(1, 0, -1.0));
    } else {
        for (int k = 0; k < n_dirs; ++k)
            dirs.push_back(Direction::from_angle(2.0 * M_PI * double(k) / double(n_dirs)));
    }
    // Descending geometric scan: the first grid point where the shifted
    // eigenvalue is positive uniformly in n.
    for (int k = 0; k <= 20; ++k) {
        double lam = std::ldexp(1.0, -k);  // 2^-k
        double minmu = std::numeric_limits<double>::infinity();
        for (const auto& d : dirs) {
            EigenOperatorSpec spec;
            spec.n = d;
            spec.lambda = lam;
            spec.drift_shift = kappa;
            spec.resolution = resolution;
            minmu = std::min(minmu, principal_eigenpair(medium, spec).mu0);
        }
        if (minmu > 0.0) return {lam, minmu};
    }
    throw numeric_error("find_lambda0: no positive-eigenvalue lambda down to 2^-20 (kappa too large for this medium)");
}

}  // namespace pfront
