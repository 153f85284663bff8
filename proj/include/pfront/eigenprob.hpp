#pragma once

#include <array>
#include <vector>

#include "pfront/fields.hpp"
#include "pfront/nonlinearity.hpp"

namespace pfront {

/// Parameters of the periodic cell operator
///   L u = div(A grad u) + [lam^2 (n.An) - lam div(An) - lam (q.n)
///         - lam*drift_shift + V] u + [q - 2 lam An] . grad u,
/// covering both the potential-free drift-shifted family and the
/// linearization-at-zero family (V = d_u f(x,0), drift_shift = 0).
struct EigenOperatorSpec {
    Direction n;
    double lambda = 0.0;
    double drift_shift = 0.0;          // the "+kappa" drift term; 0 when V is used
    const ScalarField* V = nullptr;    // optional zeroth-order potential
    std::array<std::size_t, 2> resolution{32, 32};
};

/// Matrix-free discrete action of L on the periodic cell grid: flux-form
/// centered second order for div(A grad .), centered first-order terms.
class CellOperator {
  public:
    CellOperator(const PeriodicMedium& medium, const EigenOperatorSpec& spec);

    void apply(const std::vector<double>& in, std::vector<double>& out) const;
    std::size_t size() const { return nx_ * ny_; }
    std::array<std::size_t, 2> resolution() const { return {nx_, ny_}; }
    int dim() const { return dim_; }
    /// Explicit-Euler stability step for the propagator I + tau L.
    double tau_stable() const { return tau_; }
    /// Max row-sum estimate of |L|; scales residual tolerances.
    double norm_estimate() const { return norm_; }

  private:
    int dim_;
    std::size_t nx_, ny_;
    double hx_, hy_;
    double tau_, norm_;
    // Node-sampled coefficients on the eigen grid.
    std::vector<double> af1_, af2_;    // a11 at x-faces (i+1/2), a22 at y-faces (j+1/2)
    std::vector<double> a12_;          // node samples (2D only)
    std::vector<double> c0_;           // zeroth-order coefficient
    std::vector<double> w1_, w2_;      // first-order coefficient components
    std::vector<std::size_t> ip_, im_, jp_, jm_;  // periodic neighbor tables
};

struct EigenResult {
    double mu0 = 0.0;                  // principal eigenvalue of -L
    std::vector<double> phi;           // positive periodic eigenfunction, sup = 1
    std::array<std::size_t, 2> resolution{0, 0};
    double residual = 0.0;             // ||(-L - mu0) phi||_inf
    long iterations = 0;               // operator applications spent
};

/// Power iteration on the propagator (I + tau L)^m with Rayleigh-quotient
/// convergence; deterministic (all-ones start). Throws numeric_error on
/// non-convergence or lost positivity.
EigenResult principal_eigenpair(const PeriodicMedium& medium, const EigenOperatorSpec& spec,
                                long max_iters = 50000);

struct LinearSpeed {
    double c_lin = 0.0;
    double lambda_min = 0.0;
    double mu0_at_min = 0.0;
    double residual = 0.0;             // eigen residual at the minimizer
};

/// c_lin(n) = min_{lam>0} -mu0(n,lam)/lam for the linearization-at-zero
/// operator. Golden-section over the bracket (auto-expanding above, capped at
/// lam = 1e3); requires mu0(n,0) < 0 (zero state linearly unstable).
LinearSpeed linear_speed(const PeriodicMedium& medium, const Nonlinearity& nl, const Direction& n,
                         std::array<std::size_t, 2> resolution, double lambda_lo = 1e-3,
                         double lambda_hi = 20.0);

struct Lambda0Result {
    double lambda0 = 0.0;
    double min_mu = 0.0;               // min over the direction sample at lambda0
};

/// First lambda = 2^-k (k = 0,1,...,20) whose drift-shifted principal
/// eigenvalue is positive for every direction in a 32-point sample.
Lambda0Result find_lambda0(const PeriodicMedium& medium, double kappa,
                           std::array<std::size_t, 2> resolution, int n_dirs = 32);

}  // namespace pfront
