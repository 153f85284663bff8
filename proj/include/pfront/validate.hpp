#pragma once

#include <string>
#include <vector>

#include "pfront/fronts.hpp"
#include "pfront/simulate.hpp"

namespace pfront {

/// Comparison-principle certificate v = min{1, theta + C e^{-lambda(x.n - 2 a1 lambda t)}}
/// dominating ignition dynamics from above.
struct SupersolutionSpec {
    double theta = 0.0;
    double C = 1.0;
    double lambda = 1.0;
    double a1 = 1.0;
    double M = 0.0;  // sup f(x,u)/|u - theta|
    Direction n;
    const PeriodicMedium* medium = nullptr;
    const Nonlinearity* nl = nullptr;

    /// Strict decay-dominates-reaction inequality
    /// a1 lambda^2 - lambda ||div(An)||_inf - lambda ||q.n||_inf - M > 0.
    bool invariant_holds() const;
    double invariant_margin() const;  // left-hand side of the inequality
};

/// Builds the certificate with C fixed by matching v(0,.) above planar
/// initial data whose ramp ends at x.n = C_init: C = (1+theta) e^{lambda C_init}.
SupersolutionSpec make_supersolution_spec(const PeriodicMedium& medium, const Nonlinearity& nl,
                                          const Direction& n, double lambda, double C_init = 0.0);

/// Smallest lambda (doubling + bisection, then a 10% margin) satisfying the
/// certificate inequality simultaneously for every direction in an n_dirs
/// sample, so one lambda serves all n. Returns at least 1e-3; errors above
/// 1e6 (inconsistent medium bounds).
double choose_lambda(const PeriodicMedium& medium, const Nonlinearity& nl, int n_dirs = 16);

struct TimeWindow {
    double t0 = 0.0;
    double t1 = 1.0;
    std::size_t nt = 5;
};

struct SupersolutionReport {
    double min_residual = 0.0;
    double t_at_min = 0.0;
    Point x_at_min{0.0, 0.0};
    std::size_t n_points = 0;   // evaluations with v < 1
    double scale = 1.0;         // residual magnitude scale for tolerances
    bool pass = false;          // min_residual >= -1e-8 * scale
    double v1_max_abs_f = 0.0;  // max |f(x,1)| where v = 1 (identically 0)
    // Raw samples for CSV emission: (t, x1, x2, residual) at the worst time.
    std::vector<std::array<double, 4>> worst_slice;
};

/// Evaluates the exact space-time residual
///   dv/dt - div(A grad v) - q.grad v - f(x,v)
///     = C E [2 a1 lambda^2 - lambda^2 n.An + lambda div(An).n + lambda q.n] - f(x,v)
/// at all grid nodes and window times where v < 1. enforce_invariant = false
/// admits deliberately invalid specs (negative controls).
SupersolutionReport check_supersolution(const SupersolutionSpec& spec, const GridSpec& grid,
                                        const TimeWindow& window, bool enforce_invariant = true);

struct SpreadingParams {
    double alpha = 0.4;
    double delta = 0.05;
    double h = 0.25;
    double t_end = 30.0;
    double record_dt = 0.5;
    double t_min = 1.0;          // earliest admissible tau
    double mu = 0.9;             // planar behind value
    double K = 5.0;              // planar ramp width
    double window_margin = 8.0;  // boundary-safe shrink of the measurement window
    double ratio_gate = 4.0;     // max tau / min tau uniformity proxy
    unsigned threads = 1;
};

struct SpreadingEntry {
    Direction n;
    double angle = 0.0;
    double c_ref = 0.0;
    double tau = 0.0;  // infinity when not reached
    bool found = false;
    bool inconclusive = false;  // measurement window exhausted before tau
    double t_evaluable = 0.0;   // last time both regions were sampleable
    bool ok = false;
    std::string error;
};

struct SpreadingReport {
    double alpha = 0.0, delta = 0.0, ratio_gate = 0.0;
    std::vector<SpreadingEntry> entries;
    double max_tau = 0.0, min_tau = 0.0, ratio = 0.0;
    bool all_finite = false;
    bool any_inconclusive = false;
    bool pass = false;
};

/// Per-direction planar runs; tau_n is the earliest recorded time from which
/// both spreading conclusions hold at every later evaluable time:
/// u >= 1-delta on {x.n <= (c_ref-alpha) t} and u <= delta on
/// {x.n >= (c_ref+alpha) t}, sampled inside the boundary-safe window.
SpreadingReport uniform_spreading_check(const PeriodicMedium& medium, const Nonlinearity& nl,
                                        const std::vector<Direction>& dirs,
                                        const std::vector<double>& c_refs,
                                        const SpreadingParams& params);

struct OrderingReport {
    double min_diff = 0.0;  // min over nodes/steps of u_high - u_low
    double t_argmin = 0.0;
    bool ordered(double tol = 1e-8) const { return min_diff >= -tol; }
};

/// Steps two reaction terms side by side from the same initial data with a
/// shared dt sequence and tracks the pointwise ordering u_high - u_low.
OrderingReport twin_ordering_run(const PeriodicMedium& medium, const Nonlinearity& nl_low,
                                 const Nonlinearity& nl_high, const InitialData& init,
                                 const GridSpec& grid, double t_end);

struct LowerBoundParams {
    double h = 0.05;
    double t_end = 20.0;
};

/// The ignition approximation never overtakes its monostable base: runs both
/// dynamics from the same planar data and verifies u_base >= u_approx - 1e-8
/// throughout (f_eps <= f plus the discrete comparison principle). eps = 0
/// degenerates to identical dynamics.
OrderingReport ignition_lower_bound_check(const PeriodicMedium& medium,
                                          const Nonlinearity& base_nl, double eps,
                                          const Direction& n, const LowerBoundParams& params = {});

}  // namespace pfront
