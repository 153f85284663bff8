#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pfront/simulate.hpp"

namespace pfront {

/// Time series of front positions m(t) = max{x.n : u >= level} with the
/// fitted propagation speed.
struct FrontTrace {
    Direction n;
    double level = 0.5;
    std::vector<double> times;
    std::vector<double> positions;
    double speed = 0.0;
    double intercept = 0.0;
    double log_coef = 0.0;       // coefficient of ln t (pulled-front fits only)
    double rms_residual = 0.0;
    double uncertainty = 0.0;    // rms residual / fit-window length
    double transient_cut = 0.4;  // fraction of early samples excluded from the fit
    std::string fit_basis;       // "t,1" or "t,log(t),1"
};

/// Rightmost level crossing of u along n, sub-grid refined by linear
/// interpolation along the axis most aligned with n. NaN when the level set
/// is empty.
double front_position(const SimState& state, const Direction& n, double level);

/// Least-squares speed fit over t in [cut*T, T]. log_basis adds an ln t
/// column, absorbing the front delay of pulled (KPP-class) fronts.
FrontTrace fit_front_trace(const Direction& n, double level, std::vector<double> times,
                           std::vector<double> positions, double transient_cut, bool log_basis);

/// Front trace from a recorded state sequence.
FrontTrace track_front(const std::vector<SimState>& states, const Direction& n, double level,
                       double transient_cut = 0.4);

struct Snapshot {
    double t = 0.0;
    std::vector<double> u;
};

struct SpeedRunConfig {
    double h = 0.05;
    double t_end = 40.0;
    double level = 0.5;
    double record_dt = 0.1;
    double transient_cut = 0.4;
    double snapshot_dt = 0.0;  // > 0: keep full-state snapshots on this cadence
    std::size_t max_nodes_1d = 2'000'000;
};

struct MeasuredSpeed {
    double c = 0.0;
    FrontTrace trace;
    bool reduced = false;        // solved on the exact 1D planar reduction
    double boundary_margin = 0.0;  // distance from final front to the domain edge
    GridSpec grid;               // grid of the run that produced the trace
    PeriodicCell run_cell;       // cell of the (possibly reduced) run problem
    std::vector<Snapshot> snapshots;  // populated when snapshot_dt > 0
};

/// Exact planar reduction: a 2D constant-coefficient medium with an
/// x-independent reaction evolves planar data in direction n exactly as the
/// 1D problem with diffusion n.An and drift q.n. Fills `out` and returns
/// true when those hypotheses hold (the reduced cell length is 32 h, so any
/// grid of spacing h resolves it); returns false otherwise. The reaction
/// check looks through ignition-approximation wrappers at the base rate
/// field, not just at the (identically zero) linearization.
struct PlanarReduction {
    PeriodicMedium medium;
    Nonlinearity nl;
};
bool planar_reduction(const PeriodicMedium& medium, const Nonlinearity& nl, const Direction& n,
                      double h, PlanarReduction& out);

/// Planar-data speed measurement. Initial data follow the front hypotheses
/// (C=0, K=5; mu = 0.9 monostable, (1+theta)/2 ignition, top/2 for the
/// shifted ignition approximation whose ahead state is the bottom rest state
/// -eps). Constant-coefficient media in any direction reduce exactly to a 1D
/// problem with diffusion n.An and drift q.n; 1D media run directly; other
/// combinations run on a 2D rectangle with no-flux sides.
MeasuredSpeed measure_speed(const PeriodicMedium& medium, const Nonlinearity& nl,
                            const Direction& n, const SpeedRunConfig& cfg = {});

/// Pulsating-wave profile reconstructed from snapshots in the moving frame.
struct WaveProfile {
    Direction n;
    double c = 0.0;
    std::vector<double> z;                    // bin centers
    std::vector<double> U;                    // phase-averaged profile
    std::vector<std::vector<double>> U_phase; // [cell phase][z bin]
    std::size_t phases = 1;
    double r_puls = 0.0;  // max |u(t + L/c, x + L) - u(t,x)| over the window
    double monotone_violation = 0.0;
};

/// Moving-frame profile extraction for axis-aligned directions on 1D grids;
/// bins z = x.n - c t at width h/2 over the post-transient window and
/// evaluates the pulsating relation residual (time interpolation between
/// snapshots, exact x+L node shift).
WaveProfile extract_profile(const std::vector<Snapshot>& snaps, const GridSpec& grid,
                            const Direction& n, double c, const PeriodicCell& cell,
                            double transient_cut = 0.5);

/// Least-squares exponential decay rate of the profile tail (samples with
/// 1e-12 < U < 0.1).
double decay_rate(const WaveProfile& profile);

}  // namespace pfront
