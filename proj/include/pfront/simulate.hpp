#pragma once

#include <functional>
#include <vector>

#include "pfront/cell.hpp"
#include "pfront/fields.hpp"
#include "pfront/nonlinearity.hpp"

namespace pfront {

/// Cauchy data families. Planar data realizes the front hypotheses: equal to
/// mu behind (s = x.n <= -K), equal to floor_ahead ahead (s >= C), linear
/// ramp in between; floor_ahead = 0 is the stated default, the bottom rest
/// state for shifted (ignition-approximation) problems.
struct InitialData {
    enum class Kind { planar, ball, custom } kind = Kind::planar;
    // planar
    Direction n;
    double C = 0.0, K = 5.0, mu = 0.9;
    double ramp_width = -1.0;  // <0: use C+K (ramp spans the whole gap)
    double floor_ahead = 0.0;
    // ball
    double R = 1.0;
    Point center{0.0, 0.0};
    // custom
    std::vector<double> values;

    static InitialData planar(const Direction& n, double C, double K, double mu,
                              double floor_ahead = 0.0);
    static InitialData ball(double R, double mu, Point center);
    static InitialData custom(std::vector<double> values);
};

std::vector<double> build_initial(const InitialData& init, const GridSpec& grid);

struct SimState {
    double t = 0.0;
    std::vector<double> u;
    GridSpec grid;
    double max_dudt = 0.0;   // last step
    double cfl_margin = 0.0; // dt / dt_max of the run
    long step_index = 0;
};

/// Precomputed per-node coefficient samples on a simulation grid; build once
/// per run, reuse across steps.
class Stepper {
  public:
    Stepper(const PeriodicMedium& medium, const Nonlinearity& nl, const GridSpec& grid);

    /// Explicit-Euler diffusion bound 0.2 h_min^2/(a2 dim).
    double dt_diffusion() const { return dt_diff_; }
    /// Per-axis advection CFL bound 0.5 h/||q||_inf (infinity without advection).
    double dt_advection() const { return dt_adv_; }
    /// Run step: 0.9 * min(diffusion bound, l1 advection bound); the l1 bound
    /// 0.5/sum_d(||q_d||_inf/h_d) is stricter than the per-axis one and makes
    /// the update monotone, so the discrete comparison principle holds.
    double dt_run() const { return 0.9 * std::min(dt_diff_, dt_adv_l1_); }

    /// One explicit Euler step; checks the stated CFL preconditions.
    void step(SimState& state, double dt) const;

    const GridSpec& grid() const { return grid_; }
    const Nonlinearity& nonlinearity() const { return *nl_; }

  private:
    GridSpec grid_;
    const Nonlinearity* nl_;
    int dim_;
    std::size_t nx_, ny_;
    double hx_, hy_;
    double dt_diff_, dt_adv_, dt_adv_l1_;
    double guard_lo_, guard_hi_;
    std::vector<double> af1_, af2_, a12_, q1_, q2_, rloc_;
    mutable std::vector<double> scratch_;
};

/// Convenience single-step entry matching the module contract; builds the
/// sampled context on the fly.
SimState step(const SimState& state, const PeriodicMedium& medium, const Nonlinearity& nl, double dt);

struct Observer {
    double cadence = 0.5;  // time units between invocations; also fires at t=0 and t_end
    std::function<void(const SimState&)> fn;
};

/// Repeated stepping to t_end with dt = dt_run rounded so the horizon is hit
/// exactly; observers fire on their cadence. Deterministic.
SimState run(const PeriodicMedium& medium, const Nonlinearity& nl, const InitialData& init,
             const GridSpec& grid, double t_end, const std::vector<Observer>& observers = {});

struct ComparisonReport {
    double min_diff = 0.0;  // min over all nodes and recorded times of u_high - u_low
    double t_argmin = 0.0;
    bool ordered(double tol = 1e-8) const { return min_diff >= -tol; }
};

/// Steps both solutions with identical dt sequences and tracks the pointwise
/// ordering; init_low <= init_high is required.
ComparisonReport comparison_run(const PeriodicMedium& medium, const Nonlinearity& nl,
                                const InitialData& init_low, const InitialData& init_high,
                                const GridSpec& grid, double t_end);

}  // namespace pfront
