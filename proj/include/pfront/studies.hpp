#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pfront/eigenprob.hpp"
#include "pfront/fronts.hpp"

namespace pfront {

/// Speed evaluation methods: linearized eigen speed, direct front simulation,
/// or front simulation of the ignition approximation f_eps of a monostable
/// base.
enum class SpeedMethod { eigen_lin, sim_direct, sim_ignition_approx };

std::string to_string(SpeedMethod m, double eps = 0.0);

struct SpeedEntry {
    double angle = 0.0;
    Direction n;
    double c = 0.0;
    double uncertainty = 0.0;
    bool ok = false;
    std::string error;  // empty when ok
};

/// Sampled direction-to-speed map over the unit circle with provenance
/// metadata. Entries are sorted by angle with no duplicates.
struct SpeedCurve {
    std::vector<SpeedEntry> entries;
    SpeedMethod method = SpeedMethod::eigen_lin;
    double eps = 0.0;  // sim_ignition_approx only
    std::uint64_t medium_hash = 0;
    std::string nl_descriptor;

    std::size_t n_ok() const;
    bool complete() const { return n_ok() == entries.size() && !entries.empty(); }
    /// Lower speed bound kappa = min c over successful entries.
    double kappa() const;
    /// Upper speed bound over successful entries.
    double K_sup() const;
    /// Largest adjacent jump |c_{k+1} - c_k| (cyclic); pairs with a failed
    /// side are skipped.
    double max_adjacent_jump() const;
    double max_uncertainty() const;
};

struct ScanConfig {
    std::array<std::size_t, 2> eigen_resolution{64, 64};
    double eigen_uncertainty = 1e-4;  // golden-section argument tolerance
    SpeedRunConfig sim;
    double eps = 0.0;       // sim_ignition_approx only
    unsigned threads = 1;
};

/// Evaluates the chosen method at n_samples equally spaced angles (power of
/// two >= 4, so refinements nest). Per-direction failures are recorded in the
/// entry; the curve is returned partial.
SpeedCurve scan_directions(const PeriodicMedium& medium, const Nonlinearity& nl,
                           SpeedMethod method, std::size_t n_samples, const ScanConfig& cfg = {});

struct ContinuityReport {
    double jump_coarse = 0.0;
    double jump_fine = 0.0;
    double max_uncertainty = 0.0;
    bool pass = false;  // jump_fine <= 0.75 jump_coarse + 2 max_uncertainty
};

/// Modulus-of-continuity contraction test between nested scans (fine has
/// exactly twice the samples of coarse, on nested angles).
ContinuityReport continuity_report(const SpeedCurve& coarse, const SpeedCurve& fine);

struct ApproxCell {
    double c = 0.0;
    double uncertainty = 0.0;
    bool ok = false;
    std::string error;
};

/// Convergence table for the ignition-approximation speeds c_eps(n) against a
/// per-direction reference speed.
struct ApproxTable {
    std::vector<double> angles;
    std::vector<Direction> n_set;
    std::vector<double> eps_list;             // strictly decreasing
    std::vector<std::vector<ApproxCell>> cells;  // [direction][eps]
    std::vector<double> reference;            // c_ref per direction
    std::string reference_method;             // "eigen_lin" or "sim_direct"
    std::vector<double> sup_gap;              // per eps: max_n (c_ref - c_eps)
    std::size_t monotonicity_violations = 0;  // c_eps < c_eps' - tol for eps < eps'
    bool gap_decreasing = false;              // sup_gap strictly decreasing along eps_list
};

struct ApproxConfig {
    SpeedRunConfig sim;
    std::array<std::size_t, 2> eigen_resolution{64, 64};
    unsigned threads = 1;
};

/// Runs sim_ignition_approx for every (n, eps); reference is eigen_lin for
/// KPP bases (where the minimal speed equals the linearized speed) and a
/// direct fine simulation otherwise. Per-cell failures (including eps >= rho
/// construction errors) are captured in the table.
ApproxTable ignition_approx_study(const PeriodicMedium& medium, const Nonlinearity& base_nl,
                                  const std::vector<Direction>& n_set,
                                  const std::vector<double>& eps_list,
                                  const ApproxConfig& cfg = {});

/// Equally spaced direction sample on the circle (2D) or {+e1,-e1} (1D).
std::vector<Direction> direction_sample(int dim, std::size_t n_samples);

}  // namespace pfront
