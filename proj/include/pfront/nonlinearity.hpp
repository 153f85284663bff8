#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pfront/fields.hpp"

namespace pfront {

enum class NlKind { kpp_monostable, general_monostable, ignition, ignition_approx };

std::string to_string(NlKind k);

/// Reaction term f(x,u). Immutable; the evaluator is total in u (clamped to 0
/// outside the physically meaningful range so the simulator never sees
/// undefined reactions). Heterogeneity enters through the linearization field
/// r(x) = d_u f(x,0) shared by all built-in families.
struct Nonlinearity {
    NlKind kind = NlKind::kpp_monostable;
    PeriodicCell cell;
    double theta = 0.0;        // ignition threshold (ignition kind)
    double eps = 0.0;          // ignition_approx parameter
    double rho = 0.5;          // near-top monotone margin
    double push = 0.0;         // general_monostable shape parameter
    double lipschitz_M = 0.0;  // sup f(x,u)/|u - threshold|, sampled
    ScalarField linzero;       // d_u f(x,0)
    std::shared_ptr<const Nonlinearity> base;  // ignition_approx only

    /// Lower/upper rest states of the dynamics ([0,1], or [-eps, 1-eps/2]).
    double bottom() const { return kind == NlKind::ignition_approx ? -eps : 0.0; }
    double top() const { return kind == NlKind::ignition_approx ? 1.0 - eps / 2.0 : 1.0; }
    /// Threshold below which f vanishes (0 for monostable kinds).
    double threshold() const {
        return kind == NlKind::ignition ? theta : (kind == NlKind::ignition_approx ? 0.0 : 0.0);
    }
    bool is_monostable() const {
        return kind == NlKind::kpp_monostable || kind == NlKind::general_monostable;
    }

    /// Pointwise reaction given the local linearization value r = r(x).
    double eval_local(double r, double u) const;
    /// Full evaluation at a point (interpolates r(x) first).
    double eval(const Point& x, double u) const;

    std::string describe() const;  // compact JSON-ish descriptor for reports
};

/// f(x,u) = r(x) u (1-u); requires min r > 0.
Nonlinearity make_kpp(const ScalarField& r_field);
/// f(x,u) = r(x) u (1-u) (1 + push u); non-KPP for push > 0.
Nonlinearity make_general_monostable(const ScalarField& r_field, double push);
/// Homogeneous cutoff family f(u) = (u-theta)(1-u) for u > theta, else 0.
Nonlinearity make_ignition(const PeriodicCell& cell, double theta);
/// The approximation family: f_eps = 0 on [-eps,0], = f on [0,1-eps],
/// = f(x, 1-eps+2(u-(1-eps))) on [1-eps, 1-eps/2].
Nonlinearity make_ignition_approx(const Nonlinearity& base, double eps);

struct AssumptionCheck {
    std::string name;
    bool pass = true;
    double worst = 0.0;
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    bool all_pass() const;
};

/// Sampling-based verification of the structural assumptions (rest states,
/// sign, cutoff zone, near-top monotonicity) on an (x,u) grid, default 64 x
/// 1001.
AssumptionReport check_assumptions(const Nonlinearity& nl, std::size_t nx = 64,
                                   std::size_t nu = 1001);

/// Finite-sampling estimate of sup f(x,u)/|u - threshold| on (threshold, 1].
double estimate_lipschitz_M(const Nonlinearity& nl, std::size_t nx = 64, std::size_t nu = 1001);

}  // namespace pfront
