#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pfront/nonlinearity.hpp"
#include "pfront/util.hpp"

using namespace pfront;

namespace {

PeriodicCell unit_cell() { return PeriodicCell(1, {1.0, 1.0}); }

Nonlinearity homogeneous_kpp() {
    return make_kpp(scalar_constant(unit_cell(), {16, 1}, 1.0));
}

/// Max of |f_a - f_b| over a (x,u) sampling grid restricted to [ulo, uhi].
double sup_diff(const Nonlinearity& a, const Nonlinearity& b, double ulo, double uhi,
                std::size_t nx = 32, std::size_t nu = 801) {
    double worst = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
        Point x{a.cell.length(0) * double(i) / double(nx), 0.0};
        for (std::size_t k = 0; k < nu; ++k) {
            double u = ulo + (uhi - ulo) * double(k) / double(nu - 1);
            worst = std::max(worst, std::abs(a.eval(x, u) - b.eval(x, u)));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("kpp closed-form values") {
    Nonlinearity nl = homogeneous_kpp();
    CHECK(nl.kind == NlKind::kpp_monostable);
    CHECK(nl.eval({0.3, 0.0}, 0.5) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(nl.eval({0.3, 0.0}, 0.0) == 0.0);
    CHECK(nl.eval({0.3, 0.0}, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(nl.linzero.min() == doctest::Approx(1.0));
    CHECK(nl.rho == doctest::Approx(0.5));

    // Heterogeneous rate r(x) = 1 + 0.5 cos(2 pi x): f(0, 0.5) = 1.5 * 0.25.
    Nonlinearity het = make_kpp(scalar_cosine(unit_cell(), {64, 1}, 1.0, 0.5));
    CHECK(het.eval({0.0, 0.0}, 0.5) == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("kpp rejects nonpositive rates") {
    CHECK_THROWS_AS(make_kpp(scalar_constant(unit_cell(), {16, 1}, 0.0)), config_error);
    CHECK_THROWS_AS(make_kpp(scalar_cosine(unit_cell(), {64, 1}, 1.0, 1.0)), config_error);
}

TEST_CASE("kpp bound by its linearization") {
    Nonlinearity nl = make_kpp(scalar_cosine(unit_cell(), {64, 1}, 1.0, 0.5));
    for (std::size_t i = 0; i < 32; ++i) {
        Point x{double(i) / 32.0, 0.0};
        double r = evaluate_periodic(nl.linzero, x);
        for (int k = 0; k <= 100; ++k) {
            double u = 0.01 * k;
            CHECK(nl.eval(x, u) <= r * u + 1e-12);
        }
    }
}

TEST_CASE("general monostable exceeds the kpp bound for push > 0") {
    Nonlinearity gm = make_general_monostable(scalar_constant(unit_cell(), {16, 1}, 1.0), 1.0);
    CHECK(gm.kind == NlKind::general_monostable);
    // f = u(1-u)(1+u):  f(0.5) = 0.375 > r u = 0.5 fails;  but > u(1-u).
    CHECK(gm.eval({0.0, 0.0}, 0.5) == doctest::Approx(0.375).epsilon(1e-12));
    bool exceeds = false;
    for (int k = 1; k < 100; ++k) {
        double u = 0.01 * k;
        if (gm.eval({0.0, 0.0}, u) > u * (1.0 - u) + 1e-12) exceeds = true;
    }
    CHECK(exceeds);
    CHECK(check_assumptions(gm).all_pass());
}

TEST_CASE("ignition closed-form values and cutoff") {
    Nonlinearity ign = make_ignition(unit_cell(), 0.3);
    CHECK(ign.kind == NlKind::ignition);
    CHECK(ign.theta == doctest::Approx(0.3));
    CHECK(ign.eval({0.0, 0.0}, 0.2) == 0.0);
    CHECK(ign.eval({0.0, 0.0}, 0.3) == 0.0);
    CHECK(ign.eval({0.0, 0.0}, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(ign.eval({0.0, 0.0}, 0.5) == doctest::Approx(0.1).epsilon(1e-14));
    // rho = (1-theta)/2 for the cutoff quadratic shape.
    CHECK(ign.rho == doctest::Approx(0.35));
    CHECK(ign.threshold() == doctest::Approx(0.3));

    CHECK_THROWS_AS(make_ignition(unit_cell(), 0.0), config_error);
    CHECK_THROWS_AS(make_ignition(unit_cell(), 1.0), config_error);
    CHECK_THROWS_AS(make_ignition(unit_cell(), -0.2), config_error);
}

TEST_CASE("ignition approximation splice values") {
    Nonlinearity base = homogeneous_kpp();
    double eps = 0.1;
    Nonlinearity fe = make_ignition_approx(base, eps);
    CHECK(fe.kind == NlKind::ignition_approx);
    CHECK(fe.bottom() == doctest::Approx(-0.1));
    CHECK(fe.top() == doctest::Approx(0.95));

    Point x{0.25, 0.0};
    // Zero on the floor strip [-eps, 0].
    CHECK(fe.eval(x, -0.05) == 0.0);
    CHECK(fe.eval(x, 0.0) == 0.0);
    // Identical to the base on [0, 1-eps].
    for (int k = 0; k <= 90; ++k) {
        double u = 0.01 * k;
        CHECK(fe.eval(x, u) == doctest::Approx(base.eval(x, u)).epsilon(1e-14));
    }
    // Upper splice: u = 0.95 maps to base argument 1-eps+2(u-(1-eps)) = 1.0.
    CHECK(fe.eval(x, 0.95) == doctest::Approx(0.0).epsilon(1e-13));
    // Interior splice point u = 0.925 maps to 0.95: f = 0.95*0.05.
    CHECK(fe.eval(x, 0.925) == doctest::Approx(base.eval(x, 0.95)).epsilon(1e-13));
    // Top rest state is a zero.
    CHECK(fe.eval(x, fe.top()) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("ignition approximation rejects eps outside (0, rho)") {
    Nonlinearity base = homogeneous_kpp();  // rho = 0.5
    CHECK_THROWS_AS(make_ignition_approx(base, 0.5), config_error);
    CHECK_THROWS_AS(make_ignition_approx(base, 0.7), config_error);
    CHECK_THROWS_AS(make_ignition_approx(base, -0.1), config_error);
    CHECK_NOTHROW(make_ignition_approx(base, 0.25));
}

TEST_CASE("approximation family ordering in eps") {
    Nonlinearity base = homogeneous_kpp();
    // eps < eps' implies f_eps >= f_eps' on the common range [0, 1-eps'/2],
    // and every member lies below the base.
    double epss[] = {0.05, 0.1, 0.2};
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            Nonlinearity fa = make_ignition_approx(base, epss[a]);  // smaller eps
            Nonlinearity fb = make_ignition_approx(base, epss[b]);
            double worst = 0.0;
            for (std::size_t i = 0; i < 16; ++i) {
                Point x{double(i) / 16.0, 0.0};
                for (int k = 0; k <= 1000; ++k) {
                    double u = (1.0 - epss[b] / 2.0) * double(k) / 1000.0;
                    worst = std::min(worst, fa.eval(x, u) - fb.eval(x, u));
                }
            }
            CHECK(worst >= -1e-12);
        }
    for (double eps : epss) {
        Nonlinearity fe = make_ignition_approx(base, eps);
        double worst = 0.0;
        for (std::size_t i = 0; i < 16; ++i) {
            Point x{double(i) / 16.0, 0.0};
            for (int k = 0; k <= 1000; ++k) {
                double u = (1.0 - eps / 2.0) * double(k) / 1000.0;
                worst = std::max(worst, fe.eval(x, u) - base.eval(x, u));
            }
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("approximation family converges to the base in sup norm") {
    Nonlinearity base = make_kpp(scalar_cosine(unit_cell(), {64, 1}, 1.0, 0.5));
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        Nonlinearity fe = make_ignition_approx(base, eps);
        double gap = sup_diff(fe, base, -eps, 1.0);
        CHECK(gap < prev);
        CHECK(gap > 0.0);
        prev = gap;
    }
    CHECK(prev < 0.05);  // eps = 0.025 is already uniformly close
}

TEST_CASE("assumption checks pass for the built-in families") {
    CHECK(check_assumptions(homogeneous_kpp()).all_pass());
    CHECK(check_assumptions(make_kpp(scalar_cosine(unit_cell(), {64, 1}, 1.0, 0.5))).all_pass());
    CHECK(check_assumptions(make_ignition(unit_cell(), 0.3)).all_pass());
    CHECK(check_assumptions(make_ignition_approx(homogeneous_kpp(), 0.1)).all_pass());
}

TEST_CASE("assumption checks flag constructed violations") {
    // Constructors validate their inputs, so counterexamples are built by
    // mutating a valid object. theta < 0 makes f(x, 0) = |theta| * 1 at the
    // lower rest state: the detector must fail with that magnitude.
    Nonlinearity bad = make_ignition(unit_cell(), 0.3);
    bad.theta = -0.01;
    AssumptionReport rep = check_assumptions(bad);
    CHECK_FALSE(rep.all_pass());
    bool rest_failed = false;
    for (const auto& c : rep.checks)
        if (c.name == "rest_states_zero") {
            rest_failed = !c.pass;
            CHECK(c.worst == doctest::Approx(0.01).epsilon(1e-9));
        }
    CHECK(rest_failed);

    // Inflated monotone margin: u(1-u) increases on (0.1, 0.5), so claiming
    // rho = 0.9 must trip the near-top monotonicity check.
    Nonlinearity bad2 = homogeneous_kpp();
    bad2.rho = 0.9;
    AssumptionReport rep2 = check_assumptions(bad2);
    bool mono_failed = false;
    for (const auto& c : rep2.checks)
        if (c.name == "nonincreasing_near_top" && !c.pass) mono_failed = true;
    CHECK(mono_failed);
}

TEST_CASE("lipschitz ratio estimate: closed forms and refinement stability") {
    // KPP r max = 1.5: sup f/u = sup r(x)(1-u) = 1.5 as u -> 0.
    Nonlinearity kpp = make_kpp(scalar_cosine(unit_cell(), {64, 1}, 1.0, 0.5));
    CHECK(kpp.lipschitz_M == doctest::Approx(1.5).epsilon(0.01));

    // Ignition (u-theta)(1-u): sup f/(u-theta) = 1-theta as u -> theta+.
    Nonlinearity ign = make_ignition(unit_cell(), 0.3);
    CHECK(ign.lipschitz_M == doctest::Approx(0.7).epsilon(0.01));

    double coarse = estimate_lipschitz_M(ign, 64, 1001);
    double fine = estimate_lipschitz_M(ign, 128, 4001);
    CHECK(std::abs(fine - coarse) / fine < 0.01);
}

TEST_CASE("evaluator is total: clamped outside the physical range") {
    Nonlinearity kpp = homogeneous_kpp();
    CHECK(kpp.eval({0.0, 0.0}, -0.5) == 0.0);
    CHECK(kpp.eval({0.0, 0.0}, 1.0 + kpp.rho + 0.1) == 0.0);
    Nonlinearity fe = make_ignition_approx(kpp, 0.1);
    CHECK(fe.eval({0.0, 0.0}, -0.2) == 0.0);  // below the floor -eps
}

TEST_CASE("descriptors name the family") {
    CHECK(to_string(NlKind::kpp_monostable) == "kpp_monostable");
    CHECK(to_string(NlKind::ignition_approx) == "ignition_approx");
    Nonlinearity fe = make_ignition_approx(homogeneous_kpp(), 0.1);
    std::string d = fe.describe();
    CHECK(d.find("ignition_approx") != std::string::npos);
    CHECK(d.find("0.1") != std::string::npos);
}
