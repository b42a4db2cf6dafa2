#include "doctest.h"
#include "test_util.hpp"

#include "ctcp/dde.hpp"
#include "ctcp/error.hpp"
#include "ctcp/linear.hpp"

using namespace ctcp;
using oracle::rel_err;

TEST_CASE("equilibrium history stays put")
{
    TopologyConfig cfg = reference_case3();
    cfg.kappa = 1.1;
    const EquilibriumPoint eq = solve_equilibrium(cfg);
    const WindowState s{eq.w1, eq.w2};
    const SimTrace tr = integrate(cfg, [s](double) { return s; }, 100, 0.02);
    double drift = 0;
    for (std::size_t i = 0; i < tr.size(); ++i)
        drift = std::max({drift, std::abs(tr.w1[i] - eq.w1), std::abs(tr.w2[i] - eq.w2)});
    CHECK(drift < 1e-8);
    CHECK_FALSE(tr.floor_hit);
}

TEST_CASE("fourth-order convergence under step halving")
{
    TopologyConfig cfg = reference_case3();
    cfg.kappa = 1.1;
    const EquilibriumPoint eq = solve_equilibrium(cfg);
    const WindowState s{0.6 * eq.w1, 1.3 * eq.w2};
    const History hist = [s](double) { return s; };
    auto value = [&](double h) { return integrate(cfg, hist, 100, h).w2_at(20); };
    const double a = value(0.0125), b = value(0.00625), c = value(0.003125);
    const double ratio = (a - b) / (b - c);
    CHECK(ratio > 14);
    CHECK(ratio < 18);
}

TEST_CASE("cycle extraction on synthetic traces")
{
    const double h = 0.01;
    std::vector<double> sine, flat, ramp;
    for (int i = 0; i < 20000; ++i) {
        const double t = i * h;
        sine.push_back(128 + std::sin(0.8 * t));
        flat.push_back(128 + 1e-3 * std::exp(-t));
        ramp.push_back(128 + 0.01 * t);
    }
    const CycleStats s = extract_cycle(sine, h, 10000);
    CHECK_FALSE(s.converged);
    CHECK(s.amplitude == doctest::Approx(2).epsilon(1e-6));
    CHECK(rel_err(s.period, 2 * M_PI / 0.8) < 1e-4);
    CHECK(s.mean == doctest::Approx(128).epsilon(1e-3));

    const CycleStats f = extract_cycle(flat, h, 10000);
    CHECK(f.converged);
    CHECK(f.period == 0);

    try {
        extract_cycle(ramp, h, 10000);
        FAIL("expected Undetermined");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Undetermined);
    }
    CHECK_THROWS_AS(extract_cycle(sine, h, 19999), Error);
}

TEST_CASE("regimes either side of the crossing")
{
    TopologyConfig cfg = reference_case3();
    const CrossingResult cr = hopf_locate_two_delay(cfg);
    const History hist = default_history(cfg);

    cfg.kappa = 0.95 * cr.kappa_c;
    const CycleStats below = extract_cycle(integrate(cfg, hist, 1600, 0.02));
    CHECK(below.converged);
    CHECK(below.amplitude < 0.5);

    cfg.kappa = 1.05 * cr.kappa_c;
    const CycleStats above = extract_cycle(integrate(cfg, hist, 1600, 0.02));
    CHECK_FALSE(above.converged);
    CHECK(rel_err(above.period, 2 * M_PI / cr.omega0) < 0.1);
}

TEST_CASE("reduced form honours its own crossing")
{
    TopologyConfig cfg = reference_case3();
    const LinearCoefficients lc = linearize(cfg, solve_equilibrium(cfg));
    const double kc = kappa_critical_closed_form(lc).kappa_c;
    const History hist = default_history(cfg);
    cfg.kappa = 0.9 * kc;
    CHECK(extract_cycle(integrate(cfg, hist, 1600, 0.02, DelayForm::Reduced)).converged);
    cfg.kappa = 1.1 * kc;
    CHECK_FALSE(extract_cycle(integrate(cfg, hist, 1600, 0.02, DelayForm::Reduced)).converged);
}

TEST_CASE("integrator preconditions")
{
    const TopologyConfig cfg = reference_case3();
    const History hist = default_history(cfg);
    CHECK_THROWS_AS(integrate(cfg, hist, 1000, 0.06), Error);
    CHECK_THROWS_AS(integrate(cfg, hist, 99, 0.02), Error);
    CHECK_THROWS_AS(integrate(cfg, hist, 1000, 0.02, DelayForm::TwoDelay, 1.0), Error);
    CHECK_THROWS_AS(integrate(cfg, [](double) { return WindowState{-1, 1}; }, 1000, 0.02), Error);
    const SimTrace tr = integrate(cfg, hist, 100, 0.02);
    CHECK(tr.w2_at(50) == doctest::Approx(tr.w2[2500]));
    CHECK_THROWS_AS(tr.w2_at(101), Error);
}

TEST_CASE("sweep helpers")
{
    const auto g = kappa_grid(0.9, 1.1, 0.01);
    REQUIRE(g.size() == 21);
    CHECK(g.front() == 0.9);
    CHECK(g.back() == doctest::Approx(1.1).epsilon(1e-14));
    CHECK_THROWS_AS(kappa_grid(1, 0.5, 0.1), Error);

    std::vector<SweepPoint> pts(3);
    pts[0].stats.converged = true;
    pts[1].stats.converged = false;
    pts[1].envelope_ratio = 0.5;
    pts[2].stats.converged = false;
    pts[2].envelope_ratio = 1.0;
    CHECK(sweep_onset(pts) == 2);
    pts[2].envelope_ratio = 0.2;
    CHECK(sweep_onset(pts) == -1);
}
