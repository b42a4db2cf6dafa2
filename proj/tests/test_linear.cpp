#include "doctest.h"
#include "test_util.hpp"

#include "ctcp/error.hpp"
#include "ctcp/linear.hpp"

using namespace ctcp;
using oracle::cplx;
using oracle::rel_err;

namespace {

struct Fixture {
    TopologyConfig cfg = reference_case3();
    EquilibriumPoint eq = solve_equilibrium(cfg);
    LinearCoefficients lc = linearize(cfg, eq);
    std::array<std::array<double, 4>, 2> J = oracle::jacobian(cfg, eq.w1, eq.w2);
};

double bound(const std::array<std::array<double, 4>, 2>& J, double k)
{
    return 1.1 * k * oracle::jac_norm(J) + 0.1;
}

} // namespace

TEST_CASE("linearisation matches differences")
{
    Fixture fx;
    const auto& j = fx.lc.jac;
    const double got[6] = {j.xi_a, j.xi_b, j.xi_d, j.chi_c, j.chi_d, j.chi_b};
    const double want[6] = {fx.J[0][0], fx.J[0][2], fx.J[0][3], fx.J[1][1], fx.J[1][3], fx.J[1][2]};
    for (int i = 0; i < 6; ++i)
        CHECK(rel_err(got[i], want[i]) < 1e-6);
    // Set 1 never reads w2(t) and set 2 never reads w1(t).
    CHECK(std::abs(fx.J[0][1]) < 1e-12);
    CHECK(std::abs(fx.J[1][0]) < 1e-12);
}

TEST_CASE("closed-form coefficients agree with the Jacobian")
{
    Fixture fx;
    const auto& lc = fx.lc;
    const auto& j = lc.jac;
    CHECK(rel_err(lc.M1, -j.xi_a) < 1e-10);
    CHECK(rel_err(lc.N1, -j.xi_b) < 1e-10);
    CHECK(rel_err(lc.P1, -j.xi_d) < 1e-10);
    CHECK(rel_err(lc.M2 + lc.N2, -(j.chi_c + j.chi_d)) < 1e-10);
    CHECK(rel_err(lc.P2, -j.chi_b) < 1e-10);
    CHECK(rel_err(lc.a, lc.M1 + lc.M2 + lc.N2) < 1e-14);
    CHECK(rel_err(lc.b, lc.N1) < 1e-14);
    CHECK(rel_err(lc.c, lc.M1 * (lc.M2 + lc.N2)) < 1e-14);
    CHECK(rel_err(lc.d, lc.N1 * (lc.M2 + lc.N2) - lc.P1 * lc.P2) < 1e-14);
}

TEST_CASE("characteristic functions agree with the difference Jacobian")
{
    Fixture fx;
    const DelaySystem two = two_delay_system(fx.lc);
    const cplx pts[] = {{0.3, 0.8}, {-0.2, 2.5}, {1.0, -0.4}, {0.05, 0.83}};
    for (double k : {0.5, 1.0, 1.7})
        for (cplx z : pts) {
            const cplx r = oracle::char_fn(fx.J, 1, 2, true, z, k);
            const cplx t = oracle::char_fn(fx.J, 1, 2, false, z, k);
            CHECK(std::abs(characteristic_fn(fx.lc, z, k) - r) < 1e-7 * std::abs(r));
            CHECK(std::abs(char_det(two, z, k) - t) < 1e-7 * std::abs(t));
        }
}

TEST_CASE("count_zeros on a known polynomial")
{
    auto F = [](cplx z) { return (z - cplx(1, 2)) * (z - cplx(2, -1)) * (z + 1.0) * (z - cplx(0.5, 0)); };
    CHECK(count_zeros(F, 0, 3, -3, 3) == 3);
    CHECK(count_zeros(F, -2, 3, -3, 3) == 4);
    CHECK(count_zeros(F, 0.6, 3, -0.5, 0.5) == 0);
    CHECK_THROWS_AS(count_zeros(F, 0.5, 3, -3, 3), Error);
}

TEST_CASE("two-delay crossing against the counting oracle")
{
    Fixture fx;
    const CrossingResult cr = hopf_locate_two_delay(fx.cfg);
    const double want = oracle::counting_sweep(
        [&](cplx z, double k) { return oracle::char_fn(fx.J, 1, 2, false, z, k); },
        [&](double k) { return bound(fx.J, k); }, 0.05, 10);
    CHECK(rel_err(cr.kappa_c, want) < 1e-6);
    CHECK(cr.condition_class == ConditionClass::OnePositiveRoot);
    CHECK(std::abs(char_det(two_delay_system(fx.lc), cplx(0, cr.omega0), cr.kappa_c)) < 1e-10);
    const DelaySystem sys = two_delay_system(fx.lc);
    CHECK(unstable_root_count(sys, 0.99 * cr.kappa_c) == 0);
    CHECK(unstable_root_count(sys, 1.01 * cr.kappa_c) == 2);
}

TEST_CASE("reduced closed form against numeric and counting oracle")
{
    Fixture fx;
    const FrequencyResult fr = crossing_frequency(fx.lc);
    REQUIRE(fr.cls == ConditionClass::OnePositiveRoot);
    const CrossingResult cf = kappa_critical_closed_form(fx.lc);
    const CrossingResult num = locate_crossing(reduced_system(fx.lc));
    CHECK(rel_err(cf.kappa_c, num.kappa_c) < 1e-8);
    CHECK(rel_err(cf.omega0, num.omega0) < 1e-8);
    const double want = oracle::counting_sweep(
        [&](cplx z, double k) { return oracle::char_fn(fx.J, 1, 2, true, z, k); },
        [&](double k) { return bound(fx.J, k); }, 0.05, 10);
    CHECK(rel_err(cf.kappa_c, want) < 1e-6);
}

TEST_CASE("single-delay closed form against the counting oracle")
{
    TopologyConfig cfg = reference_case3();
    cfg.network = CaseIIINetwork{20, 20, 20, 100, 100, 100};
    cfg.tau2 = 1;
    const Scenario1Result s1 = scenario1_conditions(cfg);
    REQUIRE(s1.has_crossing);
    const auto [M, N] = oracle::scalar_mn(cfg);
    CHECK(rel_err(s1.M, M) < 1e-6);
    CHECK(rel_err(s1.N, N) < 1e-6);
    const double want = oracle::counting_sweep(
        [&](cplx z, double k) { return z + k * M + k * N * std::exp(-z); },
        [&](double k) { return 1.1 * k * (std::abs(M) + std::abs(N)) + 0.1; }, 0.05, 10);
    CHECK(rel_err(s1.kappa_c, want) < 1e-6);
    // The full two-delay locator sees the same first crossing.
    CHECK(rel_err(hopf_locate_two_delay(cfg).kappa_c, s1.kappa_c) < 1e-8);
    // Inequality form flips exactly at kappa_c.
    cfg.kappa = 0.999 * s1.kappa_c;
    CHECK(scenario1_conditions(cfg).stable);
    cfg.kappa = 1.001 * s1.kappa_c;
    CHECK_FALSE(scenario1_conditions(cfg).stable);
}

TEST_CASE("no crossing is reported as such")
{
    TopologyConfig cfg;
    cfg.network = CaseINetwork{1, 100};
    cfg.protocol = {0.3, 0.75, 0.5};
    cfg.tau1 = cfg.tau2 = 1;
    CHECK_FALSE(scenario1_conditions(cfg).has_crossing);
    try {
        hopf_locate_two_delay(cfg);
        FAIL("expected NoCrossing");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoCrossing);
    }
}

TEST_CASE("transversality by root tracking")
{
    Fixture fx;
    const DelaySystem sys = two_delay_system(fx.lc);
    const CrossingResult cr = locate_crossing(sys);
    auto track = [&](double k) {
        cplx z(0, cr.omega0);
        for (int i = 0; i < 50; ++i) {
            const double h = 1e-7;
            const cplx F = char_det(sys, z, k);
            const cplx dF = (char_det(sys, z + h, k) - char_det(sys, z - h, k)) / (2 * h);
            z -= F / dF;
        }
        return z;
    };
    const double dk = 1e-5 * cr.kappa_c;
    const double fd = (track(cr.kappa_c + dk).real() - track(cr.kappa_c - dk).real()) / (2 * dk);
    const cplx v = eigenvalue_velocity(sys, cr);
    CHECK(rel_err(v.real(), fd) < 1e-4);
    CHECK(v.real() > 0);
    CHECK(rel_err(transversality(fx.cfg, cr), v.real()) < 1e-12);
}

TEST_CASE("random configurations: closed forms against counting oracle")
{
    std::mt19937_64 rng(2024);
    int accepted = 0;
    for (int i = 0; i < 40 && accepted < 8; ++i) {
        const TopologyConfig cfg = oracle::random_config(rng, i % 2 == 0);
        const EquilibriumPoint eq = solve_equilibrium(cfg);
        const LinearCoefficients lc = linearize(cfg, eq);
        if (crossing_frequency(lc).cls != ConditionClass::OnePositiveRoot)
            continue;
        const CrossingResult cf = kappa_critical_closed_form(lc);
        const auto J = oracle::jacobian(cfg, eq.w1, eq.w2);
        const double want = oracle::counting_sweep(
            [&](cplx z, double k) { return oracle::char_fn(J, cfg.tau1, cfg.tau2, true, z, k); },
            [&](double k) { return bound(J, k); }, 1e-3, 1e3);
        CHECK(rel_err(cf.kappa_c, want) < 1e-6);
        CHECK(eigenvalue_velocity(reduced_system(lc), cf).real() > 0);
        ++accepted;
    }
    CHECK(accepted >= 8);
}

TEST_CASE("stability charts")
{
    const TopologyConfig cfg = reference_case3();
    const CrossingResult cr = hopf_locate_two_delay(cfg);
    ChartOptions opt;
    const ChartResult ka = stability_chart(cfg, ChartAxis::Kappa, ChartAxis::Alpha, {0.2, 0.3, 0.4}, opt);
    CHECK(rel_err(ka.points[1].boundary, cr.kappa_c) < 1e-5);
    CHECK(ka.monotonicity == -1);
    const ChartResult kb = stability_chart(cfg, ChartAxis::Kappa, ChartAxis::B, {15, 20, 25, 30}, opt);
    CHECK(kb.monotonicity == -1);
    const ChartResult ak = stability_chart(cfg, ChartAxis::Alpha, ChartAxis::K, {0.3, 0.5, 0.7, 0.9}, opt);
    CHECK(ak.monotonicity == -1);
    CHECK_THROWS_AS(stability_chart(cfg, ChartAxis::K, ChartAxis::K, {0.5}, opt), Error);
    TopologyConfig c = cfg;
    set_axis(c, ChartAxis::B, 30);
    CHECK(get_axis(c, ChartAxis::B) == 30);
    CHECK(std::get<CaseIIINetwork>(c.network).b1 == 10);
}
