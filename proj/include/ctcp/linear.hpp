#pragma once

#include "ctcp/model.hpp"

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace ctcp {

using cplx = std::complex<double>;

// First-order terms of the two-delay model, kappa excluded. Row 1 (xi) is set
// 1 against u1(t), u1(t-tau1), u2(t-tau2); row 2 (chi) is set 2 against
// u2(t), u2(t-tau2), u1(t-tau1).
struct JacobianEntries {
    double xi_a = 0, xi_b = 0, xi_d = 0;
    double chi_c = 0, chi_d = 0, chi_b = 0;
};

struct LinearCoefficients {
    Topology topology = Topology::CaseIII;
    double tau1 = 0, tau2 = 0;
    // Model with no delay on set 2:
    //   u1' = -kappa (M1 u1 + N1 u1(t-tau1) + P1 u2)
    //   u2' = -kappa ((M2 + N2) u2 + P2 u1(t-tau1))
    double M1 = 0, M2 = 0, N1 = 0, N2 = 0, P1 = 0, P2 = 0;
    // Quartet of its characteristic equation
    //   lambda^2 + kappa a lambda + kappa b lambda e^{-lambda tau1}
    //     + kappa^2 c + kappa^2 d e^{-lambda tau1} = 0
    double a = 0, b = 0, c = 0, d = 0;
    JacobianEntries jac;
};

// M, N, P from their closed forms; jac from the analytic derivative engine.
LinearCoefficients linearize(const TopologyConfig& cfg, const EquilibriumPoint& eq);

cplx characteristic_fn(const LinearCoefficients& lc, cplx lambda, double kappa);

enum class ConditionClass { OnePositiveRoot, TwoPositiveRoots, NoCrossing };

const char* condition_name(ConditionClass c);

struct FrequencyResult {
    double A = 0; // crossing frequency per unit kappa
    double A_second = 0; // second root when TwoPositiveRoots
    ConditionClass cls = ConditionClass::NoCrossing;
    double S = 0; // 2c - a^2 + b^2
    double P = 0; // c^2 - d^2
};

FrequencyResult crossing_frequency(const LinearCoefficients& lc);

struct CrossingResult {
    double omega0 = 0;
    double kappa_c = 0;
    ConditionClass condition_class = ConditionClass::NoCrossing;
    double residual = 0;
};

// Throws Numeric when the arccos argument leaves [-1,1] or neither branch
// passes the residual check; Usage when the class is not OnePositiveRoot.
CrossingResult kappa_critical_closed_form(const LinearCoefficients& lc);

// Linear delay system u' = kappa * sum_k A_k u(t - delay_k), dimension 1 or 2.
struct DelaySystem {
    int n = 2;
    std::vector<double> delays;
    std::vector<std::array<double, 4>> mats; // row-major, n x n in the top-left
};

DelaySystem two_delay_system(const LinearCoefficients& lc);
DelaySystem reduced_system(const LinearCoefficients& lc);
DelaySystem scalar_system(double M, double N, double tau);

// det(lambda I - kappa A(lambda)) with A(lambda) = sum_k A_k e^{-lambda tau_k}.
cplx char_det(const DelaySystem& sys, cplx lambda, double kappa);

struct CharDerivs {
    cplx F, F_lambda, F_kappa;
};
CharDerivs char_derivs(const DelaySystem& sys, cplx lambda, double kappa);

// Radius containing every root with Re lambda >= 0.
double root_radius(const DelaySystem& sys, double kappa);

// Number of zeros of F inside the rectangle, by the argument principle with
// adaptive step refinement. Throws Numeric if a zero lies on the contour.
int count_zeros(const std::function<cplx(cplx)>& F, double re_lo, double re_hi, double im_lo,
                double im_hi);

// Characteristic roots with Re lambda > 0.
int unstable_root_count(const DelaySystem& sys, double kappa);

// First crossing for kappa in (0, kappa_max]; throws NoCrossing if none.
CrossingResult locate_crossing(const DelaySystem& sys, double kappa_max = 10);

CrossingResult hopf_locate_two_delay(const TopologyConfig& cfg, double kappa_max = 10);

// Re and Im of d lambda / d kappa at (i omega0, kappa_c).
cplx eigenvalue_velocity(const DelaySystem& sys, const CrossingResult& cr);

double transversality(const TopologyConfig& cfg, const CrossingResult& cr);

// Closed-form single-delay conditions for identical flow sets.
struct Scenario1Result {
    double w_star = 0;
    double loss_star = 0;
    double M = 0, N = 0;
    bool has_crossing = false;
    double kappa_c = 0; // infinity when !has_crossing
    double omega_c = 0;
    // Both sides of the stability inequality at cfg.kappa.
    double lhs = 0, rhs = 0;
    bool stable = false;
};

Scenario1Result scenario1_conditions(const TopologyConfig& cfg);

// Stability charts. Axis 1 is bisected for each value of axis 2.
enum class ChartAxis { Kappa, Alpha, K, B };

ChartAxis parse_axis(const std::string& s);
const char* axis_name(ChartAxis a);

// Model whose stability a chart tracks.
enum class ChartModel { TwoDelay, Reduced };

struct ChartPoint {
    double axis2 = 0;
    double boundary = 0; // NaN marks a gap
};

struct ChartResult {
    ChartAxis axis1{}, axis2{};
    std::vector<ChartPoint> points;
    // +1 increasing, -1 decreasing, 0 neither (gaps skipped)
    int monotonicity = 0;
};

struct ChartOptions {
    double axis1_lo = 0, axis1_hi = 0; // 0,0 picks a default range
    double tol = 1e-6;                 // relative bisection tolerance
    ChartModel model = ChartModel::TwoDelay;
    bool parallel = true;
};

void set_axis(TopologyConfig& cfg, ChartAxis axis, double v);
double get_axis(const TopologyConfig& cfg, ChartAxis axis);

// True when every characteristic root of the chosen model lies in Re < 0.
bool locally_stable(const TopologyConfig& cfg, ChartModel model = ChartModel::TwoDelay);

ChartResult stability_chart(const TopologyConfig& cfg, ChartAxis axis1, ChartAxis axis2,
                            const std::vector<double>& axis2_values,
                            const ChartOptions& opt = {});

} // namespace ctcp
