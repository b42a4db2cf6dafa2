#pragma once

#include "ctcp/linear.hpp"
#include "ctcp/model.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace ctcp {

// Taylor expansion of the two-delay model about equilibrium, kappa excluded.
// Set 1 is expanded in a = u1(t), b = u1(t-tau1), d = u2(t-tau2); set 2 in
// c = u2(t), b, d. coef(s, i, j, l) multiplies x^i b^j d^l with x the set's
// own current deviation (a or c); total degree 1 to 3.
struct TaylorCoefficients {
    std::array<double, 2 * 64> c{};
    double w1 = 0, w2 = 0;
    double tau1 = 0, tau2 = 0;

    double coef(int set, int i, int j, int l) const { return c[set * 64 + i * 16 + j * 4 + l]; }
    double& coef(int set, int i, int j, int l) { return c[set * 64 + i * 16 + j * 4 + l]; }

    JacobianEntries linear() const;
    // ("xi_abd", value) style list for every stored coefficient.
    std::vector<std::pair<std::string, double>> named() const;
    // Multiplies every second- and third-order coefficient by s.
    void scale_nonlinear(double s);
};

TaylorCoefficients taylor_expand(const TopologyConfig& cfg, const EquilibriumPoint& eq);

DelaySystem delay_system(const TaylorCoefficients& tc);

// Critical eigenvectors. q(theta) = q0 e^{i omega theta} with q0 = (1, phi1);
// adjoint p(s) = p0 e^{i omega s} with p0 = D (phi2, 1).
struct EigenData {
    double omega0 = 0;
    double kappa = 0;
    cplx phi1, phi2, D;
    std::array<cplx, 2> q0{}, p0{};
    cplx ip_pq, ip_pqbar;  // bilinear form by quadrature
    double eigen_residual = 0; // |Delta(i omega) q0|
};

// Pass a negative omega0 in `cr` for the conjugate data.
EigenData eigen_data(const TaylorCoefficients& tc, const CrossingResult& cr);

// Bilinear form <psi, phi> for psi(s) = p e^{mu s}, phi(theta) = q e^{nu theta},
// evaluated by Gauss-Legendre quadrature over each delay interval.
cplx bilinear_form(const DelaySystem& sys, double kappa, const std::array<cplx, 2>& p, cplx mu,
                   const std::array<cplx, 2>& q, cplx nu);

// Vector function sum_k v_k e^{lambda_k theta} on [-tau_max, 0].
struct ExpSum {
    std::vector<std::pair<cplx, std::array<cplx, 2>>> terms;

    std::array<cplx, 2> operator()(double theta) const;
    std::array<cplx, 2> derivative(double theta) const;
};

struct GCoefficients {
    cplx g20, g11, g02, g21;
    // Second-order parts of the nonlinearity at theta = 0.
    std::array<cplx, 2> F20{}, F11{};
};

// g20, g11, g02 (g21 left zero).
GCoefficients g_coefficients(const EigenData& ed, const TaylorCoefficients& tc);

struct CenterManifold {
    std::array<cplx, 2> e{}, f{};
    ExpSum w20, w11;
    double residual = 0;  // worst relative residual of the defining relations
    double det_e = 0;     // |det Delta(2 i omega)|
    double det_f = 0;     // |det Delta(0)|
};

CenterManifold center_manifold_solve(const EigenData& ed, const TaylorCoefficients& tc,
                                     const GCoefficients& g);

// Fills g.g21 using the center-manifold terms.
void g21_coefficient(const EigenData& ed, const TaylorCoefficients& tc, const CenterManifold& cm,
                     GCoefficients& g);

struct HopfMetrics {
    cplx g20, g11, g02, g21;
    cplx c1;
    double alpha_prime = 0;
    double mu2 = 0;
    double beta2 = 0;
    bool supercritical = false;
    bool orbitally_stable = false;
};

HopfMetrics lyapunov_metrics(cplx g20, cplx g11, cplx g02, cplx g21, double alpha_prime,
                             double omega0);

struct HopfAnalysis {
    TopologyConfig cfg;
    EquilibriumPoint eq;
    LinearCoefficients lc;
    CrossingResult crossing;
    TaylorCoefficients taylor;
    EigenData eigen;
    GCoefficients g;
    CenterManifold cm;
    HopfMetrics metrics;
};

// Full pipeline at the first crossing of the two-delay Case III model.
// `nonlinearity` scales the second- and third-order Taylor terms.
HopfAnalysis analyze_hopf(const TopologyConfig& cfg, double kappa_max = 10,
                          double nonlinearity = 1);

// Peak-to-peak of w2 on the bifurcating cycle at kappa, to leading order.
double predicted_amplitude(const HopfAnalysis& h, double kappa);

} // namespace ctcp
