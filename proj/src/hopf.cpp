#include "ctcp/hopf.hpp"

#include "ctcp/error.hpp"
#include "ctcp/format.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ctcp {

namespace {

constexpr cplx I{0, 1};

double factorial(int n)
{
    double r = 1;
    for (int j = 2; j <= n; ++j)
        r *= j;
    return r;
}

using Vec2 = std::array<cplx, 2>;

Vec2 conj(const Vec2& v) { return {std::conj(v[0]), std::conj(v[1])}; }
Vec2 operator*(cplx s, const Vec2& v) { return {s * v[0], s * v[1]}; }
Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
double norm(const Vec2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

struct Mat2 {
    cplx m[4];
    Vec2 operator*(const Vec2& v) const { return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]}; }
};

// A(lambda) = sum_k A_k e^{-lambda tau_k}
Mat2 delayed(const DelaySystem& sys, cplx lambda)
{
    Mat2 r{};
    for (size_t k = 0; k < sys.mats.size(); ++k) {
        const cplx e = std::exp(-lambda * sys.delays[k]);
        for (int j = 0; j < 4; ++j)
            r.m[j] += sys.mats[k][j] * e;
    }
    return r;
}

// Delta(lambda) = lambda I - kappa A(lambda)
Mat2 delta(const DelaySystem& sys, double kappa, cplx lambda)
{
    Mat2 r = delayed(sys, lambda);
    for (auto& x : r.m)
        x *= -kappa;
    r.m[0] += lambda;
    r.m[3] += lambda;
    return r;
}

// Cramer's rule with a condition-number guard.
Vec2 solve2(const Mat2& A, const Vec2& rhs, const char* what, double& det_abs)
{
    const cplx det = A.m[0] * A.m[3] - A.m[1] * A.m[2];
    det_abs = std::abs(det);
    const double na = std::max(std::abs(A.m[0]) + std::abs(A.m[1]), std::abs(A.m[2]) + std::abs(A.m[3]));
    const double nadj = std::max(std::abs(A.m[3]) + std::abs(A.m[1]), std::abs(A.m[2]) + std::abs(A.m[0]));
    const double cond = det_abs > 0 ? na * nadj / det_abs : INFINITY;
    if (!(cond < 1e12))
        fail(ErrorKind::Singular, std::string(what) + " is singular (condition " + fmt(cond) + ")");
    return {(rhs[0] * A.m[3] - A.m[1] * rhs[1]) / det, (A.m[0] * rhs[1] - rhs[0] * A.m[2]) / det};
}

// Polynomial in z and zbar truncated at total degree 3.
struct ZPoly {
    cplx c[4][4]{};

    ZPoly operator+(const ZPoly& o) const
    {
        ZPoly r;
        for (int m = 0; m < 4; ++m)
            for (int n = 0; m + n < 4; ++n)
                r.c[m][n] = c[m][n] + o.c[m][n];
        return r;
    }
    ZPoly operator*(const ZPoly& o) const
    {
        ZPoly r;
        for (int m1 = 0; m1 < 4; ++m1)
            for (int n1 = 0; m1 + n1 < 4; ++n1) {
                if (c[m1][n1] == 0.0)
                    continue;
                for (int m2 = 0; m1 + n1 + m2 < 4; ++m2)
                    for (int n2 = 0; m1 + n1 + m2 + n2 < 4; ++n2)
                        r.c[m1 + m2][n1 + n2] += c[m1][n1] * o.c[m2][n2];
            }
        return r;
    }
    ZPoly operator*(cplx s) const
    {
        ZPoly r;
        for (int m = 0; m < 4; ++m)
            for (int n = 0; m + n < 4; ++n)
                r.c[m][n] = c[m][n] * s;
        return r;
    }
};

// One sample u(theta) of the state on the center manifold, per component.
std::array<ZPoly, 2> sample(const EigenData& ed, const CenterManifold* cm, double theta)
{
    const cplx e = std::exp(I * ed.omega0 * theta);
    std::array<ZPoly, 2> u;
    Vec2 w20{}, w11{};
    if (cm) {
        w20 = cm->w20(theta);
        w11 = cm->w11(theta);
    }
    for (int j = 0; j < 2; ++j) {
        u[j].c[1][0] = ed.q0[j] * e;
        u[j].c[0][1] = std::conj(ed.q0[j] * e);
        // w = w20 z^2/2 + w11 z zbar + w02 zbar^2/2 with w02 = conj(w20)
        u[j].c[2][0] = w20[j] / 2.0;
        u[j].c[1][1] = w11[j];
        u[j].c[0][2] = std::conj(w20[j]) / 2.0;
    }
    return u;
}

// kappa times the nonlinear part of each equation, composed with the samples.
std::array<ZPoly, 2> nonlinearity(const EigenData& ed, const TaylorCoefficients& tc,
                                  const CenterManifold* cm)
{
    const auto u0 = sample(ed, cm, 0);
    const auto u1 = sample(ed, cm, -tc.tau1);
    const auto u2 = sample(ed, cm, -tc.tau2);
    // Variables: set 1 uses (u1(0), u1(-tau1), u2(-tau2)); set 2 (u2(0), u1(-tau1), u2(-tau2)).
    const ZPoly vars[2][3] = {{u0[0], u1[0], u2[1]}, {u0[1], u1[0], u2[1]}};
    std::array<ZPoly, 2> out;
    for (int s = 0; s < 2; ++s) {
        ZPoly pw[3][4];
        for (int v = 0; v < 3; ++v) {
            pw[v][0].c[0][0] = 1;
            for (int e = 1; e < 4; ++e)
                pw[v][e] = pw[v][e - 1] * vars[s][v];
        }
        for (int i = 0; i < 4; ++i)
            for (int j = 0; i + j < 4; ++j)
                for (int l = 0; i + j + l < 4; ++l) {
                    if (i + j + l < 2)
                        continue;
                    const double c = tc.coef(s, i, j, l);
                    if (c != 0)
                        out[s] = out[s] + pw[0][i] * pw[1][j] * pw[2][l] * cplx(ed.kappa * c);
                }
    }
    return out;
}

ZPoly project(const EigenData& ed, const std::array<ZPoly, 2>& F)
{
    return F[0] * std::conj(ed.p0[0]) + F[1] * std::conj(ed.p0[1]);
}

// Gauss-Legendre nodes and weights on [-1, 1].
struct Gauss {
    std::vector<double> x, w;
    explicit Gauss(int n)
    {
        for (int i = 1; i <= n; ++i) {
            double z = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
            double dp = 0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = z;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (z * p1 - p0) / (z * z - 1);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16)
                    break;
            }
            x.push_back(z);
            w.push_back(2 / ((1 - z * z) * dp * dp));
        }
    }
};

} // namespace

JacobianEntries TaylorCoefficients::linear() const
{
    JacobianEntries j;
    j.xi_a = coef(0, 1, 0, 0);
    j.xi_b = coef(0, 0, 1, 0);
    j.xi_d = coef(0, 0, 0, 1);
    j.chi_c = coef(1, 1, 0, 0);
    j.chi_b = coef(1, 0, 1, 0);
    j.chi_d = coef(1, 0, 0, 1);
    return j;
}

std::vector<std::pair<std::string, double>> TaylorCoefficients::named() const
{
    std::vector<std::pair<std::string, double>> out;
    for (int s = 0; s < 2; ++s)
        for (int deg = 1; deg <= 3; ++deg)
            for (int i = deg; i >= 0; --i)
                for (int j = deg - i; j >= 0; --j) {
                    const int l = deg - i - j;
                    std::string name = s == 0 ? "xi_" : "chi_";
                    if (s == 0)
                        name += std::string(i, 'a') + std::string(j, 'b') + std::string(l, 'd');
                    else
                        name += std::string(j, 'b') + std::string(i, 'c') + std::string(l, 'd');
                    out.emplace_back(name, coef(s, i, j, l));
                }
    return out;
}

void TaylorCoefficients::scale_nonlinear(double s)
{
    for (int set = 0; set < 2; ++set)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; i + j < 4; ++j)
                for (int l = 0; i + j + l < 4; ++l)
                    if (i + j + l >= 2)
                        coef(set, i, j, l) *= s;
}

TaylorCoefficients taylor_expand(const TopologyConfig& cfg, const EquilibriumPoint& eq)
{
    cfg.validate();
    const LossStructure ls = loss_structure(cfg);
    TaylorCoefficients tc;
    tc.w1 = eq.w1;
    tc.w2 = eq.w2;
    tc.tau1 = cfg.tau1;
    tc.tau2 = cfg.tau2;
    for (int s = 0; s < 2; ++s) {
        const double x = s == 0 ? eq.w1 : eq.w2;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; i + j < 4; ++j)
                for (int l = 0; i + j + l < 4; ++l) {
                    if (i + j + l == 0)
                        continue;
                    tc.coef(s, i, j, l) = rhs_partial(cfg, ls, s, x, eq.w1, eq.w2, i, j, l) /
                                          (factorial(i) * factorial(j) * factorial(l));
                }
    }
    for (double v : tc.c)
        if (!std::isfinite(v))
            fail(ErrorKind::Numeric, "non-finite Taylor coefficient");
    return tc;
}

DelaySystem delay_system(const TaylorCoefficients& tc)
{
    LinearCoefficients lc;
    lc.tau1 = tc.tau1;
    lc.tau2 = tc.tau2;
    lc.jac = tc.linear();
    return two_delay_system(lc);
}

cplx bilinear_form(const DelaySystem& sys, double kappa, const std::array<cplx, 2>& p, cplx mu,
                   const std::array<cplx, 2>& q, cplx nu)
{
    static const Gauss gauss(24);
    auto psibar = [&](double s) { return conj(std::exp(mu * s) * p); };
    auto phi = [&](double th) { return std::exp(nu * th) * q; };
    auto dot = [](const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; };

    cplx total = dot(psibar(0), phi(0));
    for (size_t k = 0; k < sys.mats.size(); ++k) {
        const double tau = sys.delays[k];
        if (tau == 0)
            continue;
        Mat2 A{};
        for (int j = 0; j < 4; ++j)
            A.m[j] = kappa * sys.mats[k][j];
        constexpr int panels = 8;
        const double h = tau / panels;
        for (int pn = 0; pn < panels; ++pn) {
            const double lo = -tau + pn * h;
            for (size_t g = 0; g < gauss.x.size(); ++g) {
                const double xi = lo + 0.5 * h * (gauss.x[g] + 1);
                total += 0.5 * h * gauss.w[g] * dot(psibar(xi + tau), A * phi(xi));
            }
        }
    }
    return total;
}

std::array<cplx, 2> ExpSum::operator()(double theta) const
{
    Vec2 r{};
    for (const auto& [lam, v] : terms)
        r = r + std::exp(lam * theta) * v;
    return r;
}

std::array<cplx, 2> ExpSum::derivative(double theta) const
{
    Vec2 r{};
    for (const auto& [lam, v] : terms)
        r = r + (lam * std::exp(lam * theta)) * v;
    return r;
}

EigenData eigen_data(const TaylorCoefficients& tc, const CrossingResult& cr)
{
    const JacobianEntries J = tc.linear();
    const DelaySystem sys = delay_system(tc);
    const double w = cr.omega0, k = cr.kappa_c;
    const cplx e1 = std::exp(-I * w * tc.tau1), e2 = std::exp(-I * w * tc.tau2);

    EigenData ed;
    ed.omega0 = w;
    ed.kappa = k;
    const cplx den1 = k * J.chi_c + k * J.chi_d * e2 - I * w;
    const cplx den2 = k * J.xi_a + k * J.xi_b * e1 - I * w;
    if (std::abs(den1) < 1e-14 || std::abs(den2) < 1e-14)
        fail(ErrorKind::Singular, "degenerate critical eigenvector");
    ed.phi1 = -k * J.chi_b * e1 / den1;
    ed.phi2 = std::conj(-k * J.chi_b * e1 / den2);
    ed.q0 = {1.0, ed.phi1};

    // y Delta(i omega) = 0 with y = (conj(phi2), 1); D fixes <p, q> = 1.
    const Vec2 y = {std::conj(ed.phi2), 1.0};
    Mat2 G{};
    G.m[0] = G.m[3] = 1;
    for (size_t kk = 0; kk < sys.mats.size(); ++kk) {
        const cplx f = sys.delays[kk] * k * std::exp(-I * w * sys.delays[kk]);
        for (int j = 0; j < 4; ++j)
            G.m[j] += f * sys.mats[kk][j];
    }
    const Vec2 Gq = G * ed.q0;
    const cplx Dbar = 1.0 / (y[0] * Gq[0] + y[1] * Gq[1]);
    ed.D = std::conj(Dbar);
    ed.p0 = {ed.D * ed.phi2, ed.D};

    const Mat2 Dl = delta(sys, k, I * w);
    const Vec2 r = Dl * ed.q0;
    const Vec2 pb = conj(ed.p0);
    const Vec2 l = {pb[0] * Dl.m[0] + pb[1] * Dl.m[2], pb[0] * Dl.m[1] + pb[1] * Dl.m[3]};
    ed.eigen_residual = std::max(norm(r), norm(l) / std::abs(ed.D));

    ed.ip_pq = bilinear_form(sys, k, ed.p0, I * w, ed.q0, I * w);
    ed.ip_pqbar = bilinear_form(sys, k, ed.p0, I * w, conj(ed.q0), -I * w);
    if (ed.eigen_residual > 1e-10)
        fail(ErrorKind::Numeric, "critical eigenvector residual " + fmt(ed.eigen_residual));
    if (std::abs(ed.ip_pq - 1.0) > 1e-10 || std::abs(ed.ip_pqbar) > 1e-10)
        fail(ErrorKind::Numeric, "eigenvector normalisation failed: <p,q>-1 = " +
                                     fmt(std::abs(ed.ip_pq - 1.0)) + ", <p,qbar> = " +
                                     fmt(std::abs(ed.ip_pqbar)));
    return ed;
}

GCoefficients g_coefficients(const EigenData& ed, const TaylorCoefficients& tc)
{
    const auto F = nonlinearity(ed, tc, nullptr);
    const ZPoly g = project(ed, F);
    GCoefficients out;
    out.g20 = 2.0 * g.c[2][0];
    out.g11 = g.c[1][1];
    out.g02 = 2.0 * g.c[0][2];
    out.F20 = {2.0 * F[0].c[2][0], 2.0 * F[1].c[2][0]};
    out.F11 = {F[0].c[1][1], F[1].c[1][1]};
    return out;
}

CenterManifold center_manifold_solve(const EigenData& ed, const TaylorCoefficients& tc,
                                     const GCoefficients& g)
{
    const DelaySystem sys = delay_system(tc);
    const double w = ed.omega0, k = ed.kappa;
    const Vec2 q = ed.q0, qb = conj(ed.q0);

    CenterManifold cm;
    cm.e = solve2(delta(sys, k, 2.0 * I * w), g.F20, "Delta(2 i omega)", cm.det_e);
    cm.f = solve2(delta(sys, k, 0.0), g.F11, "Delta(0)", cm.det_f);
    cm.w20.terms = {{I * w, (I * g.g20 / w) * q},
                    {-I * w, (I * std::conj(g.g02) / (3 * w)) * qb},
                    {2.0 * I * w, cm.e}};
    cm.w11.terms = {{I * w, (-I * g.g11 / w) * q}, {-I * w, (I * std::conj(g.g11) / w) * qb}, {0.0, cm.f}};

    // (2 i omega - A) w20 = H20 and -A w11 = H11, A the generator.
    auto Aw0 = [&](const ExpSum& f) {
        Vec2 r{};
        for (size_t kk = 0; kk < sys.mats.size(); ++kk) {
            const Vec2 v = f(-sys.delays[kk]);
            const auto& M = sys.mats[kk];
            r = r + Vec2{k * (M[0] * v[0] + M[1] * v[1]), k * (M[2] * v[0] + M[3] * v[1])};
        }
        return r;
    };
    auto H = [&](cplx ga, cplx gb, double th) {
        return (-ga * std::exp(I * w * th)) * q + (-gb * std::exp(-I * w * th)) * qb;
    };
    const double scale = std::max({std::abs(g.g20) * norm(q), std::abs(g.g02) * norm(q),
                                   std::abs(g.g11) * norm(q), norm(g.F20), norm(g.F11), 1e-300});
    double worst = 0;
    const Vec2 r20 = (2.0 * I * w) * cm.w20(0) - Aw0(cm.w20) - (H(g.g20, std::conj(g.g02), 0) + g.F20);
    const Vec2 r11 = Vec2{} - Aw0(cm.w11) - (H(g.g11, std::conj(g.g11), 0) + g.F11);
    worst = std::max({worst, norm(r20), norm(r11)});
    for (double th : {-tc.tau1, -tc.tau2}) {
        const Vec2 a = (2.0 * I * w) * cm.w20(th) - cm.w20.derivative(th) - H(g.g20, std::conj(g.g02), th);
        const Vec2 b = Vec2{} - cm.w11.derivative(th) - H(g.g11, std::conj(g.g11), th);
        worst = std::max({worst, norm(a), norm(b)});
    }
    cm.residual = worst / scale;
    if (cm.residual > 1e-9)
        fail(ErrorKind::Numeric, "center-manifold residual " + fmt(cm.residual));
    return cm;
}

void g21_coefficient(const EigenData& ed, const TaylorCoefficients& tc, const CenterManifold& cm,
                     GCoefficients& g)
{
    const ZPoly full = project(ed, nonlinearity(ed, tc, &cm));
    g.g21 = 2.0 * full.c[2][1];
}

HopfMetrics lyapunov_metrics(cplx g20, cplx g11, cplx g02, cplx g21, double alpha_prime,
                             double omega0)
{
    if (alpha_prime == 0)
        fail(ErrorKind::Singular, "alpha'(0) = 0: transversality fails");
    HopfMetrics m;
    m.g20 = g20;
    m.g11 = g11;
    m.g02 = g02;
    m.g21 = g21;
    m.alpha_prime = alpha_prime;
    m.c1 = I / (2 * omega0) * (g20 * g11 - 2.0 * std::norm(g11) - std::norm(g02) / 3.0) + g21 / 2.0;
    m.mu2 = -m.c1.real() / alpha_prime;
    m.beta2 = 2 * m.c1.real();
    m.supercritical = m.mu2 > 0;
    m.orbitally_stable = m.beta2 < 0;
    return m;
}

HopfAnalysis analyze_hopf(const TopologyConfig& cfg, double kappa_max, double nonlinearity)
{
    HopfAnalysis h;
    h.cfg = cfg;
    h.eq = solve_equilibrium(cfg);
    h.lc = linearize(cfg, h.eq);
    h.taylor = taylor_expand(cfg, h.eq);
    const DelaySystem sys = delay_system(h.taylor);
    h.crossing = locate_crossing(sys, kappa_max);
    const double ap = eigenvalue_velocity(sys, h.crossing).real();
    h.taylor.scale_nonlinear(nonlinearity);
    h.eigen = eigen_data(h.taylor, h.crossing);
    h.g = g_coefficients(h.eigen, h.taylor);
    h.cm = center_manifold_solve(h.eigen, h.taylor, h.g);
    g21_coefficient(h.eigen, h.taylor, h.cm, h.g);
    h.metrics = lyapunov_metrics(h.g.g20, h.g.g11, h.g.g02, h.g.g21, ap, h.crossing.omega0);
    return h;
}

double predicted_amplitude(const HopfAnalysis& h, double kappa)
{
    const double mu = kappa - h.crossing.kappa_c;
    if (h.metrics.mu2 == 0 || mu / h.metrics.mu2 <= 0)
        return 0;
    return 4 * std::abs(h.eigen.q0[1]) * std::sqrt(mu / h.metrics.mu2);
}

} // namespace ctcp
