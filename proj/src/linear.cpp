#include "ctcp/linear.hpp"

#include "ctcp/error.hpp"
#include "ctcp/format.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

namespace ctcp {

namespace {

constexpr double pi = std::numbers::pi;

struct SetTerms {
    double w, tau, h; // window, delay, i + d at equilibrium
};

SetTerms set_terms(const TopologyConfig& cfg, const EquilibriumPoint& eq, int s)
{
    const auto& p = cfg.protocol;
    const double w = s == 0 ? eq.w1 : eq.w2;
    return {w, s == 0 ? cfg.tau1 : cfg.tau2, p.alpha * std::pow(w, p.k - 1) + p.beta * w};
}

} // namespace

LinearCoefficients linearize(const TopologyConfig& cfg, const EquilibriumPoint& eq)
{
    cfg.validate();
    if (!(eq.w1 > 0 && eq.w2 > 0))
        fail(ErrorKind::Usage, "linearize needs a solved equilibrium");
    LinearCoefficients lc;
    lc.topology = cfg.topology();
    lc.tau1 = cfg.tau1;
    lc.tau2 = cfg.tau2;
    const auto& p = cfg.protocol;
    const double s = eq.w1 / cfg.tau1 + eq.w2 / cfg.tau2;
    const double t12 = cfg.tau1 * cfg.tau2;

    double M[2], N[2], P[2];
    for (int j = 0; j < 2; ++j) {
        const SetTerms st = set_terms(cfg, eq, j);
        M[j] = -(p.alpha / st.tau) * (p.k - 2) * std::pow(st.w, p.k - 1) * (1 - eq.total_loss[j]);
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, CaseINetwork>) {
                    const double g = n.b * std::pow(s, n.b - 1) / std::pow(n.c, n.b);
                    N[j] = st.h * st.w / (st.tau * st.tau) * g;
                    P[j] = st.h * st.w / t12 * g;
                } else if constexpr (std::is_same_v<T, CaseIINetwork>) {
                    const double g = n.b1 * std::pow(s, n.b1 - 1) / std::pow(n.c1, n.b1) +
                                     n.b2 * std::pow(s, n.b2 - 1) / std::pow(n.c2, n.b2);
                    N[j] = st.h * st.w / (st.tau * st.tau) * g;
                    P[j] = st.h * st.w / t12 * g;
                } else {
                    const double bj = j == 0 ? n.b1 : n.b2;
                    const double cj = j == 0 ? n.c1 : n.c2;
                    const double g = n.b * std::pow(s, n.b - 1) / std::pow(n.c, n.b);
                    N[j] = st.h * (bj / st.tau * std::pow(st.w / (cj * st.tau), bj) +
                                   st.w / (st.tau * st.tau) * g);
                    P[j] = st.h * st.w / t12 * g;
                }
            },
            cfg.network);
    }
    lc.M1 = M[0];
    lc.M2 = M[1];
    lc.N1 = N[0];
    lc.N2 = N[1];
    lc.P1 = P[0];
    lc.P2 = P[1];
    lc.a = lc.M1 + lc.M2 + lc.N2;
    lc.b = lc.N1;
    lc.c = lc.M1 * (lc.M2 + lc.N2);
    lc.d = lc.N1 * (lc.M2 + lc.N2) - lc.P1 * lc.P2;

    const LossStructure ls = loss_structure(cfg);
    const double w1 = eq.w1, w2 = eq.w2;
    auto& J = lc.jac;
    J.xi_a = rhs_partial(cfg, ls, 0, w1, w1, w2, 1, 0, 0);
    J.xi_b = rhs_partial(cfg, ls, 0, w1, w1, w2, 0, 1, 0);
    J.xi_d = rhs_partial(cfg, ls, 0, w1, w1, w2, 0, 0, 1);
    J.chi_c = rhs_partial(cfg, ls, 1, w2, w1, w2, 1, 0, 0);
    J.chi_d = rhs_partial(cfg, ls, 1, w2, w1, w2, 0, 0, 1);
    J.chi_b = rhs_partial(cfg, ls, 1, w2, w1, w2, 0, 1, 0);
    return lc;
}

cplx characteristic_fn(const LinearCoefficients& lc, cplx lambda, double kappa)
{
    const cplx e = std::exp(-lambda * lc.tau1);
    return lambda * lambda + kappa * lc.a * lambda + kappa * lc.b * lambda * e +
           kappa * kappa * lc.c + kappa * kappa * lc.d * e;
}

const char* condition_name(ConditionClass c)
{
    switch (c) {
    case ConditionClass::OnePositiveRoot: return "OnePositiveRoot";
    case ConditionClass::TwoPositiveRoots: return "TwoPositiveRoots";
    case ConditionClass::NoCrossing: return "NoCrossing";
    }
    return "?";
}

FrequencyResult crossing_frequency(const LinearCoefficients& lc)
{
    // omega^2 / kappa^2 = x solves x^2 - S x + P = 0.
    FrequencyResult fr;
    fr.S = 2 * lc.c - lc.a * lc.a + lc.b * lc.b;
    fr.P = lc.c * lc.c - lc.d * lc.d;
    const double disc = fr.S * fr.S - 4 * fr.P;
    const double scale = std::max({fr.S * fr.S, 4 * std::abs(fr.P), 1e-300});
    if (fr.P < 0) {
        fr.cls = ConditionClass::OnePositiveRoot;
        fr.A = std::sqrt((fr.S + std::sqrt(disc)) / 2);
    } else if (std::abs(disc) <= 1e-9 * scale && fr.S > 0) {
        fr.cls = ConditionClass::OnePositiveRoot;
        fr.A = std::sqrt(fr.S / 2);
    } else if (fr.P == 0 && fr.S > 0) {
        fr.cls = ConditionClass::OnePositiveRoot;
        fr.A = std::sqrt(fr.S);
    } else if (fr.S > 0 && disc > 0) {
        fr.cls = ConditionClass::TwoPositiveRoots;
        fr.A = std::sqrt((fr.S + std::sqrt(disc)) / 2);
        fr.A_second = std::sqrt((fr.S - std::sqrt(disc)) / 2);
    }
    return fr;
}

CrossingResult kappa_critical_closed_form(const LinearCoefficients& lc)
{
    const FrequencyResult fr = crossing_frequency(lc);
    if (fr.cls != ConditionClass::OnePositiveRoot)
        fail(ErrorKind::Usage, std::string("closed-form kappa_c needs OnePositiveRoot, class is ") +
                                   condition_name(fr.cls));
    const double A = fr.A;
    const double den = lc.b * lc.b * A * A + lc.d * lc.d;
    const double arg = (A * A * (lc.d - lc.a * lc.b) - lc.c * lc.d) / den;
    if (!(std::abs(arg) <= 1 + 1e-12))
        fail(ErrorKind::Numeric, "arccos argument " + fmt(arg) + " outside [-1,1] (A=" + fmt(A) +
                                     ", a=" + fmt(lc.a) + ", b=" + fmt(lc.b) + ", c=" + fmt(lc.c) +
                                     ", d=" + fmt(lc.d) + ")");
    const double theta = std::acos(std::clamp(arg, -1.0, 1.0));
    CrossingResult best;
    best.kappa_c = std::numeric_limits<double>::infinity();
    for (double th : {theta, 2 * pi - theta}) {
        const double kc = th / (A * lc.tau1);
        if (!(kc > 0))
            continue;
        const double res = std::abs(characteristic_fn(lc, cplx(0, kc * A), kc));
        if (res < 1e-8 && kc < best.kappa_c) {
            best.kappa_c = kc;
            best.omega0 = kc * A;
            best.residual = res;
        }
    }
    if (!std::isfinite(best.kappa_c))
        fail(ErrorKind::Numeric, "neither arccos branch satisfies the characteristic equation");
    best.condition_class = fr.cls;
    return best;
}

DelaySystem two_delay_system(const LinearCoefficients& lc)
{
    const auto& J = lc.jac;
    DelaySystem s;
    s.n = 2;
    s.delays = {0, lc.tau1, lc.tau2};
    s.mats = {{J.xi_a, 0, 0, J.chi_c}, {J.xi_b, 0, J.chi_b, 0}, {0, J.xi_d, 0, J.chi_d}};
    return s;
}

DelaySystem reduced_system(const LinearCoefficients& lc)
{
    DelaySystem s;
    s.n = 2;
    s.delays = {0, lc.tau1};
    s.mats = {{-lc.M1, -lc.P1, 0, -(lc.M2 + lc.N2)}, {-lc.N1, 0, -lc.P2, 0}};
    return s;
}

DelaySystem scalar_system(double M, double N, double tau)
{
    DelaySystem s;
    s.n = 1;
    s.delays = {0, tau};
    s.mats = {{-M, 0, 0, 0}, {-N, 0, 0, 0}};
    return s;
}

namespace {

struct DelayedMatrix {
    std::array<cplx, 4> A{}, dA{};
};

DelayedMatrix delayed_matrix(const DelaySystem& sys, cplx lambda)
{
    DelayedMatrix m;
    for (size_t k = 0; k < sys.mats.size(); ++k) {
        const cplx e = std::exp(-lambda * sys.delays[k]);
        for (int j = 0; j < 4; ++j) {
            m.A[j] += sys.mats[k][j] * e;
            m.dA[j] += -sys.delays[k] * sys.mats[k][j] * e;
        }
    }
    return m;
}

} // namespace

CharDerivs char_derivs(const DelaySystem& sys, cplx lambda, double kappa)
{
    const DelayedMatrix m = delayed_matrix(sys, lambda);
    CharDerivs r;
    if (sys.n == 1) {
        r.F = lambda - kappa * m.A[0];
        r.F_lambda = 1.0 - kappa * m.dA[0];
        r.F_kappa = -m.A[0];
        return r;
    }
    const auto& A = m.A;
    const auto& D = m.dA;
    const cplx tr = A[0] + A[3];
    const cplx det = A[0] * A[3] - A[1] * A[2];
    const cplx dtr = D[0] + D[3];
    const cplx ddet = D[0] * A[3] + A[0] * D[3] - D[1] * A[2] - A[1] * D[2];
    r.F = lambda * lambda - kappa * lambda * tr + kappa * kappa * det;
    r.F_lambda = 2.0 * lambda - kappa * tr - kappa * lambda * dtr + kappa * kappa * ddet;
    r.F_kappa = -lambda * tr + 2.0 * kappa * det;
    return r;
}

cplx char_det(const DelaySystem& sys, cplx lambda, double kappa)
{
    return char_derivs(sys, lambda, kappa).F;
}

double root_radius(const DelaySystem& sys, double kappa)
{
    double sum = 0;
    for (const auto& M : sys.mats)
        sum += sys.n == 1 ? std::abs(M[0])
                          : std::max(std::abs(M[0]) + std::abs(M[1]), std::abs(M[2]) + std::abs(M[3]));
    return kappa * sum * 1.05 + 1e-9;
}

namespace {

struct ArgWalker {
    const std::function<cplx(cplx)>& F;
    double tiny;

    cplx eval(cplx z) const
    {
        const cplx f = F(z);
        if (!std::isfinite(f.real()) || !std::isfinite(f.imag()) || std::abs(f) <= tiny)
            fail(ErrorKind::Numeric, "characteristic function vanishes on the counting contour near " +
                                         fmt(z.real()) + (z.imag() < 0 ? "" : "+") + fmt(z.imag()) + "i");
        return f;
    }

    double arc(cplx z0, cplx f0, cplx z1, cplx f1, int depth) const
    {
        const double d = std::arg(f1 / f0);
        if (std::abs(d) < pi / 4)
            return d;
        if (depth > 60)
            fail(ErrorKind::Numeric, "argument tracking did not resolve near a contour point");
        const cplx zm = 0.5 * (z0 + z1);
        const cplx fm = eval(zm);
        return arc(z0, f0, zm, fm, depth + 1) + arc(zm, fm, z1, f1, depth + 1);
    }
};

} // namespace

int count_zeros(const std::function<cplx(cplx)>& F, double re_lo, double re_hi, double im_lo,
                double im_hi)
{
    const cplx corners[5] = {{re_lo, im_lo}, {re_hi, im_lo}, {re_hi, im_hi}, {re_lo, im_hi},
                             {re_lo, im_lo}};
    ArgWalker walker{F, 0};
    double total = 0;
    constexpr int pieces = 64;
    for (int e = 0; e < 4; ++e) {
        cplx z0 = corners[e];
        cplx f0 = walker.eval(z0);
        for (int j = 1; j <= pieces; ++j) {
            const cplx z1 = corners[e] + (corners[e + 1] - corners[e]) * (double(j) / pieces);
            const cplx f1 = walker.eval(z1);
            total += walker.arc(z0, f0, z1, f1, 0);
            z0 = z1;
            f0 = f1;
        }
    }
    const double turns = total / (2 * pi);
    const double n = std::round(turns);
    if (std::abs(turns - n) > 1e-3)
        fail(ErrorKind::Numeric, "winding number " + fmt(turns) + " is not an integer");
    return static_cast<int>(n);
}

int unstable_root_count(const DelaySystem& sys, double kappa)
{
    const double R = root_radius(sys, kappa);
    return count_zeros([&](cplx z) { return char_det(sys, z, kappa); }, 0, R, -R, R);
}

cplx eigenvalue_velocity(const DelaySystem& sys, const CrossingResult& cr)
{
    const CharDerivs d = char_derivs(sys, cplx(0, cr.omega0), cr.kappa_c);
    if (std::abs(d.F_lambda) < 1e-12)
        fail(ErrorKind::Singular, "dF/dlambda vanishes at the crossing (degenerate root)");
    return -d.F_kappa / d.F_lambda;
}

namespace {

// Eigenvalues of A(i omega); a root lambda = i omega exists for real kappa when
// an eigenvalue nu satisfies kappa nu = i omega.
std::array<cplx, 2> eigenvalues(const DelaySystem& sys, double omega)
{
    const DelayedMatrix m = delayed_matrix(sys, cplx(0, omega));
    if (sys.n == 1)
        return {m.A[0], m.A[0]};
    const cplx tr = m.A[0] + m.A[3];
    const cplx det = m.A[0] * m.A[3] - m.A[1] * m.A[2];
    const cplx root = std::sqrt(tr * tr / 4.0 - det);
    return {tr / 2.0 + root, tr / 2.0 - root};
}

bool polish(const DelaySystem& sys, double& kappa, double& omega)
{
    for (int it = 0; it < 60; ++it) {
        const CharDerivs d = char_derivs(sys, cplx(0, omega), kappa);
        const cplx Fo = cplx(0, 1) * d.F_lambda; // dF/domega
        const double a = d.F_kappa.real(), b = Fo.real(), c = d.F_kappa.imag(), e = Fo.imag();
        const double det = a * e - b * c;
        if (!(std::abs(det) > 0))
            return false;
        const double dk = -(e * d.F.real() - b * d.F.imag()) / det;
        const double dw = -(a * d.F.imag() - c * d.F.real()) / det;
        kappa += dk;
        omega += dw;
        if (!(kappa > 0 && omega > 0))
            return false;
        if (std::abs(dk) < 1e-15 * kappa && std::abs(dw) < 1e-15 * omega)
            break;
    }
    const cplx F = char_det(sys, cplx(0, omega), kappa);
    return std::abs(F.real()) < 1e-10 && std::abs(F.imag()) < 1e-10;
}

std::vector<CrossingResult> scan_crossings(const DelaySystem& sys, double kappa_max, int density)
{
    const double tau_max = *std::max_element(sys.delays.begin(), sys.delays.end());
    const double w_hi = root_radius(sys, kappa_max);
    double dw = w_hi / (4000.0 * density);
    if (tau_max > 0)
        dw = std::min(dw, 2 * pi / (tau_max * 64 * density));
    const long steps = std::min<long>(static_cast<long>(std::ceil(w_hi / dw)), 2000000);
    dw = w_hi / steps;

    std::vector<CrossingResult> found;
    auto prev = eigenvalues(sys, dw * 1e-3);
    double prev_w = dw * 1e-3;
    for (long i = 1; i <= steps; ++i) {
        const double w = i * dw;
        auto cur = eigenvalues(sys, w);
        if (sys.n == 2 && std::abs(cur[0] - prev[0]) + std::abs(cur[1] - prev[1]) >
                              std::abs(cur[0] - prev[1]) + std::abs(cur[1] - prev[0]))
            std::swap(cur[0], cur[1]);
        for (int j = 0; j < sys.n; ++j) {
            const double r0 = prev[j].real(), r1 = cur[j].real();
            if ((r0 > 0) == (r1 > 0))
                continue;
            const double t = r0 / (r0 - r1);
            const double wc = prev_w + t * (w - prev_w);
            const double im = prev[j].imag() + t * (cur[j].imag() - prev[j].imag());
            if (!(im > 0))
                continue;
            double kappa = wc / im, omega = wc;
            if (kappa > kappa_max * 1.05)
                continue;
            if (!polish(sys, kappa, omega) || kappa > kappa_max)
                continue;
            bool dup = false;
            for (const auto& f : found)
                dup = dup || (std::abs(f.kappa_c - kappa) < 1e-9 * kappa &&
                              std::abs(f.omega0 - omega) < 1e-9 * omega);
            if (dup)
                continue;
            CrossingResult cr;
            cr.kappa_c = kappa;
            cr.omega0 = omega;
            cr.residual = std::abs(char_det(sys, cplx(0, omega), kappa));
            found.push_back(cr);
        }
        prev = cur;
        prev_w = w;
    }
    std::sort(found.begin(), found.end(),
              [](const CrossingResult& x, const CrossingResult& y) { return x.kappa_c < y.kappa_c; });
    return found;
}

} // namespace

CrossingResult locate_crossing(const DelaySystem& sys, double kappa_max)
{
    if (!(kappa_max > 0))
        fail(ErrorKind::Usage, "kappa_max must be > 0");
    for (int density : {1, 8}) {
        const auto found = scan_crossings(sys, kappa_max, density);
        if (found.empty()) {
            if (unstable_root_count(sys, kappa_max) == 0)
                fail(ErrorKind::NoCrossing, "no crossing for kappa <= " + fmt(kappa_max));
            continue;
        }
        CrossingResult first = found.front();
        if (unstable_root_count(sys, first.kappa_c * (1 - 1e-3)) != 0)
            continue;
        first.condition_class = ConditionClass::OnePositiveRoot;
        for (const auto& f : found)
            if (eigenvalue_velocity(sys, f).real() < 0)
                first.condition_class = ConditionClass::TwoPositiveRoots;
        return first;
    }
    fail(ErrorKind::Numeric, "first crossing could not be certified by root counting");
}

CrossingResult hopf_locate_two_delay(const TopologyConfig& cfg, double kappa_max)
{
    const EquilibriumPoint eq = solve_equilibrium(cfg);
    return locate_crossing(two_delay_system(linearize(cfg, eq)), kappa_max);
}

double transversality(const TopologyConfig& cfg, const CrossingResult& cr)
{
    const EquilibriumPoint eq = solve_equilibrium(cfg);
    return eigenvalue_velocity(two_delay_system(linearize(cfg, eq)), cr).real();
}

Scenario1Result scenario1_conditions(const TopologyConfig& cfg)
{
    const ScalarModel m = scalar_model(cfg);
    const auto& p = m.protocol;
    Scenario1Result r;
    r.w_star = scalar_equilibrium(m);
    r.loss_star = scalar_loss(m, r.w_star);
    const double inc = p.alpha * std::pow(r.w_star, p.k - 1);
    r.M = -(p.alpha / m.tau) * (p.k - 2) * std::pow(r.w_star, p.k - 1) * (1 - r.loss_star);
    r.N = m.buffer * inc / m.tau;
    const double g = (p.k - 2) * (1 - r.loss_star);
    if (r.N > std::abs(r.M)) {
        r.has_crossing = true;
        r.lhs = cfg.kappa * inc * std::sqrt(m.buffer * m.buffer - g * g);
        r.rhs = std::acos(g / m.buffer);
        const double omega_per_kappa = std::sqrt(r.N * r.N - r.M * r.M);
        r.kappa_c = std::acos(-r.M / r.N) / (m.tau * omega_per_kappa);
        r.omega_c = r.kappa_c * omega_per_kappa;
        r.stable = r.lhs < r.rhs;
    } else {
        r.kappa_c = std::numeric_limits<double>::infinity();
        r.stable = true;
    }
    return r;
}

ChartAxis parse_axis(const std::string& s)
{
    if (s == "kappa")
        return ChartAxis::Kappa;
    if (s == "alpha")
        return ChartAxis::Alpha;
    if (s == "k")
        return ChartAxis::K;
    if (s == "B" || s == "b")
        return ChartAxis::B;
    fail(ErrorKind::Usage, "unknown chart axis '" + s + "' (kappa, alpha, k, B)");
}

const char* axis_name(ChartAxis a)
{
    switch (a) {
    case ChartAxis::Kappa: return "kappa";
    case ChartAxis::Alpha: return "alpha";
    case ChartAxis::K: return "k";
    case ChartAxis::B: return "B";
    }
    return "?";
}

void set_axis(TopologyConfig& cfg, ChartAxis axis, double v)
{
    switch (axis) {
    case ChartAxis::Kappa: cfg.kappa = v; break;
    case ChartAxis::Alpha: cfg.protocol.alpha = v; break;
    case ChartAxis::K: cfg.protocol.k = v; break;
    case ChartAxis::B:
        std::visit(
            [v](auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, CaseIINetwork>)
                    n.b1 = n.b2 = v;
                else
                    n.b = v;
            },
            cfg.network);
        break;
    }
}

double get_axis(const TopologyConfig& cfg, ChartAxis axis)
{
    switch (axis) {
    case ChartAxis::Kappa: return cfg.kappa;
    case ChartAxis::Alpha: return cfg.protocol.alpha;
    case ChartAxis::K: return cfg.protocol.k;
    case ChartAxis::B:
        return std::visit(
            [](const auto& n) -> double {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, CaseIINetwork>)
                    return n.b1;
                else
                    return n.b;
            },
            cfg.network);
    }
    return 0;
}

bool locally_stable(const TopologyConfig& cfg, ChartModel model)
{
    const EquilibriumPoint eq = solve_equilibrium(cfg);
    const LinearCoefficients lc = linearize(cfg, eq);
    const DelaySystem sys = model == ChartModel::TwoDelay ? two_delay_system(lc) : reduced_system(lc);
    return unstable_root_count(sys, cfg.kappa) == 0;
}

namespace {

double chart_boundary(TopologyConfig cfg, ChartAxis axis1, double lo, double hi, double tol,
                      ChartModel model)
{
    auto stable_at = [&](double v) {
        set_axis(cfg, axis1, v);
        return locally_stable(cfg, model);
    };
    const bool s_lo = stable_at(lo), s_hi = stable_at(hi);
    if (s_lo == s_hi)
        return std::numeric_limits<double>::quiet_NaN();
    const bool integer = axis1 == ChartAxis::B;
    while (integer ? hi - lo > 1 : hi - lo > tol * std::max(std::abs(lo), std::abs(hi))) {
        double mid = 0.5 * (lo + hi);
        if (integer)
            mid = std::floor(mid);
        (stable_at(mid) == s_lo ? lo : hi) = mid;
    }
    // For buffers the boundary is the last value on the low side.
    return integer ? lo : 0.5 * (lo + hi);
}

} // namespace

ChartResult stability_chart(const TopologyConfig& cfg, ChartAxis axis1, ChartAxis axis2,
                            const std::vector<double>& axis2_values, const ChartOptions& opt)
{
    if (axis1 == axis2)
        fail(ErrorKind::Usage, "chart axes must differ");
    double lo = opt.axis1_lo, hi = opt.axis1_hi;
    if (lo == 0 && hi == 0) {
        switch (axis1) {
        case ChartAxis::Kappa: lo = 1e-3; hi = 10; break;
        case ChartAxis::Alpha: lo = 1e-3; hi = 5; break;
        case ChartAxis::K: lo = 0.01; hi = 0.99; break;
        case ChartAxis::B: lo = 1; hi = 200; break;
        }
    }
    auto one = [&](double v) {
        TopologyConfig c = cfg;
        set_axis(c, axis2, v);
        try {
            return chart_boundary(c, axis1, lo, hi, opt.tol, opt.model);
        } catch (const Error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    ChartResult res;
    res.axis1 = axis1;
    res.axis2 = axis2;
    std::vector<std::future<double>> jobs;
    for (double v : axis2_values)
        jobs.push_back(std::async(opt.parallel ? std::launch::async : std::launch::deferred, one, v));
    for (size_t i = 0; i < axis2_values.size(); ++i)
        res.points.push_back({axis2_values[i], jobs[i].get()});

    int up = 0, down = 0;
    double last = std::numeric_limits<double>::quiet_NaN();
    for (const auto& pt : res.points) {
        if (std::isnan(pt.boundary))
            continue;
        if (!std::isnan(last)) {
            up += pt.boundary > last;
            down += pt.boundary < last;
        }
        last = pt.boundary;
    }
    res.monotonicity = (up > 0 && down == 0) ? 1 : (down > 0 && up == 0) ? -1 : 0;
    return res;
}

} // namespace ctcp
