#include "ctcp/model.hpp"

#include "ctcp/error.hpp"
#include "ctcp/format.hpp"

#include <algorithm>
#include <cmath>

namespace ctcp {

namespace {

bool is_integer(double v)
{
    return std::isfinite(v) && v == std::floor(v);
}

void check_buffer(const char* name, double b)
{
    if (!(b >= 1) || !is_integer(b))
        fail(ErrorKind::Domain, std::string(name) + " must be an integer >= 1, got " + fmt(b));
}

void check_positive(const char* name, double v)
{
    if (!(v > 0) || !std::isfinite(v))
        fail(ErrorKind::Domain, std::string(name) + " must be > 0, got " + fmt(v));
}

// x(x-1)...(x-n+1)
double falling(double x, int n)
{
    double r = 1;
    for (int j = 0; j < n; ++j)
        r *= x - j;
    return r;
}

// n-th derivative of the increase law.
double increase_deriv(double w, const ProtocolParams& p, int n)
{
    return p.alpha * falling(p.k - 1, n) * std::pow(w, p.k - 1 - n);
}

// n-th derivative of increase + decrease.
double total_deriv(double w, const ProtocolParams& p, int n)
{
    double v = increase_deriv(w, p, n);
    if (n == 0)
        v += p.beta * w;
    else if (n == 1)
        v += p.beta;
    return v;
}

double set_loss(const LossStructure& ls, int set, double x1, double x2)
{
    double l = 0;
    for (int t : ls.seen_by[set])
        l += loss_term_value(ls.terms[t], x1, x2);
    return l;
}

double set_loss_partial(const LossStructure& ls, int set, double x1, double x2, int m1, int m2)
{
    double l = 0;
    for (int t : ls.seen_by[set])
        l += loss_term_partial(ls.terms[t], x1, x2, m1, m2);
    return l;
}

double set_capacity(const TopologyConfig& cfg, int set)
{
    return std::visit(
        [set](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CaseINetwork>)
                return n.c;
            else if constexpr (std::is_same_v<T, CaseIINetwork>)
                return std::min(n.c1, n.c2);
            else
                return set == 0 ? n.c1 : n.c2;
        },
        cfg.network);
}

} // namespace

void ProtocolParams::validate() const
{
    if (!(alpha > 0) || !std::isfinite(alpha))
        fail(ErrorKind::Domain, "alpha must be > 0, got " + fmt(alpha));
    if (!(k > 0 && k < 1))
        fail(ErrorKind::Domain, "k must lie in (0,1), got " + fmt(k));
    if (!(beta > 0 && beta < 1))
        fail(ErrorKind::Domain, "beta must lie in (0,1), got " + fmt(beta));
}

double compound_increase(double w, const ProtocolParams& p)
{
    if (!(w > 0))
        fail(ErrorKind::Domain, "window must be > 0, got " + fmt(w));
    return p.alpha * std::pow(w, p.k - 1);
}

double compound_decrease(double w, const ProtocolParams& p)
{
    if (!(w > 0))
        fail(ErrorKind::Domain, "window must be > 0, got " + fmt(w));
    return p.beta * w;
}

double loss_mm1b(double arrival_rate, double capacity, double buffer)
{
    if (!(arrival_rate >= 0))
        fail(ErrorKind::Domain, "arrival rate must be >= 0, got " + fmt(arrival_rate));
    check_positive("capacity", capacity);
    if (!(buffer >= 1))
        fail(ErrorKind::Domain, "buffer must be >= 1, got " + fmt(buffer));
    return std::pow(arrival_rate / capacity, buffer);
}

const char* topology_name(Topology t)
{
    switch (t) {
    case Topology::CaseI: return "case1";
    case Topology::CaseII: return "case2";
    case Topology::CaseIII: return "case3";
    }
    return "?";
}

void TopologyConfig::validate() const
{
    protocol.validate();
    check_positive("tau1", tau1);
    check_positive("tau2", tau2);
    check_positive("kappa", kappa);
    std::visit(
        [](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CaseINetwork>) {
                check_buffer("b", n.b);
                check_positive("c", n.c);
            } else if constexpr (std::is_same_v<T, CaseIINetwork>) {
                check_buffer("b1", n.b1);
                check_buffer("b2", n.b2);
                check_positive("c1", n.c1);
                check_positive("c2", n.c2);
            } else {
                check_buffer("b1", n.b1);
                check_buffer("b2", n.b2);
                check_buffer("b", n.b);
                check_positive("c1", n.c1);
                check_positive("c2", n.c2);
                check_positive("c", n.c);
            }
        },
        network);
}

TopologyConfig reference_case3()
{
    TopologyConfig cfg;
    cfg.network = CaseIIINetwork{10, 15, 25, 100, 100, 180};
    cfg.tau1 = 1;
    cfg.tau2 = 2;
    cfg.kappa = 1;
    cfg.protocol = ProtocolParams{0.3, 0.75, 0.5};
    return cfg;
}

LossStructure loss_structure(const TopologyConfig& cfg)
{
    LossStructure ls;
    const double u1 = 1 / cfg.tau1, u2 = 1 / cfg.tau2;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CaseINetwork>) {
                ls.terms = {{"q", n.c, n.b, u1, u2}};
                ls.seen_by = {std::vector<int>{0}, std::vector<int>{0}};
            } else if constexpr (std::is_same_v<T, CaseIINetwork>) {
                ls.terms = {{"q1", n.c1, n.b1, u1, u2}, {"q2", n.c2, n.b2, u1, u2}};
                ls.seen_by = {std::vector<int>{0, 1}, std::vector<int>{0, 1}};
            } else {
                ls.terms = {{"p1", n.c1, n.b1, u1, 0},
                            {"p2", n.c2, n.b2, 0, u2},
                            {"q", n.c, n.b, u1, u2}};
                ls.seen_by = {std::vector<int>{0, 2}, std::vector<int>{1, 2}};
            }
        },
        cfg.network);
    return ls;
}

double loss_term_value(const LossTerm& t, double x1, double x2)
{
    return std::pow((t.weight1 * x1 + t.weight2 * x2) / t.capacity, t.buffer);
}

double loss_term_partial(const LossTerm& t, double x1, double x2, int m1, int m2)
{
    const int m = m1 + m2;
    if ((m1 > 0 && t.weight1 == 0) || (m2 > 0 && t.weight2 == 0))
        return 0;
    const double s = (t.weight1 * x1 + t.weight2 * x2) / t.capacity;
    return falling(t.buffer, m) * std::pow(t.weight1 / t.capacity, m1) *
           std::pow(t.weight2 / t.capacity, m2) * std::pow(s, t.buffer - m);
}

double EquilibriumPoint::loss(const std::string& name) const
{
    for (const auto& [n, v] : losses)
        if (n == name)
            return v;
    fail(ErrorKind::Usage, "no loss term named " + name);
}

namespace {

// Balance in log form: rho_j = log(L_j * (1 + d(w_j)/i(w_j))), zero at equilibrium.
struct Balance {
    const TopologyConfig& cfg;
    LossStructure ls;

    double factor(double w) const
    {
        const auto& p = cfg.protocol;
        return 1 + p.beta / p.alpha * std::pow(w, 2 - p.k);
    }

    double rho(int set, double w1, double w2) const
    {
        const double w = set == 0 ? w1 : w2;
        return std::log(set_loss(ls, set, w1, w2)) + std::log(factor(w));
    }

    // Residual i(1-L) - dL relative to i.
    double residual(int set, double w1, double w2) const
    {
        const double w = set == 0 ? w1 : w2;
        return 1 - set_loss(ls, set, w1, w2) * factor(w);
    }

    // d rho_j / d log w_l
    double jac(int set, int l, double w1, double w2) const
    {
        const double w = set == 0 ? w1 : w2;
        const double L = set_loss(ls, set, w1, w2);
        const double dL = set_loss_partial(ls, set, w1, w2, l == 0, l == 1);
        double v = (l == 0 ? w1 : w2) * dL / L;
        if (l == set) {
            const auto& p = cfg.protocol;
            const double f = factor(w);
            v += (f - 1) * (2 - p.k) / f;
        }
        return v;
    }
};

bool newton(const Balance& bal, double& x1, double& x2)
{
    auto norm = [&](double a, double b) {
        const double r1 = bal.rho(0, std::exp(a), std::exp(b));
        const double r2 = bal.rho(1, std::exp(a), std::exp(b));
        return std::max(std::abs(r1), std::abs(r2));
    };
    double cur = norm(x1, x2);
    for (int it = 0; it < 200 && std::isfinite(cur); ++it) {
        if (cur < 1e-15)
            return true;
        const double w1 = std::exp(x1), w2 = std::exp(x2);
        const double r1 = bal.rho(0, w1, w2), r2 = bal.rho(1, w1, w2);
        const double a = bal.jac(0, 0, w1, w2), b = bal.jac(0, 1, w1, w2);
        const double c = bal.jac(1, 0, w1, w2), d = bal.jac(1, 1, w1, w2);
        const double det = a * d - b * c;
        if (!(std::abs(det) > 0) || !std::isfinite(det))
            return false;
        double d1 = -(d * r1 - b * r2) / det;
        double d2 = -(a * r2 - c * r1) / det;
        const double big = std::max(std::abs(d1), std::abs(d2));
        if (big > 1) {
            d1 /= big;
            d2 /= big;
        }
        double t = 1;
        double next = norm(x1 + d1, x2 + d2);
        while (!(next < cur) && t > 1e-6) {
            t *= 0.5;
            next = norm(x1 + t * d1, x2 + t * d2);
        }
        if (!(next < cur))
            return cur < 1e-12;
        x1 += t * d1;
        x2 += t * d2;
        cur = next;
    }
    return cur < 1e-12;
}

// Gauss-Seidel sweeps, each coordinate solved by bisection in log w.
bool bisection_sweeps(const Balance& bal, double& x1, double& x2, std::string& diag)
{
    for (int sweep = 0; sweep < 500; ++sweep) {
        double change = 0;
        for (int set = 0; set < 2; ++set) {
            double& x = set == 0 ? x1 : x2;
            auto f = [&](double v) {
                return set == 0 ? bal.rho(0, std::exp(v), std::exp(x2))
                                : bal.rho(1, std::exp(x1), std::exp(v));
            };
            double lo = std::log(1e-9), hi = x;
            int grow = 0;
            while (!(f(hi) > 0) && grow < 200) {
                hi += 1;
                ++grow;
            }
            if (!(f(lo) < 0) || !(f(hi) > 0)) {
                diag = "bracket [" + fmt(std::exp(lo)) + ", " + fmt(std::exp(hi)) +
                       "] for set " + std::to_string(set + 1) + " gives balance " +
                       fmt(f(lo)) + ", " + fmt(f(hi));
                return false;
            }
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                (f(mid) > 0 ? hi : lo) = mid;
            }
            const double nx = 0.5 * (lo + hi);
            change = std::max(change, std::abs(nx - x));
            x = nx;
        }
        if (change < 1e-14)
            return true;
    }
    diag = "coordinate sweeps did not settle";
    return false;
}

} // namespace

EquilibriumPoint solve_equilibrium(const TopologyConfig& cfg)
{
    cfg.validate();
    Balance bal{cfg, loss_structure(cfg)};
    double x1 = std::log(set_capacity(cfg, 0) * cfg.tau1 / 2);
    double x2 = std::log(set_capacity(cfg, 1) * cfg.tau2 / 2);
    const double g1 = x1, g2 = x2;

    bool ok = newton(bal, x1, x2);
    std::string diag;
    if (!ok) {
        x1 = g1;
        x2 = g2;
        ok = bisection_sweeps(bal, x1, x2, diag) && newton(bal, x1, x2);
    }
    EquilibriumPoint eq;
    eq.w1 = std::exp(x1);
    eq.w2 = std::exp(x2);
    for (int s = 0; s < 2; ++s)
        eq.residual[s] = bal.residual(s, eq.w1, eq.w2);
    if (!ok || !(std::abs(eq.residual[0]) < 1e-10) || !(std::abs(eq.residual[1]) < 1e-10))
        fail(ErrorKind::Convergence,
             "equilibrium solver failed (" + (diag.empty() ? "newton stalled" : diag) +
                 "); last iterate w1=" + fmt(eq.w1) + " w2=" + fmt(eq.w2) +
                 " residuals " + fmt(eq.residual[0]) + ", " + fmt(eq.residual[1]));

    for (const auto& t : bal.ls.terms)
        eq.losses.emplace_back(t.name, loss_term_value(t, eq.w1, eq.w2));
    for (int s = 0; s < 2; ++s) {
        eq.total_loss[s] = set_loss(bal.ls, s, eq.w1, eq.w2);
        if (!(eq.total_loss[s] > 0 && eq.total_loss[s] < 1))
            fail(ErrorKind::Domain, "equilibrium loss of set " + std::to_string(s + 1) +
                                        " is outside (0,1): " + fmt(eq.total_loss[s]));
    }
    for (const auto& [n, v] : eq.losses)
        if (!(v > 0 && v < 1))
            fail(ErrorKind::Domain, "equilibrium loss " + n + " is outside (0,1): " + fmt(v));
    return eq;
}

WindowState fluid_rhs(const TopologyConfig& cfg, WindowState now, WindowState lag1,
                      WindowState lag2, LossMode mode)
{
    return fluid_rhs(cfg, loss_structure(cfg), now, lag1, lag2, mode);
}

WindowState fluid_rhs(const TopologyConfig& cfg, const LossStructure& ls, WindowState now,
                      WindowState lag1, WindowState lag2, LossMode mode)
{
    if (!(now.w1 > 0 && now.w2 > 0 && lag1.w1 > 0 && lag2.w2 > 0))
        fail(ErrorKind::Domain, "fluid_rhs needs positive windows");
    const auto& p = cfg.protocol;
    double out[2];
    for (int s = 0; s < 2; ++s) {
        const double x = s == 0 ? now.w1 : now.w2;
        const double y = s == 0 ? lag1.w1 : lag2.w2;
        const double tau = s == 0 ? cfg.tau1 : cfg.tau2;
        double L = set_loss(ls, s, lag1.w1, lag2.w2);
        if (mode == LossMode::Clamped)
            L = std::clamp(L, 0.0, 1.0);
        const double inc = p.alpha * std::pow(x, p.k - 1);
        out[s] = cfg.kappa * (y / tau) * (inc * (1 - L) - p.beta * x * L);
    }
    return {out[0], out[1]};
}

double rhs_partial(const TopologyConfig& cfg, const LossStructure& ls, int set, double x,
                   double y1, double y2, int i, int m1, int m2)
{
    // f = (1/tau)[y g(x) - h(x) y L(y1,y2)] with y the set's own delayed window.
    const auto& p = cfg.protocol;
    const double tau = set == 0 ? cfg.tau1 : cfg.tau2;
    const int own = set == 0 ? m1 : m2;
    const int other = set == 0 ? m2 : m1;
    const double y = set == 0 ? y1 : y2;

    double dy = 0;
    if (own == 0 && other == 0)
        dy = y;
    else if (own == 1 && other == 0)
        dy = 1;

    // d^(m1,m2) of y*L by the product rule; y is linear.
    double dyL = y * set_loss_partial(ls, set, y1, y2, m1, m2);
    if (own > 0)
        dyL += own * set_loss_partial(ls, set, y1, y2, set == 0 ? m1 - 1 : m1,
                                      set == 0 ? m2 : m2 - 1);

    return (increase_deriv(x, p, i) * dy - total_deriv(x, p, i) * dyL) / tau;
}

bool is_symmetric(const TopologyConfig& cfg)
{
    if (cfg.tau1 != cfg.tau2)
        return false;
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CaseINetwork>)
                return true;
            else if constexpr (std::is_same_v<T, CaseIINetwork>)
                return n.b1 == n.b2 && n.c1 == n.c2;
            else
                return n.b1 == n.b2 && n.b1 == n.b && n.c1 == n.c2 && n.c1 == n.c;
        },
        cfg.network);
}

ScalarModel scalar_model(const TopologyConfig& cfg)
{
    cfg.validate();
    if (!is_symmetric(cfg))
        fail(ErrorKind::Usage,
             "the single-delay model needs tau1 = tau2 and identical buffers and capacities");
    ScalarModel m{cfg.tau1, 0, 0, 1, cfg.protocol};
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            // Both sets load every shared router: (2w/(C tau))^B.
            if constexpr (std::is_same_v<T, CaseINetwork>) {
                m.capacity = n.c / 2;
                m.buffer = n.b;
                m.multiplicity = 1;
            } else if constexpr (std::is_same_v<T, CaseIINetwork>) {
                m.capacity = n.c1 / 2;
                m.buffer = n.b1;
                m.multiplicity = 2;
            } else {
                m.capacity = n.c;
                m.buffer = n.b;
                m.multiplicity = 1 + std::pow(2.0, n.b);
            }
        },
        cfg.network);
    return m;
}

double scalar_loss(const ScalarModel& m, double w)
{
    return m.multiplicity * std::pow(w / (m.capacity * m.tau), m.buffer);
}

double scalar_equilibrium(const ScalarModel& m)
{
    // log(L(w)) + log(1 + d/i) is increasing in log w.
    auto rho = [&](double x) {
        const double w = std::exp(x);
        return std::log(scalar_loss(m, w)) +
               std::log1p(m.protocol.beta / m.protocol.alpha * std::pow(w, 2 - m.protocol.k));
    };
    double lo = std::log(1e-9), hi = std::log(m.capacity * m.tau);
    while (rho(hi) < 0)
        hi += 1;
    for (int it = 0; it < 300 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (rho(mid) > 0 ? hi : lo) = mid;
    }
    const double w = std::exp(0.5 * (lo + hi));
    const double L = scalar_loss(m, w);
    if (!(L > 0 && L < 1))
        fail(ErrorKind::Domain, "equilibrium loss of the single-delay model is outside (0,1): " +
                                    fmt(L));
    return w;
}

} // namespace ctcp
