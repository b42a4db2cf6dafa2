#include "ctcp/dde.hpp"

#include "ctcp/error.hpp"
#include "ctcp/format.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace ctcp {

namespace {

double hermite(double y0, double y1, double f0, double f1, double h, double s)
{
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * h * f1;
}

struct Dense {
    const SimTrace& tr;
    const History& history;

    WindowState at(double t) const
    {
        if (t <= 0)
            return history(t);
        const double x = t / tr.h;
        std::size_t k = static_cast<std::size_t>(x);
        if (k + 1 >= tr.dw1.size())
            k = tr.dw1.size() - 2;
        const double s = x - static_cast<double>(k);
        return {hermite(tr.w1[k], tr.w1[k + 1], tr.dw1[k], tr.dw1[k + 1], tr.h, s),
                hermite(tr.w2[k], tr.w2[k + 1], tr.dw2[k], tr.dw2[k + 1], tr.h, s)};
    }
};

} // namespace

History default_history(const TopologyConfig& cfg)
{
    const EquilibriumPoint eq = solve_equilibrium(cfg);
    const WindowState start{eq.w1 * 1.01, eq.w2};
    return [start](double) { return start; };
}

double SimTrace::w2_at(double t) const
{
    const double x = t / h;
    if (x < 0 || x > static_cast<double>(size() - 1))
        fail(ErrorKind::Usage, "time " + fmt(t) + " is outside the trace");
    std::size_t k = static_cast<std::size_t>(x);
    if (k + 1 >= size())
        k = size() - 2;
    return hermite(w2[k], w2[k + 1], dw2[k], dw2[k + 1], h, x - static_cast<double>(k));
}

SimTrace integrate(const TopologyConfig& cfg, const History& history, double T, double h,
                   DelayForm form, double transient_fraction)
{
    cfg.validate();
    const double tmin = std::min(cfg.tau1, cfg.tau2), tmax = std::max(cfg.tau1, cfg.tau2);
    if (!(h > 0) || h > tmin / 20 * (1 + 1e-12))
        fail(ErrorKind::Usage, "step h=" + fmt(h) + " must lie in (0, min(tau)/20]");
    if (!(T >= 50 * tmax * (1 - 1e-12)))
        fail(ErrorKind::Usage, "horizon T=" + fmt(T) + " must be >= 50 max(tau)");
    if (!(transient_fraction >= 0 && transient_fraction < 1))
        fail(ErrorKind::Usage, "transient fraction must lie in [0,1)");

    const LossStructure ls = loss_structure(cfg);
    const auto steps = static_cast<std::size_t>(std::llround(T / h));
    SimTrace tr;
    tr.h = h;
    tr.cfg = cfg;
    tr.form = form;
    tr.w1.reserve(steps + 1);
    tr.w2.reserve(steps + 1);
    tr.dw1.reserve(steps + 1);
    tr.dw2.reserve(steps + 1);

    const Dense dense{tr, history};
    auto rhs = [&](double t, WindowState now) {
        const WindowState l1 = dense.at(t - cfg.tau1);
        const WindowState l2 = form == DelayForm::TwoDelay ? dense.at(t - cfg.tau2) : now;
        return fluid_rhs(cfg, ls, now, l1, l2, LossMode::Clamped);
    };

    WindowState y = history(0);
    if (!(y.w1 > 0 && y.w2 > 0))
        fail(ErrorKind::Domain, "history must be positive");
    tr.w1.push_back(y.w1);
    tr.w2.push_back(y.w2);
    // The derivative slot of the newest point is filled when the next step
    // starts; stage lookups never reach it because every delay exceeds h.
    tr.dw1.push_back(0);
    tr.dw2.push_back(0);

    for (std::size_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * h;
        const WindowState k1 = rhs(t, y);
        tr.dw1[n] = k1.w1;
        tr.dw2[n] = k1.w2;
        auto add = [](WindowState a, WindowState b, double s) {
            return WindowState{a.w1 + s * b.w1, a.w2 + s * b.w2};
        };
        auto guard = [](WindowState s) {
            return WindowState{std::max(s.w1, kWindowFloor), std::max(s.w2, kWindowFloor)};
        };
        const WindowState k2 = rhs(t + h / 2, guard(add(y, k1, h / 2)));
        const WindowState k3 = rhs(t + h / 2, guard(add(y, k2, h / 2)));
        const WindowState k4 = rhs(t + h, guard(add(y, k3, h)));
        y.w1 += h / 6 * (k1.w1 + 2 * k2.w1 + 2 * k3.w1 + k4.w1);
        y.w2 += h / 6 * (k1.w2 + 2 * k2.w2 + 2 * k3.w2 + k4.w2);
        if (!(y.w1 > kWindowFloor && y.w2 > kWindowFloor)) {
            tr.floor_hit = true;
            break;
        }
        tr.w1.push_back(y.w1);
        tr.w2.push_back(y.w2);
        tr.dw1.push_back(0);
        tr.dw2.push_back(0);
    }
    // Derivative at the final point.
    {
        const double t = static_cast<double>(tr.size() - 1) * h;
        const WindowState k = rhs(t, y.w1 > kWindowFloor && y.w2 > kWindowFloor
                                         ? y
                                         : WindowState{tr.w1.back(), tr.w2.back()});
        tr.dw1.back() = k.w1;
        tr.dw2.back() = k.w2;
    }
    tr.transient_cutoff = static_cast<std::size_t>(transient_fraction * static_cast<double>(tr.size()));
    return tr;
}

CycleStats extract_cycle(const std::vector<double>& w2, double h, std::size_t cutoff)
{
    if (cutoff + 2 > w2.size())
        fail(ErrorKind::Usage, "trace is shorter than its transient cutoff");
    CycleStats cs;
    const auto first = w2.begin() + static_cast<std::ptrdiff_t>(cutoff);
    const auto [lo, hi] = std::minmax_element(first, w2.end());
    cs.min = *lo;
    cs.max = *hi;
    cs.amplitude = cs.max - cs.min;
    double sum = 0;
    for (auto it = first; it != w2.end(); ++it)
        sum += *it;
    cs.mean = sum / static_cast<double>(w2.end() - first);
    cs.converged = cs.amplitude < kConvergedAmplitude;

    std::vector<double> ups;
    for (std::size_t i = cutoff; i + 1 < w2.size(); ++i)
        if (w2[i] < cs.mean && w2[i + 1] >= cs.mean) {
            const double frac = (cs.mean - w2[i]) / (w2[i + 1] - w2[i]);
            ups.push_back((static_cast<double>(i) + frac) * h);
        }
    cs.crossings = static_cast<int>(ups.size());
    if (cs.converged)
        return cs;
    if (ups.size() < 3)
        fail(ErrorKind::Undetermined, "trace neither settles (peak-to-peak " + fmt(cs.amplitude) +
                                          ") nor shows three mean crossings");
    cs.period = (ups.back() - ups.front()) / static_cast<double>(ups.size() - 1);
    return cs;
}

CycleStats extract_cycle(const SimTrace& trace)
{
    return extract_cycle(trace.w2, trace.h, trace.transient_cutoff);
}

std::vector<SweepPoint> bifurcation_sweep(const TopologyConfig& cfg,
                                          const std::vector<double>& kappas,
                                          const SweepOptions& opt)
{
    const double tmin = std::min(cfg.tau1, cfg.tau2), tmax = std::max(cfg.tau1, cfg.tau2);
    const double T = opt.T > 0 ? opt.T : 800 * tmax;
    const double h = opt.h > 0 ? opt.h : tmin / 50;
    const History hist = default_history(cfg);

    auto run = [&](double kappa) {
        TopologyConfig c = cfg;
        c.kappa = kappa;
        const SimTrace tr = integrate(c, hist, T, h, opt.form, opt.transient_fraction);
        SweepPoint pt;
        pt.kappa = kappa;
        pt.floor_hit = tr.floor_hit;
        try {
            pt.stats = extract_cycle(tr);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Undetermined)
                throw;
            pt.determined = false;
        }
        const std::size_t n = tr.size(), fifth = n / 5;
        auto p2p = [&](std::size_t a, std::size_t b) {
            const auto [lo, hi] = std::minmax_element(tr.w2.begin() + static_cast<std::ptrdiff_t>(a),
                                                      tr.w2.begin() + static_cast<std::ptrdiff_t>(b));
            return *hi - *lo;
        };
        const double early = p2p(n - 2 * fifth, n - fifth), late = p2p(n - fifth, n);
        pt.envelope_ratio = early > 0 ? late / early : 1;
        return pt;
    };

    std::vector<std::future<SweepPoint>> jobs;
    for (double k : kappas)
        jobs.push_back(std::async(opt.parallel ? std::launch::async : std::launch::deferred, run, k));
    std::vector<SweepPoint> out;
    for (auto& j : jobs)
        out.push_back(j.get());
    return out;
}

int sweep_onset(const std::vector<SweepPoint>& pts)
{
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (!p.stats.converged && p.envelope_ratio > 0.95)
            return static_cast<int>(i);
    }
    return -1;
}

std::vector<double> kappa_grid(double lo, double hi, double step)
{
    if (!(step > 0) || !(hi >= lo))
        fail(ErrorKind::Usage, "kappa grid needs lo <= hi and step > 0");
    std::vector<double> g;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i)
        g.push_back(lo + static_cast<double>(i) * step);
    return g;
}

} // namespace ctcp
