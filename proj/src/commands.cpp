#include "ctcp/commands.hpp"

#include "ctcp/error.hpp"
#include "ctcp/format.hpp"
#include "ctcp/hopf.hpp"
#include "ctcp/packet_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ctcp {

namespace {

class Report {
public:
    Report(const char* command, const RunConfig& rc)
    {
        o_ << "# ctcp " << command << '\n' << serialize_config(rc);
    }

    void put(const std::string& key, const std::string& v) { o_ << "# " << key << " = " << v << '\n'; }
    void put(const std::string& key, double v) { put(key, fmt(v)); }
    void put(const std::string& key, cplx v)
    {
        put(key + "_re", v.real());
        put(key + "_im", v.imag());
    }
    void put_bool(const std::string& key, bool v) { put(key, v ? "yes" : "no"); }

    std::string str() const { return o_.str(); }

private:
    std::ostringstream o_;
};

// Summary block for CSV outputs: the config and results as comments.
std::string comment_block(const std::string& report)
{
    std::istringstream in(report);
    std::ostringstream o;
    std::string line;
    while (std::getline(in, line))
        o << (line.rfind('#', 0) == 0 ? "" : "# ") << line << '\n';
    return o.str();
}

const char* form_name(DelayForm f)
{
    return f == DelayForm::TwoDelay ? "two-delay" : "reduced";
}

void put_equilibrium(Report& r, const TopologyConfig& cfg, const EquilibriumPoint& eq)
{
    r.put("w1", eq.w1);
    r.put("w2", eq.w2);
    for (const auto& [name, v] : eq.losses)
        r.put("loss_" + name, v);
    r.put("total_loss1", eq.total_loss[0]);
    r.put("total_loss2", eq.total_loss[1]);
    r.put("residual1", eq.residual[0]);
    r.put("residual2", eq.residual[1]);
    const WindowState s{eq.w1, eq.w2};
    const WindowState f = fluid_rhs(cfg, s, s, s);
    r.put("rhs_max_norm", std::max(std::abs(f.w1), std::abs(f.w2)));
}

} // namespace

CommandOutput cmd_equilibrium(const RunConfig& rc)
{
    const EquilibriumPoint eq = solve_equilibrium(rc.model);
    Report r("equilibrium", rc);
    put_equilibrium(r, rc.model, eq);
    return {r.str(), 0};
}

CommandOutput cmd_stability(const RunConfig& rc, double kappa_max)
{
    const TopologyConfig& cfg = rc.model;
    const EquilibriumPoint eq = solve_equilibrium(cfg);
    const LinearCoefficients lc = linearize(cfg, eq);
    Report r("stability", rc);
    r.put("kappa_max", kappa_max);
    r.put("w1", eq.w1);
    r.put("w2", eq.w2);

    const DelaySystem sys = two_delay_system(lc);
    try {
        const CrossingResult cr = locate_crossing(sys, kappa_max);
        r.put("kappa_c", cr.kappa_c);
        r.put("omega0", cr.omega0);
        r.put("period", 2 * std::numbers::pi / cr.omega0);
        r.put("alpha_prime", eigenvalue_velocity(sys, cr).real());
        r.put("condition_class", condition_name(cr.condition_class));
        r.put("crossing_residual", cr.residual);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoCrossing)
            throw;
        r.put("condition_class", condition_name(ConditionClass::NoCrossing));
        r.put("result", "stable for all kappa <= " + fmt(kappa_max));
    }
    r.put("unstable_roots_at_kappa", std::to_string(unstable_root_count(sys, cfg.kappa)));

    // Closed form for the model without delay on flow set 2.
    r.put("reduced_a", lc.a);
    r.put("reduced_b", lc.b);
    r.put("reduced_c", lc.c);
    r.put("reduced_d", lc.d);
    const FrequencyResult fr = crossing_frequency(lc);
    r.put("reduced_condition_class", condition_name(fr.cls));
    if (fr.cls == ConditionClass::OnePositiveRoot) {
        try {
            const CrossingResult cf = kappa_critical_closed_form(lc);
            r.put("reduced_kappa_c_closed_form", cf.kappa_c);
            r.put("reduced_omega0_closed_form", cf.omega0);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Numeric)
                throw;
            r.put("reduced_kappa_c_closed_form", "unavailable");
        }
    }
    try {
        const CrossingResult rn = locate_crossing(reduced_system(lc), kappa_max);
        r.put("reduced_kappa_c_numeric", rn.kappa_c);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoCrossing)
            throw;
        r.put("reduced_kappa_c_numeric", "none <= " + fmt(kappa_max));
    }

    if (is_symmetric(cfg)) {
        const Scenario1Result s1 = scenario1_conditions(cfg);
        r.put("symmetric_M", s1.M);
        r.put("symmetric_N", s1.N);
        if (s1.has_crossing) {
            r.put("symmetric_kappa_c_closed_form", s1.kappa_c);
            r.put("symmetric_omega0_closed_form", s1.omega_c);
            try {
                const CrossingResult sn = locate_crossing(scalar_system(s1.M, s1.N, cfg.tau1),
                                                          std::max(kappa_max, 2 * s1.kappa_c));
                r.put("symmetric_kappa_c_numeric", sn.kappa_c);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NoCrossing)
                    throw;
                r.put("symmetric_kappa_c_numeric", "none");
            }
            r.put("symmetric_condition_lhs", s1.lhs);
            r.put("symmetric_condition_rhs", s1.rhs);
        } else {
            r.put("symmetric_result", "stable for every kappa");
        }
        r.put_bool("symmetric_stable_at_kappa", s1.stable);
    }
    return {r.str(), 0};
}

CommandOutput cmd_hopf(const RunConfig& rc, double kappa_max)
{
    const HopfAnalysis h = analyze_hopf(rc.model, kappa_max, rc.nonlinearity);
    const HopfMetrics& m = h.metrics;
    Report r("hopf", rc);
    r.put("kappa_max", kappa_max);
    r.put("w1", h.eq.w1);
    r.put("w2", h.eq.w2);
    r.put("kappa_c", h.crossing.kappa_c);
    r.put("omega0", h.crossing.omega0);
    r.put("period", 2 * std::numbers::pi / h.crossing.omega0);
    r.put("condition_class", condition_name(h.crossing.condition_class));
    r.put("phi1", h.eigen.phi1);
    r.put("phi2", h.eigen.phi2);
    r.put("D", h.eigen.D);
    r.put("g20", m.g20);
    r.put("g11", m.g11);
    r.put("g02", m.g02);
    r.put("g21", m.g21);
    r.put("c1", m.c1);
    r.put("alpha_prime", m.alpha_prime);
    r.put("mu2", m.mu2);
    r.put("beta2", m.beta2);
    r.put("eigen_residual", h.eigen.eigen_residual);
    r.put("center_manifold_residual", h.cm.residual);

    const double scale = std::abs(m.g21) + std::abs(m.g20) * std::abs(m.g11) / h.crossing.omega0 +
                         std::abs(m.g02) * std::abs(m.g02) / h.crossing.omega0;
    const bool undetermined = !(std::abs(m.c1.real()) > 1e-12 * scale) || scale == 0;
    if (undetermined) {
        r.put("bifurcation", "undetermined");
        r.put("orbit", "undetermined");
        return {r.str(), 3};
    }
    r.put("bifurcation", m.supercritical ? "supercritical" : "subcritical");
    r.put("orbit", m.orbitally_stable ? "orbitally stable" : "orbitally unstable");
    if (rc.model.kappa > h.crossing.kappa_c && m.mu2 > 0)
        r.put("predicted_w2_peak_to_peak_at_kappa", predicted_amplitude(h, rc.model.kappa));
    return {r.str(), 0};
}

CommandOutput cmd_simulate(const RunConfig& rc, const SimulateOptions& opt)
{
    TopologyConfig cfg = rc.model;
    if (!std::isnan(opt.kappa))
        cfg.kappa = opt.kappa;
    if (opt.stride < 1)
        fail(ErrorKind::Usage, "stride must be >= 1");
    const double tmin = std::min(cfg.tau1, cfg.tau2), tmax = std::max(cfg.tau1, cfg.tau2);
    const double T = opt.T > 0 ? opt.T : 800 * tmax;
    const double h = opt.h > 0 ? opt.h : tmin / 50;
    const SimTrace tr = integrate(cfg, default_history(cfg), T, h, opt.form);

    std::ostringstream o;
    if (opt.phase) {
        o << "w2,w2_delayed\n";
        const auto lag = static_cast<std::size_t>(std::llround(cfg.tau2 / h));
        for (std::size_t i = std::max(tr.transient_cutoff, lag); i < tr.size(); i += opt.stride)
            o << fmt(tr.w2[i]) << ',' << fmt(tr.w2_at(tr.t(i) - cfg.tau2)) << '\n';
    } else {
        o << "t,w1,w2\n";
        for (std::size_t i = 0; i < tr.size(); i += opt.stride)
            o << fmt(tr.t(i)) << ',' << fmt(tr.w1[i]) << ',' << fmt(tr.w2[i]) << '\n';
    }

    Report r("simulate", rc);
    r.put("sim_kappa", cfg.kappa);
    r.put("sim_T", T);
    r.put("sim_h", h);
    r.put("sim_form", form_name(opt.form));
    r.put_bool("floor_hit", tr.floor_hit);
    int code = 0;
    try {
        const CycleStats cs = extract_cycle(tr);
        r.put_bool("converged", cs.converged);
        r.put("w2_peak_to_peak", cs.amplitude);
        r.put("w2_min", cs.min);
        r.put("w2_max", cs.max);
        r.put("w2_mean", cs.mean);
        r.put("period", cs.period);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Undetermined)
            throw;
        r.put("cycle", "undetermined");
        code = 3;
    }
    o << comment_block(r.str());
    return {o.str(), code};
}

CommandOutput cmd_sweep(const RunConfig& rc, const SweepCommandOptions& opt)
{
    SweepOptions so;
    so.T = opt.T;
    so.form = opt.form;
    const auto grid = kappa_grid(opt.kappa_min, opt.kappa_max, opt.kappa_step);
    const auto pts = bifurcation_sweep(rc.model, grid, so);

    std::ostringstream o;
    o << "kappa,amplitude,period,converged,w2_min,w2_max,envelope_ratio,determined\n";
    bool all_determined = true;
    for (const auto& p : pts) {
        all_determined = all_determined && p.determined && !p.floor_hit;
        o << fmt(p.kappa) << ',' << fmt(p.stats.amplitude) << ',' << fmt(p.stats.period) << ','
          << (p.stats.converged ? 1 : 0) << ',' << fmt(p.stats.min) << ',' << fmt(p.stats.max) << ','
          << fmt(p.envelope_ratio) << ',' << (p.determined && !p.floor_hit ? 1 : 0) << '\n';
    }
    Report r("sweep", rc);
    r.put("sweep_kappa_min", opt.kappa_min);
    r.put("sweep_kappa_max", opt.kappa_max);
    r.put("sweep_kappa_step", opt.kappa_step);
    r.put("sweep_form", form_name(opt.form));
    const int onset = sweep_onset(pts);
    r.put("onset_kappa", onset < 0 ? std::string("none") : fmt(pts[onset].kappa));
    if (onset >= 0) {
        bool monotone = true;
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = onset; i < pts.size(); ++i) {
            if (i > static_cast<std::size_t>(onset))
                monotone = monotone && pts[i].stats.amplitude >= pts[i - 1].stats.amplitude;
            lo = std::min(lo, pts[i].stats.min);
            hi = std::max(hi, pts[i].stats.max);
        }
        r.put_bool("monotone_above_onset", monotone);
        r.put("envelope_min", lo);
        r.put("envelope_max", hi);
    }
    o << comment_block(r.str());
    return {o.str(), all_determined ? 0 : 3};
}

CommandOutput cmd_chart(const RunConfig& rc, const ChartCommandOptions& opt)
{
    if (opt.points < 2)
        fail(ErrorKind::Usage, "a chart needs at least 2 points");
    double lo = opt.min, hi = opt.max;
    if (lo == 0 && hi == 0) {
        switch (opt.axis2) {
        case ChartAxis::Kappa: lo = 0.2; hi = 3; break;
        case ChartAxis::Alpha: lo = 0.05; hi = 1; break;
        case ChartAxis::K: lo = 0.1; hi = 0.9; break;
        case ChartAxis::B: lo = 15; hi = 30; break;
        }
    }
    if (!(hi > lo))
        fail(ErrorKind::Usage, "chart range needs min < max");
    std::vector<double> values;
    for (int i = 0; i < opt.points; ++i) {
        double v = lo + (hi - lo) * i / (opt.points - 1);
        if (opt.axis2 == ChartAxis::B)
            v = std::round(v);
        if (values.empty() || v != values.back())
            values.push_back(v);
    }
    ChartOptions co;
    co.model = opt.model;
    const ChartResult res = stability_chart(rc.model, opt.axis1, opt.axis2, values, co);

    std::ostringstream o;
    o << axis_name(opt.axis2) << ',' << axis_name(opt.axis1) << "_boundary\n";
    int gaps = 0;
    for (const auto& p : res.points) {
        gaps += std::isnan(p.boundary);
        o << fmt(p.axis2) << ',' << (std::isnan(p.boundary) ? std::string("nan") : fmt(p.boundary))
          << '\n';
    }
    Report r("chart", rc);
    r.put("chart_axis1", axis_name(opt.axis1));
    r.put("chart_axis2", axis_name(opt.axis2));
    r.put("chart_model", opt.model == ChartModel::TwoDelay ? "two-delay" : "reduced");
    r.put("gaps", std::to_string(gaps));
    r.put("monotonicity", res.monotonicity > 0   ? "increasing"
                          : res.monotonicity < 0 ? "decreasing"
                                                 : "neither");
    o << comment_block(r.str());
    return {o.str(), 0};
}

CommandOutput cmd_packetsim(const RunConfig& rc)
{
    const PacketSimConfig pc = rc.packet();
    const QueueTrace tr = run_packet_sim(pc);

    std::ostringstream o;
    o << "t,queue_len\n";
    for (std::size_t i = 0; i < tr.occupancy.size(); ++i)
        o << fmt(static_cast<double>(i) * tr.interval) << ',' << tr.occupancy[i] << '\n';

    Report r("packetsim", rc);
    r.put("sample_interval", tr.interval);
    r.put("warmup", tr.warmup);
    for (const auto& c : tr.routers) {
        r.put(c.name + "_arrivals", std::to_string(c.arrivals));
        r.put(c.name + "_departures", std::to_string(c.departures));
        r.put(c.name + "_drops", std::to_string(c.drops));
        r.put(c.name + "_backlog", std::to_string(c.backlog));
        r.put(c.name + "_max_occupancy", std::to_string(c.max_occupancy));
    }
    r.put("sent", std::to_string(tr.sent));
    r.put("acked", std::to_string(tr.acked));
    r.put("lost", std::to_string(tr.lost));
    r.put_bool("conserved", tr.conserved());
    const auto post = tr.occupancy.size() - std::min(tr.occupancy.size(),
                                                     static_cast<std::size_t>(tr.warmup / tr.interval));
    if (post >= 4096) {
        const double metric = periodicity_metric(tr);
        r.put("periodicity_metric", metric);
        r.put("regime", metric > kPeriodicityThreshold ? "limit cycle" : "random");
    } else {
        r.put("periodicity_metric", "unavailable (fewer than 4096 samples after warmup)");
    }
    o << comment_block(r.str());
    return {o.str(), 0};
}

} // namespace ctcp
