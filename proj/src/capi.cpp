#include "ctcp/ctcp.h"

#include "ctcp/commands.hpp"
#include "ctcp/config.hpp"
#include "ctcp/error.hpp"
#include "ctcp/hopf.hpp"
#include "ctcp/linear.hpp"
#include "ctcp/packet_sim.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <string>

struct ctcp_config {
    ctcp::RunConfig rc;
};

namespace {

thread_local std::string last_error;

ctcp_status status_of(ctcp::ErrorKind k)
{
    using ctcp::ErrorKind;
    switch (k) {
    case ErrorKind::Config: return CTCP_ERR_CONFIG;
    case ErrorKind::Usage: return CTCP_ERR_USAGE;
    case ErrorKind::Domain: return CTCP_ERR_DOMAIN;
    case ErrorKind::Convergence: return CTCP_ERR_CONVERGENCE;
    case ErrorKind::Numeric: return CTCP_ERR_NUMERIC;
    case ErrorKind::Singular: return CTCP_ERR_SINGULAR;
    case ErrorKind::NoCrossing: return CTCP_ERR_NO_CROSSING;
    case ErrorKind::Undetermined: return CTCP_ERR_UNDETERMINED;
    }
    return CTCP_ERR_INTERNAL;
}

template <class F>
ctcp_status guard(F&& f)
{
    last_error.clear();
    try {
        return f();
    } catch (const ctcp::Error& e) {
        last_error = std::string(ctcp::kind_name(e.kind())) + ": " + e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = std::string("internal: ") + e.what();
    } catch (...) {
        last_error = "internal: unknown exception";
    }
    return CTCP_ERR_INTERNAL;
}

char* dup(const std::string& s)
{
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p)
        throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

void need(const void* p, const char* what)
{
    if (!p)
        ctcp::fail(ctcp::ErrorKind::Usage, std::string(what) + " is null");
}

ctcp_status emit(const ctcp::CommandOutput& c, char** out)
{
    *out = dup(c.text);
    if (c.exit_code == 3) {
        last_error = "Undetermined: see the report";
        return CTCP_ERR_UNDETERMINED;
    }
    return CTCP_OK;
}

ctcp::DelayForm form_of(ctcp_delay_form f)
{
    return f == CTCP_FORM_REDUCED ? ctcp::DelayForm::Reduced : ctcp::DelayForm::TwoDelay;
}

ctcp::ChartAxis axis_of(ctcp_axis a)
{
    switch (a) {
    case CTCP_AXIS_KAPPA: return ctcp::ChartAxis::Kappa;
    case CTCP_AXIS_ALPHA: return ctcp::ChartAxis::Alpha;
    case CTCP_AXIS_K: return ctcp::ChartAxis::K;
    case CTCP_AXIS_B: return ctcp::ChartAxis::B;
    }
    ctcp::fail(ctcp::ErrorKind::Usage, "unknown chart axis");
}

ctcp_condition_class class_of(ctcp::ConditionClass c)
{
    switch (c) {
    case ctcp::ConditionClass::OnePositiveRoot: return CTCP_CLASS_ONE_POSITIVE_ROOT;
    case ctcp::ConditionClass::TwoPositiveRoots: return CTCP_CLASS_TWO_POSITIVE_ROOTS;
    case ctcp::ConditionClass::NoCrossing: break;
    }
    return CTCP_CLASS_NO_CROSSING;
}

} // namespace

extern "C" {

const char* ctcp_version(void)
{
    return "1.0.0";
}

const char* ctcp_last_error(void)
{
    return last_error.c_str();
}

int ctcp_status_exit_code(ctcp_status s)
{
    switch (s) {
    case CTCP_OK: return 0;
    case CTCP_ERR_CONFIG:
    case CTCP_ERR_USAGE: return 1;
    case CTCP_ERR_UNDETERMINED: return 3;
    default: return 2;
    }
}

void ctcp_string_free(char* s)
{
    std::free(s);
}

ctcp_status ctcp_config_parse(const char* text, ctcp_config** out)
{
    return guard([&] {
        need(text, "text");
        need(out, "out");
        *out = new ctcp_config{ctcp::parse_config(text)};
        return CTCP_OK;
    });
}

ctcp_status ctcp_config_load(const char* path, ctcp_config** out)
{
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new ctcp_config{ctcp::load_config(path)};
        return CTCP_OK;
    });
}

ctcp_status ctcp_config_clone(const ctcp_config* cfg, ctcp_config** out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(out, "out");
        *out = new ctcp_config{cfg->rc};
        return CTCP_OK;
    });
}

void ctcp_config_free(ctcp_config* cfg)
{
    delete cfg;
}

ctcp_status ctcp_config_set(ctcp_config* cfg, const char* key, const char* value)
{
    return guard([&] {
        need(cfg, "cfg");
        need(key, "key");
        need(value, "value");
        ctcp::RunConfig copy = cfg->rc;
        ctcp::set_config_value(copy, key, value);
        cfg->rc = copy;
        return CTCP_OK;
    });
}

ctcp_status ctcp_config_get(const ctcp_config* cfg, const char* key, double* value)
{
    return guard([&] {
        need(cfg, "cfg");
        need(key, "key");
        need(value, "value");
        // Read back through the canonical text so every key has one source.
        const std::string text = ctcp::serialize_config(cfg->rc);
        const std::string k = key;
        std::size_t pos = 0;
        while (pos < text.size()) {
            const std::size_t end = text.find('\n', pos);
            const std::string line = text.substr(pos, end - pos);
            pos = end == std::string::npos ? text.size() : end + 1;
            const std::size_t eq = line.find(" = ");
            if (eq == std::string::npos || line.substr(0, eq) != k)
                continue;
            const std::string v = line.substr(eq + 3);
            if (k == "topology")
                *value = v == "I" ? 1 : v == "II" ? 2 : 3;
            else
                *value = std::stod(v);
            return CTCP_OK;
        }
        ctcp::fail(ctcp::ErrorKind::Usage, "key '" + k + "' is not set for this topology");
    });
}

ctcp_status ctcp_config_serialize(const ctcp_config* cfg, char** out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(out, "out");
        *out = dup(ctcp::serialize_config(cfg->rc));
        return CTCP_OK;
    });
}

ctcp_status ctcp_equilibrium(const ctcp_config* cfg, ctcp_equilibrium_result* out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(out, "out");
        const auto eq = ctcp::solve_equilibrium(cfg->rc.model);
        *out = {eq.w1, eq.w2, eq.total_loss[0], eq.total_loss[1], eq.residual[0], eq.residual[1]};
        return CTCP_OK;
    });
}

ctcp_status ctcp_hopf_locate(const ctcp_config* cfg, double kappa_max, ctcp_crossing_result* out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(out, "out");
        const auto& model = cfg->rc.model;
        const auto cr = ctcp::hopf_locate_two_delay(model, kappa_max);
        *out = {cr.kappa_c, cr.omega0, ctcp::transversality(model, cr), class_of(cr.condition_class)};
        return CTCP_OK;
    });
}

ctcp_status ctcp_hopf_analyze(const ctcp_config* cfg, double kappa_max, ctcp_hopf_result* out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(out, "out");
        const auto h = ctcp::analyze_hopf(cfg->rc.model, kappa_max, cfg->rc.nonlinearity);
        const auto& m = h.metrics;
        *out = {h.crossing.kappa_c, h.crossing.omega0,
                m.g20.real(), m.g20.imag(), m.g11.real(), m.g11.imag(),
                m.g02.real(), m.g02.imag(), m.g21.real(), m.g21.imag(),
                m.c1.real(), m.c1.imag(), m.alpha_prime, m.mu2, m.beta2,
                m.supercritical ? 1 : 0, m.orbitally_stable ? 1 : 0, h.cm.residual};
        return CTCP_OK;
    });
}

ctcp_status ctcp_packet_run(const ctcp_config* cfg, ctcp_packet_result* out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(out, "out");
        const auto tr = ctcp::run_packet_sim(cfg->rc.packet());
        const auto& q = tr.routers.back();
        double metric = -1;
        const auto skip = static_cast<std::size_t>(tr.warmup / tr.interval);
        if (tr.occupancy.size() >= skip + 4096)
            metric = ctcp::periodicity_metric(tr);
        *out = {metric, q.arrivals, q.departures, q.drops, q.backlog, q.max_occupancy,
                tr.conserved() ? 1 : 0, static_cast<uint64_t>(tr.occupancy.size())};
        return CTCP_OK;
    });
}

ctcp_status ctcp_run_equilibrium(const ctcp_config* cfg, char** out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(out, "out");
        return emit(ctcp::cmd_equilibrium(cfg->rc), out);
    });
}

ctcp_status ctcp_run_stability(const ctcp_config* cfg, double kappa_max, char** out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(out, "out");
        return emit(ctcp::cmd_stability(cfg->rc, kappa_max), out);
    });
}

ctcp_status ctcp_run_hopf(const ctcp_config* cfg, double kappa_max, char** out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(out, "out");
        return emit(ctcp::cmd_hopf(cfg->rc, kappa_max), out);
    });
}

void ctcp_simulate_options_init(ctcp_simulate_options* opt)
{
    if (!opt)
        return;
    *opt = {std::numeric_limits<double>::quiet_NaN(), 0, 0, CTCP_FORM_TWO_DELAY, 0, 1};
}

ctcp_status ctcp_run_simulate(const ctcp_config* cfg, const ctcp_simulate_options* opt, char** out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(opt, "opt");
        need(out, "out");
        ctcp::SimulateOptions so;
        so.kappa = opt->kappa;
        so.T = opt->T;
        so.h = opt->h;
        so.form = form_of(opt->form);
        so.phase = opt->phase != 0;
        so.stride = opt->stride;
        return emit(ctcp::cmd_simulate(cfg->rc, so), out);
    });
}

ctcp_status ctcp_run_sweep(const ctcp_config* cfg, double kappa_min, double kappa_max,
                           double kappa_step, double T, ctcp_delay_form form, char** out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(out, "out");
        ctcp::SweepCommandOptions so;
        so.kappa_min = kappa_min;
        so.kappa_max = kappa_max;
        so.kappa_step = kappa_step;
        so.T = T;
        so.form = form_of(form);
        return emit(ctcp::cmd_sweep(cfg->rc, so), out);
    });
}

ctcp_status ctcp_run_chart(const ctcp_config* cfg, ctcp_axis axis1, ctcp_axis axis2, double min,
                           double max, int points, ctcp_delay_form model, char** out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(out, "out");
        ctcp::ChartCommandOptions co;
        co.axis1 = axis_of(axis1);
        co.axis2 = axis_of(axis2);
        co.min = min;
        co.max = max;
        co.points = points;
        co.model = model == CTCP_FORM_REDUCED ? ctcp::ChartModel::Reduced : ctcp::ChartModel::TwoDelay;
        return emit(ctcp::cmd_chart(cfg->rc, co), out);
    });
}

ctcp_status ctcp_run_packetsim(const ctcp_config* cfg, char** out)
{
    return guard([&] {
        need(cfg, "cfg");
        need(out, "out");
        return emit(ctcp::cmd_packetsim(cfg->rc), out);
    });
}

} // extern "C"
