#include "ctcp/ctcp.h"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace {

struct ConfigDeleter {
    void operator()(ctcp_config* c) const { ctcp_config_free(c); }
};
using ConfigPtr = std::unique_ptr<ctcp_config, ConfigDeleter>;

int report_failure(ctcp_status s)
{
    std::cerr << "ctcp: " << ctcp_last_error() << '\n';
    return ctcp_status_exit_code(s);
}

int load(const std::string& path, const std::vector<std::string>& overrides, ConfigPtr& out)
{
    ctcp_config* raw = nullptr;
    ctcp_status s = ctcp_config_load(path.c_str(), &raw);
    if (s != CTCP_OK)
        return report_failure(s);
    out.reset(raw);
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            std::cerr << "ctcp: --set expects key=value, got '" << o << "'\n";
            return 1;
        }
        s = ctcp_config_set(out.get(), o.substr(0, eq).c_str(), o.substr(eq + 1).c_str());
        if (s != CTCP_OK)
            return report_failure(s);
    }
    return 0;
}

// Writes the command output and maps the status to an exit code.
int finish(ctcp_status s, char* text, const std::string& out_path)
{
    if (text) {
        if (out_path.empty() || out_path == "-") {
            std::fwrite(text, 1, std::strlen(text), stdout);
        } else {
            std::ofstream f(out_path, std::ios::binary);
            f << text;
            if (!f) {
                ctcp_string_free(text);
                std::cerr << "ctcp: cannot write '" << out_path << "'\n";
                return 2;
            }
        }
        ctcp_string_free(text);
    }
    if (s != CTCP_OK)
        return report_failure(s);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Compound TCP / Drop-Tail stability and Hopf bifurcation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ctcp_version()));

    std::string config_path, out_path;
    std::vector<std::string> overrides;
    auto common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "Configuration file")->required();
        sub->add_option("-o,--out", out_path, "Output file (default: standard output)");
        sub->add_option("--set", overrides, "Override a config key, as key=value");
    };

    double kappa_max = 10;
    auto* equilibrium = app.add_subcommand("equilibrium", "Equilibrium windows and loss");
    common(equilibrium);
    auto* stability = app.add_subcommand("stability", "Critical kappa, crossing frequency, class");
    common(stability);
    stability->add_option("--kappa-max", kappa_max, "Upper end of the crossing search")->capture_default_str();
    auto* hopf = app.add_subcommand("hopf", "Normal form: Lyapunov coefficient, mu2, beta2");
    common(hopf);
    hopf->add_option("--kappa-max", kappa_max, "Upper end of the crossing search")->capture_default_str();

    const std::map<std::string, ctcp_delay_form> forms{{"two-delay", CTCP_FORM_TWO_DELAY},
                                                       {"reduced", CTCP_FORM_REDUCED}};
    ctcp_delay_form form = CTCP_FORM_TWO_DELAY;

    ctcp_simulate_options sim;
    ctcp_simulate_options_init(&sim);
    auto* simulate = app.add_subcommand("simulate", "Integrate the delay model, CSV t,w1,w2");
    common(simulate);
    simulate->set_help_flag("--help", "Print this help message and exit");
    simulate->add_option("--kappa", sim.kappa, "Gain (default: config value)");
    simulate->add_option("--T", sim.T, "Horizon (default: 800 max tau)");
    simulate->add_option("--h", sim.h, "Step (default: min tau / 50)");
    simulate->add_option("--form", form, "two-delay or reduced")
        ->transform(CLI::CheckedTransformer(forms, CLI::ignore_case));
    bool phase = false;
    simulate->add_flag("--phase", phase, "Emit w2,w2_delayed after the transient");
    simulate->add_option("--stride", sim.stride, "Emit every n-th grid point")->check(CLI::PositiveNumber);

    double kmin = 0.9, kmax = 1.1, kstep = 0.01, sweep_T = 0;
    auto* sweep = app.add_subcommand("sweep", "Amplitude of w2 against kappa, CSV");
    common(sweep);
    sweep->add_option("--kappa-min", kmin)->capture_default_str();
    sweep->add_option("--kappa-max", kmax)->capture_default_str();
    sweep->add_option("--kappa-step", kstep)->capture_default_str();
    sweep->add_option("--T", sweep_T, "Horizon per run (default: 800 max tau)");
    sweep->add_option("--form", form, "two-delay or reduced")
        ->transform(CLI::CheckedTransformer(forms, CLI::ignore_case));

    const std::map<std::string, ctcp_axis> axes{{"kappa", CTCP_AXIS_KAPPA},
                                                {"alpha", CTCP_AXIS_ALPHA},
                                                {"k", CTCP_AXIS_K},
                                                {"b", CTCP_AXIS_B}};
    std::vector<std::string> chart_axes{"kappa", "alpha"};
    double cmin = 0, cmax = 0;
    int points = 21;
    ctcp_delay_form chart_model = CTCP_FORM_TWO_DELAY;
    auto* chart = app.add_subcommand("chart", "Stability boundary, CSV");
    common(chart);
    chart->add_option("--axes", chart_axes, "Bisected axis, swept axis (kappa, alpha, k, B)")
        ->delimiter(',')
        ->expected(2)
        ->capture_default_str();
    chart->add_option("--min", cmin, "Swept axis lower end");
    chart->add_option("--max", cmax, "Swept axis upper end");
    chart->add_option("--points", points)->capture_default_str();
    chart->add_option("--model", chart_model, "two-delay or reduced")
        ->transform(CLI::CheckedTransformer(forms, CLI::ignore_case));

    auto* packetsim = app.add_subcommand("packetsim", "Packet-level run, CSV t,queue_len");
    common(packetsim);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    ConfigPtr cfg;
    if (const int rc = load(config_path, overrides, cfg))
        return rc;

    char* text = nullptr;
    ctcp_status s = CTCP_OK;
    if (*equilibrium) {
        s = ctcp_run_equilibrium(cfg.get(), &text);
    } else if (*stability) {
        s = ctcp_run_stability(cfg.get(), kappa_max, &text);
    } else if (*hopf) {
        s = ctcp_run_hopf(cfg.get(), kappa_max, &text);
    } else if (*simulate) {
        sim.form = form;
        sim.phase = phase ? 1 : 0;
        s = ctcp_run_simulate(cfg.get(), &sim, &text);
    } else if (*sweep) {
        s = ctcp_run_sweep(cfg.get(), kmin, kmax, kstep, sweep_T, form, &text);
    } else if (*chart) {
        auto axis = [&](std::string n, ctcp_axis& a) {
            for (auto& ch : n)
                ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            const auto it = axes.find(n);
            if (it == axes.end())
                return false;
            a = it->second;
            return true;
        };
        ctcp_axis a1{}, a2{};
        if (!axis(chart_axes[0], a1) || !axis(chart_axes[1], a2)) {
            std::cerr << "ctcp: unknown chart axis (kappa, alpha, k, B)\n";
            return 1;
        }
        s = ctcp_run_chart(cfg.get(), a1, a2, cmin, cmax, points, chart_model, &text);
    } else if (*packetsim) {
        s = ctcp_run_packetsim(cfg.get(), &text);
    }
    return finish(s, text, out_path);
}
