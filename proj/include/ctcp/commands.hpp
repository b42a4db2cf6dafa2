#pragma once

#include "ctcp/config.hpp"
#include "ctcp/dde.hpp"
#include "ctcp/linear.hpp"

#include <limits>
#include <string>

namespace ctcp {

// Text produced by a command and the exit code it asks for (0 or 3; failures
// are thrown).
struct CommandOutput {
    std::string text;
    int exit_code = 0;
};

// Reports start with the resolved config as `key = value` lines, followed by
// results as `# key = value` comments, so a report is itself a valid config.
CommandOutput cmd_equilibrium(const RunConfig& rc);

CommandOutput cmd_stability(const RunConfig& rc, double kappa_max = 10);

CommandOutput cmd_hopf(const RunConfig& rc, double kappa_max = 10);

struct SimulateOptions {
    double kappa = std::numeric_limits<double>::quiet_NaN(); // NaN: config value
    double T = 0; // 0: 800 max(tau)
    double h = 0; // 0: min(tau)/50
    DelayForm form = DelayForm::TwoDelay;
    bool phase = false; // emit w2(t), w2(t - tau2) after the transient
    int stride = 1;     // emit every stride-th grid point
};

// CSV commands write a header row and data rows, then a `#` comment block with
// the resolved config and a summary.
CommandOutput cmd_simulate(const RunConfig& rc, const SimulateOptions& opt);

struct SweepCommandOptions {
    double kappa_min = 0.9, kappa_max = 1.1, kappa_step = 0.01;
    double T = 0;
    DelayForm form = DelayForm::TwoDelay;
};

CommandOutput cmd_sweep(const RunConfig& rc, const SweepCommandOptions& opt);

struct ChartCommandOptions {
    ChartAxis axis1 = ChartAxis::Kappa; // bisected
    ChartAxis axis2 = ChartAxis::Alpha; // swept
    double min = 0, max = 0;            // axis 2 range; 0,0 picks a default
    int points = 21;
    ChartModel model = ChartModel::TwoDelay;
};

CommandOutput cmd_chart(const RunConfig& rc, const ChartCommandOptions& opt);

CommandOutput cmd_packetsim(const RunConfig& rc);

} // namespace ctcp
