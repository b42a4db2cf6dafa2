#pragma once

#include "ctcp/model.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace ctcp {

// TwoDelay: the full model. Reduced: flow set 2 reads its own window
// without delay.
enum class DelayForm { TwoDelay, Reduced };

using History = std::function<WindowState(double t)>;

// Equilibrium with w1 raised by 1%.
History default_history(const TopologyConfig& cfg);

struct SimTrace {
    double h = 0;
    std::vector<double> w1, w2;
    std::vector<double> dw1, dw2; // right-hand side at each grid point
    TopologyConfig cfg;
    DelayForm form = DelayForm::TwoDelay;
    std::size_t transient_cutoff = 0;
    bool floor_hit = false; // integration stopped at the window floor

    std::size_t size() const { return w1.size(); }
    double t(std::size_t i) const { return static_cast<double>(i) * h; }
    // Cubic Hermite value of w2 at time t inside the trace.
    double w2_at(double t) const;
};

constexpr double kWindowFloor = 1e-6;

// Classical RK4 with cubic Hermite interpolation of delayed states.
// Requires h <= min(tau)/20 and T >= 50 max(tau).
SimTrace integrate(const TopologyConfig& cfg, const History& history, double T, double h,
                   DelayForm form = DelayForm::TwoDelay, double transient_fraction = 0.6);

struct CycleStats {
    double amplitude = 0; // peak-to-peak of w2 after the transient
    double period = 0;    // 0 when converged
    bool converged = false;
    double min = 0, max = 0, mean = 0;
    int crossings = 0;
};

constexpr double kConvergedAmplitude = 0.1;

// Throws Undetermined when the trace neither settles nor shows three upward
// mean crossings.
CycleStats extract_cycle(const SimTrace& trace);
CycleStats extract_cycle(const std::vector<double>& w2, double h, std::size_t cutoff);

struct SweepOptions {
    double T = 0; // 0: 800 max(tau)
    double h = 0; // 0: min(tau)/50
    double transient_fraction = 0.6;
    DelayForm form = DelayForm::TwoDelay;
    bool parallel = true;
};

struct SweepPoint {
    double kappa = 0;
    CycleStats stats;
    bool determined = true;
    // Peak-to-peak over the last fifth of the trace divided by that over the
    // fifth before it; below 1 while the orbit is still decaying.
    double envelope_ratio = 1;
    bool floor_hit = false;
};

std::vector<SweepPoint> bifurcation_sweep(const TopologyConfig& cfg,
                                          const std::vector<double>& kappas,
                                          const SweepOptions& opt = {});

// First grid point carrying a persistent oscillation, or -1.
int sweep_onset(const std::vector<SweepPoint>& pts);

std::vector<double> kappa_grid(double lo, double hi, double step);

} // namespace ctcp
