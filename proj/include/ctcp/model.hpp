#pragma once

#include <array>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ctcp {

struct ProtocolParams {
    double alpha = 0.125;
    double k = 0.75;
    double beta = 0.5;

    void validate() const;
};

// Compound TCP loss-mode laws: i(w) = alpha*w^(k-1), d(w) = beta*w.
double compound_increase(double w, const ProtocolParams& p);
double compound_decrease(double w, const ProtocolParams& p);

// Blocking probability of an M/M/1/B queue in the large-buffer form (rate/C)^B.
double loss_mm1b(double arrival_rate, double capacity, double buffer);

enum class Topology { CaseI = 0, CaseII = 1, CaseIII = 2 };

const char* topology_name(Topology t);

// Case I: both flow sets share one bottleneck.
struct CaseINetwork {
    double b = 25;
    double c = 180;
};

// Case II: both flow sets traverse two routers in series.
struct CaseIINetwork {
    double b1 = 10, b2 = 15;
    double c1 = 100, c2 = 100;
};

// Case III: each set has its own edge router, then a shared core router.
struct CaseIIINetwork {
    double b1 = 10, b2 = 15, b = 25;
    double c1 = 100, c2 = 100, c = 180;
};

using Network = std::variant<CaseINetwork, CaseIINetwork, CaseIIINetwork>;

struct TopologyConfig {
    Network network = CaseIIINetwork{};
    double tau1 = 1;
    double tau2 = 2;
    double kappa = 1;
    ProtocolParams protocol;

    Topology topology() const { return static_cast<Topology>(network.index()); }
    void validate() const;
};

// Parameter set of the worked Case III example.
TopologyConfig reference_case3();

// One power-law loss term ((w1*x1 + w2*x2)/capacity)^buffer, with x_j the
// (delayed) window of set j and w_j = 1/tau_j for every router the set crosses.
struct LossTerm {
    std::string name;
    double capacity;
    double buffer;
    double weight1;
    double weight2;
};

// Loss terms seen by each flow set.
struct LossStructure {
    std::vector<LossTerm> terms;
    std::array<std::vector<int>, 2> seen_by;
};

LossStructure loss_structure(const TopologyConfig& cfg);

double loss_term_value(const LossTerm& t, double x1, double x2);

// d^(m1+m2) term / dx1^m1 dx2^m2.
double loss_term_partial(const LossTerm& t, double x1, double x2, int m1, int m2);

struct EquilibriumPoint {
    double w1 = 0, w2 = 0;
    // Loss terms at equilibrium in loss_structure order (q; q1, q2; p1, p2, q).
    std::vector<std::pair<std::string, double>> losses;
    // Total loss seen by each set.
    std::array<double, 2> total_loss{};
    // Relative balance residual per set.
    std::array<double, 2> residual{};

    double loss(const std::string& name) const;
};

EquilibriumPoint solve_equilibrium(const TopologyConfig& cfg);

struct WindowState {
    double w1 = 0, w2 = 0;
};

enum class LossMode { Exact, Clamped };

// Right-hand side of the fluid model, kappa included. Set j reads its own
// current window from `now`; every loss argument and the ACK-clock prefactor
// read w1 from `lag1` (t - tau1) and w2 from `lag2` (t - tau2). Passing
// lag2 = now gives the model with no delay on flow set 2.
WindowState fluid_rhs(const TopologyConfig& cfg, WindowState now, WindowState lag1,
                      WindowState lag2, LossMode mode = LossMode::Exact);
// Same, with the loss structure of cfg precomputed.
WindowState fluid_rhs(const TopologyConfig& cfg, const LossStructure& ls, WindowState now,
                      WindowState lag1, WindowState lag2, LossMode mode = LossMode::Exact);

// Partial derivative of set j's right-hand side (kappa excluded) of order i in
// its current window x, m1 in delayed w1 and m2 in delayed w2.
double rhs_partial(const TopologyConfig& cfg, const LossStructure& ls, int set, double x,
                   double y1, double y2, int i, int m1, int m2);

// Scalar single-delay model used when both sets are identical: one window w
// with loss multiplicity * (w/(capacity*tau))^buffer.
struct ScalarModel {
    double tau;
    double capacity;
    double buffer;
    double multiplicity;
    ProtocolParams protocol;
};

// Throws Usage when cfg does not have identical sets.
ScalarModel scalar_model(const TopologyConfig& cfg);
bool is_symmetric(const TopologyConfig& cfg);

double scalar_loss(const ScalarModel& m, double w);
double scalar_equilibrium(const ScalarModel& m);

} // namespace ctcp
