#pragma once

#include "ctcp/model.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ctcp {

// Rates are in packets per second, delays in seconds, buffers in packets.
struct PacketSimConfig {
    Topology topology = Topology::CaseIII;
    int flows_per_set = 20;
    double access_rate = 2e6 / 12000.0;
    // Case III: per-set edge routers and a core. Case II: routers 1 and 2 in
    // tandem for both sets. Case I: the core only.
    std::array<double, 2> edge_capacity{1e8 / 3 / 12000.0, 1e8 / 3 / 12000.0};
    std::array<int, 2> edge_buffer{15, 15};
    double core_capacity = 6e7 / 12000.0;
    int core_buffer = 15;
    std::array<double, 2> rtt{0.01, 0.01};
    double duration = 60;
    std::uint64_t seed = 1;
    ProtocolParams protocol;
    double sample_interval = 1e-3;
    double warmup = 5; // seconds excluded from the periodicity metric

    void validate() const;
};

struct RouterCounters {
    std::string name;
    int buffer = 0;
    std::uint64_t arrivals = 0, departures = 0, drops = 0;
    std::uint64_t backlog = 0; // at the end of the run
    int max_occupancy = 0;
};

struct QueueTrace {
    double interval = 0;
    double warmup = 0;
    int buffer = 0;
    std::vector<int> occupancy; // bottleneck (last-hop) queue, sampled
    std::vector<RouterCounters> routers; // last entry is the sampled queue
    // End-to-end packet accounting.
    std::uint64_t sent = 0, acked = 0, lost = 0;
    std::uint64_t in_access = 0, in_routers = 0, in_return = 0;
    std::uint64_t seed = 0;

    bool conserved() const;
};

QueueTrace run_packet_sim(const PacketSimConfig& cfg);

// Largest non-DC bin of the Welch-averaged magnitude spectrum over its median.
double periodicity_metric(const std::vector<double>& series, std::size_t segment = 4096);
double periodicity_metric(const QueueTrace& trace);

constexpr double kPeriodicityThreshold = 5.0;

} // namespace ctcp
