#include "doctest.h"

#include "ctcp/config.hpp"
#include "ctcp/error.hpp"
#include "ctcp/packet_sim.hpp"

#include <random>

using namespace ctcp;

namespace {

PacketSimConfig small_run(std::uint64_t seed)
{
    PacketSimConfig c = load_config(CTCP_SOURCE_DIR "/configs/packet_small.conf").packet();
    c.duration = 20;
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("lone flow behind deep buffers never drops")
{
    PacketSimConfig c;
    c.topology = Topology::CaseIII;
    c.flows_per_set = 1;
    c.edge_buffer = {100000, 100000};
    c.core_buffer = 100000;
    c.duration = 10;
    c.warmup = 1;
    const QueueTrace tr = run_packet_sim(c);
    for (const auto& r : tr.routers)
        CHECK(r.drops == 0);
    CHECK(tr.lost == 0);
    CHECK(tr.sent > 0);
    CHECK(tr.conserved());
}

TEST_CASE("conservation and buffer bounds in every topology")
{
    for (Topology t : {Topology::CaseI, Topology::CaseII, Topology::CaseIII}) {
        PacketSimConfig c = small_run(3);
        c.topology = t;
        const QueueTrace tr = run_packet_sim(c);
        CHECK(tr.conserved());
        CHECK(tr.sent == tr.acked + tr.lost + tr.in_access + tr.in_routers + tr.in_return);
        std::uint64_t drops = 0;
        for (const auto& r : tr.routers) {
            CHECK(r.max_occupancy <= r.buffer);
            CHECK(r.arrivals == r.departures + r.drops + r.backlog);
            drops += r.drops;
        }
        CHECK(drops >= tr.lost);
        CHECK(drops - tr.lost <= tr.in_return);
        for (int q : tr.occupancy)
            CHECK(q <= tr.buffer);
    }
}

TEST_CASE("identical seed gives identical trace")
{
    const QueueTrace a = run_packet_sim(small_run(11));
    const QueueTrace b = run_packet_sim(small_run(11));
    const QueueTrace c = run_packet_sim(small_run(12));
    CHECK(a.occupancy == b.occupancy);
    CHECK(a.sent == b.sent);
    CHECK(a.occupancy != c.occupancy);
}

TEST_CASE("invalid packet configurations")
{
    PacketSimConfig c;
    c.flows_per_set = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = PacketSimConfig{};
    c.duration = 0.5;
    CHECK_THROWS_AS(c.validate(), Error);
    c = PacketSimConfig{};
    c.warmup = c.duration;
    CHECK_THROWS_AS(c.validate(), Error);
    c = PacketSimConfig{};
    c.core_buffer = 0;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("periodicity metric on synthetic series")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0, 1);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(60000);
        for (auto& v : x)
            v = n(rng);
        worst = std::max(worst, periodicity_metric(x));
    }
    CHECK(worst < 3);

    std::vector<double> s(60000);
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = 10 + std::sin(2 * M_PI * 0.5 * static_cast<double>(i) * 1e-3) + 0.1 * n(rng);
    CHECK(periodicity_metric(s) > 50);

    CHECK(periodicity_metric(std::vector<double>(8192, 4.0)) == 0);
    CHECK_THROWS_AS(periodicity_metric(std::vector<double>(4000, 1.0)), Error);
}

TEST_CASE("large-buffer long-delay queue is more periodic")
{
    PacketSimConfig large = load_config(CTCP_SOURCE_DIR "/configs/packet_large.conf").packet();
    PacketSimConfig small = load_config(CTCP_SOURCE_DIR "/configs/packet_small.conf").packet();
    CHECK(periodicity_metric(run_packet_sim(large)) > periodicity_metric(run_packet_sim(small)));
}
