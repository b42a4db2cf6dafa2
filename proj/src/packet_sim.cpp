#include "ctcp/packet_sim.hpp"

#include "ctcp/error.hpp"
#include "ctcp/format.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <queue>
#include <random>

namespace ctcp {

void PacketSimConfig::validate() const
{
    protocol.validate();
    if (flows_per_set < 1)
        fail(ErrorKind::Domain, "flows must be >= 1");
    if (!(access_rate > 0) || !(core_capacity > 0))
        fail(ErrorKind::Domain, "link rates must be > 0");
    if (core_buffer < 1)
        fail(ErrorKind::Domain, "buffers must be >= 1");
    if (topology != Topology::CaseI)
        for (int j = 0; j < 2; ++j)
            if (!(edge_capacity[j] > 0) || edge_buffer[j] < 1)
                fail(ErrorKind::Domain, "edge routers need capacity > 0 and buffer >= 1");
    for (double r : rtt)
        if (!(r > 0))
            fail(ErrorKind::Domain, "round-trip times must be > 0");
    if (!(duration >= 100 * std::max(rtt[0], rtt[1])))
        fail(ErrorKind::Domain, "duration must be at least 100 round-trip times");
    if (!(sample_interval > 0) || !(warmup >= 0) || !(warmup < duration))
        fail(ErrorKind::Domain, "bad sampling interval or warmup");
}

bool QueueTrace::conserved() const
{
    for (const auto& r : routers)
        if (r.arrivals != r.departures + r.drops + r.backlog)
            return false;
    return sent == acked + lost + in_access + in_routers + in_return;
}

namespace {

enum EventType { AccessDone, RouterDone, Ack, LossNotice, Sample, Start };

struct Event {
    double t;
    std::uint64_t seq;
    EventType type;
    int a;          // flow or router
    std::int64_t b; // packet sequence number
    bool operator>(const Event& o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

struct Packet {
    int flow;
    std::int64_t seq;
};

struct Router {
    double capacity;
    int buffer;
    std::deque<Packet> q;
    RouterCounters c;
};

struct Flow {
    int set;
    double rtt;
    std::vector<int> path;
    double w = 1;
    int in_flight = 0;
    std::int64_t next_seq = 0;
    std::int64_t recover = -1;
    std::deque<std::int64_t> access;
    bool active = false;
};

class Sim {
public:
    explicit Sim(const PacketSimConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

    QueueTrace run()
    {
        build();
        for (std::size_t f = 0; f < flows_.size(); ++f) {
            std::uniform_real_distribution<double> jitter(0, flows_[f].rtt);
            push(jitter(rng_), Start, static_cast<int>(f), 0);
        }
        push(0, Sample, 0, 0);
        while (!events_.empty()) {
            const Event e = events_.top();
            if (e.t > cfg_.duration)
                break;
            events_.pop();
            now_ = e.t;
            handle(e);
        }
        return finish();
    }

private:
    void build()
    {
        auto add_router = [&](const std::string& name, double cap, int buf) {
            Router r{cap, buf, {}, {}};
            r.c.name = name;
            r.c.buffer = buf;
            routers_.push_back(r);
            return static_cast<int>(routers_.size() - 1);
        };
        std::array<std::vector<int>, 2> paths;
        switch (cfg_.topology) {
        case Topology::CaseI: {
            const int core = add_router("core", cfg_.core_capacity, cfg_.core_buffer);
            paths = {std::vector<int>{core}, std::vector<int>{core}};
            break;
        }
        case Topology::CaseII: {
            const int r1 = add_router("router1", cfg_.edge_capacity[0], cfg_.edge_buffer[0]);
            const int r2 = add_router("router2", cfg_.edge_capacity[1], cfg_.edge_buffer[1]);
            paths = {std::vector<int>{r1, r2}, std::vector<int>{r1, r2}};
            break;
        }
        case Topology::CaseIII: {
            const int e1 = add_router("edge1", cfg_.edge_capacity[0], cfg_.edge_buffer[0]);
            const int e2 = add_router("edge2", cfg_.edge_capacity[1], cfg_.edge_buffer[1]);
            const int core = add_router("core", cfg_.core_capacity, cfg_.core_buffer);
            paths = {std::vector<int>{e1, core}, std::vector<int>{e2, core}};
            break;
        }
        }
        sampled_ = paths[0].back();

        // Start every flow near its share of the tightest hop times its RTT.
        for (int s = 0; s < 2; ++s) {
            double share = cfg_.access_rate;
            for (int r : paths[s]) {
                int users = cfg_.flows_per_set;
                if (r == paths[1 - s].back() || (cfg_.topology == Topology::CaseII))
                    users = 2 * cfg_.flows_per_set;
                share = std::min(share, routers_[r].capacity / users);
            }
            for (int f = 0; f < cfg_.flows_per_set; ++f) {
                Flow fl;
                fl.set = s;
                fl.rtt = cfg_.rtt[s];
                fl.path = paths[s];
                fl.w = std::max(1.0, share * fl.rtt);
                flows_.push_back(fl);
            }
        }
    }

    void push(double t, EventType type, int a, std::int64_t b)
    {
        events_.push(Event{t, counter_++, type, a, b});
    }

    void handle(const Event& e)
    {
        switch (e.type) {
        case Start:
            flows_[e.a].active = true;
            try_send(e.a);
            break;
        case AccessDone: {
            Flow& f = flows_[e.a];
            const std::int64_t seq = f.access.front();
            f.access.pop_front();
            if (!f.access.empty())
                push(now_ + 1 / cfg_.access_rate, AccessDone, e.a, 0);
            arrive(f.path.front(), Packet{e.a, seq});
            break;
        }
        case RouterDone: {
            Router& r = routers_[e.a];
            const Packet p = r.q.front();
            r.q.pop_front();
            ++r.c.departures;
            if (!r.q.empty())
                push(now_ + 1 / r.capacity, RouterDone, e.a, 0);
            const auto& path = flows_[p.flow].path;
            const auto hop = std::find(path.begin(), path.end(), e.a);
            if (hop + 1 != path.end()) {
                arrive(*(hop + 1), p);
            } else {
                ++in_return_;
                push(now_ + flows_[p.flow].rtt, Ack, p.flow, p.seq);
            }
            break;
        }
        case Ack: {
            --in_return_;
            ++acked_;
            Flow& f = flows_[e.a];
            --f.in_flight;
            f.w += cfg_.protocol.alpha * std::pow(f.w, cfg_.protocol.k - 1);
            try_send(e.a);
            break;
        }
        case LossNotice: {
            --in_return_;
            ++lost_;
            Flow& f = flows_[e.a];
            --f.in_flight;
            if (e.b > f.recover) {
                f.w = std::max(1.0, (1 - cfg_.protocol.beta) * f.w);
                f.recover = f.next_seq - 1;
            }
            try_send(e.a);
            break;
        }
        case Sample:
            occupancy_.push_back(static_cast<int>(routers_[sampled_].q.size()));
            push(static_cast<double>(occupancy_.size()) * cfg_.sample_interval, Sample, 0, 0);
            break;
        }
    }

    void try_send(int id)
    {
        Flow& f = flows_[id];
        if (!f.active)
            return;
        while (f.in_flight < static_cast<int>(std::floor(f.w))) {
            ++f.in_flight;
            ++sent_;
            f.access.push_back(f.next_seq++);
            if (f.access.size() == 1)
                push(now_ + 1 / cfg_.access_rate, AccessDone, id, 0);
        }
    }

    void arrive(int rid, const Packet& p)
    {
        Router& r = routers_[rid];
        ++r.c.arrivals;
        if (static_cast<int>(r.q.size()) >= r.buffer) {
            ++r.c.drops;
            ++in_return_;
            push(now_ + flows_[p.flow].rtt, LossNotice, p.flow, p.seq);
            return;
        }
        r.q.push_back(p);
        r.c.max_occupancy = std::max(r.c.max_occupancy, static_cast<int>(r.q.size()));
        if (r.q.size() == 1)
            push(now_ + 1 / r.capacity, RouterDone, rid, 0);
    }

    QueueTrace finish()
    {
        QueueTrace tr;
        tr.interval = cfg_.sample_interval;
        tr.warmup = cfg_.warmup;
        tr.buffer = routers_[sampled_].buffer;
        tr.occupancy = std::move(occupancy_);
        tr.seed = cfg_.seed;
        for (std::size_t i = 0; i < routers_.size(); ++i) {
            if (static_cast<int>(i) == sampled_)
                continue;
            auto c = routers_[i].c;
            c.backlog = routers_[i].q.size();
            tr.routers.push_back(c);
        }
        auto c = routers_[sampled_].c;
        c.backlog = routers_[sampled_].q.size();
        tr.routers.push_back(c);
        tr.sent = sent_;
        tr.acked = acked_;
        tr.lost = lost_;
        for (const auto& f : flows_)
            tr.in_access += f.access.size();
        for (const auto& r : routers_)
            tr.in_routers += r.q.size();
        tr.in_return = static_cast<std::uint64_t>(in_return_);
        return tr;
    }

    const PacketSimConfig& cfg_;
    std::mt19937_64 rng_;
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events_;
    std::uint64_t counter_ = 0;
    double now_ = 0;
    std::vector<Router> routers_;
    std::vector<Flow> flows_;
    int sampled_ = 0;
    std::vector<int> occupancy_;
    std::uint64_t sent_ = 0, acked_ = 0, lost_ = 0;
    std::int64_t in_return_ = 0;
};

std::mutex fftw_planner_mutex;

} // namespace

QueueTrace run_packet_sim(const PacketSimConfig& cfg)
{
    cfg.validate();
    return Sim(cfg).run();
}

double periodicity_metric(const std::vector<double>& series, std::size_t segment)
{
    if (series.size() < 4096)
        fail(ErrorKind::Usage, "periodicity metric needs at least 4096 samples, got " +
                                   std::to_string(series.size()));
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    if (*hi - *lo == 0)
        return 0;
    const std::size_t n = std::min(segment, series.size());
    const std::size_t bins = n / 2 + 1;
    std::vector<double> window(n), buf(n), mag(bins, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        window[i] = 0.5 - 0.5 * std::cos(2 * M_PI * static_cast<double>(i) / static_cast<double>(n));
    fftw_complex* out = fftw_alloc_complex(bins);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex);
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf.data(), out, FFTW_ESTIMATE);
    }
    int segments = 0;
    for (std::size_t start = 0; start + n <= series.size(); start += n / 2) {
        double mean = 0;
        for (std::size_t i = 0; i < n; ++i)
            mean += series[start + i];
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            buf[i] = (series[start + i] - mean) * window[i];
        fftw_execute(plan);
        for (std::size_t k = 0; k < bins; ++k)
            mag[k] += std::hypot(out[k][0], out[k][1]);
        ++segments;
    }
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(out);

    // Bin 1 still carries leakage of the removed mean through the window.
    std::vector<double> band(mag.begin() + 2, mag.end());
    if (band.empty())
        return 0;
    const double peak = *std::max_element(band.begin(), band.end());
    std::nth_element(band.begin(), band.begin() + static_cast<std::ptrdiff_t>(band.size() / 2), band.end());
    const double median = band[band.size() / 2];
    if (!(median > 0))
        return peak > 0 ? INFINITY : 0;
    return peak / median;
}

double periodicity_metric(const QueueTrace& trace)
{
    const auto skip = static_cast<std::size_t>(trace.warmup / trace.interval);
    if (skip >= trace.occupancy.size())
        fail(ErrorKind::Usage, "trace is shorter than its warmup");
    std::vector<double> s(trace.occupancy.begin() + static_cast<std::ptrdiff_t>(skip), trace.occupancy.end());
    return periodicity_metric(s);
}

} // namespace ctcp
