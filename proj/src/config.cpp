#include "ctcp/config.hpp"

#include "ctcp/error.hpp"
#include "ctcp/format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace ctcp {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return s;
}

double parse_number(const std::string& key, const std::string& v)
{
    double x = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end || !std::isfinite(x))
        fail(ErrorKind::Config, "value of " + key + " is not a number: '" + v + "'");
    return std::stod(fmt(x));
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v)
{
    std::uint64_t x = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end)
        fail(ErrorKind::Config, "value of " + key + " is not a non-negative integer: '" + v + "'");
    return x;
}

Topology parse_topology(const std::string& v)
{
    const std::string s = lower(v);
    if (s == "i" || s == "1" || s == "casei")
        return Topology::CaseI;
    if (s == "ii" || s == "2" || s == "caseii")
        return Topology::CaseII;
    if (s == "iii" || s == "3" || s == "caseiii")
        return Topology::CaseIII;
    fail(ErrorKind::Config, "unknown topology '" + v + "' (expected I, II or III)");
}

const char* topology_key(Topology t)
{
    switch (t) {
    case Topology::CaseI:
        return "I";
    case Topology::CaseII:
        return "II";
    case Topology::CaseIII:
        return "III";
    }
    return "?";
}

Network default_network(Topology t)
{
    switch (t) {
    case Topology::CaseI:
        return CaseINetwork{};
    case Topology::CaseII:
        return CaseIINetwork{};
    case Topology::CaseIII:
        break;
    }
    return CaseIIINetwork{};
}

double* network_field(Network& net, const std::string& key)
{
    return std::visit(
        [&](auto& n) -> double* {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CaseINetwork>) {
                if (key == "b")
                    return &n.b;
                if (key == "c")
                    return &n.c;
            } else if constexpr (std::is_same_v<T, CaseIINetwork>) {
                if (key == "b1")
                    return &n.b1;
                if (key == "b2")
                    return &n.b2;
                if (key == "c1")
                    return &n.c1;
                if (key == "c2")
                    return &n.c2;
            } else {
                if (key == "b1")
                    return &n.b1;
                if (key == "b2")
                    return &n.b2;
                if (key == "b")
                    return &n.b;
                if (key == "c1")
                    return &n.c1;
                if (key == "c2")
                    return &n.c2;
                if (key == "c")
                    return &n.c;
            }
            return nullptr;
        },
        net);
}

bool is_network_key(const std::string& key)
{
    static const char* keys[] = {"b1", "b2", "b", "c1", "c2", "c"};
    return std::find_if(std::begin(keys), std::end(keys),
                        [&](const char* k) { return key == k; }) != std::end(keys);
}

// Everything except topology.
void apply(RunConfig& rc, const std::string& key, const std::string& v)
{
    ProtocolParams& p = rc.model.protocol;
    if (key == "alpha")
        p.alpha = parse_number(key, v);
    else if (key == "k")
        p.k = parse_number(key, v);
    else if (key == "beta")
        p.beta = parse_number(key, v);
    else if (key == "tau1")
        rc.model.tau1 = parse_number(key, v);
    else if (key == "tau2")
        rc.model.tau2 = parse_number(key, v);
    else if (key == "kappa")
        rc.model.kappa = parse_number(key, v);
    else if (key == "flows") {
        const auto n = parse_unsigned(key, v);
        if (n < 1 || n > 100000)
            fail(ErrorKind::Config, "flows must lie in [1, 100000]");
        rc.flows = static_cast<int>(n);
    } else if (key == "duration")
        rc.duration = parse_number(key, v);
    else if (key == "seed")
        rc.seed = parse_unsigned(key, v);
    else if (key == "access_rate")
        rc.access_rate = parse_number(key, v);
    else if (key == "nonlinearity")
        rc.nonlinearity = parse_number(key, v);
    else if (is_network_key(key)) {
        double* f = network_field(rc.model.network, key);
        if (!f)
            fail(ErrorKind::Config, "key '" + key + "' does not apply to topology " +
                                        topology_key(rc.model.topology()));
        *f = parse_number(key, v);
    } else
        fail(ErrorKind::Config, "unknown key '" + key + "'");
}

void validate(const RunConfig& rc)
{
    try {
        rc.model.validate();
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Domain)
            throw;
        fail(ErrorKind::Config, e.what());
    }
    if (!(rc.duration > 0))
        fail(ErrorKind::Config, "duration must be > 0");
    if (!(rc.access_rate > 0))
        fail(ErrorKind::Config, "access_rate must be > 0");
    if (!(rc.nonlinearity >= 0))
        fail(ErrorKind::Config, "nonlinearity must be >= 0");
}

} // namespace

PacketSimConfig RunConfig::packet() const
{
    PacketSimConfig p;
    p.topology = model.topology();
    p.flows_per_set = flows;
    p.access_rate = access_rate;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, CaseINetwork>) {
                p.core_capacity = n.c;
                p.core_buffer = static_cast<int>(n.b);
            } else if constexpr (std::is_same_v<T, CaseIINetwork>) {
                p.edge_capacity = {n.c1, n.c2};
                p.edge_buffer = {static_cast<int>(n.b1), static_cast<int>(n.b2)};
                p.core_capacity = n.c2;
                p.core_buffer = static_cast<int>(n.b2);
            } else {
                p.edge_capacity = {n.c1, n.c2};
                p.edge_buffer = {static_cast<int>(n.b1), static_cast<int>(n.b2)};
                p.core_capacity = n.c;
                p.core_buffer = static_cast<int>(n.b);
            }
        },
        model.network);
    p.rtt = {model.tau1, model.tau2};
    p.duration = duration;
    p.seed = seed;
    p.protocol = model.protocol;
    p.warmup = std::min(5.0, duration / 4);
    try {
        p.validate();
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Domain)
            throw;
        fail(ErrorKind::Config, std::string("packet simulation: ") + e.what());
    }
    return p;
}

RunConfig parse_config(const std::string& text, const std::string& source)
{
    struct Entry {
        std::string key, value;
        int line;
    };
    std::vector<Entry> entries;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    auto at = [&](int ln, const std::string& msg) {
        fail(ErrorKind::Config, source + ":" + std::to_string(ln) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty())
            continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            at(line, "expected 'key = value', got '" + s + "'");
        Entry e{lower(trim(s.substr(0, eq))), trim(s.substr(eq + 1)), line};
        if (e.key.empty())
            at(line, "missing key");
        if (e.value.empty())
            at(line, "missing value for '" + e.key + "'");
        if (auto it = seen.find(e.key); it != seen.end())
            at(line, "key '" + e.key + "' repeats line " + std::to_string(it->second));
        seen[e.key] = line;
        entries.push_back(e);
    }

    RunConfig rc;
    for (const auto& e : entries)
        if (e.key == "topology") {
            try {
                rc.model.network = default_network(parse_topology(e.value));
            } catch (const Error& err) {
                at(e.line, err.what());
            }
        }
    for (const auto& e : entries) {
        if (e.key == "topology")
            continue;
        try {
            apply(rc, e.key, e.value);
        } catch (const Error& err) {
            at(e.line, err.what());
        }
    }
    try {
        validate(rc);
    } catch (const Error& err) {
        fail(ErrorKind::Config, source + ": " + err.what());
    }
    return rc;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        fail(ErrorKind::Config, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

void set_config_value(RunConfig& rc, const std::string& key_in, const std::string& value)
{
    const std::string key = lower(trim(key_in));
    const std::string v = trim(value);
    if (key == "topology")
        rc.model.network = default_network(parse_topology(v));
    else
        apply(rc, key, v);
    validate(rc);
}

std::string serialize_config(const RunConfig& rc)
{
    std::ostringstream o;
    auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
    const TopologyConfig& m = rc.model;
    kv("topology", topology_key(m.topology()));
    kv("alpha", fmt(m.protocol.alpha));
    kv("k", fmt(m.protocol.k));
    kv("beta", fmt(m.protocol.beta));
    Network net = m.network;
    for (const char* key : {"b1", "b2", "b", "c1", "c2", "c"})
        if (const double* f = network_field(net, key))
            kv(key, fmt(*f));
    kv("tau1", fmt(m.tau1));
    kv("tau2", fmt(m.tau2));
    kv("kappa", fmt(m.kappa));
    kv("flows", std::to_string(rc.flows));
    kv("duration", fmt(rc.duration));
    kv("seed", std::to_string(rc.seed));
    kv("access_rate", fmt(rc.access_rate));
    kv("nonlinearity", fmt(rc.nonlinearity));
    return o.str();
}

} // namespace ctcp
