#pragma once

#include "ctcp/model.hpp"
#include "ctcp/packet_sim.hpp"

#include <cstdint>
#include <string>

namespace ctcp {

// Flat `key = value` run configuration. Network keys (b*, c*, tau*) are read
// in the fluid model's units by the analysis commands and in packets,
// packets per second and seconds by packetsim.
struct RunConfig {
    TopologyConfig model;
    int flows = 20;
    double duration = 60;
    std::uint64_t seed = 1;
    double access_rate = 2e6 / 12000.0;
    double nonlinearity = 1; // scales second- and third-order terms in hopf

    // Validated packet simulator view; throws Config when invalid.
    PacketSimConfig packet() const;
};

// Throws Config with the offending line number on unknown keys, keys that do
// not apply to the topology, repeated keys and malformed values, and with the
// validation message when a physical value is out of range. Numbers are
// rounded to 12 significant digits on input so that a config re-read from a
// report is identical to the one that produced it.
RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::string& path);

// Canonical form: one `key = value` line per key that applies, fixed order.
std::string serialize_config(const RunConfig& rc);

// Applies a single `key = value` assignment on top of rc.
void set_config_value(RunConfig& rc, const std::string& key, const std::string& value);

} // namespace ctcp
