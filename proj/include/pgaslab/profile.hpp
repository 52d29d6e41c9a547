#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace pgaslab {

/// The four hardware characteristic parameters driving every prediction, plus
/// the element/index widths of the kernels.
struct HardwareProfile {
    double w_thread_private = 0;  // bytes/s, per-thread private-memory bandwidth
    double w_node_remote = 0;     // bytes/s, per-node interconnect bandwidth
    double tau = 0;               // seconds, individual remote access latency
    double cacheline_bytes = 64;
    double element_bytes = 8;
    double index_bytes = 4;

    void validate() const {
        if (w_thread_private <= 0 || w_node_remote <= 0 || tau <= 0 || cacheline_bytes <= 0 ||
            element_bytes <= 0 || index_bytes <= 0)
            throw std::invalid_argument("HardwareProfile: all parameters must be positive");
        if (element_bytes > cacheline_bytes)
            throw std::invalid_argument("HardwareProfile: element_bytes exceeds cacheline_bytes");
    }
};

/// The Abel-cluster parameter set used throughout: 75 GB/s node STREAM
/// bandwidth over 16 threads, 6 GB/s interconnect, 3.4 us latency.
inline HardwareProfile abel_profile() {
    HardwareProfile p;
    p.w_thread_private = 75e9 / 16.0;
    p.w_node_remote = 6e9;
    p.tau = 3.4e-6;
    p.cacheline_bytes = 64;
    return p;
}

inline nlohmann::json profile_to_json(const HardwareProfile& p) {
    return {{"w_thread_private", p.w_thread_private},
            {"w_node_remote", p.w_node_remote},
            {"tau", p.tau},
            {"cacheline_bytes", p.cacheline_bytes},
            {"element_bytes", p.element_bytes},
            {"index_bytes", p.index_bytes}};
}

inline HardwareProfile profile_from_json(const nlohmann::json& j) {
    HardwareProfile p;
    auto require = [&j](const char* key) -> double {
        if (!j.contains(key))
            throw std::runtime_error(std::string("hardware profile: missing field '") + key + "'");
        if (!j[key].is_number())
            throw std::runtime_error(std::string("hardware profile: field '") + key +
                                     "' is not a number");
        return j[key].get<double>();
    };
    p.w_thread_private = require("w_thread_private");
    p.w_node_remote = require("w_node_remote");
    p.tau = require("tau");
    p.cacheline_bytes = require("cacheline_bytes");
    if (j.contains("element_bytes")) p.element_bytes = require("element_bytes");
    if (j.contains("index_bytes")) p.index_bytes = require("index_bytes");
    p.validate();
    return p;
}

inline void save_profile(const std::string& path, const HardwareProfile& p) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << profile_to_json(p).dump(2) << '\n';
}

inline HardwareProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("hardware profile " + path + ": " + e.what());
    }
    return profile_from_json(j);
}

/// "abel" resolves to the bundled profile; anything else is a JSON path.
inline HardwareProfile resolve_profile(const std::string& name_or_path) {
    if (name_or_path == "abel") return abel_profile();
    return load_profile(name_or_path);
}

}  // namespace pgaslab
