#pragma once

#include <ctime>
#include <map>
#include <string>

#include <json.hpp>

#include "teamdims/fs.hpp"
#include "teamdims/hash.hpp"
#include "teamdims/version.hpp"

namespace teamdims {

// ISO-8601 UTC, second resolution.
inline std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Provenance record written next to everything a mutating command produces:
// which subcommand ran, when, under which configuration, over which inputs.
struct RunManifest {
    std::string command;
    std::string timestamp = utc_timestamp();
    std::string tool_version = kVersion;
    std::string config_hash;
    std::map<std::string, std::string> inputs;  // path -> content hash
    std::map<std::string, std::string> outputs; // path -> content hash

    void set_config(const nlohmann::json& config) { config_hash = content_hash(config.dump()); }
    void add_input(const std::string& path) { inputs[path] = file_hash(path); }
    void add_output(const std::string& path) { outputs[path] = file_hash(path); }

    nlohmann::json to_json() const {
        return {{"command", command},
                {"timestamp", timestamp},
                {"tool_version", tool_version},
                {"config_hash", config_hash},
                {"inputs", inputs},
                {"outputs", outputs}};
    }

    static RunManifest from_json(const nlohmann::json& obj) {
        RunManifest m;
        m.command = obj.at("command").get<std::string>();
        m.timestamp = obj.at("timestamp").get<std::string>();
        m.tool_version = obj.at("tool_version").get<std::string>();
        m.config_hash = obj.at("config_hash").get<std::string>();
        m.inputs = obj.at("inputs").get<std::map<std::string, std::string>>();
        m.outputs = obj.at("outputs").get<std::map<std::string, std::string>>();
        return m;
    }

    void write(const std::string& path) const {
        write_text_file(path, to_json().dump(2) + "\n");
    }
};

// File outputs get a sibling `<name>.manifest.json`; directory outputs keep
// `run_manifest.json` inside.
inline std::string manifest_path_for(const std::string& output, bool is_directory) {
    return is_directory ? output + "/run_manifest.json" : output + ".manifest.json";
}

} // namespace teamdims
