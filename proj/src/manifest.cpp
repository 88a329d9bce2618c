#include "webattn/manifest.hpp"

#include <cstdio>

namespace webattn {

std::string Digest::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash_));
    return buf;
}

nlohmann::json to_json(const RunManifest& m) {
    return nlohmann::json{
        {"command", m.command},
        {"config_digest", m.config_digest},
        {"seed", m.seed},
        {"tool_version", m.tool_version},
        {"outputs", m.outputs},
    };
}

}  // namespace webattn
