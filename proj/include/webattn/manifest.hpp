#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace webattn {

constexpr const char* kToolVersion = "0.1.0";

// FNV-1a 64-bit; byte-order free, so digests match across platforms.
class Digest {
public:
    void update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            hash_ ^= c;
            hash_ *= 1099511628211ULL;
        }
    }
    std::string hex() const;

private:
    std::uint64_t hash_ = 14695981039346656037ULL;
};

struct RunManifest {
    std::string command;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
    std::vector<std::string> outputs;
};

nlohmann::json to_json(const RunManifest& m);

}  // namespace webattn
