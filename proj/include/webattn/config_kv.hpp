#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "webattn/simulators.hpp"

namespace webattn {

// Flat `key = value` simulator config text; '#' starts a comment. Getters
// mark keys consumed so unknown or misspelled keys can be rejected.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text);
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    std::int64_t get_int(const std::string& key, std::int64_t def) const;
    std::vector<double> get_double_list(const std::string& key,
                                        std::vector<double> def) const;

    // Throws ConfigError naming any key no getter asked for.
    void reject_unknown_keys() const;

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

RankDecayConfig rank_config_from(const KeyValueConfig& kv);
PaginatedConfig paginated_config_from(const KeyValueConfig& kv);
RevisitConfig revisit_config_from(const KeyValueConfig& kv);
NoveltyConfig novelty_config_from(const KeyValueConfig& kv);
CascadeConfig cascade_config_from(const KeyValueConfig& kv);

}  // namespace webattn
