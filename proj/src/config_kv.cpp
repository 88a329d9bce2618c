#include "webattn/config_kv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace webattn {

namespace {

std::string trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
    KeyValueConfig cfg;
    std::size_t pos = 0;
    int lineno = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;

        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        std::string stripped = trim(line);
        if (stripped.empty()) continue;

        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + stripped + "'");
        std::string key = trim(std::string_view(stripped).substr(0, eq));
        std::string value = trim(std::string_view(stripped).substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key");
        if (cfg.values_.count(key))
            throw ConfigError("config: duplicate key '" + key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool KeyValueConfig::has(const std::string& key) const {
    return values_.count(key) > 0;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& def) const {
    consumed_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double def) const {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not a number: '" +
                          it->second + "'");
    }
}

std::int64_t KeyValueConfig::get_int(const std::string& key,
                                     std::int64_t def) const {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    std::int64_t v = 0;
    const std::string& s = it->second;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ConfigError("config: key '" + key + "' is not an integer: '" + s +
                          "'");
    return v;
}

std::vector<double> KeyValueConfig::get_double_list(
    const std::string& key, std::vector<double> def) const {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' has a bad list item: '" +
                              item + "'");
        }
    }
    return out;
}

void KeyValueConfig::reject_unknown_keys() const {
    std::string unknown;
    for (const auto& [key, value] : values_)
        if (!consumed_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
    if (!unknown.empty())
        throw ConfigError("config: unknown key(s): " + unknown);
}

RankDecayConfig rank_config_from(const KeyValueConfig& kv) {
    RankDecayConfig cfg;
    cfg.beta = kv.get_double("beta", cfg.beta);
    cfg.visitors_per_day = kv.get_int("visitors_per_day", cfg.visitors_per_day);
    cfg.links_per_day = static_cast<int>(kv.get_int("links_per_day", cfg.links_per_day));
    cfg.attractiveness = kv.get_double_list("attractiveness", cfg.attractiveness);
    cfg.top_click_prob = kv.get_double("top_click_prob", cfg.top_click_prob);
    cfg.front_page_capacity =
        static_cast<int>(kv.get_int("front_page_capacity", cfg.front_page_capacity));
    cfg.horizon_days = static_cast<int>(kv.get_int("horizon_days", cfg.horizon_days));
    cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(cfg.seed)));
    return cfg;
}

PaginatedConfig paginated_config_from(const KeyValueConfig& kv) {
    PaginatedConfig cfg;
    cfg.posts_per_page = static_cast<int>(kv.get_int("posts_per_page", cfg.posts_per_page));
    cfg.posts_per_day = static_cast<int>(kv.get_int("posts_per_day", cfg.posts_per_day));
    cfg.beta_page = kv.get_double("beta_page", cfg.beta_page);
    cfg.visitors_per_day = kv.get_int("visitors_per_day", cfg.visitors_per_day);
    cfg.top_click_prob = kv.get_double("top_click_prob", cfg.top_click_prob);
    cfg.horizon_days = static_cast<int>(kv.get_int("horizon_days", cfg.horizon_days));
    cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(cfg.seed)));
    return cfg;
}

RevisitConfig revisit_config_from(const KeyValueConfig& kv) {
    RevisitConfig cfg;
    cfg.alpha = kv.get_double("alpha", cfg.alpha);
    cfg.num_visitors = kv.get_int("num_visitors", cfg.num_visitors);
    cfg.tau_min = static_cast<int>(kv.get_int("tau_min", cfg.tau_min));
    cfg.items_per_day = static_cast<int>(kv.get_int("items_per_day", cfg.items_per_day));
    cfg.horizon_days = static_cast<int>(kv.get_int("horizon_days", cfg.horizon_days));
    cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(cfg.seed)));
    return cfg;
}

NoveltyConfig novelty_config_from(const KeyValueConfig& kv) {
    NoveltyConfig cfg;
    cfg.initial_count = kv.get_double("initial_count", cfg.initial_count);
    std::string kind = kv.get_string("decay", "stretched_exp");
    if (kind == "stretched_exp")
        cfg.decay.kind = NoveltyDecay::Kind::stretched_exp;
    else if (kind == "power")
        cfg.decay.kind = NoveltyDecay::Kind::power;
    else
        throw ConfigError("config: decay must be stretched_exp or power, got '" +
                          kind + "'");
    cfg.decay.a = kv.get_double("a", cfg.decay.a);
    cfg.decay.b = kv.get_double("b", cfg.decay.b);
    cfg.decay.beta = kv.get_double("beta", cfg.decay.beta);
    cfg.rate_scale = kv.get_double("rate_scale", cfg.rate_scale);
    cfg.dt = kv.get_double("dt", cfg.dt);
    cfg.horizon_days = static_cast<int>(kv.get_int("horizon_days", cfg.horizon_days));
    return cfg;
}

CascadeConfig cascade_config_from(const KeyValueConfig& kv) {
    CascadeConfig cfg;
    cfg.repost_prob = kv.get_double("repost_prob", cfg.repost_prob);
    cfg.child_delay_mean = kv.get_double("child_delay_mean", cfg.child_delay_mean);
    cfg.max_nodes = kv.get_int("max_nodes", cfg.max_nodes);
    cfg.base = rank_config_from(kv);  // base stream keys are flat
    cfg.seed = cfg.base.seed;
    return cfg;
}

}  // namespace webattn
