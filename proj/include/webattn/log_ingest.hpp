#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "webattn/core_types.hpp"

namespace webattn {

// Malformed access-log line; field() names the first field that failed.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string field, const std::string& msg)
        : std::runtime_error(field + ": " + msg), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// One NCSA Combined Log Format record. The "-" sentinels for referrer,
// user agent and bytes are preserved so a parsed line re-serializes
// byte-for-byte; tz_offset_seconds keeps the original zone for the same
// reason (time itself is already UTC).
struct LogRecord {
    std::string remote_host;
    std::string identity;
    std::string authuser;
    Instant time;
    int tz_offset_seconds = 0;
    std::string method;
    std::string path;
    std::string protocol;
    int status = 0;
    std::optional<std::int64_t> bytes;
    std::string referrer = "-";
    std::string user_agent = "-";
};

LogRecord parse_log_line(std::string_view line);
std::string format_log_line(const LogRecord& r);

enum class RequestClass { page, asset };

// The asset extension boundary materially changes referral counts, so it
// is configuration, not code.
struct AssetRule {
    std::set<std::string> extensions = {"png", "jpg", "jpeg", "gif",
                                        "css", "js",  "ico",  "svg"};
};

RequestClass classify_request(const LogRecord& r, const AssetRule& rule = {});

// One visitor's requests split at inactivity gaps.
struct Session {
    std::string visitor_key;
    std::vector<LogRecord> events;
    std::int64_t gap_rule_seconds = 3600;
};

// records must be sorted by time; a gap strictly greater than gap_seconds
// between consecutive requests from the same host starts a new session.
std::vector<Session> sessionize(const std::vector<LogRecord>& records,
                                std::int64_t gap_seconds = 3600);

using ReferrerNormalizer = std::function<std::string(std::string_view)>;

// Default normalization: scheme + host, lowercased, trailing slash dropped.
std::string normalize_scheme_host(std::string_view url);
// Override that keeps the whole URL (lowercase scheme+host, path preserved),
// for sites where the path carries the archive page number.
std::string normalize_keep_path(std::string_view url);

struct ExtractOptions {
    AssetRule asset_rule;
    std::set<int> allowed_status = {200, 304};
    ReferrerNormalizer normalizer;  // empty -> normalize_scheme_host
};

struct ExtractResult {
    std::vector<ClickEvent> events;
    std::map<std::string, std::int64_t> drops;  // reason -> count
};

// One ClickEvent per page-classified record on target_path with an allowed
// status and a real referrer. Records on target_path failing a filter are
// counted in drops under "asset", "status" or "no_referrer"; records on
// other paths are ignored.
ExtractResult extract_referrals(const std::vector<LogRecord>& records,
                                std::string_view target_path,
                                const ExtractOptions& opts = {});

}  // namespace webattn
