#include "webattn/log_ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <sstream>

namespace webattn {

namespace {

const std::array<std::string_view, 12> kMonths = {
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

// Days since 1970-01-01 for a proleptic Gregorian civil date
// (Howard Hinnant's days_from_civil).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const int yoe = y - era * 400;
    const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + doe - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const int doe = static_cast<int>(z - era * 146097);
    const int yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int yr = yoe + static_cast<int>(era) * 400;
    const int doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const int mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yr + (m <= 2);
}

struct Scanner {
    std::string_view s;
    std::size_t pos = 0;

    bool done() const { return pos >= s.size(); }

    void expect(char c, const char* field) {
        if (done() || s[pos] != c)
            throw ParseError(field, std::string("expected '") + c + "'");
        ++pos;
    }

    std::string token(const char* field) {
        std::size_t start = pos;
        while (pos < s.size() && s[pos] != ' ') ++pos;
        if (pos == start) throw ParseError(field, "empty field");
        return std::string(s.substr(start, pos - start));
    }

    // Bracketed [..] body, delimiter not consumed inside.
    std::string bracketed(const char* field) {
        expect('[', field);
        std::size_t start = pos;
        while (pos < s.size() && s[pos] != ']') ++pos;
        if (done()) throw ParseError(field, "unterminated '['");
        std::string body(s.substr(start, pos - start));
        ++pos;
        return body;
    }

    // Quoted "..." body; backslash escapes are kept raw so the line
    // round-trips byte-for-byte.
    std::string quoted(const char* field) {
        expect('"', field);
        std::string body;
        while (!done()) {
            char c = s[pos];
            if (c == '\\' && pos + 1 < s.size()) {
                body += c;
                body += s[pos + 1];
                pos += 2;
                continue;
            }
            if (c == '"') {
                ++pos;
                return body;
            }
            body += c;
            ++pos;
        }
        throw ParseError(field, "unterminated quote");
    }
};

int parse_int(std::string_view sv, const char* field) {
    int value = 0;
    auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
    if (ec != std::errc{} || p != sv.data() + sv.size())
        throw ParseError(field, "not an integer: '" + std::string(sv) + "'");
    return value;
}

// [dd/Mon/yyyy:HH:MM:SS +zzzz] -> UTC seconds plus the original offset.
void parse_clf_time(const std::string& body, Instant& out, int& tz_out) {
    auto fail = [](const std::string& why) { throw ParseError("time", why); };
    // dd/Mon/yyyy:HH:MM:SS zone
    if (body.size() != 26) fail("bad timestamp length: '" + body + "'");
    if (body[2] != '/' || body[6] != '/' || body[11] != ':' || body[14] != ':' ||
        body[17] != ':' || body[20] != ' ')
        fail("bad timestamp layout: '" + body + "'");

    auto num = [&](int at, int len) {
        int v = 0;
        for (int i = at; i < at + len; ++i) {
            if (!std::isdigit(static_cast<unsigned char>(body[i])))
                throw ParseError("time", "bad digit in timestamp: '" + body + "'");
            v = v * 10 + (body[i] - '0');
        }
        return v;
    };

    const int day = num(0, 2);
    const std::string_view mon(body.data() + 3, 3);
    int month = 0;
    for (int i = 0; i < 12; ++i)
        if (kMonths[i] == mon) month = i + 1;
    if (month == 0) fail("unknown month '" + std::string(mon) + "'");
    const int year = num(7, 4);
    const int hh = num(12, 2), mm = num(15, 2), ss = num(18, 2);
    if (day < 1 || day > 31 || hh > 23 || mm > 59 || ss > 60)
        fail("timestamp field out of range: '" + body + "'");

    const char sign = body[21];
    if (sign != '+' && sign != '-') fail("bad zone sign in '" + body + "'");
    const int zh = num(22, 2), zm = num(24, 2);
    int offset = (zh * 3600 + zm * 60) * (sign == '-' ? -1 : 1);

    std::int64_t local = days_from_civil(year, month, day) * kSecondsPerDay +
                         hh * 3600 + mm * 60 + ss;
    out = Instant{local - offset};
    tz_out = offset;
}

std::string format_clf_time(Instant t, int tz_offset) {
    std::int64_t local = t.seconds + tz_offset;
    std::int64_t days = local / kSecondsPerDay;
    std::int64_t sod = local % kSecondsPerDay;
    if (sod < 0) {
        sod += kSecondsPerDay;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[48];
    int off = std::abs(tz_offset);
    std::snprintf(buf, sizeof(buf), "%02d/%.3s/%04d:%02lld:%02lld:%02lld %c%02d%02d",
                  d, kMonths[m - 1].data(), y,
                  static_cast<long long>(sod / 3600),
                  static_cast<long long>((sod / 60) % 60),
                  static_cast<long long>(sod % 60),
                  tz_offset < 0 ? '-' : '+', off / 3600, (off / 60) % 60);
    return buf;
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

LogRecord parse_log_line(std::string_view line) {
    Scanner sc{line};
    LogRecord r;

    r.remote_host = sc.token("remote_host");
    sc.expect(' ', "identity");
    r.identity = sc.token("identity");
    sc.expect(' ', "authuser");
    r.authuser = sc.token("authuser");
    sc.expect(' ', "time");
    parse_clf_time(sc.bracketed("time"), r.time, r.tz_offset_seconds);
    sc.expect(' ', "request");

    std::string request = sc.quoted("request");
    {
        std::istringstream rs(request);
        std::string extra;
        if (!(rs >> r.method >> r.path >> r.protocol) || (rs >> extra))
            throw ParseError("request", "expected \"METHOD path PROTO\", got '" + request + "'");
    }
    if (r.path.empty() || r.path[0] != '/')
        throw ParseError("request", "path must begin with '/': '" + r.path + "'");

    sc.expect(' ', "status");
    r.status = parse_int(sc.token("status"), "status");
    if (r.status < 100 || r.status > 599)
        throw ParseError("status", "status out of range: " + std::to_string(r.status));

    sc.expect(' ', "bytes");
    std::string bytes = sc.token("bytes");
    if (bytes == "-") {
        r.bytes = std::nullopt;
    } else {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(bytes.data(), bytes.data() + bytes.size(), v);
        if (ec != std::errc{} || p != bytes.data() + bytes.size())
            throw ParseError("bytes", "not an integer: '" + bytes + "'");
        r.bytes = v;
    }

    sc.expect(' ', "referrer");
    r.referrer = sc.quoted("referrer");
    sc.expect(' ', "user_agent");
    r.user_agent = sc.quoted("user_agent");
    if (!sc.done())
        throw ParseError("user_agent", "trailing garbage after user agent");
    return r;
}

std::string format_log_line(const LogRecord& r) {
    std::ostringstream out;
    out << r.remote_host << ' ' << r.identity << ' ' << r.authuser << " ["
        << format_clf_time(r.time, r.tz_offset_seconds) << "] \"" << r.method
        << ' ' << r.path << ' ' << r.protocol << "\" " << r.status << ' ';
    if (r.bytes)
        out << *r.bytes;
    else
        out << '-';
    out << " \"" << r.referrer << "\" \"" << r.user_agent << '"';
    return out.str();
}

RequestClass classify_request(const LogRecord& r, const AssetRule& rule) {
    std::string_view path = r.path;
    if (auto q = path.find_first_of("?#"); q != std::string_view::npos)
        path = path.substr(0, q);
    auto slash = path.find_last_of('/');
    std::string_view segment =
        slash == std::string_view::npos ? path : path.substr(slash + 1);
    auto dot = segment.find_last_of('.');
    if (dot == std::string_view::npos || dot + 1 == segment.size())
        return RequestClass::page;
    std::string ext = lowercase(segment.substr(dot + 1));
    return rule.extensions.count(ext) ? RequestClass::asset : RequestClass::page;
}

std::vector<Session> sessionize(const std::vector<LogRecord>& records,
                                std::int64_t gap_seconds) {
    for (std::size_t i = 1; i < records.size(); ++i)
        if (records[i].time < records[i - 1].time)
            throw std::invalid_argument("sessionize: records not sorted by time");

    // visitor -> index of its open session
    std::map<std::string, std::size_t> open;
    std::vector<Session> sessions;
    for (const auto& rec : records) {
        auto it = open.find(rec.remote_host);
        bool fresh = it == open.end();
        if (!fresh) {
            const auto& last = sessions[it->second].events.back();
            if (rec.time - last.time > gap_seconds) fresh = true;
        }
        if (fresh) {
            sessions.push_back(Session{rec.remote_host, {}, gap_seconds});
            open[rec.remote_host] = sessions.size() - 1;
        }
        sessions[open[rec.remote_host]].events.push_back(rec);
    }
    return sessions;
}

std::string normalize_scheme_host(std::string_view url) {
    std::string_view rest = url;
    std::string scheme;
    if (auto p = rest.find("://"); p != std::string_view::npos) {
        scheme = lowercase(rest.substr(0, p));
        rest = rest.substr(p + 3);
    }
    auto end = rest.find_first_of("/?#");
    std::string host = lowercase(rest.substr(0, end));
    if (scheme.empty()) return host;
    return scheme + "://" + host;
}

std::string normalize_keep_path(std::string_view url) {
    auto p = url.find("://");
    if (p == std::string_view::npos) {
        std::string out(url);
        while (out.size() > 1 && out.back() == '/') out.pop_back();
        return out;
    }
    auto host_end = url.find_first_of("/?#", p + 3);
    std::string out = lowercase(url.substr(0, host_end));
    if (host_end != std::string_view::npos)
        out += std::string(url.substr(host_end));
    while (out.size() > 1 && out.back() == '/') out.pop_back();
    return out;
}

ExtractResult extract_referrals(const std::vector<LogRecord>& records,
                                std::string_view target_path,
                                const ExtractOptions& opts) {
    ReferrerNormalizer norm = opts.normalizer;
    if (!norm) norm = [](std::string_view u) { return normalize_scheme_host(u); };

    ExtractResult out;
    for (const auto& rec : records) {
        if (rec.path != target_path) continue;
        if (classify_request(rec, opts.asset_rule) == RequestClass::asset) {
            ++out.drops["asset"];
            continue;
        }
        if (!opts.allowed_status.count(rec.status)) {
            ++out.drops["status"];
            continue;
        }
        if (rec.referrer == "-") {
            ++out.drops["no_referrer"];
            continue;
        }
        out.events.push_back(ClickEvent{rec.time, norm(rec.referrer),
                                        rec.path, rec.remote_host});
    }
    return out;
}

}  // namespace webattn
