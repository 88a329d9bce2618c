#include "webattn/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace webattn {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

namespace {

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                          : nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) out.push_back(line);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
    }
    return out;
}

std::int64_t to_int(const std::string& s, const char* what) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw IoError(std::string(what) + ": not an integer: '" + s + "'");
    return v;
}

}  // namespace

std::vector<ClickEvent> parse_click_events_csv(std::string_view text) {
    auto lines = lines_of(text);
    if (lines.empty()) return {};
    std::size_t start = 0;
    if (lines[0] == kClickEventCsvHeader) start = 1;
    std::vector<ClickEvent> events;
    events.reserve(lines.size() - start);
    for (std::size_t i = start; i < lines.size(); ++i) {
        auto f = split_csv_line(lines[i]);
        if (f.size() != 4)
            throw IoError("events csv row " + std::to_string(i + 1) +
                          ": expected 4 fields, got " + std::to_string(f.size()));
        events.push_back(ClickEvent{Instant{to_int(f[0], "events csv at")},
                                    std::move(f[1]), std::move(f[2]),
                                    std::move(f[3])});
    }
    return events;
}

std::vector<ClickEvent> parse_click_events(std::string_view text) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '{') {
        std::vector<ClickEvent> events;
        for (auto line : lines_of(text)) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw IoError(std::string("events jsonl: ") + e.what());
            }
            events.push_back(ClickEvent{Instant{j.at("at").get<std::int64_t>()},
                                        j.at("referrer_id").get<std::string>(),
                                        j.at("target_path").get<std::string>(),
                                        j.at("visitor_key").get<std::string>()});
        }
        return events;
    }
    return parse_click_events_csv(text);
}

std::vector<SeriesPoint> parse_series_csv(std::string_view text) {
    auto lines = lines_of(text);
    std::vector<SeriesPoint> pts;
    std::size_t start = 0;
    if (!lines.empty() && (lines[0] == "t,count" || lines[0] == "page,count"))
        start = 1;
    for (std::size_t i = start; i < lines.size(); ++i) {
        auto f = split_csv_line(lines[i]);
        if (f.size() != 2)
            throw IoError("series csv row " + std::to_string(i + 1) +
                          ": expected 2 fields");
        pts.push_back(SeriesPoint{static_cast<double>(to_int(f[0], "series t")),
                                  static_cast<double>(to_int(f[1], "series count"))});
    }
    return pts;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace webattn
