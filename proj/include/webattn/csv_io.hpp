#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "webattn/core_types.hpp"
#include "webattn/fitting.hpp"

namespace webattn {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One CSV record with RFC-4180 quoting.
std::vector<std::string> split_csv_line(std::string_view line);

// Inverse of to_csv_row; expects the at,referrer_id,target_path,visitor_key header.
std::vector<ClickEvent> parse_click_events_csv(std::string_view text);

// Accepts either the CSV form or JSON lines (one object per line).
std::vector<ClickEvent> parse_click_events(std::string_view text);

// Reads either day series ("t,count") or page series ("page,count").
std::vector<SeriesPoint> parse_series_csv(std::string_view text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace webattn
