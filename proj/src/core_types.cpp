#include "webattn/core_types.hpp"

#include <numeric>
#include <sstream>

namespace webattn {

std::int64_t series_total(const ReferralSeries& s) {
    return std::accumulate(s.bins.begin(), s.bins.end(), std::int64_t{0});
}

std::int64_t series_total(const PageSeries& s) {
    std::int64_t total = 0;
    for (const auto& [page, count] : s.counts) total += count;
    return total;
}

const char* fit_model_name(FitModel m) {
    return m == FitModel::power_law ? "power_law" : "stretched_exp";
}

std::string to_csv(const ReferralSeries& s) {
    std::ostringstream out;
    out << "t,count\n";
    for (std::size_t k = 0; k < s.bins.size(); ++k)
        out << (k + 1) << ',' << s.bins[k] << '\n';
    return out.str();
}

std::string to_csv(const PageSeries& s) {
    std::ostringstream out;
    out << "page,count\n";
    for (const auto& [page, count] : s.counts)
        out << page << ',' << count << '\n';
    return out.str();
}

nlohmann::json to_json(const ReferralSeries& s) {
    return nlohmann::json{
        {"referrer_id", s.referrer_id},
        {"t0", s.t0.seconds},
        {"bins", s.bins},
    };
}

nlohmann::json to_json(const PageSeries& s) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [page, count] : s.counts)
        counts[std::to_string(page)] = count;
    return nlohmann::json{{"counts", counts}};
}

nlohmann::json to_json(const FitResult& r) {
    nlohmann::json j{
        {"model", fit_model_name(r.model)},
        {"prefactor_C", r.prefactor_C},
        {"goodness_r2", r.goodness_r2},
        {"fit_range", {r.fit_range.t_min, r.fit_range.t_max}},
        {"n_points", r.n_points},
        {"converged", r.converged},
        {"degenerate", r.degenerate},
    };
    if (r.model == FitModel::power_law) {
        j["exponent_beta"] = r.exponent_beta;
        j["beta_stderr"] = r.beta_stderr;
    } else {
        j["stretch_a"] = r.stretch_a;
        j["stretch_b"] = r.stretch_b;
    }
    return j;
}

// Minimal RFC-4180 quoting; referrer URLs occasionally contain commas.
static void append_csv_field(std::string& out, const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        out += field;
        return;
    }
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

nlohmann::json to_json(const ClickEvent& e) {
    return nlohmann::json{
        {"at", e.at.seconds},
        {"referrer_id", e.referrer_id},
        {"target_path", e.target_path},
        {"visitor_key", e.visitor_key},
    };
}

std::string to_csv_row(const ClickEvent& e) {
    std::string out = std::to_string(e.at.seconds);
    out += ',';
    append_csv_field(out, e.referrer_id);
    out += ',';
    append_csv_field(out, e.target_path);
    out += ',';
    append_csv_field(out, e.visitor_key);
    return out;
}

}  // namespace webattn
