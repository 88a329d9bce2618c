// webattn: batch CLI over the referral-decay library. Commands communicate
// only through CSV/JSON files so runs compose in the shell and reproduce
// byte-for-byte; exit codes: 0 ok, 1 I/O, 2 input/config, 3 numerical.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "webattn/config_kv.hpp"
#include "webattn/csv_io.hpp"
#include "webattn/fitting.hpp"
#include "webattn/log_ingest.hpp"
#include "webattn/manifest.hpp"
#include "webattn/series.hpp"
#include "webattn/simulators.hpp"

namespace fs = std::filesystem;
using namespace webattn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::string sanitize_filename(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-')
            out += c;
        else
            out += '_';
    }
    if (out.empty()) out = "series";
    return out;
}

// Output paths are recorded relative to the manifest so identical runs
// produce identical bytes regardless of where they land.
void write_manifest(const fs::path& out_dir, RunManifest m) {
    m.outputs.push_back("manifest.json");
    write_text_file((out_dir / "manifest.json").string(),
                    to_json(m).dump(2) + "\n");
}

std::uint64_t default_seed_from_env() {
    if (const char* env = std::getenv("WEBATTN_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 1;
}

struct FitFlags {
    int t_min = 0, t_max = 0;
    std::string zero_policy = "drop";
    std::string weighting = "uniform";

    void attach(CLI::App* cmd) {
        cmd->add_option("--t-min", t_min, "Lower fit bound (t or page)");
        cmd->add_option("--t-max", t_max, "Upper fit bound");
        cmd->add_option("--zero-policy", zero_policy, "drop | add-half")
            ->check(CLI::IsMember({"drop", "add-half"}));
        cmd->add_option("--weighting", weighting, "uniform | count")
            ->check(CLI::IsMember({"uniform", "count"}));
    }

    FitOptions options() const {
        FitOptions o;
        if (t_min > 0 || t_max > 0) {
            FitRange r;
            r.t_min = t_min > 0 ? t_min : 1;
            r.t_max = t_max > 0 ? t_max : std::numeric_limits<int>::max();
            o.range = r;
        }
        o.zero_policy =
            zero_policy == "drop" ? ZeroPolicy::drop : ZeroPolicy::add_half;
        o.weighting =
            weighting == "uniform" ? Weighting::uniform : Weighting::count;
        return o;
    }

    std::string canonical() const {
        std::ostringstream s;
        s << "t_min=" << t_min << ";t_max=" << t_max << ";zero=" << zero_policy
          << ";weight=" << weighting;
        return s.str();
    }
};

std::string residuals_csv(const std::vector<SeriesPoint>& pts,
                          const FitResult& fit) {
    std::ostringstream out;
    out << "t,count,model,log_residual\n";
    for (const auto& p : pts) {
        double model;
        if (fit.model == FitModel::power_law)
            model = fit.prefactor_C * std::pow(p.t, -fit.exponent_beta);
        else
            model = fit.prefactor_C *
                    std::exp(-fit.stretch_a * std::pow(p.t, fit.stretch_b));
        out << p.t << ',' << p.n << ',' << model << ',';
        if (p.n > 0 && model > 0)
            out << std::log(p.n) - std::log(model);
        else
            out << "";
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------- ingest

int run_ingest(const std::string& logfile, const std::string& target,
               const std::string& out_dir_s, bool lenient, bool keep_path,
               const std::string& format, const std::vector<int>& status_list,
               const std::vector<std::string>& asset_exts) {
    fs::path out_dir(out_dir_s);
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    std::ifstream in(logfile, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open log file '" << logfile << "'\n";
        return kExitIo;
    }

    AssetRule asset_rule;
    if (!asset_exts.empty())
        asset_rule.extensions = {asset_exts.begin(), asset_exts.end()};
    std::set<int> allowed(status_list.begin(), status_list.end());
    if (allowed.empty()) allowed = {200, 304};

    const bool jsonl = format == "jsonl";
    Digest digest;
    digest.update("ingest;target=" + target + ";lenient=" +
                  (lenient ? "1" : "0") + ";keep_path=" + (keep_path ? "1" : "0") +
                  ";format=" + format);

    std::map<std::string, std::int64_t> drops;
    std::ostringstream events;
    if (!jsonl) events << kClickEventCsvHeader << '\n';
    std::int64_t n_events = 0;

    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        digest.update(line);
        digest.update("\n");
        if (line.empty()) continue;

        LogRecord rec;
        try {
            rec = parse_log_line(line);
        } catch (const ParseError& e) {
            if (lenient) {
                ++drops["malformed"];
                continue;
            }
            std::cerr << "error: line " << lineno << ": malformed (" << e.what()
                      << ")\n";
            return kExitInput;
        }
        if (classify_request(rec, asset_rule) == RequestClass::asset) {
            ++drops["asset"];
            continue;
        }
        if (rec.path != target) continue;
        if (!allowed.count(rec.status)) {
            ++drops["status"];
            continue;
        }
        if (rec.referrer == "-") {
            ++drops["no_referrer"];
            continue;
        }
        std::string ref = keep_path ? normalize_keep_path(rec.referrer)
                                    : normalize_scheme_host(rec.referrer);
        ClickEvent event{rec.time, ref, rec.path, rec.remote_host};
        if (jsonl)
            events << to_json(event).dump() << '\n';
        else
            events << to_csv_row(event) << '\n';
        ++n_events;
    }

    const std::string events_name = jsonl ? "events.jsonl" : "events.csv";
    const fs::path events_path = out_dir / events_name;
    const fs::path drops_path = out_dir / "drop_report.json";
    write_text_file(events_path.string(), events.str());
    nlohmann::json dj = nlohmann::json::object();
    for (const auto& [reason, count] : drops) dj[reason] = count;
    write_text_file(drops_path.string(), dj.dump(2) + "\n");

    RunManifest m;
    m.command = "ingest";
    m.config_digest = digest.hex();
    m.outputs = {events_name, "drop_report.json"};
    write_manifest(out_dir, m);

    std::cout << "ingest: " << n_events << " events, "
              << dj.dump() << " dropped\n";
    return kExitOk;
}

// ---------------------------------------------------------------------- series

int run_series(const std::string& events_file, const std::string& by,
               const std::string& page_rule, int default_page,
               const std::string& out_dir_s) {
    fs::path out_dir(out_dir_s);
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    std::string text;
    try {
        text = read_text_file(events_file);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    std::vector<ClickEvent> events;
    try {
        events = parse_click_events(text);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }

    Digest digest;
    digest.update("series;by=" + by + ";rule=" + page_rule);
    digest.update(text);

    RunManifest m;
    m.command = "series";

    if (by == "day") {
        // group by referrer_id, first-seen order
        std::vector<std::string> order;
        std::map<std::string, std::vector<ClickEvent>> groups;
        for (const auto& e : events) {
            if (!groups.count(e.referrer_id)) order.push_back(e.referrer_id);
            groups[e.referrer_id].push_back(e);
        }
        for (const auto& ref : order) {
            ReferralSeries s = bin_by_day(groups[ref]);
            std::string name = "series_" + sanitize_filename(ref) + ".csv";
            write_text_file((out_dir / name).string(), to_csv(s));
            m.outputs.push_back(name);
        }
        std::cout << "series: " << order.size() << " referrer series written\n";
    } else {  // page
        PageExtractor px;
        try {
            px = PageExtractor(page_rule, default_page);
        } catch (const std::exception& e) {
            std::cerr << "error: bad --page-rule: " << e.what() << '\n';
            return kExitInput;
        }
        PageSeries s = bin_by_page(events, px);
        write_text_file((out_dir / "pages.csv").string(), to_csv(s));
        m.outputs.push_back("pages.csv");
        std::cout << "series: page series written (" << s.counts.size()
                  << " pages)\n";
    }

    m.config_digest = digest.hex();
    write_manifest(out_dir, m);
    return kExitOk;
}

// ------------------------------------------------------------------------ fit

int run_fit(const std::string& series_file, const std::string& model,
            const FitFlags& flags, const std::string& out_dir_s) {
    fs::path out_dir(out_dir_s);
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    std::string text;
    try {
        text = read_text_file(series_file);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    std::vector<SeriesPoint> pts;
    try {
        pts = parse_series_csv(text);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }

    FitResult fit;
    try {
        if (model == "powerlaw")
            fit = fit_power_law_ls(pts, flags.options());
        else if (model == "poisson")
            fit = fit_power_law_poisson(pts, flags.options());
        else
            fit = fit_stretched_exp(pts, flags.options());
    } catch (const FitError& e) {
        std::cerr << "error: fit failed: " << e.what() << '\n';
        return kExitNumerical;
    }

    Digest digest;
    digest.update("fit;model=" + model + ";" + flags.canonical());
    digest.update(text);

    const fs::path fit_path = out_dir / "fit.json";
    const fs::path res_path = out_dir / "residuals.csv";
    write_text_file(fit_path.string(), to_json(fit).dump(2) + "\n");
    write_text_file(res_path.string(), residuals_csv(pts, fit));

    RunManifest m;
    m.command = "fit";
    m.config_digest = digest.hex();
    m.outputs = {"fit.json", "residuals.csv"};
    write_manifest(out_dir, m);

    std::cout << "fit: " << to_json(fit).dump() << '\n';
    return kExitOk;
}

// ------------------------------------------------------------------- simulate

int run_simulate(const std::string& model, const std::string& config_file,
                 std::optional<std::uint64_t> seed_flag, int track,
                 bool with_events, const std::string& format,
                 const std::string& out_dir_s) {
    fs::path out_dir(out_dir_s);
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    std::string config_text;
    try {
        config_text = read_text_file(config_file);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }

    std::ofstream events_out;
    ClickSink sink;
    const bool jsonl = format == "jsonl";
    const std::string events_name = jsonl ? "events.jsonl" : "events.csv";
    const fs::path events_path = out_dir / events_name;
    if (with_events) {
        events_out.open(events_path, std::ios::binary | std::ios::trunc);
        if (!events_out) {
            std::cerr << "error: cannot open '" << events_path.string() << "'\n";
            return kExitIo;
        }
        if (!jsonl) events_out << kClickEventCsvHeader << '\n';
        sink = [&events_out, jsonl](const ClickEvent& e) {
            if (jsonl)
                events_out << to_json(e).dump() << '\n';
            else
                events_out << to_csv_row(e) << '\n';
        };
    }

    RunManifest m;
    m.command = "simulate:" + model;
    Digest digest;
    digest.update("simulate;model=" + model + ";track=" + std::to_string(track) +
                  ";format=" + format);
    digest.update(config_text);

    auto add_series = [&](const std::string& name, const ReferralSeries& s) {
        write_text_file((out_dir / name).string(), to_csv(s));
        m.outputs.push_back(name);
    };

    try {
        KeyValueConfig kv = KeyValueConfig::parse(config_text);

        auto pick_seed = [&](std::uint64_t config_seed) {
            std::uint64_t s = kv.has("seed") ? config_seed : default_seed_from_env();
            if (seed_flag) s = *seed_flag;
            return s;
        };

        if (model == "rank") {
            RankDecayConfig cfg = rank_config_from(kv);
            kv.reject_unknown_keys();
            cfg.seed = pick_seed(cfg.seed);
            m.seed = cfg.seed;
            digest.update(";seed=" + std::to_string(cfg.seed));
            RankDecayResult r = simulate_rank_decay(cfg, sink);
            for (int j = 0; j < track && j < static_cast<int>(r.links.size()); ++j)
                add_series("series_post" + std::to_string(j) + ".csv", r.links[j]);
            std::cout << "simulate rank: " << r.links.size() << " links, "
                      << r.clamped_cells << " clamped cells\n";
        } else if (model == "paginated") {
            PaginatedConfig cfg = paginated_config_from(kv);
            kv.reject_unknown_keys();
            cfg.seed = pick_seed(cfg.seed);
            m.seed = cfg.seed;
            digest.update(";seed=" + std::to_string(cfg.seed));
            PaginatedResult r = simulate_paginated(cfg, sink);
            write_text_file((out_dir / "pages.csv").string(), to_csv(r.pages));
            m.outputs.push_back("pages.csv");
            for (int j = 0; j < track && j < static_cast<int>(r.posts.size()); ++j)
                add_series("series_post" + std::to_string(j) + ".csv", r.posts[j]);
            std::cout << "simulate paginated: " << r.pages.counts.size()
                      << " pages, " << r.clamped_cells << " clamped cells\n";
        } else if (model == "revisit") {
            RevisitConfig cfg = revisit_config_from(kv);
            kv.reject_unknown_keys();
            cfg.seed = pick_seed(cfg.seed);
            m.seed = cfg.seed;
            digest.update(";seed=" + std::to_string(cfg.seed));
            RevisitResult r = simulate_revisit(cfg, sink);
            add_series("age_series.csv", r.by_age);
            std::cout << "simulate revisit: " << r.total_accesses
                      << " accesses\n";
        } else if (model == "novelty") {
            NoveltyConfig cfg = novelty_config_from(kv);
            kv.reject_unknown_keys();
            NoveltyResult r = simulate_novelty(cfg, sink);
            add_series("series.csv", r.series);
            std::cout << "simulate novelty: horizon " << cfg.horizon_days
                      << " days\n";
        } else {  // cascade
            CascadeConfig cfg = cascade_config_from(kv);
            kv.reject_unknown_keys();
            cfg.seed = pick_seed(cfg.seed);
            cfg.base.seed = cfg.seed;
            m.seed = cfg.seed;
            digest.update(";seed=" + std::to_string(cfg.seed));
            CascadeResult r = simulate_cascade(cfg, sink);
            add_series("direct.csv", r.direct);
            add_series("total.csv", r.total);
            nlohmann::json tj;
            tj["expected_offspring"] = r.expected_offspring;
            tj["cap_reached"] = r.cap_reached;
            tj["nodes"] = nlohmann::json::array();
            for (const auto& n : r.tree)
                tj["nodes"].push_back(
                    {{"id", n.id}, {"parent", n.parent}, {"post_day", n.post_day}});
            write_text_file((out_dir / "tree.json").string(), tj.dump(2) + "\n");
            m.outputs.push_back("tree.json");
            std::cout << "simulate cascade: " << r.tree.size() << " nodes, "
                      << "expected offspring " << r.expected_offspring << '\n';
            if (r.cap_reached)
                std::cerr << "warning: max_nodes cap reached, cascade truncated\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const SimError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }

    if (with_events) m.outputs.push_back(events_name);
    m.config_digest = digest.hex();
    write_manifest(out_dir, m);
    return kExitOk;
}

// -------------------------------------------------------------------- compare

int run_compare(const std::string& series_file, const FitFlags& flags,
                const std::string& out_dir_s) {
    fs::path out_dir(out_dir_s);
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    std::string text;
    try {
        text = read_text_file(series_file);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    std::vector<SeriesPoint> pts;
    try {
        pts = parse_series_csv(text);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }

    FitComparison cmp;
    try {
        cmp = compare_fits(pts, flags.options());
    } catch (const FitError& e) {
        std::cerr << "error: fit failed: " << e.what() << '\n';
        return kExitNumerical;
    }

    Digest digest;
    digest.update("compare;" + flags.canonical());
    digest.update(text);

    const fs::path cmp_path = out_dir / "comparison.json";
    write_text_file(cmp_path.string(), to_json(cmp).dump(2) + "\n");

    RunManifest m;
    m.command = "compare";
    m.config_digest = digest.hex();
    m.outputs = {"comparison.json"};
    write_manifest(out_dir, m);

    std::cout << "compare: winner " << fit_model_name(cmp.winner)
              << ", delta_r2 " << cmp.delta_r2 << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"webattn: referral-log attention-decay analysis and simulation"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand(
        "ingest", "Parse an access log and extract referral click events");
    std::string logfile, target, out_dir = ".", ingest_format = "csv";
    bool lenient = false, keep_path = false;
    std::vector<int> status_list;
    std::vector<std::string> asset_exts;
    ingest->add_option("logfile", logfile, "Combined Log Format file")->required();
    ingest->add_option("--target", target, "Target path to extract referrals for")
        ->required();
    ingest->add_option("--out-dir", out_dir, "Output directory");
    ingest->add_flag("--lenient", lenient, "Skip malformed lines instead of failing");
    ingest->add_flag("--keep-path", keep_path,
                     "Keep referrer path components (for page-number analysis)");
    ingest->add_option("--format", ingest_format, "Event output format: csv | jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    ingest->add_option("--status", status_list, "Allowed HTTP statuses (default 200 304)");
    ingest->add_option("--asset-ext", asset_exts, "Asset extensions (default png jpg jpeg gif css js ico svg)");

    // series
    auto* series = app.add_subcommand("series", "Bin click events by day or page");
    std::string events_file, by = "day", page_rule;
    int default_page = 1;
    std::string series_out = ".";
    series->add_option("events", events_file, "ClickEvent CSV file")->required();
    series->add_option("--by", by, "day | page")
        ->check(CLI::IsMember({"day", "page"}));
    series->add_option("--page-rule", page_rule,
                       "Regex whose first capture group is the page number");
    series->add_option("--default-page", default_page, "Page for non-matching URLs");
    series->add_option("--out-dir", series_out, "Output directory");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit a decay model to a series CSV");
    std::string fit_file, fit_model = "powerlaw", fit_out = ".";
    FitFlags fit_flags;
    fit->add_option("series", fit_file, "Series CSV (t,count or page,count)")->required();
    fit->add_option("--model", fit_model, "powerlaw | poisson | stretched")
        ->check(CLI::IsMember({"powerlaw", "poisson", "stretched"}));
    fit_flags.attach(fit);
    fit->add_option("--out-dir", fit_out, "Output directory");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run a mechanism simulator");
    std::string sim_model, sim_config, sim_out = ".", sim_format = "csv";
    std::uint64_t seed_value = 0;
    bool with_events = false;
    int track = 1;
    sim->add_option("--model", sim_model, "rank | paginated | revisit | novelty | cascade")
        ->required()
        ->check(CLI::IsMember({"rank", "paginated", "revisit", "novelty", "cascade"}));
    sim->add_option("--config", sim_config, "Flat key=value config file")->required();
    auto* seed_opt = sim->add_option("--seed", seed_value,
                                     "Seed (overrides config file and WEBATTN_SEED)");
    sim->add_option("--track", track, "Number of per-link/post series files to write");
    sim->add_flag("--events", with_events, "Also write the full event stream");
    sim->add_option("--format", sim_format, "Event output format: csv | jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    sim->add_option("--out-dir", sim_out, "Output directory");

    // compare
    auto* cmp = app.add_subcommand("compare",
                                   "Fit both decay models and compare goodness");
    std::string cmp_file, cmp_out = ".";
    FitFlags cmp_flags;
    cmp->add_option("series", cmp_file, "Series CSV")->required();
    cmp_flags.attach(cmp);
    cmp->add_option("--out-dir", cmp_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*ingest)
            return run_ingest(logfile, target, out_dir, lenient, keep_path,
                              ingest_format, status_list, asset_exts);
        if (*series)
            return run_series(events_file, by, page_rule, default_page, series_out);
        if (*fit) return run_fit(fit_file, fit_model, fit_flags, fit_out);
        if (*sim)
            return run_simulate(sim_model, sim_config,
                                seed_opt->count() ? std::optional<std::uint64_t>(seed_value)
                                                  : std::nullopt,
                                track, with_events, sim_format, sim_out);
        if (*cmp) return run_compare(cmp_file, cmp_flags, cmp_out);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
