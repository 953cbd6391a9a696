#include "crashbench/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "crashbench/field_types.hpp"
#include "crashbench/ingest.hpp"
#include "crashbench/simulate.hpp"
#include "yaml_support.hpp"

namespace fs = std::filesystem;

namespace crashbench {

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

SourceFile source_file(const yaml::Reader& in, const YAML::Node& node, const char* file_key, const char* config_key,
                       const fs::path& base) {
    SourceFile s;
    s.file = resolve(base, in.text(node[file_key], file_key));
    if (node[config_key]) s.config = resolve(base, in.text(node[config_key], config_key));
    return s;
}

} // namespace

PipelineConfig parse_pipeline_config(const std::string& yaml_text, const fs::path& origin) {
    yaml::Reader in(origin.string());
    auto root = in.load(yaml_text);
    in.only_keys(root, {"alpha", "underreporting", "underreporting_factor", "dynamic", "cell_level",
                        "zero_human_miles", "outcomes", "crash_types", "locations", "ads", "human", "benchmarks"});
    const fs::path base = origin.has_parent_path() ? origin.parent_path() : fs::path(".");
    PipelineConfig c;
    c.origin = origin;
    if (root["alpha"]) {
        c.alpha = in.number(root["alpha"], "alpha");
        if (!(c.alpha > 0.0 && c.alpha < 1.0)) in.fail("alpha must lie in (0, 1)", root["alpha"]);
    }
    if (root["underreporting"]) c.underreporting = in.boolean(root["underreporting"], "underreporting");
    if (root["underreporting_factor"]) {
        c.underreporting_factor = in.number(root["underreporting_factor"], "underreporting_factor");
        if (!(c.underreporting_factor >= 1.0)) in.fail("underreporting_factor must be >= 1", root["underreporting_factor"]);
    }
    if (root["dynamic"]) c.dynamic = in.boolean(root["dynamic"], "dynamic");
    if (root["cell_level"]) {
        c.cell_level = static_cast<int>(in.integer(root["cell_level"], "cell_level"));
        if (c.cell_level < 0 || c.cell_level > 30) in.fail("cell_level must lie in [0, 30]", root["cell_level"]);
    }
    if (root["zero_human_miles"]) {
        auto p = in.text(root["zero_human_miles"], "zero_human_miles");
        if (p == "abort") c.zero_human_miles = ZeroHumanMilesPolicy::Abort;
        else if (p == "fallback") c.zero_human_miles = ZeroHumanMilesPolicy::Fallback;
        else in.fail("zero_human_miles must be abort or fallback", root["zero_human_miles"]);
    }
    auto list = [&](const char* key, auto parse) {
        auto n = root[key];
        if (!n.IsSequence()) in.fail(std::string(key) + " must be a list", n);
        for (const auto& item : n) {
            try {
                parse(in.text(item, key));
            } catch (const InvalidInput& e) {
                in.fail(e.what(), item);
            }
        }
    };
    if (root["outcomes"]) {
        c.outcomes.clear();
        list("outcomes", [&](const std::string& s) { c.outcomes.push_back(parse_enum<OutcomeLevel>(s)); });
        if (c.outcomes.empty()) in.fail("outcomes must not be empty", root["outcomes"]);
    }
    if (root["crash_types"]) {
        c.crash_types.clear();
        list("crash_types", [&](const std::string& s) { c.crash_types.push_back(CrashTypeKey::parse(s)); });
    }
    if (root["locations"]) {
        list("locations", [&](const std::string& s) {
            auto loc = parse_any_location(s);
            if (!loc) throw InvalidInput("unknown location '" + s + "'");
            c.locations.push_back(*loc);
        });
    }
    if (auto ads = root["ads"]) {
        in.only_keys(ads, {"reports", "records", "miles", "miles_config"});
        if (ads["reports"]) c.ads_reports = resolve(base, in.text(ads["reports"], "ads.reports"));
        if (ads["records"]) c.ads_records = resolve(base, in.text(ads["records"], "ads.records"));
        if (c.ads_reports && c.ads_records) in.fail("give ads.reports or ads.records, not both", ads);
        if (ads["miles"]) c.ads_miles = source_file(in, ads, "miles", "miles_config", base);
    }
    if (auto human = root["human"]) {
        in.only_keys(human, {"sources", "exposure", "vm4_passenger_share"});
        if (auto sources = human["sources"]) {
            if (!sources.IsSequence()) in.fail("human.sources must be a list", sources);
            for (const auto& s : sources) {
                in.only_keys(s, {"crashes", "crash_config", "miles", "miles_config"});
                HumanSource h;
                if (s["crashes"]) h.crashes = source_file(in, s, "crashes", "crash_config", base);
                else if (s["crash_config"]) in.fail("crash_config without crashes", s);
                if (s["miles"]) h.miles = source_file(in, s, "miles", "miles_config", base);
                else if (s["miles_config"]) in.fail("miles_config without miles", s);
                if (!h.crashes && !h.miles) in.fail("human source needs crashes or miles", s);
                c.human_sources.push_back(std::move(h));
            }
        }
        if (human["exposure"]) c.human_exposure = resolve(base, in.text(human["exposure"], "human.exposure"));
        if (auto shares = human["vm4_passenger_share"]) {
            if (!shares.IsMap()) in.fail("vm4_passenger_share must map locations to shares", shares);
            for (const auto& kv : shares) {
                auto loc = parse_location_label(kv.first.as<std::string>());
                if (!loc) in.fail("unknown location '" + kv.first.as<std::string>() + "'", kv.first);
                const double v = in.number(kv.second, "vm4_passenger_share");
                if (!(v >= 0.0 && v <= 1.0)) in.fail("vm4_passenger_share must lie in [0, 1]", kv.second);
                c.vm4_passenger_share[*loc] = v;
            }
        }
    }
    if (root["benchmarks"]) c.benchmarks = resolve(base, in.text(root["benchmarks"], "benchmarks"));
    return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
    return parse_pipeline_config(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCategory::Io, "SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text_file(path)); }

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "crashbench";
    j["version"] = kToolVersion;
    j["stage"] = stage;
    j["timestamp"] = timestamp.empty() ? utc_now() : timestamp;
    auto files = [](const std::vector<fs::path>& paths) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& p : paths) arr.push_back({{"path", p.generic_string()}, {"sha256", sha256_file(p)}});
        return arr;
    };
    j["configs"] = files(configs);
    j["inputs"] = files(inputs);
    j["outputs"] = files(outputs);
    j["options"] = options;
    j["stages"] = nlohmann::ordered_json::array({{{"stage", stage}, {"status", status}, {"notes", notes}}});
    return j.dump(2) + "\n";
}

void write_manifest(const fs::path& dir, const RunManifest& manifest) {
    write_text_file(dir / artifact::kManifest, manifest.to_json());
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

namespace {

fs::path find_artifact(const std::vector<fs::path>& inputs, const char* name, const char* producer,
                       const char* consumer) {
    for (const auto& dir : inputs) {
        auto p = dir / name;
        if (fs::is_regular_file(p)) return p;
    }
    std::string searched;
    for (const auto& dir : inputs) searched += (searched.empty() ? "" : ", ") + dir.string();
    throw DataGapError(std::string(consumer) + ": missing " + name + " (searched: " +
                       (searched.empty() ? "no --input directories" : searched) + "); run the " + producer +
                       " stage first");
}

std::map<std::string, std::string> option_map(const PipelineConfig& c, const RunOptions& o) {
    auto onoff = [](bool b) { return std::string(b ? "on" : "off"); };
    return {{"alpha", format_double(o.alpha.value_or(c.alpha))},
            {"underreporting", onoff(o.underreporting.value_or(c.underreporting))},
            {"underreporting_factor", format_double(c.underreporting_factor)},
            {"dynamic", onoff(o.dynamic.value_or(c.dynamic))},
            {"cell_level", std::to_string(c.cell_level)},
            {"format", std::string(o.format == ReportFormat::Csv ? "csv" : "md")}};
}

void finish(StageResult& result, const fs::path& out, RunManifest manifest) {
    manifest.stage = result.stage;
    manifest.outputs = result.outputs;
    manifest.notes = result.notes;
    write_manifest(out, manifest);
    for (const auto& n : result.notes) spdlog::info("{}: {}", result.stage, n);
}

void write_output(StageResult& result, const fs::path& path, std::string_view content) {
    write_text_file(path, content);
    result.outputs.push_back(path);
}

std::vector<CrashRecord> read_records(const fs::path& path) { return records_from_csv(read_csv_file(path)); }

ExposureTable read_exposure(const SourceFile& src, Population population, std::vector<IngestReport>& reports,
                            std::vector<fs::path>& configs) {
    if (src.config) {
        configs.push_back(*src.config);
        auto parsed = parse_exposure(src.file, load_mapping_config(*src.config), population);
        reports.push_back(parsed.report);
        return parsed.table;
    }
    auto table = exposure_from_csv(read_csv_file(src.file));
    if (!table.rows.empty() && table.population != population) {
        throw ParseError(src.file.string() + ": exposure population is " + std::string(to_string(table.population)) +
                         ", expected " + std::string(to_string(population)));
    }
    table.population = population;
    return table;
}

std::vector<Location> comparison_locations(const PipelineConfig& c, const AdsCounts& ads) {
    if (!c.locations.empty()) return c.locations;
    std::vector<Location> out;
    for (const auto& [loc, miles] : ads.miles) out.push_back(loc);
    out.push_back(Location::all_locations());
    return out;
}

struct AdsSide {
    std::vector<ClassifiedRecord> records;
    ExposureTable exposure;
};

AdsSide read_ads_side(const std::vector<fs::path>& inputs, const char* consumer, std::vector<fs::path>& used) {
    auto classified = find_artifact(inputs, artifact::kAdsClassified, "classify", consumer);
    auto exposure = find_artifact(inputs, artifact::kAdsExposure, "ingest", consumer);
    used.push_back(classified);
    used.push_back(exposure);
    return {classified_from_csv(read_csv_file(classified)), exposure_from_csv(read_csv_file(exposure))};
}

} // namespace

StageResult run_ingest(const PipelineConfig& c, const fs::path& out) {
    StageResult result{"ingest", {}, {}};
    RunManifest manifest;
    if (!c.origin.empty()) manifest.configs.push_back(c.origin);
    std::vector<IngestReport> reports;

    std::vector<CrashRecord> ads;
    if (c.ads_reports) {
        manifest.inputs.push_back(*c.ads_reports);
        auto parsed = parse_sgo_file(*c.ads_reports);
        ads = std::move(parsed.records);
        reports.push_back(std::move(parsed.report));
    } else if (c.ads_records) {
        manifest.inputs.push_back(*c.ads_records);
        ads = read_records(*c.ads_records);
    } else {
        throw ConfigError(c.origin.string() + ": ads.reports or ads.records is required");
    }
    if (!c.ads_miles) throw ConfigError(c.origin.string() + ": ads.miles is required");
    manifest.inputs.push_back(c.ads_miles->file);
    auto ads_exposure = read_exposure(*c.ads_miles, Population::Ads, reports, manifest.configs);

    std::vector<CrashRecord> human;
    ExposureTable human_exposure;
    human_exposure.population = Population::Human;
    for (const auto& src : c.human_sources) {
        if (src.crashes) {
            manifest.inputs.push_back(src.crashes->file);
            if (src.crashes->config) {
                manifest.configs.push_back(*src.crashes->config);
                auto parsed = parse_crash_file(src.crashes->file, load_mapping_config(*src.crashes->config));
                human.insert(human.end(), parsed.records.begin(), parsed.records.end());
                reports.push_back(std::move(parsed.report));
            } else {
                auto records = read_records(src.crashes->file);
                human.insert(human.end(), records.begin(), records.end());
            }
        }
        if (src.miles) {
            manifest.inputs.push_back(src.miles->file);
            auto t = read_exposure(*src.miles, Population::Human, reports, manifest.configs);
            human_exposure.rows.insert(human_exposure.rows.end(), t.rows.begin(), t.rows.end());
        }
    }
    if (c.human_exposure) {
        manifest.inputs.push_back(*c.human_exposure);
        auto t = read_exposure({*c.human_exposure, std::nullopt}, Population::Human, reports, manifest.configs);
        human_exposure.rows.insert(human_exposure.rows.end(), t.rows.begin(), t.rows.end());
    }
    std::stable_sort(human.begin(), human.end(), [](const auto& a, const auto& b) {
        return std::tie(a.crash_id, a.subject.role_order) < std::tie(b.crash_id, b.subject.role_order);
    });
    for (const auto* t : {&ads_exposure, &human_exposure}) {
        for (const auto& loc : t->inconsistent_locations()) {
            result.notes.push_back(std::string(to_string(t->population)) + " exposure for " + format_location(loc) +
                                   ": cell rows disagree with the location total by more than 0.1%");
        }
    }

    fs::create_directories(out);
    write_output(result, out / artifact::kAdsRecords, records_to_csv(ads));
    write_output(result, out / artifact::kHumanRecords, records_to_csv(human));
    write_output(result, out / artifact::kAdsExposure, exposure_to_csv(ads_exposure));
    write_output(result, out / artifact::kHumanExposure, exposure_to_csv(human_exposure));
    // Sources relative to the config, so the report does not depend on the working directory.
    if (!c.origin.empty()) {
        const auto base = fs::absolute(c.origin).parent_path();
        for (auto& r : reports) r.source = fs::absolute(r.source).lexically_proximate(base).generic_string();
    }
    std::string json = "[\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        json += reports[i].to_json();
        if (i + 1 < reports.size()) json.insert(json.size() - 1, ",");
        for (const auto& [rule, n] : reports[i].rows_dropped_by_rule) {
            result.notes.push_back(reports[i].source + ": " + std::to_string(n) + " rows dropped by " + rule);
        }
        if (!reports[i].unmapped_values.empty()) {
            result.notes.push_back(reports[i].source + ": " + std::to_string(reports[i].unmapped_values.size()) +
                                   " distinct unmapped values");
        }
    }
    json += "]\n";
    write_output(result, out / artifact::kIngestReport, json);
    finish(result, out, manifest);
    return result;
}

StageResult run_classify(const std::vector<fs::path>& inputs, const fs::path& out, const RunOptions& options) {
    StageResult result{"classify", {}, {}};
    RunManifest manifest;
    auto ads_path = find_artifact(inputs, artifact::kAdsRecords, "ingest", "classify");
    auto human_path = find_artifact(inputs, artifact::kHumanRecords, "ingest", "classify");
    manifest.inputs = {ads_path, human_path};
    auto ads = classify_all(read_records(ads_path), options.threads);
    auto human = classify_all(read_records(human_path), options.threads);
    fs::create_directories(out);
    write_output(result, out / artifact::kAdsClassified, classified_to_csv(ads));
    write_output(result, out / artifact::kHumanClassified, classified_to_csv(human));
    result.notes.push_back(std::to_string(ads.size()) + " ADS and " + std::to_string(human.size()) +
                           " human records classified");
    finish(result, out, manifest);
    return result;
}

StageResult run_benchmark(const PipelineConfig& c, const std::vector<fs::path>& inputs, const fs::path& out,
                          const RunOptions& options) {
    StageResult result{"benchmark", {}, {}};
    RunManifest manifest;
    if (!c.origin.empty()) manifest.configs.push_back(c.origin);
    manifest.options = option_map(c, options);
    fs::create_directories(out);

    if (c.benchmarks) {
        manifest.inputs.push_back(*c.benchmarks);
        auto set = benchmarks_from_csv(read_csv_file(*c.benchmarks));
        result.notes.push_back("published benchmark rates from " + c.benchmarks->filename().string() + " (" +
                               std::to_string(set.rates().size()) + " rows)");
        write_output(result, out / artifact::kBenchmarks, benchmarks_to_csv(set));
        write_output(result, out / artifact::kCellMileage, cell_mileage_to_csv({}));
    } else if (c.crash_types.empty()) {
        result.notes.push_back("no crash types selected; empty benchmark set");
        write_output(result, out / artifact::kBenchmarks, benchmarks_to_csv({}));
        write_output(result, out / artifact::kCellMileage, cell_mileage_to_csv({}));
    } else {
        auto human_path = find_artifact(inputs, artifact::kHumanClassified, "classify", "benchmark");
        auto human_exp_path = find_artifact(inputs, artifact::kHumanExposure, "ingest", "benchmark");
        auto ads_exp_path = find_artifact(inputs, artifact::kAdsExposure, "ingest", "benchmark");
        manifest.inputs = {human_path, human_exp_path, ads_exp_path};
        if (c.vm4_passenger_share.empty()) {
            throw ConfigError(c.origin.string() + ": human.vm4_passenger_share is required to derive benchmarks");
        }
        auto human = classified_from_csv(read_csv_file(human_path));
        BenchmarkOptions opt;
        opt.underreporting_factor = c.underreporting_factor;
        opt.cell_level = c.cell_level;
        opt.zero_human_miles = c.zero_human_miles;
        opt.outcomes = c.outcomes;
        opt.crash_types = c.crash_types;
        opt.threads = options.threads;
        auto build = build_benchmarks(human, exposure_from_csv(read_csv_file(human_exp_path)),
                                      exposure_from_csv(read_csv_file(ads_exp_path)), c.vm4_passenger_share, opt);
        result.notes = build.notes;
        write_output(result, out / artifact::kBenchmarks, benchmarks_to_csv(build.set));
        write_output(result, out / artifact::kCellMileage, cell_mileage_to_csv(build.cells));
    }
    std::string notes;
    for (const auto& n : result.notes) notes += n + "\n";
    write_output(result, out / artifact::kBenchmarkNotes, notes);
    finish(result, out, manifest);
    return result;
}

StageResult run_compare(const PipelineConfig& c, const std::vector<fs::path>& inputs, const fs::path& out,
                        const RunOptions& options) {
    StageResult result{"compare", {}, {}};
    RunManifest manifest;
    if (!c.origin.empty()) manifest.configs.push_back(c.origin);
    manifest.options = option_map(c, options);
    auto bench_path = find_artifact(inputs, artifact::kBenchmarks, "benchmark", "compare");
    auto ads = read_ads_side(inputs, "compare", manifest.inputs);
    manifest.inputs.push_back(bench_path);
    auto set = benchmarks_from_csv(read_csv_file(bench_path));

    auto counts = tally_ads(ads.records, ads.exposure, c.outcomes, c.crash_types);
    CompareRequest req;
    req.locations = comparison_locations(c, counts);
    req.outcomes = c.outcomes;
    req.crash_types = c.crash_types;
    req.variant = {options.underreporting.value_or(c.underreporting), options.dynamic.value_or(c.dynamic)};
    req.alpha = options.alpha.value_or(c.alpha);
    req.threads = options.threads;
    auto run = compare(counts, set, req);

    fs::create_directories(out);
    write_output(result, out / artifact::kComparisons, comparison_csv(run.results));
    write_output(result, out / artifact::kGaps, gaps_csv(run.gaps));
    result.notes.push_back(std::to_string(run.results.size()) + " comparisons, " + std::to_string(run.gaps.size()) +
                           " gaps");
    if (!run.gaps.empty()) spdlog::warn("compare: {} requested cells have no comparison; see {}", run.gaps.size(),
                                        artifact::kGaps);
    finish(result, out, manifest);
    return result;
}

StageResult run_report(const PipelineConfig& c, const std::vector<fs::path>& inputs, const fs::path& out,
                       const RunOptions& options) {
    StageResult result{"report", {}, {}};
    RunManifest manifest;
    if (!c.origin.empty()) manifest.configs.push_back(c.origin);
    manifest.options = option_map(c, options);
    const auto ext = std::string(extension(options.format));

    auto comp_path = find_artifact(inputs, artifact::kComparisons, "compare", "report");
    auto bench_path = find_artifact(inputs, artifact::kBenchmarks, "benchmark", "report");
    manifest.inputs.push_back(comp_path);
    auto ads = read_ads_side(inputs, "report", manifest.inputs);
    manifest.inputs.push_back(bench_path);
    auto results = comparison_from_csv(read_csv_file(comp_path));
    if (results.empty()) {
        spdlog::warn("report: comparison table is empty");
        result.notes.push_back("comparison table is empty");
    }

    fs::create_directories(out);
    write_output(result, out / ("comparison" + ext),
                 options.format == ReportFormat::Csv ? comparison_csv(results) : comparison_markdown(results));
    write_output(result, out / ("event_counts" + ext), event_counts_text(event_counts(ads.records), options.format));
    write_output(result, out / ("f2r_counts" + ext), f2r_counts_text(ads.records, options.format));
    write_output(result, out / ("pre_crash_movement" + ext), movement_counts_text(ads.records, options.format));

    auto set = benchmarks_from_csv(read_csv_file(bench_path));
    auto counts = tally_ads(ads.records, ads.exposure, c.outcomes, c.crash_types);
    CompareRequest req;
    req.locations = comparison_locations(c, counts);
    req.outcomes = c.outcomes;
    req.crash_types = c.crash_types;
    req.alpha = options.alpha.value_or(c.alpha);
    req.threads = options.threads;
    auto grid = sensitivity_grid(counts, set, req);
    write_output(result, out / ("sensitivity" + ext), sensitivity_text(grid, options.format));
    if (!grid.gaps.empty()) {
        result.notes.push_back(std::to_string(grid.gaps.size()) + " cells lack one or more benchmark variants");
    }
    finish(result, out, manifest);
    return result;
}

std::vector<StageResult> run_pipeline(const PipelineConfig& c, const fs::path& out, const RunOptions& options) {
    std::vector<StageResult> stages;
    const auto ingest = out / "ingest";
    const auto classify = out / "classify";
    const auto bench = out / "benchmark";
    const auto comp = out / "compare";
    stages.push_back(run_ingest(c, ingest));
    stages.push_back(run_classify({ingest}, classify, options));
    stages.push_back(run_benchmark(c, {ingest, classify}, bench, options));
    stages.push_back(run_compare(c, {ingest, classify, bench}, comp, options));
    stages.push_back(run_report(c, {ingest, classify, bench, comp}, out / "report", options));
    return stages;
}

StageResult run_simulate(const fs::path& scenario_path, std::optional<std::uint64_t> seed, const fs::path& out) {
    StageResult result{"simulate", {}, {}};
    RunManifest manifest;
    manifest.configs.push_back(scenario_path);
    auto scenario = load_scenario(scenario_path);
    if (seed) scenario.seed = *seed;
    manifest.options["seed"] = std::to_string(scenario.seed);
    auto sim = simulate(scenario);

    fs::create_directories(out);
    write_output(result, out / artifact::kAdsRecords, records_to_csv(sim.ads_records));
    write_output(result, out / artifact::kHumanRecords, records_to_csv(sim.human_records));
    write_output(result, out / artifact::kAdsExposure, exposure_to_csv(sim.ads_exposure));
    write_output(result, out / artifact::kHumanExposure, exposure_to_csv(sim.human_exposure));
    write_output(result, out / "truth.json", truth_json(sim.truth));

    const std::string loc = "\"" + format_location(scenario.location) + "\"";
    std::ostringstream cfg;
    cfg << "# Runs the pipeline on the simulated corpus in this directory.\n"
        << "alpha: 0.05\n"
        << "underreporting: off\n"
        << "dynamic: on\n"
        << "cell_level: " << scenario.cell_level << "\n"
        << "outcomes: [AnyInjuryReported]\n"
        << "crash_types: [All]\n"
        << "locations: [" << loc << "]\n"
        << "ads:\n"
        << "  records: " << artifact::kAdsRecords << "\n"
        << "  miles: " << artifact::kAdsExposure << "\n"
        << "human:\n"
        << "  sources:\n"
        << "    - crashes: " << artifact::kHumanRecords << "\n"
        << "      miles: " << artifact::kHumanExposure << "\n"
        << "  vm4_passenger_share:\n"
        << "    " << loc << ": 1.0\n";
    write_output(result, out / "pipeline.yaml", cfg.str());
    result.notes.push_back(std::to_string(sim.ads_records.size()) + " ADS and " +
                           std::to_string(sim.human_records.size()) + " human crashes drawn");
    finish(result, out, manifest);
    return result;
}

} // namespace crashbench
