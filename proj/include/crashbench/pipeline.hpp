#pragma once
// Stage orchestration: each stage reads files, writes files and a run manifest.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crashbench/benchmark.hpp"
#include "crashbench/classify.hpp"
#include "crashbench/report.hpp"

namespace crashbench {

inline constexpr const char* kToolVersion = "0.1.0";

struct SourceFile {
    std::filesystem::path file;
    std::optional<std::filesystem::path> config;  // mapping config; canonical CSV when absent
};

// A crash file, a mileage file, or both.
struct HumanSource {
    std::optional<SourceFile> crashes;
    std::optional<SourceFile> miles;
};

struct PipelineConfig {
    std::filesystem::path origin;  // the config file itself, when loaded from disk

    double alpha = 0.05;
    bool underreporting = true;
    double underreporting_factor = kDefaultUnderreportingFactor;
    bool dynamic = true;
    int cell_level = 13;
    ZeroHumanMilesPolicy zero_human_miles = ZeroHumanMilesPolicy::Abort;
    std::vector<OutcomeLevel> outcomes{kTableOutcomes.begin(), kTableOutcomes.end()};
    std::vector<CrashTypeKey> crash_types = all_crash_type_keys();
    std::vector<Location> locations;  // rows to compare; empty = every ADS location plus AllLocations

    // ADS data: SGO-shaped reports or canonical records, plus mileage.
    std::optional<std::filesystem::path> ads_reports;
    std::optional<std::filesystem::path> ads_records;
    std::optional<SourceFile> ads_miles;

    std::vector<HumanSource> human_sources;
    std::optional<std::filesystem::path> human_exposure;  // canonical exposure CSV
    std::map<Location, double> vm4_passenger_share;

    // Published benchmark rates used instead of deriving them from human data.
    std::optional<std::filesystem::path> benchmarks;
};

PipelineConfig parse_pipeline_config(const std::string& yaml_text, const std::filesystem::path& origin);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Overrides from the command line.
struct RunOptions {
    std::optional<double> alpha;
    std::optional<bool> underreporting;
    std::optional<bool> dynamic;
    ReportFormat format = ReportFormat::Csv;
    unsigned threads = 1;
};

// Stage artifact names.
namespace artifact {
inline constexpr const char* kAdsRecords = "ads_records.csv";
inline constexpr const char* kHumanRecords = "human_records.csv";
inline constexpr const char* kAdsExposure = "ads_exposure.csv";
inline constexpr const char* kHumanExposure = "human_exposure.csv";
inline constexpr const char* kIngestReport = "ingest_report.json";
inline constexpr const char* kAdsClassified = "ads_classified.csv";
inline constexpr const char* kHumanClassified = "human_classified.csv";
inline constexpr const char* kBenchmarks = "benchmarks.csv";
inline constexpr const char* kCellMileage = "cell_mileage.csv";
inline constexpr const char* kBenchmarkNotes = "benchmark_notes.txt";
inline constexpr const char* kComparisons = "comparisons.csv";
inline constexpr const char* kGaps = "gaps.csv";
inline constexpr const char* kManifest = "manifest.json";
} // namespace artifact

struct StageResult {
    std::string stage;
    std::vector<std::filesystem::path> outputs;
    std::vector<std::string> notes;
};

// `inputs` are directories holding earlier stage outputs, searched in order.
StageResult run_ingest(const PipelineConfig& config, const std::filesystem::path& out);
StageResult run_classify(const std::vector<std::filesystem::path>& inputs, const std::filesystem::path& out,
                         const RunOptions& options);
StageResult run_benchmark(const PipelineConfig& config, const std::vector<std::filesystem::path>& inputs,
                          const std::filesystem::path& out, const RunOptions& options);
StageResult run_compare(const PipelineConfig& config, const std::vector<std::filesystem::path>& inputs,
                        const std::filesystem::path& out, const RunOptions& options);
StageResult run_report(const PipelineConfig& config, const std::vector<std::filesystem::path>& inputs,
                       const std::filesystem::path& out, const RunOptions& options);
// All stages into out/<stage>/.
std::vector<StageResult> run_pipeline(const PipelineConfig& config, const std::filesystem::path& out,
                                      const RunOptions& options);

// Simulated corpus in canonical form plus a pipeline config that runs on it.
StageResult run_simulate(const std::filesystem::path& scenario_path, std::optional<std::uint64_t> seed,
                         const std::filesystem::path& out);

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
    std::string stage;
    std::string timestamp;  // UTC ISO-8601
    std::vector<std::filesystem::path> configs;
    std::vector<std::filesystem::path> inputs;
    std::vector<std::filesystem::path> outputs;
    std::map<std::string, std::string> options;
    std::vector<std::string> notes;
    std::string status = "ok";

    // Digests are computed from the files when serialized.
    std::string to_json() const;
};

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

} // namespace crashbench
