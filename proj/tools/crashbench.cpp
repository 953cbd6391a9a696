// crashbench: command-line driver for the staged pipeline.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "crashbench/parallel.hpp"
#include "crashbench/pipeline.hpp"

namespace fs = std::filesystem;
using namespace crashbench;

namespace {

constexpr int kUsageExit = 1;
constexpr int kInternalExit = 70;

void setup_logging() {
    auto logger = spdlog::stderr_logger_st("crashbench");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("CRASHBENCH_LOG")) spdlog::cfg::helpers::load_levels(env);
}

struct Args {
    fs::path config;
    std::vector<fs::path> inputs;
    fs::path out;
    std::optional<double> alpha;
    std::string underreporting;
    std::string dynamic;
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
    unsigned threads = 1;
};

std::optional<bool> on_off(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return s == "on";
}

RunOptions run_options(const Args& a) {
    RunOptions o;
    o.alpha = a.alpha;
    o.underreporting = on_off(a.underreporting);
    o.dynamic = on_off(a.dynamic);
    o.format = parse_report_format(a.format);
    o.threads = resolve_threads(a.threads);
    return o;
}

PipelineConfig config_or_default(const Args& a) {
    return a.config.empty() ? PipelineConfig{} : load_pipeline_config(a.config);
}

void print(const StageResult& r) {
    std::cerr << r.stage << ": wrote " << r.outputs.size() << " files";
    if (!r.outputs.empty()) std::cerr << " to " << r.outputs.front().parent_path().string();
    std::cerr << "\n";
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Benchmark ADS crash rates against adjusted human crash rates."};
    app.require_subcommand(1);
    Args a;

    auto add_config = [&](CLI::App* cmd, bool required) {
        auto* opt = cmd->add_option("--config", a.config, "pipeline config (YAML)")->check(CLI::ExistingFile);
        if (required) opt->required();
    };
    auto add_inputs = [&](CLI::App* cmd) {
        cmd->add_option("--input", a.inputs, "directories holding earlier stage outputs")->check(CLI::ExistingDirectory);
    };
    auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", a.out, "output directory")->required(); };
    auto add_threads = [&](CLI::App* cmd) {
        cmd->add_option("--threads", a.threads, "worker threads (0 = all cores)")->capture_default_str();
    };
    auto add_switches = [&](CLI::App* cmd) {
        cmd->add_option("--alpha", a.alpha, "two-sided significance level (default 0.05)")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--underreporting", a.underreporting, "apply the underreporting factor")
            ->check(CLI::IsMember({"on", "off"}));
        cmd->add_option("--dynamic", a.dynamic, "use the spatially reweighted benchmark")
            ->check(CLI::IsMember({"on", "off"}));
    };

    auto* ingest = app.add_subcommand("ingest", "map raw crash and mileage files to canonical records");
    add_config(ingest, true);
    add_inputs(ingest);
    add_out(ingest);

    auto* classify = app.add_subcommand("classify", "assign crash types, outcome levels and pre-crash movement");
    add_config(classify, false);
    add_inputs(classify);
    add_out(classify);
    add_threads(classify);

    auto* benchmark = app.add_subcommand("benchmark", "build human benchmark rates");
    add_config(benchmark, true);
    add_inputs(benchmark);
    add_out(benchmark);
    add_threads(benchmark);

    auto* compare = app.add_subcommand("compare", "compare ADS and benchmark rates");
    add_config(compare, true);
    add_inputs(compare);
    add_out(compare);
    add_switches(compare);
    add_threads(compare);

    auto* report = app.add_subcommand("report", "write comparison, count and sensitivity tables");
    add_config(report, true);
    add_inputs(report);
    add_out(report);
    add_switches(report);
    add_threads(report);
    report->add_option("--format", a.format, "table format")->check(CLI::IsMember({"csv", "md"}))->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "draw a synthetic corpus with known rates");
    simulate->add_option("--config", a.config, "scenario config (YAML)")->required()->check(CLI::ExistingFile);
    simulate->add_option("--seed", a.seed, "override the scenario seed");
    add_out(simulate);

    auto* pipeline = app.add_subcommand("pipeline", "run every stage into <out>/<stage>/");
    add_config(pipeline, true);
    add_out(pipeline);
    add_switches(pipeline);
    add_threads(pipeline);
    pipeline->add_option("--format", a.format, "table format")->check(CLI::IsMember({"csv", "md"}))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageExit;
    }

    try {
        if (ingest->parsed()) {
            print(run_ingest(load_pipeline_config(a.config), a.out));
        } else if (classify->parsed()) {
            print(run_classify(a.inputs, a.out, run_options(a)));
        } else if (benchmark->parsed()) {
            print(run_benchmark(load_pipeline_config(a.config), a.inputs, a.out, run_options(a)));
        } else if (compare->parsed()) {
            print(run_compare(load_pipeline_config(a.config), a.inputs, a.out, run_options(a)));
        } else if (report->parsed()) {
            print(run_report(config_or_default(a), a.inputs, a.out, run_options(a)));
        } else if (simulate->parsed()) {
            print(run_simulate(a.config, a.seed, a.out));
        } else if (pipeline->parsed()) {
            for (const auto& r : run_pipeline(load_pipeline_config(a.config), a.out, run_options(a))) print(r);
        }
    } catch (const Error& e) {
        spdlog::error("{} error: {}", to_string(e.category()), e.what());
        return static_cast<int>(e.category());
    } catch (const fs::filesystem_error& e) {
        spdlog::error("io error: {}", e.what());
        return static_cast<int>(ErrorCategory::Io);
    } catch (const std::exception& e) {
        spdlog::error("internal error: {}", e.what());
        return kInternalExit;
    }
    return 0;
}
