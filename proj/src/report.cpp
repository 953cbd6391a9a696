#include "crashbench/report.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "crashbench/field_types.hpp"

namespace crashbench {

ReportFormat parse_report_format(std::string_view text) {
    if (text == "csv") return ReportFormat::Csv;
    if (text == "md") return ReportFormat::Markdown;
    throw InvalidInput("unknown report format '" + std::string(text) + "' (expected csv or md)");
}

std::string_view extension(ReportFormat format) { return format == ReportFormat::Csv ? ".csv" : ".md"; }

namespace {

std::string tf(bool b) { return b ? "true" : "false"; }

// Pipe table with columns padded to a common width.
std::string markdown_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size(), 3);
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = std::max(width[i], header[i].size());
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        os << '|';
        for (std::size_t i = 0; i < width.size(); ++i) {
            const std::string& c = i < cells.size() ? cells[i] : std::string();
            os << ' ' << c << std::string(width[i] - c.size(), ' ') << " |";
        }
        os << '\n';
    };
    line(header);
    os << '|';
    for (auto w : width) os << std::string(w + 2, '-') << '|';
    os << '\n';
    for (const auto& r : rows) line(r);
    return os.str();
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream os;
    CsvWriter w(os);
    w.row(header);
    for (const auto& r : rows) w.row(r);
    return os.str();
}

std::string emit(ReportFormat format, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
    return format == ReportFormat::Csv ? csv_table(header, rows) : markdown_table(header, rows);
}

std::string count_text(double v) {
    return v == std::floor(v) && std::abs(v) < 1e15 ? std::to_string(static_cast<long long>(v)) : format_double(v);
}

} // namespace

std::string display_percent(double percent) {
    if (std::isinf(percent)) return percent > 0 ? "inf" : "-inf";
    if (std::isnan(percent)) return "nan";
    const long long v = std::llround(percent);
    return std::to_string(v == 0 ? 0 : v);
}

std::string display_ci(const RateRatio& s) {
    const std::string upper = s.upper_unbounded ? "unbounded" : display_percent(s.percent_ci.upper) + "%";
    return "[" + display_percent(s.percent_ci.lower) + "%, " + upper + "]";
}

// ---------------------------------------------------------------------------
// Comparison tables
// ---------------------------------------------------------------------------

const std::vector<std::string>& comparison_columns() {
    static const std::vector<std::string> columns = {
        "location", "outcome", "crash_type", "human_ipmm", "ads_ipmm", "expected_delta", "percent_diff",
        "ci_lower", "ci_upper", "significant",
        // full precision
        "ads_count", "ads_miles", "human_effective_count", "human_exposure", "human_ipmm_raw", "ads_ipmm_raw",
        "expected_delta_raw", "rate_ratio_raw", "ratio_lower_raw", "ratio_upper_raw", "percent_diff_raw",
        "ci_lower_raw", "ci_upper_raw", "upper_unbounded", "underreporting_applied", "dynamic_applied"};
    return columns;
}

std::string comparison_csv(std::span<const ComparisonResult> results) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : results) {
        const auto& s = r.stats;
        rows.push_back({format_location(r.key.location), std::string(to_string(r.key.outcome)),
                        r.key.crash_type.label(), format_fixed(r.human_ipmm, 2), format_fixed(r.ads_ipmm, 2),
                        format_fixed(r.expected_count_delta, 1), display_percent(s.percent_difference),
                        display_percent(s.percent_ci.lower),
                        s.upper_unbounded ? "inf" : display_percent(s.percent_ci.upper), tf(s.significant),
                        format_double(r.ads_count), format_double(r.ads_miles),
                        format_double(r.human_effective_count), format_double(r.human_exposure),
                        format_double(r.human_ipmm), format_double(r.ads_ipmm),
                        format_double(r.expected_count_delta), format_double(s.ratio), format_double(s.ratio_ci.lower),
                        format_double(s.ratio_ci.upper), format_double(s.percent_difference),
                        format_double(s.percent_ci.lower), format_double(s.percent_ci.upper), tf(s.upper_unbounded),
                        tf(r.variant.underreporting), tf(r.variant.dynamic)});
    }
    return csv_table(comparison_columns(), rows);
}

std::string comparison_markdown(std::span<const ComparisonResult> results) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : results) {
        rows.push_back({format_location(r.key.location), std::string(to_string(r.key.outcome)),
                        r.key.crash_type.label(), format_fixed(r.human_ipmm, 2), format_fixed(r.ads_ipmm, 2),
                        format_fixed(r.expected_count_delta, 1),
                        display_percent(r.stats.percent_difference) + "%" + (r.stats.significant ? "*" : ""),
                        display_ci(r.stats)});
    }
    return markdown_table({"Location", "Outcome", "Crash type", "Human IPMM", "ADS IPMM", "Expected delta",
                           "Percent difference", "95% CI"},
                          rows) +
           "\n\\* 95% confidence interval excludes 0.\n";
}

std::vector<ComparisonResult> comparison_from_csv(const CsvTable& table) {
    std::map<std::string, std::size_t> col;
    for (const auto& c : comparison_columns()) col[c] = table.require_column(c, "comparison file");
    std::vector<ComparisonResult> out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string where = "comparison file: line " + std::to_string(table.line_numbers[i]);
        if (row.size() != table.header.size()) throw ParseError(where + " has the wrong field count");
        auto text = [&](const char* c) { return trim(row[col.at(c)]); };
        auto num = [&](const char* c) {
            auto v = parse_double(text(c));
            if (!v) throw ParseError(where + ": column '" + c + "' is not a number");
            return *v;
        };
        auto flag = [&](const char* c) {
            auto v = parse_bool(text(c));
            if (!v) throw ParseError(where + ": column '" + c + "' is not a boolean");
            return *v;
        };
        try {
            ComparisonResult r;
            auto loc = parse_any_location(text("location"));
            if (!loc) throw InvalidInput("unknown location '" + std::string(text("location")) + "'");
            r.key = {*loc, parse_enum<OutcomeLevel>(text("outcome")), CrashTypeKey::parse(text("crash_type"))};
            r.variant = {flag("underreporting_applied"), flag("dynamic_applied")};
            r.ads_count = num("ads_count");
            r.ads_miles = num("ads_miles");
            r.human_effective_count = num("human_effective_count");
            r.human_exposure = num("human_exposure");
            r.human_ipmm = num("human_ipmm_raw");
            r.ads_ipmm = num("ads_ipmm_raw");
            r.expected_count_delta = num("expected_delta_raw");
            auto& s = r.stats;
            s.x_a = r.ads_count;
            s.t_a = r.ads_miles;
            s.x_b = r.human_effective_count;
            s.t_b = r.human_exposure;
            s.ratio = num("rate_ratio_raw");
            s.ratio_ci = {num("ratio_lower_raw"), num("ratio_upper_raw")};
            s.percent_difference = num("percent_diff_raw");
            s.percent_ci = {num("ci_lower_raw"), num("ci_upper_raw")};
            s.upper_unbounded = flag("upper_unbounded");
            s.significant = flag("significant");
            out.push_back(std::move(r));
        } catch (const InvalidInput& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    return out;
}

std::string gaps_csv(std::span<const ComparisonGap> gaps) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& g : gaps) {
        rows.push_back({format_location(g.key.location), std::string(to_string(g.key.outcome)),
                        g.key.crash_type.label(), g.reason});
    }
    return csv_table({"location", "outcome", "crash_type", "reason"}, rows);
}

// ---------------------------------------------------------------------------
// Event counts
// ---------------------------------------------------------------------------

EventCounts event_counts(std::span<const ClassifiedRecord> records, std::span<const OutcomeLevel> outcomes,
                         const std::optional<Location>& location) {
    EventCounts out;
    out.outcomes.assign(outcomes.begin(), outcomes.end());
    for (auto& row : out.by_group) row.assign(outcomes.size(), 0.0);
    out.totals.assign(outcomes.size(), 0.0);
    for (const auto& c : records) {
        if (location && c.record.location != *location) continue;
        auto& row = out.by_group[static_cast<std::size_t>(c.crash_type.group)];
        for (std::size_t j = 0; j < outcomes.size(); ++j) {
            if (!c.outcomes.contains(outcomes[j])) continue;
            row[j] += c.record.weight;
            out.totals[j] += c.record.weight;
        }
    }
    return out;
}

std::string event_counts_text(const EventCounts& counts, ReportFormat format) {
    std::vector<std::string> header = {"crash_type"};
    for (auto o : counts.outcomes) header.emplace_back(to_string(o));
    std::vector<std::vector<std::string>> rows;
    for (auto g : all_values<CrashGroup>()) {
        std::vector<std::string> row = {std::string(to_string(g))};
        for (double v : counts.by_group[static_cast<std::size_t>(g)]) row.push_back(count_text(v));
        rows.push_back(std::move(row));
    }
    std::vector<std::string> total = {"Total"};
    for (double v : counts.totals) total.push_back(count_text(v));
    rows.push_back(std::move(total));
    return emit(format, header, rows);
}

std::string f2r_counts_text(std::span<const ClassifiedRecord> records, ReportFormat format) {
    const std::array<CrashTypeKey, 3> keys = {CrashTypeKey::f2r(F2RRole::Striking), CrashTypeKey::f2r(F2RRole::Struck),
                                              CrashTypeKey::of(CrashGroup::V2VF2R)};
    std::vector<std::string> header = {"crash_type"};
    for (auto o : kTableOutcomes) header.emplace_back(to_string(o));
    std::vector<std::vector<std::string>> rows;
    for (const auto& k : keys) {
        std::vector<std::string> row = {k.label()};
        for (auto o : kTableOutcomes) {
            double n = 0.0;
            for (const auto& c : records) {
                if (k.matches(c.crash_type) && c.outcomes.contains(o)) n += c.record.weight;
            }
            row.push_back(count_text(n));
        }
        rows.push_back(std::move(row));
    }
    return emit(format, header, rows);
}

std::string movement_counts_text(std::span<const ClassifiedRecord> records, ReportFormat format) {
    std::vector<std::string> header = {"pre_crash_movement"};
    for (auto o : kTableOutcomes) header.emplace_back(to_string(o));
    std::vector<std::vector<std::string>> rows;
    for (auto m : all_values<PreCrashMovement>()) {
        std::vector<std::string> row = {std::string(to_string(m))};
        for (auto o : kTableOutcomes) {
            double n = 0.0;
            for (const auto& c : records) {
                if (c.movement == m && c.outcomes.contains(o)) n += c.record.weight;
            }
            row.push_back(count_text(n));
        }
        rows.push_back(std::move(row));
    }
    return emit(format, header, rows);
}

// ---------------------------------------------------------------------------
// Sensitivity grid
// ---------------------------------------------------------------------------

SensitivityGrid sensitivity_grid(const AdsCounts& ads, const BenchmarkSet& benchmarks, CompareRequest base) {
    constexpr std::array<BenchmarkVariant, 4> variants = {
        BenchmarkVariant{false, false}, BenchmarkVariant{true, false}, BenchmarkVariant{false, true},
        BenchmarkVariant{true, true}};
    std::map<CellKey, std::array<std::optional<ComparisonResult>, 4>> cells;
    std::map<CellKey, std::string> reasons;
    for (std::size_t v = 0; v < variants.size(); ++v) {
        base.variant = variants[v];
        auto run = compare(ads, benchmarks, base);
        for (auto& r : run.results) cells[r.key][v] = std::move(r);
        for (auto& g : run.gaps) {
            auto& reason = reasons[g.key];
            const std::string label = std::string("underreporting ") + (variants[v].underreporting ? "on" : "off") +
                                      ", dynamic " + (variants[v].dynamic ? "on" : "off") + ": " + g.reason;
            reason += (reason.empty() ? "" : "; ") + label;
        }
    }

    SensitivityGrid grid;
    for (const auto& loc : base.locations) {
        for (auto o : base.outcomes) {
            for (const auto& k : base.crash_types) {
                const CellKey key{loc, o, k};
                if (auto r = reasons.find(key); r != reasons.end()) {
                    grid.gaps.push_back({key, r->second});
                    continue;
                }
                const auto& four = cells.at(key);
                bool any_sig = false;
                bool all_sig = true;
                for (const auto& r : four) {
                    any_sig = any_sig || r->stats.significant;
                    all_sig = all_sig && r->stats.significant;
                }
                const bool insensitive =
                    four[0]->human_ipmm == four[1]->human_ipmm && four[2]->human_ipmm == four[3]->human_ipmm;
                for (std::size_t v = 0; v < 4; ++v) {
                    grid.rows.push_back({variants[v], *four[v], any_sig != all_sig, insensitive});
                }
            }
        }
    }
    return grid;
}

std::string sensitivity_text(const SensitivityGrid& grid, ReportFormat format) {
    auto onoff = [](bool b) { return std::string(b ? "on" : "off"); };
    std::vector<std::vector<std::string>> rows;
    if (format == ReportFormat::Csv) {
        for (const auto& row : grid.rows) {
            const auto& r = row.result;
            rows.push_back({format_location(r.key.location), std::string(to_string(r.key.outcome)),
                            r.key.crash_type.label(), onoff(row.requested.underreporting),
                            onoff(row.requested.dynamic), format_double(r.human_ipmm), format_double(r.ads_ipmm),
                            format_double(r.stats.percent_difference), format_double(r.stats.percent_ci.lower),
                            format_double(r.stats.percent_ci.upper), tf(r.stats.significant),
                            tf(row.significance_flip), row.underreporting_insensitive ? "insensitive" : "scaled"});
        }
        return csv_table({"location", "outcome", "crash_type", "underreporting", "dynamic", "human_ipmm_raw",
                          "ads_ipmm_raw", "percent_diff_raw", "ci_lower_raw", "ci_upper_raw", "significant",
                          "significance_flip", "underreporting_effect"},
                         rows);
    }
    for (const auto& row : grid.rows) {
        const auto& r = row.result;
        std::string summary;
        if (row.significance_flip) summary = "significance flips";
        if (row.underreporting_insensitive) summary += std::string(summary.empty() ? "" : "; ") + "insensitive";
        rows.push_back({format_location(r.key.location), std::string(to_string(r.key.outcome)),
                        r.key.crash_type.label(), onoff(row.requested.underreporting), onoff(row.requested.dynamic),
                        format_fixed(r.human_ipmm, 2),
                        display_percent(r.stats.percent_difference) + "%" + (r.stats.significant ? "*" : ""),
                        display_ci(r.stats), summary});
    }
    return markdown_table({"Location", "Outcome", "Crash type", "Underreporting", "Dynamic", "Human IPMM",
                           "Percent difference", "95% CI", "Summary"},
                          rows);
}

} // namespace crashbench
