#pragma once

// Flat-file persistence: project records (CSV and JSON), the bundled
// per-phase fixture, regression observations, and coefficient-set files.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "inspectlens/error.hpp"
#include "inspectlens/metrics.hpp"
#include "inspectlens/regression.hpp"

#ifndef INSPECTLENS_FIXTURE_DEFAULT_DIR
#define INSPECTLENS_FIXTURE_DEFAULT_DIR "data"
#endif

namespace inspectlens {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Text helpers

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

inline std::optional<std::uint64_t> parse_count(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
    if (text.empty()) return std::nullopt;
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

/// Splits one CSV line; double quotes may wrap a field and "" escapes a quote.
inline std::vector<std::string> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

inline std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = end + 1;
    }
    return lines;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// ---------------------------------------------------------------------------
// Project records

enum class RecordFormat { Csv, Json };

inline constexpr std::string_view kRecordsCsvHeader =
    "project_id,phase,defects_inspection,defects_total,num_inspectors,inspection_time_h,"
    "prep_time_h,experience_years,function_points";

inline constexpr int kRecordsSchemaVersion = 1;

inline RecordFormat format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".json" ? RecordFormat::Json : RecordFormat::Csv;
}

namespace detail {

inline void check_session_fields(std::size_t row, const std::string& prefix,
                                 const PhaseObservation& obs, std::vector<Violation>& out) {
    if (obs.counts.inspection_found > obs.counts.total_found) {
        out.push_back({row, prefix + "defects_inspection",
                       "inspection-found defects (" + std::to_string(obs.counts.inspection_found) +
                           ") exceed the total (" + std::to_string(obs.counts.total_found) + ")"});
    }
    const InspectionSession& s = obs.session;
    if (s.num_inspectors < 1) out.push_back({row, prefix + "num_inspectors", "must be >= 1"});
    if (!(s.inspection_time > 0.0)) {
        out.push_back({row, prefix + "inspection_time_h", "must be positive"});
    }
    if (!(s.prep_time >= 0.0)) out.push_back({row, prefix + "prep_time_h", "must be >= 0"});
    if (!(s.experience_level >= 0.0)) {
        out.push_back({row, prefix + "experience_years", "must be >= 0"});
    }
    if (!(s.function_points > 0.0)) {
        out.push_back({row, prefix + "function_points", "must be positive"});
    }
}

}  // namespace detail

inline std::vector<ProjectRecord> parse_records_csv(std::string_view text) {
    const auto lines = split_lines(text);
    std::vector<ProjectRecord> records;
    std::size_t first = 0;
    while (first < lines.size() && lines[first].empty()) ++first;
    if (first == lines.size()) return records;
    if (lines[first] != kRecordsCsvHeader) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(first + 1) +
                                               ": expected header '" +
                                               std::string(kRecordsCsvHeader) + "'");
    }

    std::vector<Violation> violations;
    std::map<std::string, std::size_t> index;
    std::map<std::pair<std::string, int>, std::size_t> seen_phase;
    for (std::size_t li = first + 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const std::size_t row = li + 1;
        const auto f = split_csv_line(lines[li]);
        if (f.size() != 9) {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(row) + ": expected 9 fields, got " +
                                                   std::to_string(f.size()));
        }
        PhaseObservation obs;
        bool ok = true;
        auto bad = [&](const char* field, const std::string& why) {
            violations.push_back({row, field, why});
            ok = false;
        };
        if (f[0].empty()) bad("project_id", "empty project id");
        if (auto p = parse_phase(f[1])) obs.phase = *p; else bad("phase", "unknown phase '" + f[1] + "'");
        if (auto v = parse_count(f[2])) obs.counts.inspection_found = *v;
        else bad("defects_inspection", "not a non-negative integer: '" + f[2] + "'");
        if (auto v = parse_count(f[3])) obs.counts.total_found = *v;
        else bad("defects_total", "not a non-negative integer: '" + f[3] + "'");
        if (auto v = parse_count(f[4]); v && *v <= 0xffffffffULL) obs.session.num_inspectors = static_cast<std::uint32_t>(*v);
        else bad("num_inspectors", "not a positive integer: '" + f[4] + "'");
        struct RealField { std::size_t col; const char* name; double* dst; };
        for (const RealField& rf : {RealField{5, "inspection_time_h", &obs.session.inspection_time},
                                    RealField{6, "prep_time_h", &obs.session.prep_time},
                                    RealField{7, "experience_years", &obs.session.experience_level},
                                    RealField{8, "function_points", &obs.session.function_points}}) {
            if (auto v = parse_double(f[rf.col])) *rf.dst = *v;
            else bad(rf.name, "not a number: '" + f[rf.col] + "'");
        }
        if (!ok) continue;
        const auto before = violations.size();
        detail::check_session_fields(row, "", obs, violations);
        if (auto [it, inserted] = seen_phase.emplace(std::pair{f[0], static_cast<int>(obs.phase)}, row);
            !inserted) {
            violations.push_back({row, "phase", "project " + f[0] + " already has a " +
                                                    std::string(short_name(obs.phase)) +
                                                    " row (line " + std::to_string(it->second) + ")"});
        }
        if (violations.size() != before) continue;

        auto [it, inserted] = index.emplace(f[0], records.size());
        if (inserted) {
            records.push_back(ProjectRecord{f[0], std::nullopt, std::nullopt, {}});
        }
        records[it->second].phases.push_back(obs);
    }
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return records;
}

inline std::string records_to_csv(const std::vector<ProjectRecord>& records) {
    std::string out(kRecordsCsvHeader);
    out += '\n';
    for (const auto& rec : records) {
        for (const auto& p : rec.phases) {
            out += csv_field(rec.id) + ',' + std::string(short_name(p.phase)) + ',' +
                   std::to_string(p.counts.inspection_found) + ',' +
                   std::to_string(p.counts.total_found) + ',' +
                   std::to_string(p.session.num_inspectors) + ',' +
                   format_double(p.session.inspection_time) + ',' +
                   format_double(p.session.prep_time) + ',' +
                   format_double(p.session.experience_level) + ',' +
                   format_double(p.session.function_points) + '\n';
        }
    }
    return out;
}

inline json records_to_json(const std::vector<ProjectRecord>& records) {
    json projects = json::array();
    for (const auto& rec : records) {
        json j;
        j["project_id"] = rec.id;
        if (rec.total_person_hours) j["total_person_hours"] = *rec.total_person_hours;
        if (rec.total_captured_pct) j["total_captured_pct"] = *rec.total_captured_pct;
        json phases = json::array();
        for (const auto& p : rec.phases) {
            phases.push_back({{"phase", short_name(p.phase)},
                              {"defects_inspection", p.counts.inspection_found},
                              {"defects_total", p.counts.total_found},
                              {"num_inspectors", p.session.num_inspectors},
                              {"inspection_time_h", p.session.inspection_time},
                              {"prep_time_h", p.session.prep_time},
                              {"experience_years", p.session.experience_level},
                              {"function_points", p.session.function_points}});
        }
        j["phases"] = std::move(phases);
        projects.push_back(std::move(j));
    }
    return json{{"schema_version", kRecordsSchemaVersion}, {"projects", std::move(projects)}};
}

inline std::vector<ProjectRecord> parse_records_json(std::string_view text) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return {};
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("projects") || !doc["projects"].is_array()) {
        throw Error(ErrorKind::ParseError, "records JSON needs a top-level 'projects' array");
    }
    if (doc.contains("schema_version") && doc["schema_version"] != kRecordsSchemaVersion) {
        throw Error(ErrorKind::SchemaVersionMismatch,
                    "records schema_version " + doc["schema_version"].dump() + " is not supported (expected " +
                        std::to_string(kRecordsSchemaVersion) + ")");
    }

    std::vector<Violation> violations;
    std::vector<ProjectRecord> records;
    std::map<std::string, std::size_t> seen_ids;
    const auto& projects = doc["projects"];
    for (std::size_t pi = 0; pi < projects.size(); ++pi) {
        const json& pj = projects[pi];
        const std::string at = "projects[" + std::to_string(pi) + "].";
        if (!pj.is_object()) {
            violations.push_back({0, at.substr(0, at.size() - 1), "not an object"});
            continue;
        }
        ProjectRecord rec;
        auto real = [&](const json& obj, const std::string& path, const char* key,
                        bool required) -> std::optional<double> {
            if (!obj.contains(key)) {
                if (required) violations.push_back({0, path + key, "missing"});
                return std::nullopt;
            }
            if (!obj[key].is_number()) {
                violations.push_back({0, path + key, "not a number"});
                return std::nullopt;
            }
            return obj[key].get<double>();
        };
        auto count = [&](const json& obj, const std::string& path,
                         const char* key) -> std::optional<std::uint64_t> {
            if (!obj.contains(key) || !obj[key].is_number_unsigned()) {
                violations.push_back({0, path + key, "missing or not a non-negative integer"});
                return std::nullopt;
            }
            return obj[key].get<std::uint64_t>();
        };

        if (!pj.contains("project_id") || !pj["project_id"].is_string() ||
            pj["project_id"].get<std::string>().empty()) {
            violations.push_back({0, at + "project_id", "missing or empty"});
        } else {
            rec.id = pj["project_id"].get<std::string>();
            if (auto [it, inserted] = seen_ids.emplace(rec.id, pi); !inserted) {
                violations.push_back({0, at + "project_id",
                                      "duplicate id '" + rec.id + "' (first at projects[" +
                                          std::to_string(it->second) + "])"});
            }
        }
        rec.total_person_hours = real(pj, at, "total_person_hours", false);
        rec.total_captured_pct = real(pj, at, "total_captured_pct", false);
        if (rec.total_person_hours && !(*rec.total_person_hours > 0.0)) {
            violations.push_back({0, at + "total_person_hours", "must be positive"});
        }
        if (rec.total_captured_pct &&
            !(*rec.total_captured_pct >= 0.0 && *rec.total_captured_pct <= 100.0)) {
            violations.push_back({0, at + "total_captured_pct", "must lie in [0, 100]"});
        }
        if (!pj.contains("phases") || !pj["phases"].is_array() || pj["phases"].empty()) {
            violations.push_back({0, at + "phases", "missing or empty"});
        } else {
            std::array<bool, 3> seen{};
            for (std::size_t k = 0; k < pj["phases"].size(); ++k) {
                const json& ph = pj["phases"][k];
                const std::string path = at + "phases[" + std::to_string(k) + "].";
                PhaseObservation obs;
                const auto before = violations.size();
                if (!ph.contains("phase") || !ph["phase"].is_string() ||
                    !parse_phase(ph["phase"].get<std::string>())) {
                    violations.push_back({0, path + "phase", "missing or unknown phase"});
                } else {
                    obs.phase = *parse_phase(ph["phase"].get<std::string>());
                    if (seen[static_cast<std::size_t>(obs.phase)]) {
                        violations.push_back({0, path + "phase", "phase appears more than once"});
                    }
                    seen[static_cast<std::size_t>(obs.phase)] = true;
                }
                if (auto v = count(ph, path, "defects_inspection")) obs.counts.inspection_found = *v;
                if (auto v = count(ph, path, "defects_total")) obs.counts.total_found = *v;
                if (auto v = count(ph, path, "num_inspectors")) {
                    obs.session.num_inspectors = static_cast<std::uint32_t>(*v);
                }
                if (auto v = real(ph, path, "inspection_time_h", true)) obs.session.inspection_time = *v;
                if (auto v = real(ph, path, "prep_time_h", true)) obs.session.prep_time = *v;
                if (auto v = real(ph, path, "experience_years", true)) obs.session.experience_level = *v;
                if (auto v = real(ph, path, "function_points", true)) obs.session.function_points = *v;
                if (violations.size() == before) detail::check_session_fields(0, path, obs, violations);
                rec.phases.push_back(obs);
            }
        }
        records.push_back(std::move(rec));
    }
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return records;
}

inline std::vector<ProjectRecord> load_records(const std::filesystem::path& path,
                                               std::optional<RecordFormat> format = std::nullopt) {
    const std::string text = read_file(path);
    const RecordFormat fmt = format.value_or(format_from_path(path));
    return fmt == RecordFormat::Json ? parse_records_json(text) : parse_records_csv(text);
}

inline void save_records(const std::vector<ProjectRecord>& records, const std::filesystem::path& path,
                         std::optional<RecordFormat> format = std::nullopt) {
    const RecordFormat fmt = format.value_or(format_from_path(path));
    write_file(path, fmt == RecordFormat::Json ? records_to_json(records).dump(2) + "\n"
                                               : records_to_csv(records));
}

// ---------------------------------------------------------------------------
// Regression observations file: one row per (x, y) pair.

inline constexpr std::string_view kObservationsCsvPrefix =
    "project_id,inspection_time_h,prep_time_h,num_inspectors,experience_years";

inline std::vector<Observation> parse_observations_csv(std::string_view text, ModelKind model) {
    const auto lines = split_lines(text);
    std::size_t first = 0;
    while (first < lines.size() && lines[first].empty()) ++first;
    if (first == lines.size()) return {};
    const std::string expected = std::string(kObservationsCsvPrefix) +
                                 (model == ModelKind::Team ? ",function_points,y" : ",y");
    if (lines[first] != expected) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(first + 1) +
                                               ": expected header '" + expected + "'");
    }
    const std::size_t width = regressor_count(model) + 2;
    std::vector<Observation> out;
    std::vector<Violation> violations;
    for (std::size_t li = first + 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto f = split_csv_line(lines[li]);
        if (f.size() != width) {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(li + 1) + ": expected " +
                                                   std::to_string(width) + " fields, got " +
                                                   std::to_string(f.size()));
        }
        Observation obs;
        obs.id = f[0];
        bool ok = true;
        for (std::size_t j = 1; j <= regressor_count(model); ++j) {
            const auto r = static_cast<Regressor>(j);
            auto v = parse_double(f[j]);
            if (!v) {
                violations.push_back({li + 1, std::string(field_name(r)), "not a number: '" + f[j] + "'"});
                ok = false;
                continue;
            }
            if (r == Regressor::LogFunctionPoints) {
                if (!(*v > 0.0)) {
                    violations.push_back({li + 1, "function_points", "must be positive"});
                    ok = false;
                    continue;
                }
                *v = function_points_to_x5(*v);
            }
            obs.x.set(r, *v);
        }
        if (auto v = parse_double(f[width - 1])) obs.y = *v;
        else {
            violations.push_back({li + 1, "y", "not a number: '" + f[width - 1] + "'"});
            ok = false;
        }
        if (ok) out.push_back(std::move(obs));
    }
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return out;
}

inline std::string observations_to_csv(const std::vector<Observation>& rows, ModelKind model) {
    std::string out = std::string(kObservationsCsvPrefix) +
                      (model == ModelKind::Team ? ",function_points,y\n" : ",y\n");
    for (const auto& o : rows) {
        out += csv_field(o.id);
        for (std::size_t j = 1; j <= regressor_count(model); ++j) {
            const auto r = static_cast<Regressor>(j);
            const double v = r == Regressor::LogFunctionPoints ? x5_to_function_points(o.x.value(r))
                                                               : o.x.value(r);
            out += ',' + format_double(v);
        }
        out += ',' + format_double(o.y) + '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fixture: the published per-phase DI/IPM table for projects P1-P15.

struct FixtureRow {
    std::string project_id;
    double total_person_hours = 0.0;
    double di_req = 0.0, di_des = 0.0, di_imp = 0.0, avg_di = 0.0;
    double ipm_req = 0.0, ipm_des = 0.0, ipm_imp = 0.0, avg_ipm = 0.0;
    double tc_pct = 0.0;
};

inline constexpr std::string_view kFixtureFileName = "fixture_tables.csv";
inline constexpr std::string_view kFixtureCsvHeader =
    "project_id,total_person_hours,di_req,di_des,di_imp,avg_di,ipm_req,ipm_des,ipm_imp,avg_ipm,tc_pct";
inline constexpr std::uint64_t kFixtureChecksum = 0xd05e244f5ce755f4ULL;
inline constexpr std::size_t kFixtureRowCount = 15;

/// INSPECTLENS_FIXTURE_DIR when set, else the directory baked in at build time.
inline std::filesystem::path fixture_dir() {
    if (const char* env = std::getenv("INSPECTLENS_FIXTURE_DIR"); env && *env) return env;
    return INSPECTLENS_FIXTURE_DEFAULT_DIR;
}

inline std::vector<FixtureRow> parse_fixture(std::string_view text) {
    if (fnv1a64(text) != kFixtureChecksum) {
        throw Error(ErrorKind::FixtureCorrupt, "fixture checksum " + hex64(fnv1a64(text)) +
                                                   " does not match pinned " +
                                                   hex64(kFixtureChecksum));
    }
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != kFixtureCsvHeader) {
        throw Error(ErrorKind::FixtureCorrupt, "fixture header mismatch");
    }
    std::vector<FixtureRow> rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto f = split_csv_line(lines[li]);
        if (f.size() != 11) throw Error(ErrorKind::FixtureCorrupt, "fixture row with wrong width");
        FixtureRow r;
        r.project_id = f[0];
        double* dst[] = {&r.total_person_hours, &r.di_req,  &r.di_des,  &r.di_imp,
                         &r.avg_di,             &r.ipm_req, &r.ipm_des, &r.ipm_imp,
                         &r.avg_ipm,            &r.tc_pct};
        for (std::size_t k = 0; k < 10; ++k) {
            auto v = parse_double(f[k + 1]);
            if (!v) throw Error(ErrorKind::FixtureCorrupt, "fixture cell '" + f[k + 1] + "' is not numeric");
            *dst[k] = *v;
        }
        rows.push_back(std::move(r));
    }
    if (rows.size() != kFixtureRowCount) {
        throw Error(ErrorKind::FixtureCorrupt, "fixture has " + std::to_string(rows.size()) + " rows");
    }
    return rows;
}

inline std::vector<FixtureRow> load_fixture(std::optional<std::filesystem::path> dir = std::nullopt) {
    const auto path = dir.value_or(fixture_dir()) / kFixtureFileName;
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error&) {
        throw Error(ErrorKind::FixtureCorrupt, "fixture file not found at " + path.string());
    }
    return parse_fixture(text);
}

/// Shop-floor records reconstructed from the published ratios: 100 captured
/// defects per phase, one inspector, no preparation, and an inspection time
/// chosen so that the phase IPM equals the published value.
inline std::vector<ProjectRecord> fixture_records(const std::vector<FixtureRow>& rows) {
    std::vector<ProjectRecord> out;
    for (const auto& r : rows) {
        ProjectRecord rec{r.project_id, r.total_person_hours, r.tc_pct, {}};
        const std::array<std::pair<double, double>, 3> phases{
            {{r.di_req, r.ipm_req}, {r.di_des, r.ipm_des}, {r.di_imp, r.ipm_imp}}};
        for (std::size_t k = 0; k < 3; ++k) {
            const auto found = static_cast<std::uint64_t>(std::llround(phases[k].first * 100.0));
            InspectionSession s;
            s.num_inspectors = 1;
            s.inspection_time = static_cast<double>(found) / phases[k].second;
            s.prep_time = 0.0;
            s.experience_level = 0.0;
            s.function_points = 1.0;
            rec.phases.push_back({kAllPhases[k], DefectCounts{found, 100}, s});
        }
        out.push_back(std::move(rec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Coefficient sets

inline constexpr int kCoefficientSchemaVersion = 1;

inline json diagnostics_to_json(const FitDiagnostics& d) {
    return json{{"residuals", d.residuals},
                {"sse", d.sse},
                {"r_squared", d.r_squared},
                {"condition_estimate", d.condition_estimate},
                {"degrees_of_freedom", d.degrees_of_freedom}};
}

inline json coefficients_to_json(const CoefficientSet& c) {
    return json{{"schema_version", kCoefficientSchemaVersion},
                {"model", to_string(c.model)},
                {"betas", c.betas},
                {"fitted_from", c.fitted_from},
                {"fitted_at", c.fitted_at},
                {"diagnostics", diagnostics_to_json(c.diagnostics)}};
}

inline CoefficientSet coefficients_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::ParseError, "coefficient file is not a JSON object");
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
        throw Error(ErrorKind::SchemaVersionMismatch, "coefficient file lacks an integer schema_version");
    }
    if (const int version = j["schema_version"].get<int>(); version != kCoefficientSchemaVersion) {
        throw Error(ErrorKind::SchemaVersionMismatch,
                    "coefficient file has schema_version " + std::to_string(version) +
                        "; this build reads schema_version " +
                        std::to_string(kCoefficientSchemaVersion));
    }
    try {
        CoefficientSet c;
        const auto model = parse_model_kind(j.at("model").get<std::string>());
        if (!model) throw Error(ErrorKind::ParseError, "unknown model '" + j.at("model").get<std::string>() + "'");
        c.model = *model;
        c.betas = j.at("betas").get<std::vector<double>>();
        if (c.betas.size() != coefficient_count(c.model)) {
            throw Error(ErrorKind::SchemaVersionMismatch,
                        std::string(to_string(c.model)) + " model declares " +
                            std::to_string(c.betas.size()) + " betas; schema_version " +
                            std::to_string(kCoefficientSchemaVersion) + " requires " +
                            std::to_string(coefficient_count(c.model)));
        }
        c.fitted_from = j.at("fitted_from").get<std::vector<std::string>>();
        c.fitted_at = j.at("fitted_at").get<std::string>();
        const json& d = j.at("diagnostics");
        c.diagnostics.residuals = d.at("residuals").get<std::vector<double>>();
        c.diagnostics.sse = d.at("sse").get<double>();
        c.diagnostics.r_squared = d.at("r_squared").get<double>();
        c.diagnostics.condition_estimate = d.at("condition_estimate").get<double>();
        c.diagnostics.degrees_of_freedom = d.at("degrees_of_freedom").get<std::size_t>();
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("coefficient file: ") + e.what());
    }
}

inline void save_coefficients(const CoefficientSet& coeffs, const std::filesystem::path& path) {
    write_file(path, coefficients_to_json(coeffs).dump(2) + "\n");
}

inline CoefficientSet load_coefficients(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, path.string() + ": malformed JSON: " + e.what());
    }
    return coefficients_from_json(j);
}

/// Content hash of the fitted state; the fit timestamp is excluded so the
/// same fit registered twice gets the same id.
inline std::string coefficient_id(const CoefficientSet& c) {
    json j = coefficients_to_json(c);
    j.erase("fitted_at");
    return "cs-" + hex64(fnv1a64(j.dump()));
}

}  // namespace inspectlens
