#pragma once

// Depth of Inspection (DI) and Inspection Performance Metric (IPM) from
// shop-floor defect records, plus the ten-band DI performance scale.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inspectlens/error.hpp"

namespace inspectlens {

struct DefectCounts {
    std::uint64_t inspection_found = 0;  // defects captured by inspection
    std::uint64_t total_found = 0;       // captured by inspection and testing together

    bool valid() const noexcept { return inspection_found <= total_found; }
    bool operator==(const DefectCounts&) const = default;
};

/// One inspection session. Times are per person, in person-hours.
struct InspectionSession {
    std::uint32_t num_inspectors = 1;
    double inspection_time = 0.0;
    double prep_time = 0.0;
    double experience_level = 0.0;  // years of relevant experience
    double function_points = 1.0;

    bool valid() const noexcept {
        return num_inspectors >= 1 && inspection_time > 0.0 && prep_time >= 0.0 &&
               experience_level >= 0.0 && function_points > 0.0;
    }

    /// Inspection effort: N * (It + Pt), person-hours.
    double effort() const noexcept {
        return static_cast<double>(num_inspectors) * (inspection_time + prep_time);
    }

    bool operator==(const InspectionSession&) const = default;
};

enum class Phase { Requirements, Design, Implementation };

inline constexpr std::array<Phase, 3> kAllPhases{Phase::Requirements, Phase::Design,
                                                 Phase::Implementation};

inline constexpr std::string_view short_name(Phase p) noexcept {
    switch (p) {
        case Phase::Requirements: return "req";
        case Phase::Design: return "des";
        case Phase::Implementation: return "imp";
    }
    return "?";
}

inline std::optional<Phase> parse_phase(std::string_view text) {
    std::string lower;
    for (char c : text) lower += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    if (lower == "req" || lower == "requirements") return Phase::Requirements;
    if (lower == "des" || lower == "design") return Phase::Design;
    if (lower == "imp" || lower == "implementation") return Phase::Implementation;
    return std::nullopt;
}

struct PhaseObservation {
    Phase phase = Phase::Requirements;
    DefectCounts counts;
    InspectionSession session;

    bool operator==(const PhaseObservation&) const = default;
};

struct ProjectRecord {
    std::string id;
    std::optional<double> total_person_hours;
    std::optional<double> total_captured_pct;  // Tc, opaque metadata
    std::vector<PhaseObservation> phases;

    bool operator==(const ProjectRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Bands

enum class BandLabel {
    Worse,
    VeryLow,
    Low,
    Normal,
    AboveNormal,
    High,
    VeryHigh,
    Best,
    Excellent,
    Ideal,
};

/// A DI interval [lower, upper); the Ideal band is closed at 1.0.
struct Band {
    BandLabel label;
    double lower;
    double upper;

    bool contains(double di) const noexcept {
        if (label == BandLabel::Ideal) return di >= lower && di <= upper;
        return di >= lower && di < upper;
    }

    bool operator==(const Band&) const = default;
};

inline constexpr std::array<Band, 10> kBands{{
    {BandLabel::Worse, 0.0, 0.1},
    {BandLabel::VeryLow, 0.1, 0.2},
    {BandLabel::Low, 0.2, 0.3},
    {BandLabel::Normal, 0.3, 0.4},
    {BandLabel::AboveNormal, 0.4, 0.5},
    {BandLabel::High, 0.5, 0.6},
    {BandLabel::VeryHigh, 0.6, 0.7},
    {BandLabel::Best, 0.7, 0.8},
    {BandLabel::Excellent, 0.8, 0.9},
    {BandLabel::Ideal, 0.9, 1.0},
}};

inline constexpr std::string_view to_string(BandLabel label) noexcept {
    switch (label) {
        case BandLabel::Worse: return "Worse";
        case BandLabel::VeryLow: return "VeryLow";
        case BandLabel::Low: return "Low";
        case BandLabel::Normal: return "Normal";
        case BandLabel::AboveNormal: return "AboveNormal";
        case BandLabel::High: return "High";
        case BandLabel::VeryHigh: return "VeryHigh";
        case BandLabel::Best: return "Best";
        case BandLabel::Excellent: return "Excellent";
        case BandLabel::Ideal: return "Ideal";
    }
    return "?";
}

inline constexpr std::string_view display_name(BandLabel label) noexcept {
    switch (label) {
        case BandLabel::Worse: return "Worse";
        case BandLabel::VeryLow: return "Very Low";
        case BandLabel::Low: return "Low";
        case BandLabel::Normal: return "Normal";
        case BandLabel::AboveNormal: return "Above Normal";
        case BandLabel::High: return "High";
        case BandLabel::VeryHigh: return "Very High";
        case BandLabel::Best: return "Best";
        case BandLabel::Excellent: return "Excellent";
        case BandLabel::Ideal: return "Ideal";
    }
    return "?";
}

inline std::optional<BandLabel> parse_band_label(std::string_view text) {
    for (const Band& b : kBands) {
        if (text == to_string(b.label) || text == display_name(b.label)) return b.label;
    }
    return std::nullopt;
}

inline const Band& band_of(BandLabel label) noexcept {
    return kBands[static_cast<std::size_t>(label)];
}

/// Checks that the band table covers [0,1] with no gaps or overlaps.
inline bool bands_tile_unit_interval() noexcept {
    if (kBands.front().lower != 0.0 || kBands.back().upper != 1.0) return false;
    for (std::size_t i = 0; i < kBands.size(); ++i) {
        if (static_cast<std::size_t>(kBands[i].label) != i) return false;
        if (!(kBands[i].lower < kBands[i].upper)) return false;
        if (i + 1 < kBands.size() && kBands[i].upper != kBands[i + 1].lower) return false;
    }
    return true;
}

inline const Band& classify_band(double di) {
    if (!(di >= 0.0 && di <= 1.0)) {
        throw Error(ErrorKind::OutOfDomain,
                    "DI value " + std::to_string(di) + " is outside [0, 1]");
    }
    for (const Band& b : kBands) {
        if (b.contains(di)) return b;
    }
    return kBands.back();  // unreachable while the table tiles [0,1]
}

// ---------------------------------------------------------------------------
// Metrics

/// DI = inspection_found / total_found.
inline double compute_di(const DefectCounts& counts) {
    if (counts.total_found == 0) {
        throw Error(ErrorKind::UndefinedMetric, "DI is undefined: no defects were captured");
    }
    if (!counts.valid()) {
        throw Error(ErrorKind::OutOfDomain,
                    "inspection_found (" + std::to_string(counts.inspection_found) +
                        ") exceeds total_found (" + std::to_string(counts.total_found) + ")");
    }
    return static_cast<double>(counts.inspection_found) /
           static_cast<double>(counts.total_found);
}

/// IPM = n_i / IE, defects per person-hour of inspection effort.
inline double compute_ipm(std::uint64_t inspection_found, const InspectionSession& session) {
    const double effort = session.effort();
    if (!(effort > 0.0)) {
        throw Error(ErrorKind::UndefinedMetric,
                    "IPM is undefined: inspection effort is not positive");
    }
    return static_cast<double>(inspection_found) / effort;
}

enum class Aggregation { MeanOfPhases, PooledCounts };

inline double aggregate_metric(std::span<const double> values, Aggregation mode,
                               std::optional<std::span<const DefectCounts>> counts = std::nullopt) {
    if (values.empty()) throw Error(ErrorKind::EmptyInput, "no phase values to aggregate");
    if (mode == Aggregation::MeanOfPhases) {
        double sum = 0.0;
        for (double v : values) sum += v;
        return sum / static_cast<double>(values.size());
    }
    if (!counts || counts->size() != values.size()) {
        throw Error(ErrorKind::MissingCounts,
                    "pooled aggregation needs defect counts aligned with the phase values");
    }
    std::uint64_t found = 0;
    std::uint64_t total = 0;
    for (const DefectCounts& c : *counts) {
        found += c.inspection_found;
        total += c.total_found;
    }
    return compute_di(DefectCounts{found, total});
}

// ---------------------------------------------------------------------------
// Project report

struct PhaseReport {
    Phase phase;
    std::optional<double> di;  // empty when the phase captured no defects
    std::optional<Band> di_band;
    double ipm = 0.0;
};

struct ProjectReport {
    std::string project_id;
    std::vector<PhaseReport> phases;
    std::optional<double> avg_di;
    std::optional<Band> avg_di_band;
    double avg_ipm = 0.0;
    bool partial = false;  // at least one phase had an undefined DI
    std::vector<std::string> warnings;
};

/// Validates a record's own invariants; returns the violations without throwing.
inline std::vector<Violation> check_record(const ProjectRecord& record) {
    std::vector<Violation> out;
    const std::string who = "project " + record.id;
    if (record.id.empty()) out.push_back({0, "project_id", "project id is empty"});
    if (record.phases.empty()) out.push_back({0, "phases", who + " has no phase observations"});
    if (record.total_person_hours && !(*record.total_person_hours > 0.0)) {
        out.push_back({0, "total_person_hours", who + ": must be positive"});
    }
    if (record.total_captured_pct &&
        !(*record.total_captured_pct >= 0.0 && *record.total_captured_pct <= 100.0)) {
        out.push_back({0, "total_captured_pct", who + ": must lie in [0, 100]"});
    }
    std::array<bool, 3> seen{};
    for (const PhaseObservation& obs : record.phases) {
        const std::string where = who + " phase " + std::string(short_name(obs.phase));
        auto& flag = seen[static_cast<std::size_t>(obs.phase)];
        if (flag) out.push_back({0, "phase", where + " appears more than once"});
        flag = true;
        if (!obs.counts.valid()) {
            out.push_back({0, "defects_inspection", where + ": exceeds defects_total"});
        }
        const InspectionSession& s = obs.session;
        if (s.num_inspectors < 1) out.push_back({0, "num_inspectors", where + ": must be >= 1"});
        if (!(s.inspection_time > 0.0)) {
            out.push_back({0, "inspection_time_h", where + ": must be positive"});
        }
        if (!(s.prep_time >= 0.0)) out.push_back({0, "prep_time_h", where + ": must be >= 0"});
        if (!(s.experience_level >= 0.0)) {
            out.push_back({0, "experience_years", where + ": must be >= 0"});
        }
        if (!(s.function_points > 0.0)) {
            out.push_back({0, "function_points", where + ": must be positive"});
        }
    }
    return out;
}

/// Per-phase DI/IPM with bands and the project averages. Phases that captured
/// no defects get no DI; the DI average then covers the remaining phases and
/// the report is flagged partial.
inline ProjectReport project_report(const ProjectRecord& record,
                                    Aggregation mode = Aggregation::MeanOfPhases) {
    if (auto violations = check_record(record); !violations.empty()) {
        throw ValidationError(std::move(violations));
    }

    ProjectReport report;
    report.project_id = record.id;
    std::vector<double> dis;
    std::vector<DefectCounts> di_counts;
    std::vector<double> ipms;
    std::uint64_t found_all = 0;
    double effort_all = 0.0;

    for (const PhaseObservation& obs : record.phases) {
        PhaseReport pr{obs.phase, std::nullopt, std::nullopt, 0.0};
        const std::string where =
            "project " + record.id + " phase " + std::string(short_name(obs.phase));
        try {
            pr.di = compute_di(obs.counts);
            pr.di_band = classify_band(*pr.di);
            dis.push_back(*pr.di);
            di_counts.push_back(obs.counts);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::UndefinedMetric) throw Error(e.kind(), where + ": " + e.what());
            report.partial = true;
            report.warnings.push_back(where + ": " + e.what());
        }
        try {
            pr.ipm = compute_ipm(obs.counts.inspection_found, obs.session);
        } catch (const Error& e) {
            throw Error(e.kind(), where + ": " + e.what());
        }
        ipms.push_back(pr.ipm);
        found_all += obs.counts.inspection_found;
        effort_all += obs.session.effort();
        report.phases.push_back(pr);
    }

    if (!dis.empty()) {
        report.avg_di = aggregate_metric(dis, mode, std::span<const DefectCounts>(di_counts));
        report.avg_di_band = classify_band(*report.avg_di);
    } else {
        report.warnings.push_back("project " + record.id + ": no phase has a defined DI");
    }
    report.avg_ipm = mode == Aggregation::MeanOfPhases
                         ? aggregate_metric(ipms, mode)
                         : static_cast<double>(found_all) / effort_all;
    return report;
}

}  // namespace inspectlens
