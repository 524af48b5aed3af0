#pragma once

// Multiple linear regression for the two inspection models:
//   Process (DI):  y = b0 + b1*x1 + b2*x2 + b3*x3 + b4*x4 + e
//   Team    (IPM): y = b0 + b1*x1 + ... + b5*x5 + e,   x5 = log10(function points)

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <ctime>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inspectlens/error.hpp"
#include "inspectlens/linalg.hpp"
#include "inspectlens/metrics.hpp"

namespace inspectlens {

enum class ModelKind { Process, Team };

inline constexpr std::string_view to_string(ModelKind kind) noexcept {
    return kind == ModelKind::Process ? "process" : "team";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view text) {
    if (text == "process" || text == "Process" || text == "di" || text == "DI") {
        return ModelKind::Process;
    }
    if (text == "team" || text == "Team" || text == "ipm" || text == "IPM") return ModelKind::Team;
    return std::nullopt;
}

inline constexpr std::size_t regressor_count(ModelKind kind) noexcept {
    return kind == ModelKind::Process ? 4 : 5;
}

inline constexpr std::size_t coefficient_count(ModelKind kind) noexcept {
    return regressor_count(kind) + 1;
}

/// Fewest observations accepted for a fit; equals the coefficient count.
inline constexpr std::size_t minimum_rows(ModelKind kind) noexcept {
    return coefficient_count(kind);
}

// Function points enter the team model on this log scale.
inline constexpr double kFunctionPointLogBase = 10.0;

inline double function_points_to_x5(double function_points) {
    if constexpr (kFunctionPointLogBase == 10.0) return std::log10(function_points);
    return std::log(function_points) / std::log(kFunctionPointLogBase);
}

inline double x5_to_function_points(double x5) { return std::pow(kFunctionPointLogBase, x5); }

// ---------------------------------------------------------------------------
// Regressors

enum class Regressor { InspectionTime = 1, PrepTime, NumInspectors, Experience, LogFunctionPoints };

inline constexpr std::array<Regressor, 5> kAllRegressors{
    Regressor::InspectionTime, Regressor::PrepTime, Regressor::NumInspectors,
    Regressor::Experience, Regressor::LogFunctionPoints};

inline constexpr std::size_t index_of(Regressor r) noexcept { return static_cast<std::size_t>(r); }

inline constexpr std::string_view symbol(Regressor r) noexcept {
    switch (r) {
        case Regressor::InspectionTime: return "x1";
        case Regressor::PrepTime: return "x2";
        case Regressor::NumInspectors: return "x3";
        case Regressor::Experience: return "x4";
        case Regressor::LogFunctionPoints: return "x5";
    }
    return "?";
}

/// Field name used in files, CLI flags and service bodies. For x5 the field
/// carries raw function points; the log is taken on the way in.
inline constexpr std::string_view field_name(Regressor r) noexcept {
    switch (r) {
        case Regressor::InspectionTime: return "inspection_time_h";
        case Regressor::PrepTime: return "prep_time_h";
        case Regressor::NumInspectors: return "num_inspectors";
        case Regressor::Experience: return "experience_years";
        case Regressor::LogFunctionPoints: return "function_points";
    }
    return "?";
}

inline std::optional<Regressor> parse_regressor(std::string_view text) {
    for (Regressor r : kAllRegressors) {
        if (text == symbol(r) || text == field_name(r)) return r;
        if (text.size() == 1 && text[0] == static_cast<char>('0' + index_of(r))) return r;
    }
    if (text == "inspectors") return Regressor::NumInspectors;
    if (text == "log_function_points") return Regressor::LogFunctionPoints;
    return std::nullopt;
}

inline constexpr bool uses(ModelKind kind, Regressor r) noexcept {
    return index_of(r) <= regressor_count(kind);
}

/// Returns a description of the domain breach, or nothing when `value` is a
/// legal setting for the regressor.
inline std::optional<std::string> domain_violation(Regressor r, double value) {
    if (!std::isfinite(value)) return std::string(symbol(r)) + " must be finite";
    switch (r) {
        case Regressor::InspectionTime:
            if (!(value > 0.0)) return "inspection time must be positive";
            break;
        case Regressor::PrepTime:
            if (value < 0.0) return "preparation time must not be negative";
            break;
        case Regressor::NumInspectors:
            if (value < 1.0) return "at least one inspector is required";
            break;
        case Regressor::Experience:
            if (value < 0.0) return "experience must not be negative";
            break;
        case Regressor::LogFunctionPoints:
            break;
    }
    return std::nullopt;
}

struct RegressorVector {
    double inspection_time = 0.0;
    double prep_time = 0.0;
    double num_inspectors = 1.0;
    double experience = 0.0;
    std::optional<double> log_function_points;  // team model only

    std::size_t arity() const noexcept { return log_function_points ? 5 : 4; }

    double value(Regressor r) const {
        switch (r) {
            case Regressor::InspectionTime: return inspection_time;
            case Regressor::PrepTime: return prep_time;
            case Regressor::NumInspectors: return num_inspectors;
            case Regressor::Experience: return experience;
            case Regressor::LogFunctionPoints:
                if (!log_function_points) {
                    throw Error(ErrorKind::ArityMismatch, "x5 is not set on this regressor vector");
                }
                return *log_function_points;
        }
        return 0.0;
    }

    void set(Regressor r, double v) {
        switch (r) {
            case Regressor::InspectionTime: inspection_time = v; break;
            case Regressor::PrepTime: prep_time = v; break;
            case Regressor::NumInspectors: num_inspectors = v; break;
            case Regressor::Experience: experience = v; break;
            case Regressor::LogFunctionPoints: log_function_points = v; break;
        }
    }

    bool operator==(const RegressorVector&) const = default;
};

inline RegressorVector regressors_from_session(const InspectionSession& s, ModelKind kind) {
    RegressorVector x{s.inspection_time, s.prep_time, static_cast<double>(s.num_inspectors),
                      s.experience_level, std::nullopt};
    if (kind == ModelKind::Team) x.log_function_points = function_points_to_x5(s.function_points);
    return x;
}

inline void check_arity(ModelKind kind, const RegressorVector& x, std::string_view where = {}) {
    if (x.arity() != regressor_count(kind)) {
        std::string msg = std::string(to_string(kind)) + " model takes " +
                          std::to_string(regressor_count(kind)) + " regressors, got " +
                          std::to_string(x.arity());
        if (!where.empty()) msg = std::string(where) + ": " + msg;
        throw Error(ErrorKind::ArityMismatch, msg);
    }
}

// ---------------------------------------------------------------------------
// Design matrix

struct Observation {
    RegressorVector x;
    double y = 0.0;
    std::string id;

    bool operator==(const Observation&) const = default;
};

struct DesignMatrix {
    ModelKind model = ModelKind::Process;
    std::vector<Observation> rows;

    std::size_t row_count() const noexcept { return rows.size(); }
    std::size_t column_count() const noexcept { return coefficient_count(model); }

    /// Dense X with the leading column of ones.
    linalg::Matrix matrix() const {
        linalg::Matrix x(rows.size(), column_count());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            x(i, 0) = 1.0;
            for (std::size_t j = 1; j < column_count(); ++j) {
                x(i, j) = rows[i].x.value(static_cast<Regressor>(j));
            }
        }
        return x;
    }

    std::vector<double> response() const {
        std::vector<double> y;
        y.reserve(rows.size());
        for (const auto& r : rows) y.push_back(r.y);
        return y;
    }
};

inline std::string column_label(std::size_t column) {
    if (column == 0) return "intercept";
    const auto r = static_cast<Regressor>(column);
    return std::string(symbol(r)) + " (" +
           (r == Regressor::LogFunctionPoints ? std::string("log10 function_points")
                                              : std::string(field_name(r))) +
           ")";
}

inline DesignMatrix build_design_matrix(std::vector<Observation> observations, ModelKind model) {
    if (observations.size() < minimum_rows(model)) {
        throw InsufficientRowsError(minimum_rows(model), observations.size(),
                                    std::string(to_string(model)) + " model fit");
    }
    std::vector<Violation> violations;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const auto& obs = observations[i];
        const std::string where = "observation " + std::to_string(i + 1) +
                                  (obs.id.empty() ? std::string() : " (" + obs.id + ")");
        check_arity(model, obs.x, where);
        for (Regressor r : kAllRegressors) {
            if (!uses(model, r)) continue;
            if (auto why = domain_violation(r, obs.x.value(r))) {
                violations.push_back({i + 1, std::string(symbol(r)), *why});
            }
        }
        if (!std::isfinite(obs.y)) violations.push_back({i + 1, "y", "response must be finite"});
    }
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return DesignMatrix{model, std::move(observations)};
}

// ---------------------------------------------------------------------------
// Fit

inline constexpr double kRankTolerance = 1e-10;
inline constexpr double kIllConditionedThreshold = 1e8;

struct FitDiagnostics {
    std::vector<double> residuals;  // y - X*beta, one per row
    double sse = 0.0;
    double r_squared = 0.0;
    double condition_estimate = 1.0;
    std::size_t degrees_of_freedom = 0;

    /// n equals the coefficient count: the fit interpolates the data.
    bool exactly_determined() const noexcept { return degrees_of_freedom == 0; }
    bool ill_conditioned() const noexcept { return condition_estimate > kIllConditionedThreshold; }

    bool operator==(const FitDiagnostics&) const = default;
};

struct CoefficientSet {
    ModelKind model = ModelKind::Process;
    std::vector<double> betas;  // b0 first
    std::vector<std::string> fitted_from;
    std::string fitted_at;  // RFC 3339
    FitDiagnostics diagnostics;

    bool operator==(const CoefficientSet&) const = default;
};

inline std::string utc_timestamp_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline double predict_raw(ModelKind model, std::span<const double> betas,
                          const RegressorVector& x) {
    double y = betas[0];
    for (std::size_t j = 1; j < coefficient_count(model); ++j) {
        y += betas[j] * x.value(static_cast<Regressor>(j));
    }
    return y;
}

namespace detail {

inline FitDiagnostics diagnostics_for(const DesignMatrix& dm, std::span<const double> betas,
                                      double condition_estimate) {
    FitDiagnostics d;
    d.condition_estimate = condition_estimate;
    d.degrees_of_freedom = dm.row_count() - dm.column_count();
    d.residuals.reserve(dm.row_count());
    double mean = 0.0;
    for (const auto& row : dm.rows) mean += row.y;
    mean /= static_cast<double>(dm.row_count());
    double sst = 0.0;
    for (const auto& row : dm.rows) {
        const double r = row.y - predict_raw(dm.model, betas, row.x);
        d.residuals.push_back(r);
        d.sse += r * r;
        sst += (row.y - mean) * (row.y - mean);
    }
    // A constant response is fully explained by the intercept.
    const bool constant = std::all_of(dm.rows.begin(), dm.rows.end(),
                                      [&](const Observation& o) { return o.y == dm.rows.front().y; });
    d.r_squared = constant || sst == 0.0 ? 1.0 : 1.0 - d.sse / sst;
    return d;
}

inline linalg::PivotedQr factor(const DesignMatrix& dm) {
    auto qr = linalg::pivoted_qr(dm.matrix(), dm.response(), kRankTolerance);
    if (qr.rank < dm.column_count()) {
        throw RankDeficientError(qr.rank, dm.column_count(), column_label(qr.perm[qr.rank]));
    }
    return qr;
}

}  // namespace detail

/// Least-squares coefficients by pivoted Householder QR. Exactly determined
/// systems are accepted; check `diagnostics.exactly_determined()`.
inline CoefficientSet fit_least_squares(const DesignMatrix& dm,
                                        std::string fitted_at = utc_timestamp_now()) {
    if (dm.row_count() < minimum_rows(dm.model)) {
        throw InsufficientRowsError(minimum_rows(dm.model), dm.row_count(),
                                    std::string(to_string(dm.model)) + " model fit");
    }
    const auto qr = detail::factor(dm);
    CoefficientSet out;
    out.model = dm.model;
    out.betas = linalg::solve_factored(qr);
    for (const auto& row : dm.rows) out.fitted_from.push_back(row.id);
    out.fitted_at = std::move(fitted_at);
    out.diagnostics =
        detail::diagnostics_for(dm, out.betas, linalg::condition_number(qr.r));
    return out;
}

/// Recomputes the diagnostics of `coeffs` against `dm` from scratch.
inline FitDiagnostics validate_fit(const DesignMatrix& dm, const CoefficientSet& coeffs) {
    if (dm.model != coeffs.model || coeffs.betas.size() != dm.column_count()) {
        throw Error(ErrorKind::ShapeMismatch,
                    "coefficient set (" + std::string(to_string(coeffs.model)) + ", " +
                        std::to_string(coeffs.betas.size()) +
                        " betas) does not match the design matrix (" +
                        std::string(to_string(dm.model)) + ", " +
                        std::to_string(dm.column_count()) + " columns)");
    }
    if (!coeffs.diagnostics.residuals.empty() &&
        coeffs.diagnostics.residuals.size() != dm.row_count()) {
        throw Error(ErrorKind::ShapeMismatch,
                    "stored residuals cover " +
                        std::to_string(coeffs.diagnostics.residuals.size()) +
                        " rows, design matrix has " + std::to_string(dm.row_count()));
    }
    const auto qr = detail::factor(dm);
    return detail::diagnostics_for(dm, coeffs.betas, linalg::condition_number(qr.r));
}

// ---------------------------------------------------------------------------
// Prediction

struct PredictionResult {
    double y_raw = 0.0;
    std::optional<double> y_clamped;  // process model only
    std::optional<Band> band;         // process model only
    bool out_of_range = false;        // process y_raw outside [0,1]

    bool operator==(const PredictionResult&) const = default;
};

inline void check_coefficients(const CoefficientSet& coeffs) {
    if (coeffs.betas.size() != coefficient_count(coeffs.model)) {
        throw Error(ErrorKind::ArityMismatch,
                    std::string(to_string(coeffs.model)) + " model needs " +
                        std::to_string(coefficient_count(coeffs.model)) + " betas, got " +
                        std::to_string(coeffs.betas.size()));
    }
}

/// Expected value of the model at `x` (the error term has zero mean).
inline PredictionResult predict(const CoefficientSet& coeffs, const RegressorVector& x) {
    check_coefficients(coeffs);
    check_arity(coeffs.model, x);
    PredictionResult out;
    out.y_raw = predict_raw(coeffs.model, coeffs.betas, x);
    if (coeffs.model == ModelKind::Process) {
        out.out_of_range = !(out.y_raw >= 0.0 && out.y_raw <= 1.0);
        out.y_clamped = std::min(std::max(out.y_raw, 0.0), 1.0);
        out.band = classify_band(*out.y_clamped);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Observations from shop-floor records

enum class Granularity { Project, Phase };

/// Turns records into regression rows. Project granularity averages the
/// session parameters over the phases that have a defined metric and uses
/// the project-average DI (process) or IPM (team) as the response. Phase
/// granularity yields one row per phase; phases without a DI are skipped
/// for the process model.
inline std::vector<Observation> observations_from_records(std::span<const ProjectRecord> records,
                                                          ModelKind model,
                                                          Granularity granularity) {
    std::vector<Observation> out;
    for (const ProjectRecord& record : records) {
        if (granularity == Granularity::Phase) {
            const ProjectReport report = project_report(record);
            for (std::size_t i = 0; i < record.phases.size(); ++i) {
                const auto& phase = report.phases[i];
                if (model == ModelKind::Process && !phase.di) continue;
                out.push_back({regressors_from_session(record.phases[i].session, model),
                               model == ModelKind::Process ? *phase.di : phase.ipm,
                               record.id + ":" + std::string(short_name(phase.phase))});
            }
            continue;
        }
        const ProjectReport report = project_report(record);
        if (model == ModelKind::Process && !report.avg_di) continue;
        RegressorVector mean{0.0, 0.0, 0.0, 0.0, std::nullopt};
        double log_fp = 0.0;
        std::size_t used = 0;
        for (std::size_t i = 0; i < record.phases.size(); ++i) {
            if (model == ModelKind::Process && !report.phases[i].di) continue;
            const auto x = regressors_from_session(record.phases[i].session, ModelKind::Team);
            mean.inspection_time += x.inspection_time;
            mean.prep_time += x.prep_time;
            mean.num_inspectors += x.num_inspectors;
            mean.experience += x.experience;
            log_fp += *x.log_function_points;
            ++used;
        }
        const double n = static_cast<double>(used);
        mean.inspection_time /= n;
        mean.prep_time /= n;
        mean.num_inspectors /= n;
        mean.experience /= n;
        if (model == ModelKind::Team) mean.log_function_points = log_fp / n;
        out.push_back({mean, model == ModelKind::Process ? *report.avg_di : report.avg_ipm,
                       record.id});
    }
    return out;
}

}  // namespace inspectlens
