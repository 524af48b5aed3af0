#pragma once

// What-if evaluation over a fitted coefficient set: solve one regressor for
// a target response, find the value where a DI band starts, and sweep one
// regressor over a grid.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "inspectlens/error.hpp"
#include "inspectlens/metrics.hpp"
#include "inspectlens/regression.hpp"

namespace inspectlens {

using FixedRegressors = std::map<Regressor, double>;

struct TuneRequest {
    CoefficientSet coeffs;
    double target_y = 0.0;
    Regressor solve_for = Regressor::InspectionTime;
    FixedRegressors fixed;  // every other regressor of the model
};

struct IntegerCandidate {
    double num_inspectors = 1.0;
    PredictionResult prediction;
};

struct TuneResult {
    double value = 0.0;
    bool feasible = true;
    std::string reason;  // why the value is infeasible, empty otherwise
    std::optional<Band> band;  // band of the target, process model only
    RegressorVector solution;  // fixed values plus the solved one
    std::vector<IntegerCandidate> integer_candidates;  // solve_for = x3 only
};

namespace detail {

inline void check_fixed(ModelKind model, Regressor varied, const FixedRegressors& fixed) {
    if (!uses(model, varied)) {
        throw Error(ErrorKind::ArityMismatch,
                    std::string(symbol(varied)) + " is not a regressor of the " +
                        std::string(to_string(model)) + " model");
    }
    std::string missing;
    std::string extra;
    for (Regressor r : kAllRegressors) {
        const bool wanted = uses(model, r) && r != varied;
        const bool given = fixed.count(r) != 0;
        if (wanted && !given) missing += (missing.empty() ? "" : ", ") + std::string(symbol(r));
        if (!wanted && given) extra += (extra.empty() ? "" : ", ") + std::string(symbol(r));
    }
    if (!missing.empty() || !extra.empty()) {
        std::string msg = "fixed regressors do not match the " + std::string(to_string(model)) +
                          " model";
        if (!missing.empty()) msg += "; missing: " + missing;
        if (!extra.empty()) msg += "; unexpected: " + extra;
        throw Error(ErrorKind::ArityMismatch, msg);
    }
}

inline RegressorVector assemble(ModelKind model, const FixedRegressors& fixed, Regressor varied,
                                double value) {
    RegressorVector x;
    for (const auto& [r, v] : fixed) x.set(r, v);
    x.set(varied, value);
    if (model == ModelKind::Process) x.log_function_points.reset();
    return x;
}

}  // namespace detail

/// Inverts the linear model for one regressor. Out-of-domain answers come back
/// with feasible = false and a reason rather than as errors.
inline TuneResult solve_parameter(const TuneRequest& req) {
    check_coefficients(req.coeffs);
    detail::check_fixed(req.coeffs.model, req.solve_for, req.fixed);
    const auto& betas = req.coeffs.betas;
    const double slope = betas[index_of(req.solve_for)];
    if (slope == 0.0) {
        throw Error(ErrorKind::UnsolvableParameter,
                    std::string(symbol(req.solve_for)) +
                        " has a zero coefficient and cannot move the prediction");
    }

    double rest = betas[0];
    for (const auto& [r, v] : req.fixed) rest += betas[index_of(r)] * v;

    TuneResult out;
    out.value = (req.target_y - rest) / slope;
    out.solution = detail::assemble(req.coeffs.model, req.fixed, req.solve_for, out.value);
    if (auto why = domain_violation(req.solve_for, out.value)) {
        out.feasible = false;
        out.reason = *why;
    } else if (req.solve_for == Regressor::NumInspectors &&
               std::fabs(out.value - std::round(out.value)) > 1e-9) {
        out.feasible = false;
        out.reason = "inspector count is fractional; see the integer candidates";
    }
    if (req.coeffs.model == ModelKind::Process) {
        out.band = classify_band(std::min(std::max(req.target_y, 0.0), 1.0));
    }

    if (req.solve_for == Regressor::NumInspectors && std::isfinite(out.value)) {
        std::vector<double> counts{std::floor(out.value), std::ceil(out.value)};
        if (counts[0] == counts[1]) counts.pop_back();
        for (double n : counts) {
            if (n < 1.0) continue;
            auto x = out.solution;
            x.num_inspectors = n;
            out.integer_candidates.push_back({n, predict(req.coeffs, x)});
        }
        if (out.integer_candidates.empty()) {
            auto x = out.solution;
            x.num_inspectors = 1.0;
            out.integer_candidates.push_back({1.0, predict(req.coeffs, x)});
        }
    }
    return out;
}

/// Value of `solve_for` at which the process prediction reaches `band_lower`.
inline double band_threshold(const CoefficientSet& coeffs, double band_lower, Regressor solve_for,
                             const FixedRegressors& fixed) {
    if (coeffs.model != ModelKind::Process) {
        throw Error(ErrorKind::InvalidRequest, "band thresholds apply to the process (DI) model");
    }
    return solve_parameter(TuneRequest{coeffs, band_lower, solve_for, fixed}).value;
}

struct ScanRange {
    Regressor regressor = Regressor::InspectionTime;
    double min = 0.0;
    double max = 0.0;
    double step = 0.0;
};

struct ScanRequest {
    CoefficientSet coeffs;
    ScanRange vary;
    FixedRegressors fixed;
};

struct ScanPoint {
    double value = 0.0;
    PredictionResult prediction;
};

/// Grid points min + k*step for k = 0.. while they stay within max.
inline std::vector<double> scan_grid(const ScanRange& range) {
    if (!(range.min < range.max) || !(range.step > 0.0) || !std::isfinite(range.max - range.min)) {
        throw Error(ErrorKind::InvalidRequest, "scan range needs min < max and step > 0");
    }
    // Tolerance keeps an endpoint that falls on the grid up to rounding.
    const double span = (range.max - range.min) / range.step;
    const double count = std::floor(span + 1e-9) + 1.0;
    if (!(count >= 1.0)) throw Error(ErrorKind::EmptyGrid, "scan grid has no points");
    if (count > 1e6) throw Error(ErrorKind::InvalidRequest, "scan grid exceeds 1e6 points");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count));
    for (std::size_t k = 0; k < static_cast<std::size_t>(count); ++k) {
        grid.push_back(range.min + static_cast<double>(k) * range.step);
    }
    return grid;
}

inline std::vector<ScanPoint> scan(const ScanRequest& req) {
    check_coefficients(req.coeffs);
    detail::check_fixed(req.coeffs.model, req.vary.regressor, req.fixed);
    std::vector<ScanPoint> out;
    for (double v : scan_grid(req.vary)) {
        const auto x = detail::assemble(req.coeffs.model, req.fixed, req.vary.regressor, v);
        out.push_back({v, predict(req.coeffs, x)});
    }
    return out;
}

}  // namespace inspectlens
