#pragma once

// JSON shapes shared by the CLI's --format json output and the HTTP service,
// so both interfaces render the same computation byte for byte.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "inspectlens/datastore.hpp"
#include "inspectlens/error.hpp"
#include "inspectlens/metrics.hpp"
#include "inspectlens/planner.hpp"
#include "inspectlens/regression.hpp"

namespace inspectlens::wire {

using json = nlohmann::json;

inline json band_to_json(const Band& b) {
    return json{{"label", to_string(b.label)},
                {"name", display_name(b.label)},
                {"lower", b.lower},
                {"upper", b.upper},
                {"upper_closed", b.label == BandLabel::Ideal}};
}

inline json bands_to_json() {
    json out = json::array();
    for (const Band& b : kBands) out.push_back(band_to_json(b));
    return out;
}

inline json prediction_to_json(const PredictionResult& p) {
    json j{{"y_raw", p.y_raw}, {"out_of_range", p.out_of_range}};
    if (p.y_clamped) j["y_clamped"] = *p.y_clamped;
    if (p.band) j["band"] = to_string(p.band->label);
    return j;
}

inline json fit_diagnostics_to_json(const FitDiagnostics& d) {
    json j = inspectlens::diagnostics_to_json(d);
    json warnings = json::array();
    if (d.exactly_determined()) warnings.push_back("ZeroDegreesOfFreedom");
    if (d.ill_conditioned()) warnings.push_back("IllConditioned");
    j["warnings"] = std::move(warnings);
    return j;
}

inline json fit_to_json(const std::string& id, const CoefficientSet& c) {
    return json{{"coeff_id", id},
                {"model", to_string(c.model)},
                {"betas", c.betas},
                {"fitted_from", c.fitted_from},
                {"fitted_at", c.fitted_at},
                {"diagnostics", fit_diagnostics_to_json(c.diagnostics)}};
}

inline json tune_to_json(const TuneRequest& req, const TuneResult& r) {
    json j{{"solve_for", symbol(req.solve_for)},
           {"target", req.target_y},
           {"value", r.value},
           {"feasible", r.feasible}};
    if (!r.feasible) j["reason"] = r.reason;
    if (r.band) j["band"] = to_string(r.band->label);
    if (req.solve_for == Regressor::LogFunctionPoints) {
        j["function_points"] = x5_to_function_points(r.value);
    }
    if (req.solve_for == Regressor::NumInspectors) {
        json cands = json::array();
        for (const auto& c : r.integer_candidates) {
            json cj = prediction_to_json(c.prediction);
            cj["num_inspectors"] = c.num_inspectors;
            cands.push_back(std::move(cj));
        }
        j["integer_candidates"] = std::move(cands);
    }
    return j;
}

inline json scan_to_json(const ScanRequest& req, const std::vector<ScanPoint>& points) {
    json arr = json::array();
    for (const auto& p : points) {
        json pj = prediction_to_json(p.prediction);
        pj["value"] = p.value;
        arr.push_back(std::move(pj));
    }
    return json{{"vary", symbol(req.vary.regressor)}, {"points", std::move(arr)}};
}

inline json error_to_json(const Error& e) {
    json j{{"error", to_string(e.kind())}, {"message", e.what()}};
    if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
        json list = json::array();
        for (const auto& item : v->violations()) {
            list.push_back({{"row", item.row}, {"field", item.field}, {"message", item.message}});
        }
        j["violations"] = std::move(list);
    }
    if (const auto* v = dynamic_cast<const InsufficientRowsError*>(&e)) {
        j["required"] = v->required();
        j["provided"] = v->provided();
    }
    if (const auto* v = dynamic_cast<const RankDeficientError*>(&e)) {
        j["rank"] = v->rank();
        j["offending_column"] = v->offending_column();
    }
    return j;
}

// ---------------------------------------------------------------------------
// Decoding

/// Reads named regressor fields from `obj`. function_points arrives raw and
/// is log-transformed; `skip` names a regressor that must be absent.
inline FixedRegressors regressors_from_json(const json& obj, ModelKind model,
                                            std::optional<Regressor> skip = std::nullopt) {
    if (!obj.is_object()) throw Error(ErrorKind::InvalidRequest, "regressor values must be an object");
    FixedRegressors out;
    std::string missing;
    std::string extra;
    for (Regressor r : kAllRegressors) {
        const std::string key(field_name(r));
        const bool wanted = uses(model, r) && r != skip;
        const bool given = obj.contains(key);
        if (wanted && !given) missing += (missing.empty() ? "" : ", ") + key;
        if (!wanted && given) extra += (extra.empty() ? "" : ", ") + key;
        if (!wanted || !given) continue;
        if (!obj[key].is_number()) throw Error(ErrorKind::InvalidRequest, key + " must be a number");
        double v = obj[key].get<double>();
        if (r == Regressor::LogFunctionPoints) {
            if (!(v > 0.0)) throw Error(ErrorKind::OutOfDomain, "function_points must be positive");
            v = function_points_to_x5(v);
        }
        out[r] = v;
    }
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (Regressor r : kAllRegressors) known = known || key == field_name(r);
        if (!known) extra += (extra.empty() ? "" : ", ") + key;
    }
    if (!missing.empty() || !extra.empty()) {
        std::string msg = std::string(to_string(model)) + " model regressors";
        if (!missing.empty()) msg += "; missing: " + missing;
        if (!extra.empty()) msg += "; unexpected: " + extra;
        throw Error(ErrorKind::ArityMismatch, msg);
    }
    return out;
}

inline RegressorVector to_vector(const FixedRegressors& values) {
    RegressorVector x;
    for (const auto& [r, v] : values) x.set(r, v);
    return x;
}

inline Regressor regressor_from_json(const json& j) {
    if (j.is_number_integer()) {
        const int i = j.get<int>();
        if (i >= 1 && i <= 5) return static_cast<Regressor>(i);
    } else if (j.is_string()) {
        if (auto r = parse_regressor(j.get<std::string>())) return *r;
    }
    throw Error(ErrorKind::InvalidRequest, "unknown regressor " + j.dump());
}

inline std::vector<Observation> observations_from_json(const json& rows, ModelKind model) {
    if (!rows.is_array()) throw Error(ErrorKind::InvalidRequest, "'rows' must be an array");
    std::vector<Observation> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const json& row = rows[i];
        if (!row.is_object() || !row.contains("x") || !row.contains("y") || !row["y"].is_number()) {
            throw Error(ErrorKind::InvalidRequest,
                        "rows[" + std::to_string(i) + "] needs an 'x' object and a numeric 'y'");
        }
        Observation obs;
        try {
            obs.x = to_vector(regressors_from_json(row["x"], model));
        } catch (const Error& e) {
            throw Error(e.kind(), "rows[" + std::to_string(i) + "]: " + e.what());
        }
        obs.y = row["y"].get<double>();
        obs.id = row.contains("id") && row["id"].is_string() ? row["id"].get<std::string>()
                                                             : "row" + std::to_string(i + 1);
        out.push_back(std::move(obs));
    }
    return out;
}

inline json observation_to_json(const Observation& o, ModelKind model) {
    json x = json::object();
    for (Regressor r : kAllRegressors) {
        if (!uses(model, r)) continue;
        const double v = o.x.value(r);
        x[std::string(field_name(r))] =
            r == Regressor::LogFunctionPoints ? x5_to_function_points(v) : v;
    }
    return json{{"id", o.id}, {"x", std::move(x)}, {"y", o.y}};
}

}  // namespace inspectlens::wire
