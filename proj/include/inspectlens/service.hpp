#pragma once

// JSON-over-HTTP front end for the what-if planner. Routing and request
// handling live in Service::handle so they can be exercised without a
// socket; bind() attaches them to a cpp-httplib server.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "inspectlens/datastore.hpp"
#include "inspectlens/error.hpp"
#include "inspectlens/metrics.hpp"
#include "inspectlens/planner.hpp"
#include "inspectlens/regression.hpp"
#include "inspectlens/wire.hpp"

namespace inspectlens {

struct HttpResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Registered coefficient sets. Entries are immutable snapshots keyed by
/// content hash; registering an existing id returns the stored snapshot.
class CoefficientRegistry {
public:
    std::pair<std::string, std::shared_ptr<const CoefficientSet>> add(CoefficientSet coeffs) {
        std::string id = coefficient_id(coeffs);
        auto snapshot = std::make_shared<const CoefficientSet>(std::move(coeffs));
        std::unique_lock lock(mutex_);
        auto [it, inserted] = sets_.emplace(id, std::move(snapshot));
        return {id, it->second};
    }

    std::shared_ptr<const CoefficientSet> find(const std::string& id) const {
        std::shared_lock lock(mutex_);
        auto it = sets_.find(id);
        return it == sets_.end() ? nullptr : it->second;
    }

    std::vector<std::string> ids() const {
        std::shared_lock lock(mutex_);
        std::vector<std::string> out;
        for (const auto& [id, _] : sets_) out.push_back(id);
        return out;
    }

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<const CoefficientSet>> sets_;
};

struct ServiceOptions {
    std::optional<std::string> cors_origin;
    std::function<std::string()> clock = utc_timestamp_now;
};

class Service {
public:
    explicit Service(ServiceOptions options = {}) : options_(std::move(options)) {
        if (!bands_tile_unit_interval()) {
            throw Error(ErrorKind::InvalidRequest, "band table does not tile [0, 1]");
        }
    }

    CoefficientRegistry& registry() noexcept { return registry_; }
    const ServiceOptions& options() const noexcept { return options_; }

    HttpResponse handle(const std::string& method, const std::string& path,
                        const std::string& body) const {
        try {
            if (method == "GET" && path == "/healthz") return {200, "ok", "text/plain"};
            if (method == "GET" && path == "/api/v1/bands") return ok(wire::bands_to_json());
            if (method == "GET" && path == "/api/v1/coefficients") return ok(json(registry_.ids()));
            if (method == "GET" && path.rfind("/api/v1/coefficients/", 0) == 0) {
                const auto id = path.substr(std::string("/api/v1/coefficients/").size());
                auto c = registry_.find(id);
                if (!c) return not_found(id);
                return ok(coefficients_to_json(*c));
            }
            if (method == "POST") {
                const json req = parse_body(body);
                if (path == "/api/v1/fit") return fit(req);
                if (path == "/api/v1/coefficients") return register_set(req);
                if (path == "/api/v1/predict") return predict(req);
                if (path == "/api/v1/tune") return tune(req);
                if (path == "/api/v1/scan") return scan(req);
            }
            return {404, json{{"error", "NotFound"}, {"message", method + " " + path}}.dump()};
        } catch (const BadRequest& e) {
            return {400, json{{"error", "ParseError"}, {"message", e.what()}}.dump()};
        } catch (const UnknownId& e) {
            return not_found(e.id);
        } catch (const Error& e) {
            return {422, wire::error_to_json(e).dump()};
        }
    }

    /// Attaches every route to `server`, plus CORS headers when configured.
    void bind(httplib::Server& server) const {
        auto forward = [this](const httplib::Request& req, httplib::Response& res) {
            const HttpResponse out = handle(req.method, req.path, req.body);
            res.status = out.status;
            res.set_content(out.body, out.content_type);
        };
        server.Get(R"(/healthz|/api/v1/.*)", forward);
        server.Post(R"(/api/v1/.*)", forward);
        if (options_.cors_origin) {
            const std::string origin = *options_.cors_origin;
            server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
                res.set_header("Access-Control-Allow-Origin", origin);
                res.set_header("Access-Control-Allow-Headers", "Content-Type");
                res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            });
            server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
                res.status = 204;
            });
        }
    }

private:
    using json = nlohmann::json;

    struct BadRequest : std::runtime_error {
        using std::runtime_error::runtime_error;
    };
    struct UnknownId {
        std::string id;
    };

    static HttpResponse ok(const json& j) { return {200, j.dump()}; }

    static HttpResponse not_found(const std::string& id) {
        return {404, json{{"error", "UnknownCoefficientSet"},
                          {"message", "no coefficient set registered under '" + id + "'"}}
                         .dump()};
    }

    static json parse_body(const std::string& body) {
        try {
            json j = json::parse(body);
            if (!j.is_object()) throw BadRequest("request body must be a JSON object");
            return j;
        } catch (const json::parse_error& e) {
            throw BadRequest(std::string("malformed JSON: ") + e.what());
        }
    }

    std::shared_ptr<const CoefficientSet> lookup(const json& req) const {
        if (!req.contains("coeff_id") || !req["coeff_id"].is_string()) {
            throw Error(ErrorKind::InvalidRequest, "'coeff_id' is required");
        }
        const auto id = req["coeff_id"].get<std::string>();
        auto c = registry_.find(id);
        if (!c) throw UnknownId{id};
        return c;
    }

    static ModelKind model_of(const json& req) {
        if (!req.contains("model") || !req["model"].is_string()) {
            throw Error(ErrorKind::InvalidRequest, "'model' must be \"process\" or \"team\"");
        }
        auto m = parse_model_kind(req["model"].get<std::string>());
        if (!m) throw Error(ErrorKind::InvalidRequest, "'model' must be \"process\" or \"team\"");
        return *m;
    }

    HttpResponse fit(const json& req) const {
        const ModelKind model = model_of(req);
        if (!req.contains("rows")) throw Error(ErrorKind::InvalidRequest, "'rows' is required");
        auto dm = build_design_matrix(wire::observations_from_json(req["rows"], model), model);
        std::string stamp = req.contains("fitted_at") && req["fitted_at"].is_string()
                                ? req["fitted_at"].get<std::string>()
                                : options_.clock();
        auto [id, stored] = registry_.add(
            fit_least_squares(dm, std::move(stamp)));
        return ok(wire::fit_to_json(id, *stored));
    }

    HttpResponse register_set(const json& req) const {
        CoefficientSet c = coefficients_from_json(req);
        auto [id, stored] = registry_.add(std::move(c));
        return ok(json{{"coeff_id", id}, {"model", to_string(stored->model)}});
    }

    HttpResponse predict(const json& req) const {
        const auto coeffs = lookup(req);
        if (!req.contains("x")) throw Error(ErrorKind::InvalidRequest, "'x' is required");
        const auto x = wire::to_vector(wire::regressors_from_json(req["x"], coeffs->model));
        return ok(wire::prediction_to_json(inspectlens::predict(*coeffs, x)));
    }

    static double target_of(const json& req) {
        if (req.contains("target") && req["target"].is_number()) return req["target"].get<double>();
        if (req.contains("target_band") && req["target_band"].is_string()) {
            if (auto b = parse_band_label(req["target_band"].get<std::string>())) {
                return band_of(*b).lower;
            }
        }
        throw Error(ErrorKind::InvalidRequest, "'target' (number) or 'target_band' (label) is required");
    }

    HttpResponse tune(const json& req) const {
        const auto coeffs = lookup(req);
        if (!req.contains("solve_for")) throw Error(ErrorKind::InvalidRequest, "'solve_for' is required");
        TuneRequest tr;
        tr.coeffs = *coeffs;
        tr.target_y = target_of(req);
        tr.solve_for = wire::regressor_from_json(req["solve_for"]);
        tr.fixed = wire::regressors_from_json(req.value("fixed", json::object()), coeffs->model,
                                              tr.solve_for);
        return ok(wire::tune_to_json(tr, solve_parameter(tr)));
    }

    HttpResponse scan(const json& req) const {
        const auto coeffs = lookup(req);
        if (!req.contains("vary") || !req["vary"].is_object()) {
            throw Error(ErrorKind::InvalidRequest, "'vary' object is required");
        }
        const json& vary = req["vary"];
        ScanRequest sr;
        sr.coeffs = *coeffs;
        sr.vary.regressor = wire::regressor_from_json(vary.value("regressor", json()));
        auto num = [&](const char* key) {
            if (!vary.contains(key) || !vary[key].is_number()) {
                throw Error(ErrorKind::InvalidRequest, std::string("vary.") + key + " must be a number");
            }
            return vary[key].get<double>();
        };
        sr.vary.min = num("min");
        sr.vary.max = num("max");
        sr.vary.step = num("step");
        sr.fixed = wire::regressors_from_json(req.value("fixed", json::object()), coeffs->model,
                                              sr.vary.regressor);
        return ok(wire::scan_to_json(sr, inspectlens::scan(sr)));
    }

    ServiceOptions options_;
    mutable CoefficientRegistry registry_;
};

}  // namespace inspectlens
