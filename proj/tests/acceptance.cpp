// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <bit>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "../tools/cli_app.hpp"
#include "inspectlens/datastore.hpp"
#include "inspectlens/metrics.hpp"
#include "inspectlens/planner.hpp"
#include "inspectlens/regression.hpp"
#include "inspectlens/service.hpp"
#include "oracles.hpp"

using namespace inspectlens;
using json = nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome check_fixture_avg_di() {
    Outcome o;
    const auto start = Clock::now();
    const auto rows = load_fixture();
    const auto records = fixture_records(rows);
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double direct[] = {rows[i].di_req, rows[i].di_des, rows[i].di_imp};
        const double mean = aggregate_metric(direct, Aggregation::MeanOfPhases);
        const auto report = project_report(records[i]);
        if (!report.avg_di) {
            o.fail(rows[i].project_id + " has no avg DI");
            continue;
        }
        for (double v : {mean, *report.avg_di}) {
            const double dev = std::fabs(v - rows[i].avg_di);
            worst = std::max(worst, dev);
            if (dev > 0.005) o.fail(rows[i].project_id + " avg DI off by " + fmt(dev));
        }
    }
    const double t = seconds_since(start);
    if (t >= 1.0) o.fail("took " + fmt(t) + " s");
    if (o.pass) o.detail = "15 projects, max |dev| " + fmt(worst) + ", " + fmt(t) + " s";
    return o;
}

Outcome check_fixture_avg_ipm() {
    Outcome o;
    const auto start = Clock::now();
    const auto rows = load_fixture();
    const auto records = fixture_records(rows);
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double direct[] = {rows[i].ipm_req, rows[i].ipm_des, rows[i].ipm_imp};
        const double mean = aggregate_metric(direct, Aggregation::MeanOfPhases);
        const double via_records = project_report(records[i]).avg_ipm;
        for (double v : {mean, via_records}) {
            const double dev = std::fabs(v - rows[i].avg_ipm);
            worst = std::max(worst, dev);
            if (dev > 0.01) o.fail(rows[i].project_id + " avg IPM off by " + fmt(dev));
        }
    }
    const double t = seconds_since(start);
    if (t >= 1.0) o.fail("took " + fmt(t) + " s");
    if (o.pass) o.detail = "15 projects, max |dev| " + fmt(worst) + ", " + fmt(t) + " s";
    return o;
}

Outcome check_band_table() {
    Outcome o;
    // The published ranges, as printed.
    const std::vector<std::tuple<std::string, std::string, std::string>> printed{
        {"0", "0.1", "Worse"},        {"0.1", "0.2", "Very Low"},     {"0.2", "0.3", "Low"},
        {"0.3", "0.4", "Normal"},     {"0.4", "0.5", "Above Normal"}, {"0.5", "0.6", "High"},
        {"0.6", "0.7", "Very High"},  {"0.7", "0.8", "Best"},         {"0.8", "0.9", "Excellent"},
        {"0.9", "1", "Ideal"}};
    if (kBands.size() != printed.size()) o.fail("band count " + std::to_string(kBands.size()));
    for (std::size_t i = 0; i < printed.size() && i < kBands.size(); ++i) {
        const auto& [lo, hi, name] = printed[i];
        const double lower = std::stod(lo), upper = std::stod(hi);
        if (kBands[i].lower != lower || kBands[i].upper != upper || display_name(kBands[i].label) != name) {
            o.fail("row " + std::to_string(i + 1) + " differs");
        }
        if (classify_band(lower).label != kBands[i].label) o.fail("lower edge of " + name);
        const double mid = (lower + upper) / 2.0;
        if (classify_band(mid).label != kBands[i].label) o.fail("midpoint of " + name);
    }
    if (classify_band(1.0).label != BandLabel::Ideal) o.fail("1.0 is not Ideal");
    if (!bands_tile_unit_interval()) o.fail("bands do not tile [0, 1]");

    // Half-open oracle: band index is the count of lower edges <= v, minus one.
    const auto rows = load_fixture();
    std::size_t checked = 0;
    for (const auto& r : rows) {
        for (double v : {r.di_req, r.di_des, r.di_imp}) {
            std::size_t idx = 0;
            for (std::size_t k = 1; k < printed.size(); ++k) {
                if (v >= std::stod(std::get<0>(printed[k]))) idx = k;
            }
            if (display_name(classify_band(v).label) != std::get<2>(printed[idx])) {
                o.fail(r.project_id + " phase DI " + fmt(v) + " misclassified");
            }
            ++checked;
        }
    }
    if (checked != 45) o.fail("classified " + std::to_string(checked) + " phase values");
    if (classify_band(0.67).label != BandLabel::VeryHigh) o.fail("0.67 is not VeryHigh");
    if (classify_band(0.21).label != BandLabel::Low) o.fail("0.21 is not Low");
    if (o.pass) o.detail = "10 rows, tiling, 45 phase values";
    return o;
}

Outcome check_least_squares() {
    Outcome o;
    const auto start = Clock::now();
    std::mt19937_64 rng(20260101);
    std::uniform_int_distribution<std::size_t> size(6, 30);
    double worst_beta = 0.0, worst_normal = 0.0, worst_orth = 0.0;
    for (ModelKind model : {ModelKind::Process, ModelKind::Team}) {
        for (int k = 0; k < 20; ++k) {
            const std::size_t n = size(rng);
            const auto inst = oracle::planted(rng, model, n);
            const auto fit = fit_least_squares(build_design_matrix(inst.rows, model), "t");
            for (std::size_t j = 0; j < inst.beta.size(); ++j) {
                worst_beta = std::max(worst_beta, std::fabs(fit.betas[j] - inst.beta[j]));
            }
            const auto ne = oracle::normal_equations(inst.rows, model);
            for (std::size_t j = 0; j < ne.size(); ++j) {
                worst_normal = std::max(worst_normal, std::fabs(fit.betas[j] - ne[j]));
            }
            // X^T r relative to ||X|| ||y||.
            const auto x = oracle::design_rows(inst.rows, model);
            double xnorm = 0.0, ynorm = 0.0;
            for (const auto& row : x) for (double v : row) xnorm += v * v;
            for (const auto& obs : inst.rows) ynorm += obs.y * obs.y;
            const double scale = std::sqrt(xnorm) * std::sqrt(ynorm) + 1e-300;
            for (std::size_t j = 0; j < inst.beta.size(); ++j) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += x[i][j] * fit.diagnostics.residuals[i];
                worst_orth = std::max(worst_orth, std::fabs(dot) / scale);
            }
        }
    }
    const double t = seconds_since(start);
    if (worst_beta > 1e-9) o.fail("beta error " + fmt(worst_beta));
    if (worst_normal > 1e-8) o.fail("normal-equation disagreement " + fmt(worst_normal));
    if (worst_orth > 1e-8) o.fail("residual orthogonality " + fmt(worst_orth));
    if (t >= 5.0) o.fail("took " + fmt(t) + " s");
    if (o.pass) {
        o.detail = "40 instances, beta " + fmt(worst_beta) + ", normal eq " + fmt(worst_normal) + ", orth " +
                   fmt(worst_orth) + ", " + fmt(t) + " s";
    }
    return o;
}

Outcome check_minimum_rows() {
    Outcome o;
    std::mt19937_64 rng(55);
    auto rejects = [&](ModelKind model, std::size_t n) {
        try {
            build_design_matrix(oracle::planted(rng, model, n, 0.01).rows, model);
        } catch (const InsufficientRowsError& e) {
            return e.required() == minimum_rows(model) && e.provided() == n;
        }
        return false;
    };
    auto accepts = [&](ModelKind model, std::size_t n) {
        const auto fit = fit_least_squares(build_design_matrix(oracle::planted(rng, model, n, 0.01).rows, model), "t");
        return fit.diagnostics.exactly_determined() && fit.diagnostics.degrees_of_freedom == 0;
    };
    if (!rejects(ModelKind::Process, 4)) o.fail("process n=4 not rejected");
    if (!accepts(ModelKind::Process, 5)) o.fail("process n=5 not accepted with zero dof");
    if (!rejects(ModelKind::Team, 5)) o.fail("team n=5 not rejected");
    if (!accepts(ModelKind::Team, 6)) o.fail("team n=6 not accepted");

    // The warning surfaces on both interfaces.
    Service service;
    json rows = json::array();
    for (const auto& obs : oracle::planted(rng, ModelKind::Process, 5, 0.01).rows) {
        rows.push_back(wire::observation_to_json(obs, ModelKind::Process));
    }
    const auto r = service.handle("POST", "/api/v1/fit", json{{"model", "process"}, {"rows", rows}}.dump());
    if (r.status != 200 || json::parse(r.body)["diagnostics"]["warnings"] != json::array({"ZeroDegreesOfFreedom"})) {
        o.fail("service does not report ZeroDegreesOfFreedom");
    }
    if (o.pass) o.detail = "process 4/5, team 5/6";
    return o;
}

Outcome check_tune_round_trip() {
    Outcome o;
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> target(0.0, 1.0);
    std::uniform_int_distribution<int> pick(1, 5);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const ModelKind model = k % 2 ? ModelKind::Team : ModelKind::Process;
        CoefficientSet c{model, std::vector<double>(coefficient_count(model)), {}, "t", {}};
        for (double& b : c.betas) b = coef(rng);
        Regressor solve_for = static_cast<Regressor>(pick(rng));
        if (!uses(model, solve_for)) solve_for = Regressor::InspectionTime;
        const auto x = oracle::random_regressors(rng, model);
        FixedRegressors fixed;
        for (Regressor r : kAllRegressors) {
            if (uses(model, r) && r != solve_for) fixed[r] = x.value(r);
        }
        TuneRequest req{c, target(rng), solve_for, fixed};
        const auto result = solve_parameter(req);
        worst = std::max(worst, std::fabs(predict(c, result.solution).y_raw - req.target_y));

        req.coeffs.betas[index_of(solve_for)] = 0.0;
        try {
            solve_parameter(req);
            o.fail("zero coefficient solved");
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::UnsolvableParameter) o.fail("zero coefficient raised " + std::string(to_string(e.kind())));
        }
    }
    if (worst >= 1e-9) o.fail("round-trip error " + fmt(worst));
    if (o.pass) o.detail = "100 requests, max error " + fmt(worst) + ", 100 zero-coefficient rejections";
    return o;
}

Outcome check_cross_interface() {
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path() / ("inspectlens-accept-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(31337);
    Service service;
    std::vector<std::pair<std::string, CoefficientSet>> sets;
    for (ModelKind model : {ModelKind::Process, ModelKind::Team}) {
        const auto inst = oracle::planted(rng, model, 12, 0.05);
        auto c = fit_least_squares(build_design_matrix(inst.rows, model), "2026-01-01T00:00:00Z");
        const auto path = (dir / (std::string(to_string(model)) + ".json")).string();
        save_coefficients(c, path);
        service.registry().add(c);
        sets.emplace_back(path, std::move(c));
    }
    for (int k = 0; k < 50; ++k) {
        auto& [path, coeffs] = sets[k % 2];
        const auto x = oracle::random_regressors(rng, coeffs.model);
        const json xj = wire::observation_to_json({x, 0.0, "q"}, coeffs.model)["x"];

        std::vector<std::string> args{"--format", "json", "predict", "-c", path};
        const char* flags[] = {"--inspection-time", "--prep-time", "--inspectors", "--experience", "--function-points"};
        const char* keys[] = {"inspection_time_h", "prep_time_h", "num_inspectors", "experience_years", "function_points"};
        for (int f = 0; f < 5; ++f) {
            if (!xj.contains(keys[f])) continue;
            args.push_back(flags[f]);
            args.push_back(format_double(xj[keys[f]].get<double>()));
        }
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        const auto http = service.handle(
            "POST", "/api/v1/predict", json{{"coeff_id", coefficient_id(coeffs)}, {"x", xj}}.dump());
        if (code != 0 || http.status != 200) {
            o.fail("input " + std::to_string(k) + " failed: " + err.str() + http.body);
            continue;
        }
        const auto a = json::parse(out.str());
        const auto b = json::parse(http.body);
        if (a["y_raw"] != b["y_raw"] || a.value("band", json()) != b.value("band", json())) {
            o.fail("input " + std::to_string(k) + ": " + a.dump() + " vs " + b.dump());
        }
    }
    std::filesystem::remove_all(dir);
    if (o.pass) o.detail = "50 inputs, identical y_raw and band";
    return o;
}

Outcome check_serialization() {
    Outcome o;
    std::mt19937_64 rng(4040);
    std::uniform_real_distribution<double> hours(0.01, 40.0);
    std::uniform_int_distribution<std::uint64_t> total(1, 500);
    std::uniform_int_distribution<std::uint32_t> inspectors(1, 9);
    for (int k = 0; k < 50; ++k) {
        std::vector<ProjectRecord> records;
        for (int p = 0; p < 4; ++p) {
            ProjectRecord rec{"R" + std::to_string(k) + "-" + std::to_string(p), std::nullopt, std::nullopt, {}};
            for (Phase ph : kAllPhases) {
                const auto t = total(rng);
                rec.phases.push_back({ph, {std::uniform_int_distribution<std::uint64_t>(0, t)(rng), t},
                                      {inspectors(rng), hours(rng), hours(rng), hours(rng), hours(rng) * 10}});
            }
            records.push_back(rec);
        }
        if (parse_records_csv(records_to_csv(records)) != records) o.fail("CSV record round-trip");
        records[0].total_person_hours = hours(rng) * 100;
        records[1].total_captured_pct = hours(rng);
        if (parse_records_json(records_to_json(records).dump()) != records) o.fail("JSON record round-trip");
    }
    for (ModelKind model : {ModelKind::Process, ModelKind::Team}) {
        for (int k = 0; k < 10; ++k) {
            const auto inst = oracle::planted(rng, model, 15, 0.1);
            const auto c = fit_least_squares(build_design_matrix(inst.rows, model), "2026-01-01T00:00:00Z");
            const auto back = coefficients_from_json(json::parse(coefficients_to_json(c).dump(2)));
            if (!(back == c)) o.fail("coefficient round-trip");
            for (std::size_t j = 0; j < c.betas.size(); ++j) {
                if (std::bit_cast<std::uint64_t>(back.betas[j]) != std::bit_cast<std::uint64_t>(c.betas[j])) {
                    o.fail("beta bits changed");
                }
            }
        }
    }
    const std::string text = read_file(fixture_dir() / kFixtureFileName);
    if (fnv1a64(text) != 0xd05e244f5ce755f4ULL) o.fail("fixture checksum " + hex64(fnv1a64(text)));
    std::string tampered = text;
    tampered.back() = tampered.back() == '\n' ? ' ' : '\n';
    try {
        parse_fixture(tampered);
        o.fail("tampered fixture accepted");
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::FixtureCorrupt) o.fail("tampered fixture raised " + std::string(to_string(e.kind())));
    }
    if (o.pass) o.detail = "100 record files, 20 coefficient files, checksum d05e244f5ce755f4";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"fixture-avg-di", check_fixture_avg_di},
        {"fixture-avg-ipm", check_fixture_avg_ipm},
        {"band-table", check_band_table},
        {"least-squares-recovery", check_least_squares},
        {"minimum-rows", check_minimum_rows},
        {"tune-round-trip", check_tune_round_trip},
        {"cross-interface", check_cross_interface},
        {"serialization", check_serialization},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::printf("%s %-24s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        failed += o.pass ? 0 : 1;
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
