#include "cli_app.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "inspectlens/datastore.hpp"
#include "inspectlens/error.hpp"
#include "inspectlens/metrics.hpp"
#include "inspectlens/planner.hpp"
#include "inspectlens/regression.hpp"
#include "inspectlens/service.hpp"
#include "inspectlens/wire.hpp"

namespace inspectlens::cli {
namespace {

using json = nlohmann::json;

enum class OutputFormat { Table, Json, Csv };

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InsufficientRows: return kInsufficientData;
        case ErrorKind::RankDeficient:
        case ErrorKind::UnsolvableParameter: return kNumericalFailure;
        default: return kInputError;
    }
}

/// Left-aligned text table.
class Table {
public:
    explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }

    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void print(std::ostream& out) const {
        std::vector<std::size_t> width;
        for (const auto& row : rows_) {
            width.resize(std::max(width.size(), row.size()), 0);
            for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
        }
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << row[i];
                if (i + 1 < row.size()) out << std::string(width[i] - row[i].size() + 2, ' ');
            }
            out << '\n';
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

std::string num(double v) { return format_double(v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string("-"); }

/// Three decimals for table cells; json and csv keep full precision.
std::string cell(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << v;
    return s.str();
}

std::string opt_cell(const std::optional<double>& v) { return v ? cell(*v) : std::string("-"); }

std::string opt_band(const std::optional<Band>& b) {
    return b ? std::string(to_string(b->label)) : std::string("-");
}

/// Regressor values given on the command line, keyed like the service body.
struct RegressorFlags {
    std::map<Regressor, double> values;

    void attach(CLI::App* cmd) {
        for (Regressor r : kAllRegressors) {
            cmd->add_option_function<double>(
                flag(r), [this, r](double v) { values[r] = v; },
                std::string(field_name(r)) + (r == Regressor::LogFunctionPoints
                                                  ? " (raw count; the model uses log10)"
                                                  : ""));
        }
    }

    static std::string flag(Regressor r) {
        switch (r) {
            case Regressor::InspectionTime: return "--inspection-time";
            case Regressor::PrepTime: return "--prep-time";
            case Regressor::NumInspectors: return "--inspectors";
            case Regressor::Experience: return "--experience";
            case Regressor::LogFunctionPoints: return "--function-points";
        }
        return "";
    }

    /// Checks flag coverage for `model` (minus `skip`), then decodes through
    /// the same path the service uses.
    FixedRegressors decode(ModelKind model, std::optional<Regressor> skip = std::nullopt) const {
        std::string missing;
        std::string extra;
        json obj = json::object();
        for (Regressor r : kAllRegressors) {
            const bool wanted = uses(model, r) && r != skip;
            const bool given = values.count(r) != 0;
            if (wanted && !given) missing += (missing.empty() ? "" : ", ") + flag(r);
            if (!wanted && given) extra += (extra.empty() ? "" : ", ") + flag(r);
            if (given && wanted) obj[std::string(field_name(r))] = values.at(r);
        }
        if (!missing.empty() || !extra.empty()) {
            std::string msg = std::string(to_string(model)) + " model";
            if (!missing.empty()) msg += "; missing flags: " + missing;
            if (!extra.empty()) msg += "; unexpected flags: " + extra;
            throw Error(ErrorKind::ArityMismatch, msg);
        }
        return wire::regressors_from_json(obj, model, skip);
    }
};

Regressor regressor_arg(const std::string& text) {
    if (auto r = parse_regressor(text)) return *r;
    throw Error(ErrorKind::InvalidRequest, "unknown regressor '" + text + "' (use x1..x5 or a field name)");
}

std::string fit_timestamp(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("INSPECTLENS_TIMESTAMP"); env && *env) return env;
    return utc_timestamp_now();
}

struct InputSource {
    std::string path;
    bool fixture = false;
    std::string format;  // "", "csv" or "json"

    void attach(CLI::App* cmd) {
        auto* in = cmd->add_option("-i,--input", path, "records file (CSV or JSON)");
        auto* fx = cmd->add_flag("--fixture", fixture, "use the bundled 15-project fixture");
        in->excludes(fx);
        cmd->add_option("--input-format", format, "override format detection")
            ->check(CLI::IsMember({"csv", "json"}));
    }

    std::vector<ProjectRecord> records() const {
        if (fixture) return fixture_records(load_fixture());
        if (path.empty()) throw Error(ErrorKind::InvalidRequest, "either --input or --fixture is required");
        std::optional<RecordFormat> fmt;
        if (format == "csv") fmt = RecordFormat::Csv;
        if (format == "json") fmt = RecordFormat::Json;
        return load_records(path, fmt);
    }
};

json report_to_json(const ProjectReport& r) {
    json phases = json::array();
    for (const auto& p : r.phases) {
        json pj{{"phase", short_name(p.phase)}, {"ipm", p.ipm}};
        pj["di"] = p.di ? json(*p.di) : json(nullptr);
        pj["di_band"] = p.di_band ? json(to_string(p.di_band->label)) : json(nullptr);
        phases.push_back(std::move(pj));
    }
    json j{{"project_id", r.project_id}, {"phases", std::move(phases)}, {"avg_ipm", r.avg_ipm},
           {"partial", r.partial}, {"warnings", r.warnings}};
    j["avg_di"] = r.avg_di ? json(*r.avg_di) : json(nullptr);
    j["avg_di_band"] = r.avg_di_band ? json(to_string(r.avg_di_band->label)) : json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------

struct Context {
    OutputFormat format = OutputFormat::Table;
    bool quiet = false;
    std::ostream& out;
    std::ostream& err;

    void warn(const std::string& message) const {
        if (!quiet) err << "warning: " << message << '\n';
    }
};

int cmd_metrics(const Context& ctx, const InputSource& input, const std::string& granularity,
                const std::string& aggregation) {
    const auto mode = aggregation == "pooled" ? Aggregation::PooledCounts : Aggregation::MeanOfPhases;
    std::vector<ProjectReport> reports;
    for (const auto& rec : input.records()) reports.push_back(project_report(rec, mode));
    for (const auto& r : reports) {
        for (const auto& w : r.warnings) ctx.warn(w);
    }

    const bool per_phase = granularity == "phase";
    if (ctx.format == OutputFormat::Json) {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(report_to_json(r));
        ctx.out << json{{"aggregation", aggregation}, {"projects", std::move(arr)}}.dump(2) << '\n';
        return kOk;
    }
    if (ctx.format == OutputFormat::Csv) {
        if (per_phase) {
            ctx.out << "project_id,phase,di,band,ipm\n";
            for (const auto& r : reports) {
                for (const auto& p : r.phases) {
                    ctx.out << csv_field(r.project_id) << ',' << short_name(p.phase) << ','
                            << (p.di ? num(*p.di) : "") << ','
                            << (p.di_band ? std::string(to_string(p.di_band->label)) : "") << ','
                            << num(p.ipm) << '\n';
                }
            }
        } else {
            ctx.out << "project_id,avg_di,band,avg_ipm,partial\n";
            for (const auto& r : reports) {
                ctx.out << csv_field(r.project_id) << ',' << (r.avg_di ? num(*r.avg_di) : "") << ','
                        << (r.avg_di_band ? std::string(to_string(r.avg_di_band->label)) : "")
                        << ',' << num(r.avg_ipm) << ',' << (r.partial ? "true" : "false") << '\n';
            }
        }
        return kOk;
    }
    if (per_phase) {
        Table t({"project", "phase", "DI", "band", "IPM"});
        for (const auto& r : reports) {
            for (const auto& p : r.phases) {
                t.add({r.project_id, std::string(short_name(p.phase)), opt_cell(p.di),
                       opt_band(p.di_band), cell(p.ipm)});
            }
            t.add({r.project_id, r.partial ? "avg*" : "avg", opt_cell(r.avg_di),
                   opt_band(r.avg_di_band), cell(r.avg_ipm)});
        }
        t.print(ctx.out);
    } else {
        Table t({"project", "avg DI", "band", "avg IPM"});
        for (const auto& r : reports) {
            t.add({r.project_id + (r.partial ? "*" : ""), opt_cell(r.avg_di), opt_band(r.avg_di_band),
                   cell(r.avg_ipm)});
        }
        t.print(ctx.out);
    }
    return kOk;
}

int cmd_report(const Context& ctx, const InputSource& input) {
    if (input.fixture) {
        // Published averages next to the mean of the published phase values.
        const auto rows = load_fixture();
        json arr = json::array();
        Table t({"project", "hours", "avg DI", "mean DI", "band", "avg IPM", "mean IPM", "Tc %"});
        if (ctx.format == OutputFormat::Csv) {
            ctx.out << "project_id,total_person_hours,avg_di,mean_di,band,avg_ipm,mean_ipm,tc_pct\n";
        }
        for (const auto& r : rows) {
            const double di[] = {r.di_req, r.di_des, r.di_imp};
            const double ipm[] = {r.ipm_req, r.ipm_des, r.ipm_imp};
            const double mean_di = aggregate_metric(di, Aggregation::MeanOfPhases);
            const double mean_ipm = aggregate_metric(ipm, Aggregation::MeanOfPhases);
            const auto band = to_string(classify_band(mean_di).label);
            if (ctx.format == OutputFormat::Json) {
                arr.push_back({{"project_id", r.project_id}, {"total_person_hours", r.total_person_hours},
                               {"avg_di", r.avg_di}, {"mean_di", mean_di}, {"band", band},
                               {"avg_ipm", r.avg_ipm}, {"mean_ipm", mean_ipm}, {"tc_pct", r.tc_pct}});
            } else if (ctx.format == OutputFormat::Csv) {
                ctx.out << r.project_id << ',' << num(r.total_person_hours) << ',' << num(r.avg_di)
                        << ',' << num(mean_di) << ',' << band << ',' << num(r.avg_ipm) << ','
                        << num(mean_ipm) << ',' << num(r.tc_pct) << '\n';
            } else {
                t.add({r.project_id, num(r.total_person_hours), num(r.avg_di), cell(mean_di),
                       std::string(band), num(r.avg_ipm), cell(mean_ipm), num(r.tc_pct)});
            }
        }
        if (ctx.format == OutputFormat::Json) ctx.out << json{{"projects", arr}}.dump(2) << '\n';
        if (ctx.format == OutputFormat::Table) t.print(ctx.out);
        return kOk;
    }

    const auto records = input.records();
    json arr = json::array();
    Table t({"project", "hours", "Tc %", "phases", "avg DI", "band", "avg IPM"});
    if (ctx.format == OutputFormat::Csv) {
        ctx.out << "project_id,total_person_hours,tc_pct,phases,avg_di,band,avg_ipm\n";
    }
    for (const auto& rec : records) {
        const auto r = project_report(rec);
        for (const auto& w : r.warnings) ctx.warn(w);
        if (ctx.format == OutputFormat::Json) {
            json j = report_to_json(r);
            j["total_person_hours"] = rec.total_person_hours ? json(*rec.total_person_hours) : json(nullptr);
            j["tc_pct"] = rec.total_captured_pct ? json(*rec.total_captured_pct) : json(nullptr);
            arr.push_back(std::move(j));
        } else if (ctx.format == OutputFormat::Csv) {
            ctx.out << csv_field(rec.id) << ','
                    << (rec.total_person_hours ? num(*rec.total_person_hours) : "") << ','
                    << (rec.total_captured_pct ? num(*rec.total_captured_pct) : "") << ','
                    << rec.phases.size() << ',' << (r.avg_di ? num(*r.avg_di) : "") << ','
                    << (r.avg_di_band ? std::string(to_string(r.avg_di_band->label)) : "") << ','
                    << num(r.avg_ipm) << '\n';
        } else {
            t.add({rec.id + (r.partial ? "*" : ""), opt_num(rec.total_person_hours),
                   opt_num(rec.total_captured_pct), std::to_string(rec.phases.size()),
                   opt_cell(r.avg_di), opt_band(r.avg_di_band), cell(r.avg_ipm)});
        }
    }
    if (ctx.format == OutputFormat::Json) ctx.out << json{{"projects", arr}}.dump(2) << '\n';
    if (ctx.format == OutputFormat::Table) t.print(ctx.out);
    return kOk;
}

std::vector<Observation> fit_input(const std::string& path, const std::string& format,
                                   ModelKind model, Granularity granularity) {
    const std::filesystem::path p(path);
    const bool json_input = format == "json" || (format.empty() && p.extension() == ".json");
    if (json_input) {
        const auto records = load_records(p, RecordFormat::Json);
        return observations_from_records(records, model, granularity);
    }
    const std::string text = read_file(p);
    const auto lines = split_lines(text);
    auto first = std::find_if(lines.begin(), lines.end(), [](const std::string& l) { return !l.empty(); });
    if (first != lines.end() && *first == kRecordsCsvHeader) {
        const auto records = parse_records_csv(text);
        return observations_from_records(records, model, granularity);
    }
    return parse_observations_csv(text, model);
}

int cmd_fit(const Context& ctx, const std::string& input, const std::string& input_format,
            ModelKind model, const std::string& out_path, const std::string& granularity,
            const std::string& fitted_at) {
    const auto gran = granularity == "phase" ? Granularity::Phase : Granularity::Project;
    auto dm = build_design_matrix(fit_input(input, input_format, model, gran), model);
    const CoefficientSet coeffs = fit_least_squares(dm, fit_timestamp(fitted_at));
    const auto& d = coeffs.diagnostics;
    if (d.exactly_determined()) {
        ctx.warn("exactly determined fit (" + std::to_string(dm.row_count()) +
                 " rows, zero degrees of freedom): residuals are zero by construction");
    }
    if (d.ill_conditioned()) ctx.warn("ill-conditioned design matrix (condition " + num(d.condition_estimate) + ")");
    if (!out_path.empty()) save_coefficients(coeffs, out_path);

    if (ctx.format == OutputFormat::Json) {
        ctx.out << wire::fit_to_json(coefficient_id(coeffs), coeffs).dump(2) << '\n';
        return kOk;
    }
    if (ctx.format == OutputFormat::Csv) {
        ctx.out << "coefficient,value\n";
        for (std::size_t i = 0; i < coeffs.betas.size(); ++i) {
            ctx.out << "b" << i << ',' << num(coeffs.betas[i]) << '\n';
        }
        ctx.out << "sse," << num(d.sse) << "\nr_squared," << num(d.r_squared)
                << "\ncondition_estimate," << num(d.condition_estimate)
                << "\ndegrees_of_freedom," << d.degrees_of_freedom << '\n';
        return kOk;
    }
    ctx.out << to_string(model) << " model fitted from " << dm.row_count() << " rows\n";
    Table t({"coefficient", "regressor", "value"});
    for (std::size_t i = 0; i < coeffs.betas.size(); ++i) {
        t.add({"b" + std::to_string(i), column_label(i), num(coeffs.betas[i])});
    }
    t.print(ctx.out);
    ctx.out << "SSE                 " << num(d.sse) << '\n'
            << "R^2                 " << num(d.r_squared) << '\n'
            << "condition estimate  " << num(d.condition_estimate) << '\n'
            << "degrees of freedom  " << d.degrees_of_freedom << '\n';
    if (!out_path.empty()) ctx.out << "written to " << out_path << '\n';
    return kOk;
}

void print_prediction(const Context& ctx, const PredictionResult& p) {
    if (ctx.format == OutputFormat::Json) {
        ctx.out << wire::prediction_to_json(p).dump(2) << '\n';
    } else if (ctx.format == OutputFormat::Csv) {
        ctx.out << "y_raw,y_clamped,band,out_of_range\n"
                << num(p.y_raw) << ',' << (p.y_clamped ? num(*p.y_clamped) : "") << ','
                << (p.band ? std::string(to_string(p.band->label)) : "") << ','
                << (p.out_of_range ? "true" : "false") << '\n';
    } else {
        ctx.out << "y_raw      " << num(p.y_raw) << '\n';
        if (p.y_clamped) ctx.out << "y_clamped  " << num(*p.y_clamped) << '\n';
        if (p.band) ctx.out << "band       " << to_string(p.band->label) << '\n';
        if (p.out_of_range) ctx.out << "note       prediction lies outside [0, 1]\n";
    }
}

int cmd_predict(const Context& ctx, const std::string& coeffs_path, const RegressorFlags& flags) {
    const auto coeffs = load_coefficients(coeffs_path);
    const auto x = wire::to_vector(flags.decode(coeffs.model));
    print_prediction(ctx, predict(coeffs, x));
    return kOk;
}

int cmd_tune(const Context& ctx, const std::string& coeffs_path, std::optional<double> target,
             const std::string& target_band, const std::string& solve_for, const RegressorFlags& flags) {
    TuneRequest req;
    req.coeffs = load_coefficients(coeffs_path);
    req.solve_for = regressor_arg(solve_for);
    if (target) {
        req.target_y = *target;
    } else if (auto b = parse_band_label(target_band)) {
        req.target_y = band_of(*b).lower;
    } else {
        throw Error(ErrorKind::InvalidRequest, "--target or a valid --target-band is required");
    }
    req.fixed = flags.decode(req.coeffs.model, req.solve_for);
    const auto result = solve_parameter(req);
    if (!result.feasible) ctx.warn("solution is infeasible: " + result.reason);

    if (ctx.format == OutputFormat::Json) {
        ctx.out << wire::tune_to_json(req, result).dump(2) << '\n';
        return kOk;
    }
    if (ctx.format == OutputFormat::Csv) {
        ctx.out << "solve_for,target,value,feasible,band\n"
                << symbol(req.solve_for) << ',' << num(req.target_y) << ',' << num(result.value) << ','
                << (result.feasible ? "true" : "false") << ','
                << (result.band ? std::string(to_string(result.band->label)) : "") << '\n';
        return kOk;
    }
    ctx.out << symbol(req.solve_for) << " (" << field_name(req.solve_for) << ") = " << num(result.value);
    if (req.solve_for == Regressor::LogFunctionPoints) {
        ctx.out << "  [function points " << num(x5_to_function_points(result.value)) << "]";
    }
    ctx.out << "\ntarget " << num(req.target_y);
    if (result.band) ctx.out << " (" << to_string(result.band->label) << ")";
    ctx.out << "\nfeasible " << (result.feasible ? "yes" : "no (" + result.reason + ")") << '\n';
    for (const auto& c : result.integer_candidates) {
        ctx.out << "  with " << num(c.num_inspectors) << " inspectors: y_raw " << num(c.prediction.y_raw);
        if (c.prediction.band) ctx.out << ", band " << to_string(c.prediction.band->label);
        ctx.out << '\n';
    }
    return kOk;
}

int cmd_scan(const Context& ctx, const std::string& coeffs_path, const std::string& vary, double min,
             double max, double step, const RegressorFlags& flags) {
    ScanRequest req;
    req.coeffs = load_coefficients(coeffs_path);
    req.vary = {regressor_arg(vary), min, max, step};
    req.fixed = flags.decode(req.coeffs.model, req.vary.regressor);
    const auto points = scan(req);
    if (ctx.format == OutputFormat::Json) {
        ctx.out << wire::scan_to_json(req, points).dump(2) << '\n';
        return kOk;
    }
    if (ctx.format == OutputFormat::Csv) {
        ctx.out << "value,y_raw,y_clamped,band,out_of_range\n";
        for (const auto& p : points) {
            ctx.out << num(p.value) << ',' << num(p.prediction.y_raw) << ','
                    << (p.prediction.y_clamped ? num(*p.prediction.y_clamped) : "") << ','
                    << (p.prediction.band ? std::string(to_string(p.prediction.band->label)) : "")
                    << ',' << (p.prediction.out_of_range ? "true" : "false") << '\n';
        }
        return kOk;
    }
    Table t({std::string(symbol(req.vary.regressor)), "y_raw", "y_clamped", "band"});
    for (const auto& p : points) {
        t.add({num(p.value), num(p.prediction.y_raw), opt_num(p.prediction.y_clamped),
               opt_band(p.prediction.band)});
    }
    t.print(ctx.out);
    return kOk;
}

int cmd_serve(const Context& ctx, const std::string& host, int port,
              const std::vector<std::string>& coeff_files, const std::string& cors_origin) {
    ServiceOptions options;
    if (!cors_origin.empty()) options.cors_origin = cors_origin;
    Service service(options);
    for (const auto& path : coeff_files) {
        auto [id, _] = service.registry().add(load_coefficients(path));
        if (!ctx.quiet) ctx.err << "registered " << path << " as " << id << '\n';
    }
    httplib::Server server;
    service.bind(server);
    if (!ctx.quiet) ctx.err << "listening on http://" << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
        throw Error(ErrorKind::IoError, "cannot listen on " + host + ':' + std::to_string(port));
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"inspection depth and performance analytics", "inspectlens"};
    app.require_subcommand(1, 1);

    std::string format = "table";
    bool quiet = false;
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"table", "json", "csv"}))
        ->capture_default_str();
    app.add_flag("-q,--quiet", quiet, "suppress warnings");

    // metrics
    auto* metrics = app.add_subcommand("metrics", "per-phase and per-project DI, IPM and bands");
    InputSource metrics_input;
    metrics_input.attach(metrics);
    std::string granularity = "phase";
    std::string aggregation = "mean";
    metrics->add_option("--granularity", granularity)->check(CLI::IsMember({"phase", "project"}))->capture_default_str();
    metrics->add_option("--aggregation", aggregation)->check(CLI::IsMember({"mean", "pooled"}))->capture_default_str();

    // report
    auto* report = app.add_subcommand("report", "project summary (or the fixture table with recomputed averages)");
    InputSource report_input;
    report_input.attach(report);

    // fit
    auto* fit = app.add_subcommand("fit", "fit process (DI) or team (IPM) coefficients");
    std::string fit_in, fit_in_format, fit_model, fit_out, fit_granularity = "project", fitted_at;
    fit->add_option("-i,--input", fit_in, "records file or observations CSV")->required();
    fit->add_option("--input-format", fit_in_format)->check(CLI::IsMember({"csv", "json"}));
    fit->add_option("-m,--model", fit_model)->required()->check(CLI::IsMember({"process", "team"}));
    fit->add_option("-o,--out", fit_out, "coefficient file to write");
    fit->add_option("--granularity", fit_granularity, "row granularity for records input")
        ->check(CLI::IsMember({"project", "phase"}))
        ->capture_default_str();
    fit->add_option("--fitted-at", fitted_at, "RFC 3339 timestamp recorded in the file");

    // predict / tune / scan
    auto* pred = app.add_subcommand("predict", "predict DI or IPM from a coefficient file");
    std::string pred_coeffs;
    RegressorFlags pred_flags;
    pred->add_option("-c,--coeffs", pred_coeffs)->required();
    pred_flags.attach(pred);

    auto* tune = app.add_subcommand("tune", "solve one regressor for a target DI/IPM");
    std::string tune_coeffs, tune_band, tune_solve;
    std::optional<double> tune_target;
    RegressorFlags tune_flags;
    tune->add_option("-c,--coeffs", tune_coeffs)->required();
    auto* tgt = tune->add_option("--target", tune_target, "target response value");
    auto* tb = tune->add_option("--target-band", tune_band, "target the lower edge of a band");
    tgt->excludes(tb);
    tune->add_option("--solve-for", tune_solve, "x1..x5 or field name")->required();
    tune_flags.attach(tune);

    auto* scan_cmd = app.add_subcommand("scan", "sweep one regressor over a grid");
    std::string scan_coeffs, scan_vary;
    double scan_min = 0, scan_max = 0, scan_step = 0;
    RegressorFlags scan_flags;
    scan_cmd->add_option("-c,--coeffs", scan_coeffs)->required();
    scan_cmd->add_option("--vary", scan_vary, "x1..x5 or field name")->required();
    scan_cmd->add_option("--min", scan_min)->required();
    scan_cmd->add_option("--max", scan_max)->required();
    scan_cmd->add_option("--step", scan_step)->required();
    scan_flags.attach(scan_cmd);

    // serve
    auto* serve = app.add_subcommand("serve", "run the JSON HTTP service");
    std::string host = "127.0.0.1", cors;
    int port = 8080;
    std::vector<std::string> serve_coeffs;
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->capture_default_str();
    serve->add_option("--coeffs", serve_coeffs, "coefficient files to register at startup");
    serve->add_option("--cors-origin", cors, "allowed browser origin");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kOk;
        }
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    Context ctx{format == "json" ? OutputFormat::Json
                                 : format == "csv" ? OutputFormat::Csv : OutputFormat::Table,
                quiet, out, err};
    try {
        if (*metrics) return cmd_metrics(ctx, metrics_input, granularity, aggregation);
        if (*report) return cmd_report(ctx, report_input);
        if (*fit) {
            return cmd_fit(ctx, fit_in, fit_in_format, *parse_model_kind(fit_model), fit_out,
                           fit_granularity, fitted_at);
        }
        if (*pred) return cmd_predict(ctx, pred_coeffs, pred_flags);
        if (*tune) return cmd_tune(ctx, tune_coeffs, tune_target, tune_band, tune_solve, tune_flags);
        if (*scan_cmd) {
            return cmd_scan(ctx, scan_coeffs, scan_vary, scan_min, scan_max, scan_step, scan_flags);
        }
        if (*serve) return cmd_serve(ctx, host, port, serve_coeffs, cors);
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

}  // namespace inspectlens::cli
