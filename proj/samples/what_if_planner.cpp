// Fits a process model from past projects, then asks how much inspection
// time the next review needs to reach the High band.
//
//   what_if_planner [records.csv]

#include <cstdio>
#include <string>

#include "inspectlens/datastore.hpp"
#include "inspectlens/planner.hpp"
#include "inspectlens/regression.hpp"

using namespace inspectlens;

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : INSPECTLENS_SAMPLES_DIR "/records.csv";
    try {
        const auto records = load_records(path);
        const auto rows = observations_from_records(records, ModelKind::Process, Granularity::Project);
        const auto coeffs = fit_least_squares(build_design_matrix(rows, ModelKind::Process));

        std::printf("process model from %zu projects (R^2 %.3f)\n", rows.size(),
                    coeffs.diagnostics.r_squared);
        for (std::size_t i = 0; i < coeffs.betas.size(); ++i) {
            std::printf("  b%zu %-24s % .5f\n", i, column_label(i).c_str(), coeffs.betas[i]);
        }

        // Planned review: 4 inspectors, 1.5 h preparation, 3 years experience.
        const FixedRegressors plan{{Regressor::PrepTime, 1.5},
                                   {Regressor::NumInspectors, 4.0},
                                   {Regressor::Experience, 3.0}};

        const double high = band_of(BandLabel::High).lower;
        const auto need = solve_parameter({coeffs, high, Regressor::InspectionTime, plan});
        std::printf("\ninspection time for DI %.2f: %.2f h%s\n", high, need.value,
                    need.feasible ? "" : (" (" + need.reason + ")").c_str());

        std::printf("\n%-8s %-8s %s\n", "hours", "DI", "band");
        const auto points = scan({coeffs, {Regressor::InspectionTime, 1.0, 6.0, 0.5}, plan});
        for (const auto& p : points) {
            std::printf("%-8.1f %-8.3f %s\n", p.value, p.prediction.y_raw,
                        p.prediction.band ? std::string(display_name(p.prediction.band->label)).c_str() : "-");
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "%s: %s\n", std::string(to_string(e.kind())).c_str(), e.what());
        return 1;
    }
    return 0;
}
