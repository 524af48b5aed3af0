#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "inspectlens/planner.hpp"
#include "oracles.hpp"

using namespace inspectlens;

namespace {

CoefficientSet process(std::vector<double> betas) {
    return CoefficientSet{ModelKind::Process, std::move(betas), {}, "2026-01-01T00:00:00Z", {}};
}

CoefficientSet team(std::vector<double> betas) {
    return CoefficientSet{ModelKind::Team, std::move(betas), {}, "2026-01-01T00:00:00Z", {}};
}

FixedRegressors fixed_except(ModelKind model, Regressor skip, const RegressorVector& x) {
    FixedRegressors out;
    for (Regressor r : kAllRegressors) {
        if (uses(model, r) && r != skip) out[r] = x.value(r);
    }
    return out;
}

}  // namespace

TEST(SolveParameter, IdentityCoefficient) {
    TuneRequest req{process({0, 1, 0, 0, 0}), 0.4, Regressor::InspectionTime,
                    {{Regressor::PrepTime, 1.0}, {Regressor::NumInspectors, 2.0}, {Regressor::Experience, 3.0}}};
    const auto r = solve_parameter(req);
    EXPECT_DOUBLE_EQ(r.value, 0.4);
    EXPECT_TRUE(r.feasible);
    EXPECT_EQ(r.band->label, BandLabel::AboveNormal);
    EXPECT_TRUE(r.integer_candidates.empty());
}

TEST(SolveParameter, ZeroCoefficientIsUnsolvable) {
    TuneRequest req{process({0.3, 0, 0.1, 0.1, 0.1}), 0.5, Regressor::InspectionTime,
                    {{Regressor::PrepTime, 1.0}, {Regressor::NumInspectors, 2.0}, {Regressor::Experience, 3.0}}};
    try {
        solve_parameter(req);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnsolvableParameter);
    }
}

TEST(SolveParameter, FixedMustCoverTheRest) {
    TuneRequest req{process({0, 1, 1, 1, 1}), 0.5, Regressor::InspectionTime, {{Regressor::PrepTime, 1.0}}};
    try {
        solve_parameter(req);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ArityMismatch);
        EXPECT_NE(std::string(e.what()).find("x3"), std::string::npos);
    }
    req.fixed = {{Regressor::PrepTime, 1.0}, {Regressor::NumInspectors, 2.0}, {Regressor::Experience, 3.0},
                 {Regressor::LogFunctionPoints, 2.0}};
    EXPECT_THROW(solve_parameter(req), Error);
    req.solve_for = Regressor::LogFunctionPoints;
    EXPECT_THROW(solve_parameter(req), Error);
}

TEST(SolveParameter, InfeasibleSolutionsAreReported) {
    // Reaching 0.1 needs negative inspection time.
    TuneRequest req{process({0.3, 0.05, 0, 0, 0}), 0.1, Regressor::InspectionTime,
                    {{Regressor::PrepTime, 0.0}, {Regressor::NumInspectors, 1.0}, {Regressor::Experience, 0.0}}};
    const auto r = solve_parameter(req);
    EXPECT_DOUBLE_EQ(r.value, -4.0);
    EXPECT_FALSE(r.feasible);
    EXPECT_FALSE(r.reason.empty());
}

TEST(SolveParameter, InspectorCountGetsIntegerCandidates) {
    TuneRequest req{process({0.2, 0, 0, 0.05, 0}), 0.42, Regressor::NumInspectors,
                    {{Regressor::InspectionTime, 2.0}, {Regressor::PrepTime, 1.0}, {Regressor::Experience, 0.0}}};
    const auto r = solve_parameter(req);
    EXPECT_NEAR(r.value, 4.4, 1e-12);
    EXPECT_FALSE(r.feasible);  // fractional inspectors
    ASSERT_EQ(r.integer_candidates.size(), 2u);
    EXPECT_EQ(r.integer_candidates[0].num_inspectors, 4.0);
    EXPECT_NEAR(r.integer_candidates[0].prediction.y_raw, 0.4, 1e-12);
    EXPECT_EQ(r.integer_candidates[1].num_inspectors, 5.0);
    EXPECT_NEAR(r.integer_candidates[1].prediction.y_raw, 0.45, 1e-12);

    req.target_y = 0.4;
    const auto whole = solve_parameter(req);
    EXPECT_NEAR(whole.value, 4.0, 1e-12);
    EXPECT_TRUE(whole.feasible);
    EXPECT_EQ(whole.integer_candidates.size(), 1u);
}

TEST(SolveParameter, RoundTripThroughPredict) {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> target(-0.5, 1.5);
    std::uniform_int_distribution<int> which(1, 5);
    for (int k = 0; k < 500; ++k) {
        const ModelKind model = k % 2 ? ModelKind::Team : ModelKind::Process;
        CoefficientSet c{model, std::vector<double>(coefficient_count(model)), {}, "t", {}};
        for (double& b : c.betas) b = coef(rng);
        auto solve_for = static_cast<Regressor>(which(rng));
        if (!uses(model, solve_for)) solve_for = Regressor::Experience;
        const auto x = oracle::random_regressors(rng, model);
        TuneRequest req{c, target(rng), solve_for, fixed_except(model, solve_for, x)};
        const auto r = solve_parameter(req);
        EXPECT_NEAR(predict(c, r.solution).y_raw, req.target_y, 1e-9);
        // Linear in the target.
        auto shifted = req;
        shifted.target_y += 0.25;
        EXPECT_NEAR(solve_parameter(shifted).value - r.value, 0.25 / c.betas[index_of(solve_for)],
                    1e-12 * std::max(1.0, std::fabs(r.value)));
    }
}

TEST(BandThreshold, MatchesSolveParameter) {
    const auto c = process({0.1, 0.04, 0.01, 0.02, 0.005});
    const FixedRegressors fixed{{Regressor::PrepTime, 2.0}, {Regressor::NumInspectors, 3.0}, {Regressor::Experience, 4.0}};
    const double t = band_threshold(c, band_of(BandLabel::High).lower, Regressor::InspectionTime, fixed);
    EXPECT_DOUBLE_EQ(t, solve_parameter({c, 0.5, Regressor::InspectionTime, fixed}).value);
}

TEST(BandThreshold, MonotoneInBandLower) {
    const FixedRegressors fixed{{Regressor::PrepTime, 2.0}, {Regressor::NumInspectors, 3.0}, {Regressor::Experience, 4.0}};
    for (double slope : {0.04, -0.04}) {
        const auto c = process({0.1, slope, 0.01, 0.02, 0.005});
        for (std::size_t i = 0; i + 1 < kBands.size(); ++i) {
            const double lo = band_threshold(c, kBands[i].lower, Regressor::InspectionTime, fixed);
            const double hi = band_threshold(c, kBands[i + 1].lower, Regressor::InspectionTime, fixed);
            if (slope > 0) EXPECT_LT(lo, hi);
            else EXPECT_GT(lo, hi);
        }
    }
}

TEST(BandThreshold, RequiresProcessModel) {
    const auto c = team({0, 1, 0, 0, 0, 0});
    EXPECT_THROW(band_threshold(c, 0.5, Regressor::InspectionTime, {}), Error);
}

TEST(Scan, LinearRamp) {
    ScanRequest req{process({0.2, 0, 0, 0.05, 0}), {Regressor::NumInspectors, 1, 5, 1},
                    {{Regressor::InspectionTime, 2.0}, {Regressor::PrepTime, 1.0}, {Regressor::Experience, 3.0}}};
    const auto pts = scan(req);
    ASSERT_EQ(pts.size(), 5u);
    const double expected[] = {0.25, 0.30, 0.35, 0.40, 0.45};
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(pts[i].value, static_cast<double>(i + 1));
        EXPECT_NEAR(pts[i].prediction.y_raw, expected[i], 1e-15);
    }
    EXPECT_EQ(pts[0].prediction.band->label, BandLabel::Low);
    EXPECT_EQ(pts[3].prediction.band->label, BandLabel::AboveNormal);
}

TEST(Scan, StepLargerThanRangeGivesOnePoint) {
    ScanRequest req{process({0.2, 0, 0, 0.05, 0}), {Regressor::NumInspectors, 1, 2, 5},
                    {{Regressor::InspectionTime, 2.0}, {Regressor::PrepTime, 1.0}, {Regressor::Experience, 3.0}}};
    const auto pts = scan(req);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_EQ(pts[0].value, 1.0);
}

TEST(Scan, InvalidRanges) {
    ScanRequest req{process({0.2, 0, 0, 0.05, 0}), {Regressor::NumInspectors, 5, 1, 1},
                    {{Regressor::InspectionTime, 2.0}, {Regressor::PrepTime, 1.0}, {Regressor::Experience, 3.0}}};
    EXPECT_THROW(scan(req), Error);
    req.vary = {Regressor::NumInspectors, 1, 5, 0};
    EXPECT_THROW(scan(req), Error);
    req.vary = {Regressor::NumInspectors, 1, 5, -1};
    EXPECT_THROW(scan(req), Error);
}

TEST(Scan, SortedAndPointwiseEqualToPredict) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> coef(-0.3, 0.3);
    for (int k = 0; k < 50; ++k) {
        CoefficientSet c = team(std::vector<double>(6));
        for (double& b : c.betas) b = coef(rng);
        const auto x = oracle::random_regressors(rng, ModelKind::Team);
        ScanRequest req{c, {Regressor::PrepTime, 0.0, 7.5, 0.37},
                        fixed_except(ModelKind::Team, Regressor::PrepTime, x)};
        const auto pts = scan(req);
        EXPECT_EQ(pts.size(), 21u);  // floor(7.5 / 0.37) + 1
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) EXPECT_LT(pts[i - 1].value, pts[i].value);
            auto xi = x;
            xi.prep_time = pts[i].value;
            EXPECT_EQ(pts[i].prediction, predict(c, xi));
        }
    }
}
