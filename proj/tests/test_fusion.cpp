#include "doctest.h"

#include <cmath>
#include <random>

#include "vitalradar/csv.hpp"
#include "vitalradar/errors.hpp"
#include "vitalradar/fusion.hpp"
#include "test_util.hpp"

using namespace vitalradar;

namespace {

// estimator columns are scaled views of the truth with independent per-cell
// jitter; the floor keeps the columns linearly independent even at noise = 0
CalibrationSet synthetic_set(int rows, unsigned seed, double noise = 0.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> br(10.0, 30.0);
    std::uniform_real_distribution<double> hr(55.0, 115.0);
    std::normal_distribution<double> jitter(0.0, std::max(noise, 0.6));

    CalibrationSet cal;
    cal.breath_estimates.resize(rows, kBreathColumns);
    cal.heart_estimates.resize(rows, kHeartColumns);
    cal.breath_truth.resize(rows);
    cal.heart_truth.resize(rows);
    for (int p = 0; p < rows; ++p) {
        const double b = br(rng);
        const double h = hr(rng);
        cal.breath_truth(p) = b;
        cal.heart_truth(p) = h;
        const double scale[6] = {1.0, 0.96, 1.05, 0.99, 1.08, 0.93};
        for (int c = 0; c < kBreathColumns; ++c)
            cal.breath_estimates(p, c) = scale[c] * b + jitter(rng);
        for (int c = 0; c < kHeartColumns; ++c)
            cal.heart_estimates(p, c) = scale[c] * h + jitter(rng);
    }
    return cal;
}

// overwrite the truth with an exact blend so the relation is noiseless
void plant(CalibrationSet& cal, const Eigen::Vector3d& cb,
           const Eigen::Matrix<double, 6, 1>& ch) {
    cal.breath_truth = cal.breath_estimates * cb;
    cal.heart_truth = cal.heart_estimates * ch;
}

}  // namespace

TEST_CASE("weights recover a planted linear model") {
    CalibrationSet cal = synthetic_set(50, 1);
    const Eigen::Vector3d cb(0.31, 0.17, 0.52);
    Eigen::Matrix<double, 6, 1> ch;
    ch << 0.2, 0.1, 0.15, 0.3, 0.05, 0.2;
    plant(cal, cb, ch);

    const FusionWeights w = fit_weights(cal, 0xabcd);
    for (int c = 0; c < 3; ++c)
        CHECK(w.breath(c) == doctest::Approx(cb(c)).epsilon(1e-9));
    for (int c = 0; c < 6; ++c)
        CHECK(w.heart(c) == doctest::Approx(ch(c)).epsilon(1e-9));
    CHECK(w.training_rows == 50);
    CHECK(w.config_digest == 0xabcd);
    CHECK(w.breath_residual_norm < 1e-9);
    CHECK(w.heart_residual_norm < 1e-9);
}

TEST_CASE("square systems are solved exactly") {
    CalibrationSet cal = synthetic_set(6, 2, 0.4);
    // breath block is effectively 3 x 3 once truth is a plain target
    const FusionWeights w = fit_weights(cal);
    // residual orthogonality: A^T (A c - b) = 0 within scaled tolerance
    const Eigen::VectorXd rb =
        cal.breath_estimates.transpose() *
        (cal.breath_estimates * w.breath - cal.breath_truth);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(rb(c)) < 1e-6);
    const Eigen::VectorXd rh =
        cal.heart_estimates.transpose() *
        (cal.heart_estimates * w.heart - cal.heart_truth);
    for (int c = 0; c < 6; ++c) CHECK(std::abs(rh(c)) < 1e-6);
}

TEST_CASE("qr solution matches the normal equations") {
    const CalibrationSet cal = synthetic_set(80, 3, 2.0);
    const FusionWeights w = fit_weights(cal);

    const Eigen::MatrixXd& a = cal.breath_estimates;
    const Eigen::Vector3d via_normal =
        (a.transpose() * a).ldlt().solve(a.transpose() * cal.breath_truth);
    for (int c = 0; c < 3; ++c)
        CHECK(w.breath(c) == doctest::Approx(via_normal(c)).epsilon(1e-8));

    const Eigen::MatrixXd& ah = cal.heart_estimates;
    const Eigen::VectorXd via_normal_h =
        (ah.transpose() * ah).ldlt().solve(ah.transpose() * cal.heart_truth);
    for (int c = 0; c < 6; ++c)
        CHECK(w.heart(c) == doctest::Approx(via_normal_h(c)).epsilon(1e-8));
}

TEST_CASE("first-order optimality: perturbing any weight raises the residual") {
    const CalibrationSet cal = synthetic_set(60, 4, 1.5);
    const FusionWeights w = fit_weights(cal);
    const double base =
        (cal.breath_estimates * w.breath - cal.breath_truth).squaredNorm();
    for (int c = 0; c < 3; ++c) {
        for (double d : {-1e-3, 1e-3}) {
            Eigen::Vector3d tweaked = w.breath;
            tweaked(c) += d;
            const double cost =
                (cal.breath_estimates * tweaked - cal.breath_truth).squaredNorm();
            CHECK(cost >= base);
        }
    }
}

TEST_CASE("training fit beats every rescaled single column") {
    const CalibrationSet cal = synthetic_set(40, 5, 1.0);
    const FusionWeights w = fit_weights(cal);
    const double fused =
        (cal.breath_estimates * w.breath - cal.breath_truth).squaredNorm();
    for (int c = 0; c < 3; ++c) {
        const Eigen::VectorXd col = cal.breath_estimates.col(c);
        const double gain = col.dot(cal.breath_truth) / col.squaredNorm();
        const double single = (gain * col - cal.breath_truth).squaredNorm();
        CHECK(fused <= single + 1e-9);
    }
}

TEST_CASE("rank deficiency is reported with the matrix name") {
    CalibrationSet cal = synthetic_set(30, 6);
    cal.breath_estimates.col(2) = 2.0 * cal.breath_estimates.col(0);
    CHECK_THROWS_WITH_AS(fit_weights(cal), doctest::Contains("breath"), NumericalError);

    CalibrationSet heart_bad = synthetic_set(30, 7);
    heart_bad.heart_estimates.col(5) =
        heart_bad.heart_estimates.col(1) + heart_bad.heart_estimates.col(3);
    CHECK_THROWS_WITH_AS(fit_weights(heart_bad), doctest::Contains("heart"),
                         NumericalError);
}

TEST_CASE("apply combines usable estimates and rejects flagged ones") {
    FusionWeights w;
    w.breath << 0.5, 0.25, 0.25;
    w.heart << 0.4, 0.1, 0.1, 0.2, 0.1, 0.1;

    VitalEstimate est;
    est.br_f = {16.0, EstimateFlag::ok};
    est.br_a = {15.0, EstimateFlag::ok};
    est.br_p = {14.0, EstimateFlag::ok};
    est.hr_f = {70.0, EstimateFlag::ok};
    est.hr_a = {72.0, EstimateFlag::ok};
    est.hr_p = {74.0, EstimateFlag::ok};
    est.hr_fc = {71.0, EstimateFlag::ok};
    est.hr_ac = {73.0, EstimateFlag::ok};
    est.hr_pc = {70.5, EstimateFlag::ok};
    est.comb_valid = true;

    apply(w, est);
    CHECK(est.br_fused == doctest::Approx(0.5 * 16 + 0.25 * 15 + 0.25 * 14));
    CHECK(est.hr_fused ==
          doctest::Approx(0.4 * 70 + 0.1 * 72 + 0.1 * 74 + 0.2 * 71 + 0.1 * 73 +
                          0.1 * 70.5));

    SUBCASE("flagged estimate under a nonzero weight throws") {
        VitalEstimate bad = est;
        bad.br_a = {0.0, EstimateFlag::no_signal};
        CHECK_THROWS_AS(apply(w, bad), NumericalError);
    }
    SUBCASE("flagged estimate under a zero weight is tolerated") {
        FusionWeights sparse = w;
        sparse.breath << 0.6, 0.0, 0.4;
        VitalEstimate ok = est;
        ok.br_a = {0.0, EstimateFlag::no_signal};
        apply(sparse, ok);
        CHECK(ok.br_fused == doctest::Approx(0.6 * 16 + 0.4 * 14));
    }
}

TEST_CASE("weights survive a save/load round trip") {
    const CalibrationSet cal = synthetic_set(25, 8, 0.8);
    const FusionWeights w = fit_weights(cal, 0x12345678abcdefULL);
    const std::string dir = testutil::scratch_dir("fusion_io");
    const std::string path = dir + "/weights.txt";
    w.save(path);
    const FusionWeights back = FusionWeights::load(path);
    for (int c = 0; c < 3; ++c)
        CHECK(back.breath(c) == doctest::Approx(w.breath(c)).epsilon(1e-15));
    for (int c = 0; c < 6; ++c)
        CHECK(back.heart(c) == doctest::Approx(w.heart(c)).epsilon(1e-15));
    CHECK(back.training_rows == w.training_rows);
    CHECK(back.config_digest == w.config_digest);
    CHECK(back.breath_residual_norm ==
          doctest::Approx(w.breath_residual_norm).epsilon(1e-15));
}

TEST_CASE("calibration csv round trip") {
    const CalibrationSet cal = synthetic_set(12, 9, 0.5);
    const std::string dir = testutil::scratch_dir("fusion_csv");
    const std::string path = dir + "/cal.csv";
    cal.write_csv(path);
    const CalibrationSet back = CalibrationSet::load_csv(path);
    REQUIRE(back.rows() == cal.rows());
    for (int p = 0; p < cal.rows(); ++p) {
        for (int c = 0; c < 3; ++c)
            CHECK(back.breath_estimates(p, c) == cal.breath_estimates(p, c));
        for (int c = 0; c < 6; ++c)
            CHECK(back.heart_estimates(p, c) == cal.heart_estimates(p, c));
        CHECK(back.breath_truth(p) == cal.breath_truth(p));
        CHECK(back.heart_truth(p) == cal.heart_truth(p));
    }
}

TEST_CASE("cross validation") {
    SUBCASE("noise-free linear data validates to zero error") {
        CalibrationSet cal = synthetic_set(30, 10);
        Eigen::Matrix<double, 6, 1> ch;
        ch << 0.25, 0.15, 0.1, 0.2, 0.2, 0.1;
        plant(cal, Eigen::Vector3d(0.4, 0.35, 0.25), ch);
        const CrossValidationReport report = cross_validate(cal, 5);
        CHECK(report.folds == 5);
        REQUIRE(report.breath_fold_mape.size() == 5);
        CHECK(report.breath_mape < 1e-9);
        CHECK(report.heart_mape < 1e-9);
    }
    SUBCASE("fused beats the best single column on noisy data") {
        const CalibrationSet cal = synthetic_set(60, 11, 1.2);
        const CrossValidationReport report = cross_validate(cal, 5);
        CHECK(report.breath_mape <= report.best_breath_single_mape + 1e-9);
        CHECK(report.heart_mape <= report.best_heart_single_mape + 1e-9);
        REQUIRE(report.breath_single_mape.size() == 3);
        REQUIRE(report.heart_single_mape.size() == 6);
        for (double m : report.breath_single_mape)
            CHECK(report.best_breath_single_mape <= m + 1e-12);
    }
    SUBCASE("two rows per fold is the smallest allowed split") {
        const CalibrationSet cal = synthetic_set(16, 12, 0.3);
        const CrossValidationReport report = cross_validate(cal, 8);
        CHECK(report.folds == 8);
        CHECK(std::isfinite(report.breath_mape));
    }
    SUBCASE("too few rows per fold is rejected") {
        const CalibrationSet cal = synthetic_set(8, 13);
        CHECK_THROWS_AS(cross_validate(cal, 5), InputError);
        CHECK_THROWS_AS(cross_validate(cal, 1), InputError);
    }
}

TEST_CASE("recorded field measurements are internally consistent") {
    const CsvTable table =
        CsvTable::read_file(testutil::data_path("field_measurements.csv"));
    REQUIRE(table.rows.size() == 12);

    auto col = [&](const char* name) {
        Eigen::VectorXd v(12);
        const int c = table.require_column(name);
        for (int p = 0; p < 12; ++p) v(p) = table.cell_double(p, c);
        return v;
    };

    SUBCASE("per-session error percentages match their own columns") {
        const Eigen::VectorXd br = col("br"), br_ref = col("br_ref"), br_err = col("br_err");
        const Eigen::VectorXd hr = col("hr"), hr_ref = col("hr_ref"), hr_err = col("hr_err");
        for (int p = 0; p < 12; ++p) {
            const double be = std::abs(br(p) - br_ref(p)) / br_ref(p) * 100.0;
            const double he = std::abs(hr(p) - hr_ref(p)) / hr_ref(p) * 100.0;
            CHECK(std::abs(be - br_err(p)) < 0.05);
            CHECK(std::abs(he - hr_err(p)) < 0.05);
        }
        CHECK(br_err.mean() == doctest::Approx(2.06).epsilon(0.005));
        CHECK(hr_err.mean() == doctest::Approx(6.57).epsilon(0.005));
        // headline accuracies: 100 - mean error
        CHECK(100.0 - br_err.mean() == doctest::Approx(97.944).epsilon(1e-3));
        CHECK(100.0 - hr_err.mean() == doctest::Approx(93.430).epsilon(1e-3));
    }
    SUBCASE("fused breath column is one linear blend of its estimators") {
        Eigen::MatrixXd a(12, 3);
        a.col(0) = col("br_f");
        a.col(1) = col("br_a");
        a.col(2) = col("br_p");
        const Eigen::VectorXd b = col("br");
        const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
        CHECK((a * c - b).norm() < 0.05);
        // the same blend reproduces the second session's reading
        const Eigen::Vector3d session2(10.01, 9.06, 9.38);
        CHECK(c.dot(session2) == doctest::Approx(9.52).epsilon(0.0025));
    }
    SUBCASE("estimator columns load as a calibration set") {
        const CalibrationSet cal =
            CalibrationSet::load_csv(testutil::data_path("field_measurements.csv"));
        REQUIRE(cal.rows() == 12);
        cal.validate();
        const FusionWeights w = fit_weights(cal);
        CHECK(std::isfinite(w.breath_residual_norm));
        CHECK(std::isfinite(w.heart_residual_norm));
        CHECK(w.training_rows == 12);
    }
}
