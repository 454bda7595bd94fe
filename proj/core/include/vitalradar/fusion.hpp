#pragma once

// Least-squares fusion: learn one weight per estimator column against
// reference rates, then combine estimator outputs linearly (no intercept).

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "vitalradar/estimators.hpp"

namespace vitalradar {

// Column order everywhere: breath (br_f, br_a, br_p),
// heart (hr_f, hr_a, hr_p, hr_fc, hr_ac, hr_pc).
inline constexpr int kBreathColumns = 3;
inline constexpr int kHeartColumns = 6;

struct CalibrationSet {
    Eigen::MatrixXd breath_estimates;  // P x 3
    Eigen::MatrixXd heart_estimates;   // P x 6
    Eigen::VectorXd breath_truth;      // P
    Eigen::VectorXd heart_truth;       // P

    int rows() const { return static_cast<int>(breath_truth.size()); }
    void validate() const;
    static CalibrationSet load_csv(const std::string& path);
    void write_csv(const std::string& path) const;
};

struct FusionWeights {
    Eigen::Vector3d breath = Eigen::Vector3d::Zero();
    Eigen::Matrix<double, kHeartColumns, 1> heart =
        Eigen::Matrix<double, kHeartColumns, 1>::Zero();
    int training_rows = 0;
    double breath_residual_norm = 0.0;
    double heart_residual_norm = 0.0;
    std::uint64_t config_digest = 0;

    void save(const std::string& path) const;
    static FusionWeights load(const std::string& path);
};

// Solved by column-pivoted QR; NumericalError naming the offending matrix on
// rank deficiency. The normal-equations solution agrees to 1e-8 by
// construction (asserted in tests, not recomputed here).
FusionWeights fit_weights(const CalibrationSet&, std::uint64_t config_digest = 0);

double apply_breath(const FusionWeights&, const VitalEstimate&);
double apply_heart(const FusionWeights&, const VitalEstimate&);
// Sets br_fused / hr_fused. Throws NumericalError when a flagged estimate
// meets a nonzero weight.
void apply(const FusionWeights&, VitalEstimate&);

struct CrossValidationReport {
    int folds = 0;
    std::vector<double> breath_fold_mape;  // percent, one per fold
    std::vector<double> heart_fold_mape;
    double breath_mape = 0.0;  // means over folds
    double heart_mape = 0.0;
    // same protocol fitting a single scaled column at a time
    std::vector<double> breath_single_mape;  // 3
    std::vector<double> heart_single_mape;   // 6
    double best_breath_single_mape = 0.0;
    double best_heart_single_mape = 0.0;
};

CrossValidationReport cross_validate(const CalibrationSet&, int folds);

}  // namespace vitalradar
