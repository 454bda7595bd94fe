#include "vitalradar/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "vitalradar/csv.hpp"
#include "vitalradar/errors.hpp"
#include "vitalradar/kv_file.hpp"

namespace vitalradar {

namespace {

const char* kBreathNames[kBreathColumns] = {"br_f", "br_a", "br_p"};
const char* kHeartNames[kHeartColumns] = {"hr_f", "hr_a", "hr_p",
                                          "hr_fc", "hr_ac", "hr_pc"};

Eigen::VectorXd solve_ls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                         const char* name) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < a.cols())
        throw NumericalError(std::string("fusion: calibration matrix ") + name +
                             " is rank deficient (rank " + std::to_string(qr.rank()) +
                             " of " + std::to_string(a.cols()) +
                             "); estimator columns are linearly dependent");
    return qr.solve(b);
}

double mape_percent(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < truth.size(); ++i)
        acc += std::abs(predicted(i) - truth(i)) / truth(i);
    return 100.0 * acc / static_cast<double>(truth.size());
}

}  // namespace

void CalibrationSet::validate() const {
    const int p = rows();
    if (p == 0) throw InputError("calibration: no rows");
    if (breath_estimates.rows() != p || heart_estimates.rows() != p ||
        heart_truth.size() != p)
        throw InputError("calibration: inconsistent row counts");
    if (breath_estimates.cols() != kBreathColumns ||
        heart_estimates.cols() != kHeartColumns)
        throw InputError("calibration: expected 3 breath and 6 heart columns");
    if (p < kHeartColumns)
        throw InputError("calibration: need at least " + std::to_string(kHeartColumns) +
                         " rows to fit the heart weights, got " + std::to_string(p));
    for (Eigen::Index i = 0; i < p; ++i) {
        if (!(breath_truth(i) > 0) || !(heart_truth(i) > 0))
            throw InputError("calibration: row " + std::to_string(i) +
                             " has a non-positive reference rate");
        if (!breath_estimates.row(i).allFinite() || !heart_estimates.row(i).allFinite())
            throw InputError("calibration: row " + std::to_string(i) +
                             " contains non-finite estimator values");
    }
}

CalibrationSet CalibrationSet::load_csv(const std::string& path) {
    const CsvTable t = CsvTable::read_file(path);
    CalibrationSet cal;
    const int p = static_cast<int>(t.rows.size());
    cal.breath_estimates.resize(p, kBreathColumns);
    cal.heart_estimates.resize(p, kHeartColumns);
    cal.breath_truth.resize(p);
    cal.heart_truth.resize(p);
    int bcol[kBreathColumns], hcol[kHeartColumns];
    for (int c = 0; c < kBreathColumns; ++c) bcol[c] = t.require_column(kBreathNames[c]);
    for (int c = 0; c < kHeartColumns; ++c) hcol[c] = t.require_column(kHeartNames[c]);
    const int br_ref = t.require_column("br_ref");
    const int hr_ref = t.require_column("hr_ref");
    for (int i = 0; i < p; ++i) {
        for (int c = 0; c < kBreathColumns; ++c)
            cal.breath_estimates(i, c) = t.cell_double(i, bcol[c]);
        for (int c = 0; c < kHeartColumns; ++c)
            cal.heart_estimates(i, c) = t.cell_double(i, hcol[c]);
        cal.breath_truth(i) = t.cell_double(i, br_ref);
        cal.heart_truth(i) = t.cell_double(i, hr_ref);
    }
    cal.validate();
    return cal;
}

void CalibrationSet::write_csv(const std::string& path) const {
    CsvTable t;
    t.columns = {"br_f", "br_a", "br_p", "br_ref",
                 "hr_f", "hr_a", "hr_p", "hr_fc", "hr_ac", "hr_pc", "hr_ref"};
    for (int i = 0; i < rows(); ++i) {
        std::vector<std::string> row;
        for (int c = 0; c < kBreathColumns; ++c)
            row.push_back(format_double(breath_estimates(i, c)));
        row.push_back(format_double(breath_truth(i)));
        for (int c = 0; c < kHeartColumns; ++c)
            row.push_back(format_double(heart_estimates(i, c)));
        row.push_back(format_double(heart_truth(i)));
        t.rows.push_back(std::move(row));
    }
    t.write_file(path);
}

FusionWeights fit_weights(const CalibrationSet& cal, std::uint64_t config_digest) {
    cal.validate();
    FusionWeights w;
    w.breath = solve_ls(cal.breath_estimates, cal.breath_truth, "B (breath)");
    w.heart = solve_ls(cal.heart_estimates, cal.heart_truth, "H (heart)");
    w.training_rows = cal.rows();
    w.breath_residual_norm =
        (cal.breath_estimates * w.breath - cal.breath_truth).norm();
    w.heart_residual_norm = (cal.heart_estimates * w.heart - cal.heart_truth).norm();
    w.config_digest = config_digest;
    return w;
}

namespace {

void require_usable(const RateEstimate& e, double weight, const char* name) {
    if (weight != 0.0 && !e.usable())
        throw NumericalError(std::string("fusion: estimate ") + name + " is flagged " +
                             flag_name(e.flag) + " but carries weight " +
                             std::to_string(weight));
}

}  // namespace

double apply_breath(const FusionWeights& w, const VitalEstimate& v) {
    const RateEstimate* e[kBreathColumns] = {&v.br_f, &v.br_a, &v.br_p};
    double acc = 0.0;
    for (int c = 0; c < kBreathColumns; ++c) {
        require_usable(*e[c], w.breath(c), kBreathNames[c]);
        acc += w.breath(c) * e[c]->per_min;
    }
    return acc;
}

double apply_heart(const FusionWeights& w, const VitalEstimate& v) {
    const RateEstimate* e[kHeartColumns] = {&v.hr_f, &v.hr_a, &v.hr_p,
                                            &v.hr_fc, &v.hr_ac, &v.hr_pc};
    double acc = 0.0;
    for (int c = 0; c < kHeartColumns; ++c) {
        require_usable(*e[c], w.heart(c), kHeartNames[c]);
        acc += w.heart(c) * e[c]->per_min;
    }
    return acc;
}

void apply(const FusionWeights& w, VitalEstimate& v) {
    v.br_fused = apply_breath(w, v);
    v.hr_fused = apply_heart(w, v);
}

void FusionWeights::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "version = 1\n";
    out << "config_digest = 0x" << std::hex << config_digest << std::dec << "\n";
    out << "training_rows = " << training_rows << "\n";
    out << "breath_residual_norm = " << format_double(breath_residual_norm) << "\n";
    out << "heart_residual_norm = " << format_double(heart_residual_norm) << "\n";
    for (int c = 0; c < kBreathColumns; ++c)
        out << "c_" << kBreathNames[c] << " = " << format_double(breath(c)) << "\n";
    for (int c = 0; c < kHeartColumns; ++c)
        out << "d_" << kHeartNames[c] << " = " << format_double(heart(c)) << "\n";
    if (!out) throw InputError("failed writing '" + path + "'");
}

FusionWeights FusionWeights::load(const std::string& path) {
    const KvFile kv = KvFile::parse_file(path);
    const long long version = kv.get_int("version");
    if (version != 1)
        throw InputError(path + ": unsupported weights version " + std::to_string(version));
    FusionWeights w;
    w.config_digest = kv.get_u64("config_digest");
    w.training_rows = static_cast<int>(kv.get_int("training_rows", 0));
    w.breath_residual_norm = kv.get_double("breath_residual_norm", 0.0);
    w.heart_residual_norm = kv.get_double("heart_residual_norm", 0.0);
    for (int c = 0; c < kBreathColumns; ++c)
        w.breath(c) = kv.get_double(std::string("c_") + kBreathNames[c]);
    for (int c = 0; c < kHeartColumns; ++c)
        w.heart(c) = kv.get_double(std::string("d_") + kHeartNames[c]);
    return w;
}

CrossValidationReport cross_validate(const CalibrationSet& cal, int folds) {
    cal.validate();
    const int p = cal.rows();
    if (folds < 2) throw InputError("cross_validate: need at least 2 folds");
    if (p < 2 * folds)
        throw InputError("cross_validate: " + std::to_string(p) +
                         " rows are too few for " + std::to_string(folds) + " folds");

    CrossValidationReport report;
    report.folds = folds;

    auto run = [&](const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                   std::vector<double>& fold_mape) {
        const int cols = static_cast<int>(a.cols());
        for (int f = 0; f < folds; ++f) {
            const int lo = p * f / folds;
            const int hi = p * (f + 1) / folds;
            const int test_n = hi - lo;
            const int train_n = p - test_n;
            if (train_n < cols)
                throw InputError("cross_validate: fold leaves too few training rows");
            Eigen::MatrixXd a_train(train_n, cols), a_test(test_n, cols);
            Eigen::VectorXd b_train(train_n), b_test(test_n);
            int r = 0;
            for (int i = 0; i < p; ++i) {
                if (i >= lo && i < hi) continue;
                a_train.row(r) = a.row(i);
                b_train(r++) = b(i);
            }
            a_test = a.middleRows(lo, test_n);
            b_test = b.middleRows(lo, test_n);
            const Eigen::VectorXd w = solve_ls(a_train, b_train, "cross-validation fold");
            fold_mape.push_back(mape_percent(a_test * w, b_test));
        }
    };

    run(cal.breath_estimates, cal.breath_truth, report.breath_fold_mape);
    run(cal.heart_estimates, cal.heart_truth, report.heart_fold_mape);

    auto mean = [](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += x;
        return acc / static_cast<double>(v.size());
    };
    report.breath_mape = mean(report.breath_fold_mape);
    report.heart_mape = mean(report.heart_fold_mape);

    for (int c = 0; c < kBreathColumns; ++c) {
        std::vector<double> fold;
        run(cal.breath_estimates.col(c), cal.breath_truth, fold);
        report.breath_single_mape.push_back(mean(fold));
    }
    for (int c = 0; c < kHeartColumns; ++c) {
        std::vector<double> fold;
        run(cal.heart_estimates.col(c), cal.heart_truth, fold);
        report.heart_single_mape.push_back(mean(fold));
    }
    report.best_breath_single_mape = *std::min_element(report.breath_single_mape.begin(),
                                                       report.breath_single_mape.end());
    report.best_heart_single_mape = *std::min_element(report.heart_single_mape.begin(),
                                                      report.heart_single_mape.end());
    return report;
}

}  // namespace vitalradar
