// Command line driver: simulate | process | calibrate | evaluate.
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vitalradar/capture.hpp"
#include "vitalradar/csv.hpp"
#include "vitalradar/errors.hpp"
#include "vitalradar/pipeline.hpp"
#include "vitalradar/simulator.hpp"

namespace {

using namespace vitalradar;

const char* kEstimatorNames[kBreathColumns + kHeartColumns] = {
    "br_f", "br_a", "br_p", "hr_f", "hr_a", "hr_p", "hr_fc", "hr_ac", "hr_pc"};

RadarConfig load_config(const std::string& path) {
    if (path.empty()) {
        RadarConfig cfg;
        cfg.validate();
        return cfg;
    }
    return RadarConfig::load(path);
}

std::string flags_summary(const VitalEstimate& v) {
    const RateEstimate* fields[9] = {&v.br_f, &v.br_a, &v.br_p, &v.hr_f, &v.hr_a,
                                     &v.hr_p, &v.hr_fc, &v.hr_ac, &v.hr_pc};
    std::string out;
    for (int i = 0; i < 9; ++i) {
        if (fields[i]->usable()) continue;
        if (!out.empty()) out += ';';
        out += std::string(kEstimatorNames[i]) + "=" + flag_name(fields[i]->flag);
    }
    if (!v.comb_valid) {
        if (!out.empty()) out += ';';
        out += "comb=passthrough";
    }
    return out;
}

void write_map_csv(const std::string& path, const std::vector<double>& range_axis,
                   const std::vector<double>& azimuth_axis,
                   const std::vector<double>& values) {
    CsvTable t;
    t.columns = {"range_m"};
    for (double az : azimuth_axis) t.columns.push_back("az_" + format_double(az));
    const std::size_t num_az = azimuth_axis.size();
    for (std::size_t bin = 0; bin < range_axis.size(); ++bin) {
        std::vector<std::string> row{format_double(range_axis[bin])};
        for (std::size_t a = 0; a < num_az; ++a)
            row.push_back(format_double(values[bin * num_az + a]));
        t.rows.push_back(std::move(row));
    }
    t.write_file(path);
}

struct SimulateArgs {
    std::string scene_path, config_path, out_path, truth_path;
    std::string layout_text = "canonical";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

int cmd_simulate(const SimulateArgs& a) {
    const RadarConfig config = load_config(a.config_path);
    const CaptureLayout layout = CaptureLayout::parse(a.layout_text);
    if (layout.num_physical_rx * layout.num_tx != config.num_virtual_rx)
        throw InputError("layout rx*tx = " +
                         std::to_string(layout.num_physical_rx * layout.num_tx) +
                         " does not match the configured " +
                         std::to_string(config.num_virtual_rx) + " virtual receivers");

    Scene scene = Scene::load(a.scene_path);
    if (a.seed_set) scene.seed = a.seed;

    const DataCube cube = quantize_cube(synthesize_cube(scene, config, a.threads));
    write_capture(a.out_path, tdm_mux(cube, layout.num_tx), layout, config);

    const std::string truth_path =
        a.truth_path.empty() ? a.out_path + ".truth.csv" : a.truth_path;
    CsvTable t;
    t.columns = {"id", "range_m", "azimuth_deg", "range_bin", "azimuth_index",
                 "br_ref", "hr_ref"};
    for (const GroundTruthEntry& g : ground_truth(scene, config))
        t.rows.push_back({std::to_string(g.subject_index), format_double(g.range_m),
                          format_double(g.azimuth_deg), std::to_string(g.range_bin),
                          std::to_string(g.azimuth_index), format_double(g.br_per_min),
                          format_double(g.hr_per_min)});
    t.write_file(truth_path);

    std::cout << "capture = " << a.out_path << "\n"
              << "truth = " << truth_path << "\n"
              << "subjects = " << scene.subjects.size() << "\n"
              << "seed = " << scene.seed << "\n";
    return 0;
}

struct ProcessArgs {
    std::string capture_path, config_path, weights_path, out_dir = ".";
    std::string layout_text = "canonical";
    double alpha = 0.25;
    bool dump_signals = false;
    int threads = 0;
};

int cmd_process(const ProcessArgs& a) {
    const RadarConfig config = load_config(a.config_path);
    const CaptureLayout layout = CaptureLayout::parse(a.layout_text);

    PipelineOptions opt;
    opt.alpha = a.alpha;
    opt.threads = a.threads;
    opt.keep_signals = a.dump_signals;
    if (!a.weights_path.empty()) {
        FusionWeights w = FusionWeights::load(a.weights_path);
        if (w.config_digest != 0 && w.config_digest != config.digest())
            std::cerr << "warning: weights were calibrated under a different config\n";
        opt.weights = w;
    }

    const DataCube cube =
        tdm_demux(read_capture(a.capture_path, layout, config), layout.num_tx);
    const PipelineResult result = process_cube(cube, config, opt);

    std::filesystem::create_directories(a.out_dir);
    const auto in_dir = [&](const std::string& name) {
        return (std::filesystem::path(a.out_dir) / name).string();
    };

    CsvTable det;
    det.columns = {"id", "range_bin", "azimuth_index", "range_m", "azimuth_deg", "score"};
    for (std::size_t s = 0; s < result.subjects.size(); ++s) {
        const SubjectDetection& d = result.subjects[s].detection;
        det.rows.push_back({std::to_string(s), std::to_string(d.range_bin),
                            std::to_string(d.azimuth_index), format_double(d.range_m),
                            format_double(d.azimuth_deg), format_double(d.score)});
    }
    det.write_file(in_dir("detections.csv"));

    CsvTable est;
    est.columns = {"id", "range_bin", "azimuth_index", "range_m", "azimuth_deg",
                   "br_f", "br_a", "br_p"};
    if (opt.weights) est.columns.push_back("br");
    est.columns.insert(est.columns.end(),
                       {"hr_f", "hr_a", "hr_p", "hr_fc", "hr_ac", "hr_pc"});
    if (opt.weights) est.columns.push_back("hr");
    est.columns.push_back("flags");
    for (std::size_t s = 0; s < result.subjects.size(); ++s) {
        const SubjectDetection& d = result.subjects[s].detection;
        const VitalEstimate& v = result.subjects[s].estimate;
        std::vector<std::string> row{std::to_string(s), std::to_string(d.range_bin),
                                     std::to_string(d.azimuth_index),
                                     format_double(d.range_m),
                                     format_double(d.azimuth_deg)};
        row.push_back(format_double(v.br_f.per_min));
        row.push_back(format_double(v.br_a.per_min));
        row.push_back(format_double(v.br_p.per_min));
        if (opt.weights) row.push_back(format_double(v.br_fused));
        row.push_back(format_double(v.hr_f.per_min));
        row.push_back(format_double(v.hr_a.per_min));
        row.push_back(format_double(v.hr_p.per_min));
        row.push_back(format_double(v.hr_fc.per_min));
        row.push_back(format_double(v.hr_ac.per_min));
        row.push_back(format_double(v.hr_pc.per_min));
        if (opt.weights) row.push_back(format_double(v.hr_fused));
        row.push_back(flags_summary(v));
        est.rows.push_back(std::move(row));
    }
    est.write_file(in_dir("estimates.csv"));

    write_map_csv(in_dir("range_azimuth_map.csv"), result.magnitude_map.range_axis_m,
                  result.magnitude_map.azimuth_axis_deg, result.magnitude_map.values);
    write_map_csv(in_dir("activity_map.csv"), result.activity_map.range_axis_m,
                  result.activity_map.azimuth_axis_deg, result.activity_map.score);

    if (a.dump_signals) {
        for (std::size_t s = 0; s < result.subjects.size(); ++s) {
            const SignalDump& dump = *result.subjects[s].signals;
            CsvTable t;
            t.columns = {"t_s", "wrapped_rad", "phase_rad", "breath_rad",
                         "heart_rad", "heart_comb_rad"};
            for (std::size_t m = 0; m < dump.phase.samples.size(); ++m)
                t.rows.push_back(
                    {format_double(m * dump.phase.sample_interval_s),
                     format_double(dump.wrapped.samples[m]),
                     format_double(dump.phase.samples[m]),
                     format_double(dump.breath.samples[m]),
                     format_double(dump.heart.samples[m]),
                     format_double(dump.heart_comb.samples[m])});
            t.write_file(in_dir("signals_" + std::to_string(s) + ".csv"));
        }
    }

    std::cout << "detections = " << result.subjects.size() << "\n"
              << "threshold = " << format_double(result.activity_map.threshold_used)
              << "\n"
              << "out_dir = " << a.out_dir << "\n";
    return 0;
}

struct CalibrateArgs {
    std::string estimates_path, out_path, config_path;
    int folds = 5;
};

int cmd_calibrate(const CalibrateArgs& a) {
    const CalibrationSet cal = CalibrationSet::load_csv(a.estimates_path);
    std::uint64_t digest = 0;
    if (!a.config_path.empty()) digest = load_config(a.config_path).digest();

    const FusionWeights w = fit_weights(cal, digest);
    w.save(a.out_path);

    std::cout << "rows = " << cal.rows() << "\n";
    for (int c = 0; c < kBreathColumns; ++c)
        std::cout << "c_" << kEstimatorNames[c] << " = " << format_double(w.breath(c))
                  << "\n";
    for (int c = 0; c < kHeartColumns; ++c)
        std::cout << "d_" << kEstimatorNames[kBreathColumns + c] << " = "
                  << format_double(w.heart(c)) << "\n";
    std::cout << "breath_residual_norm = " << format_double(w.breath_residual_norm)
              << "\n"
              << "heart_residual_norm = " << format_double(w.heart_residual_norm)
              << "\n";

    const CrossValidationReport cv = cross_validate(cal, a.folds);
    std::cout << "cv_folds = " << cv.folds << "\n"
              << "cv_br_fused_mape_pct = " << format_double(cv.breath_mape) << "\n";
    for (int c = 0; c < kBreathColumns; ++c)
        std::cout << "cv_" << kEstimatorNames[c]
                  << "_mape_pct = " << format_double(cv.breath_single_mape[c]) << "\n";
    std::cout << "cv_br_best_single_pct = " << format_double(cv.best_breath_single_mape)
              << "\n"
              << "cv_hr_fused_mape_pct = " << format_double(cv.heart_mape) << "\n";
    for (int c = 0; c < kHeartColumns; ++c)
        std::cout << "cv_" << kEstimatorNames[kBreathColumns + c]
                  << "_mape_pct = " << format_double(cv.heart_single_mape[c]) << "\n";
    std::cout << "cv_hr_best_single_pct = " << format_double(cv.best_heart_single_mape)
              << "\n"
              << "weights = " << a.out_path << "\n";
    return 0;
}

struct EvaluateArgs {
    std::string estimates_path, truth_path, out_path;
};

int cmd_evaluate(const EvaluateArgs& a) {
    const CsvTable est = CsvTable::read_file(a.estimates_path);
    const CsvTable truth = CsvTable::read_file(a.truth_path);
    const int est_id = est.require_column("id");
    const int est_br = est.require_column("br");
    const int est_hr = est.require_column("hr");
    const int tr_id = truth.require_column("id");
    const int tr_br = truth.require_column("br_ref");
    const int tr_hr = truth.require_column("hr_ref");

    std::map<std::string, std::size_t> truth_by_id;
    for (std::size_t r = 0; r < truth.rows.size(); ++r) {
        if (!truth_by_id.emplace(truth.cell(r, tr_id), r).second)
            throw InputError(a.truth_path + ": duplicate id '" + truth.cell(r, tr_id) +
                             "'");
    }

    CsvTable report;
    report.columns = {"id", "br", "br_ref", "br_error_pct",
                      "hr", "hr_ref", "hr_error_pct"};
    std::vector<std::string> unmatched;
    std::set<std::string> seen;
    double br_err_sum = 0.0, hr_err_sum = 0.0;
    for (std::size_t r = 0; r < est.rows.size(); ++r) {
        const std::string id = est.cell(r, est_id);
        if (!seen.insert(id).second)
            throw InputError(a.estimates_path + ": duplicate id '" + id + "'");
        auto it = truth_by_id.find(id);
        if (it == truth_by_id.end()) {
            unmatched.push_back("estimate id '" + id + "' has no truth row");
            continue;
        }
        const double br = est.cell_double(r, est_br);
        const double hr = est.cell_double(r, est_hr);
        const double br_ref = truth.cell_double(it->second, tr_br);
        const double hr_ref = truth.cell_double(it->second, tr_hr);
        if (br_ref <= 0 || hr_ref <= 0)
            throw InputError(a.truth_path + ": id '" + id +
                             "' has a non-positive reference rate");
        const double br_err = std::abs(br - br_ref) / br_ref * 100.0;
        const double hr_err = std::abs(hr - hr_ref) / hr_ref * 100.0;
        br_err_sum += br_err;
        hr_err_sum += hr_err;
        report.rows.push_back({id, format_double(br), format_double(br_ref),
                               format_double(br_err), format_double(hr),
                               format_double(hr_ref), format_double(hr_err)});
    }
    for (const auto& [id, r] : truth_by_id)
        if (!seen.count(id)) unmatched.push_back("truth id '" + id + "' was not estimated");
    if (!unmatched.empty()) {
        std::string msg = "evaluate: unmatched rows:";
        for (const std::string& u : unmatched) msg += "\n  " + u;
        throw InputError(msg);
    }
    if (report.rows.empty()) throw InputError("evaluate: no rows to compare");

    const double n = static_cast<double>(report.rows.size());
    const double br_mean = br_err_sum / n;
    const double hr_mean = hr_err_sum / n;

    std::cout << report.to_string();
    std::cout << "rows = " << report.rows.size() << "\n"
              << "mean_br_error_pct = " << format_double(br_mean) << "\n"
              << "mean_hr_error_pct = " << format_double(hr_mean) << "\n"
              << "br_accuracy_pct = " << format_double(100.0 - br_mean) << "\n"
              << "hr_accuracy_pct = " << format_double(100.0 - hr_mean) << "\n";
    if (!a.out_path.empty()) report.write_file(a.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FMCW radar vital sign pipeline"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Synthesize a capture file and ground truth from a scene");
    simulate->add_option("--scene", sim.scene_path, "scene description file")
        ->required();
    simulate->add_option("--config", sim.config_path, "radar config file");
    simulate->add_option("--out", sim.out_path, "capture output path")->required();
    simulate->add_option("--truth", sim.truth_path,
                         "ground truth CSV path (default <out>.truth.csv)");
    simulate->add_option("--layout", sim.layout_text, "capture layout");
    CLI::Option* seed_opt =
        simulate->add_option("--seed", sim.seed, "override the scene noise seed");
    simulate->add_option("--threads", sim.threads, "worker threads (0 = all)");

    ProcessArgs proc;
    CLI::App* process = app.add_subcommand(
        "process", "Detect subjects in a capture and estimate their vitals");
    process->add_option("capture", proc.capture_path, "capture file")->required();
    process->add_option("--config", proc.config_path, "radar config file");
    process->add_option("--layout", proc.layout_text, "capture layout");
    process->add_option("--weights", proc.weights_path, "fusion weights file");
    process->add_option("--out-dir", proc.out_dir, "output directory");
    process->add_option("--alpha", proc.alpha, "activity threshold (fraction of peak)");
    process->add_flag("--dump-signals", proc.dump_signals,
                      "write per-subject signal CSVs");
    process->add_option("--threads", proc.threads, "worker threads (0 = all)");

    CalibrateArgs cal;
    CLI::App* calibrate = app.add_subcommand(
        "calibrate", "Fit fusion weights from an estimates+truth CSV");
    calibrate->add_option("estimates", cal.estimates_path, "calibration CSV")
        ->required();
    calibrate->add_option("--out", cal.out_path, "weights output path")->required();
    calibrate->add_option("--config", cal.config_path,
                          "radar config to stamp into the weights file");
    calibrate->add_option("--folds", cal.folds, "cross-validation folds");

    EvaluateArgs ev;
    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "Score an estimates CSV against reference rates");
    evaluate->add_option("estimates", ev.estimates_path, "estimates CSV (id, br, hr)")
        ->required();
    evaluate->add_option("truth", ev.truth_path, "truth CSV (id, br_ref, hr_ref)")
        ->required();
    evaluate->add_option("--out", ev.out_path, "per-row report CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        sim.seed_set = seed_opt->count() > 0;
        if (app.got_subcommand(simulate)) return cmd_simulate(sim);
        if (app.got_subcommand(process)) return cmd_process(proc);
        if (app.got_subcommand(calibrate)) return cmd_calibrate(cal);
        return cmd_evaluate(ev);
    } catch (const InputError& e) {
        std::cerr << "error: input: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "error: numerical: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
}
