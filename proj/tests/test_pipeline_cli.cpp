#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "vitalradar/capture.hpp"
#include "vitalradar/csv.hpp"
#include "vitalradar/pipeline.hpp"
#include "vitalradar/simulator.hpp"
#include "test_util.hpp"

using namespace vitalradar;
namespace fs = std::filesystem;

namespace {

Scene reference_scene() {
    Scene scene;
    scene.subjects.push_back(testutil::subject(1.0, 0.0, 15.0, 72.0));
    return scene;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("pipeline finds and measures a noiseless subject") {
    const RadarConfig cfg = testutil::default_config();
    const Scene scene = reference_scene();
    const DataCube cube = synthesize_cube(scene, cfg);

    PipelineOptions opt;
    opt.keep_signals = true;
    const PipelineResult result = process_cube(cube, cfg, opt);

    REQUIRE(result.subjects.size() == 1);
    const auto& rec = result.subjects[0];
    const auto gt = ground_truth(scene, cfg);
    CHECK(rec.detection.range_bin == gt[0].range_bin);
    CHECK(rec.detection.azimuth_index == gt[0].azimuth_index);

    CHECK(rec.estimate.br_f.usable());
    CHECK(std::abs(rec.estimate.br_f.per_min - 15.0) < 0.5);
    CHECK(std::abs(rec.estimate.br_a.per_min - 15.0) < 1.0);
    CHECK(rec.estimate.hr_f.usable());
    CHECK(std::abs(rec.estimate.hr_fc.per_min - 72.0) < 1.0);
    CHECK(rec.estimate.comb_valid);

    REQUIRE(rec.signals.has_value());
    CHECK(rec.signals->phase.samples.size() == std::size_t(cfg.num_chirps));
    CHECK(rec.signals->breath.samples.size() == std::size_t(cfg.num_chirps));
    CHECK(rec.signals->heart_comb.comb_applied);

    SUBCASE("fused fields appear only with weights") {
        CHECK(std::isnan(rec.estimate.br_fused));
        FusionWeights w;
        w.breath << 1.0, 0.0, 0.0;
        w.heart << 0.0, 0.0, 0.0, 1.0, 0.0, 0.0;
        PipelineOptions with = opt;
        with.weights = w;
        const PipelineResult fused = process_cube(cube, cfg, with);
        REQUIRE(fused.subjects.size() == 1);
        CHECK(fused.subjects[0].estimate.br_fused ==
              doctest::Approx(fused.subjects[0].estimate.br_f.per_min));
        CHECK(fused.subjects[0].estimate.hr_fused ==
              doctest::Approx(fused.subjects[0].estimate.hr_fc.per_min));
    }
}

TEST_CASE("pipeline output does not depend on the thread count") {
    RadarConfig cfg = testutil::default_config();
    cfg.num_chirps = 128;
    Scene scene;
    scene.subjects.push_back(testutil::subject(1.0, -15.0, 18.0, 90.0));
    scene.subjects.push_back(testutil::subject(1.6, 30.0, 24.0, 66.0));
    scene.snr_db = 20.0;
    scene.seed = 5;
    const DataCube cube = synthesize_cube(scene, cfg);

    PipelineOptions one, many;
    one.threads = 1;
    many.threads = 4;
    const PipelineResult a = process_cube(cube, cfg, one);
    const PipelineResult b = process_cube(cube, cfg, many);

    REQUIRE(a.subjects.size() == b.subjects.size());
    for (std::size_t s = 0; s < a.subjects.size(); ++s) {
        CHECK(a.subjects[s].detection.range_bin == b.subjects[s].detection.range_bin);
        CHECK(a.subjects[s].estimate.br_f.per_min == b.subjects[s].estimate.br_f.per_min);
        CHECK(a.subjects[s].estimate.hr_fc.per_min ==
              b.subjects[s].estimate.hr_fc.per_min);
        CHECK(a.subjects[s].estimate.br_p.per_min == b.subjects[s].estimate.br_p.per_min);
    }
    for (std::size_t k = 0; k < a.activity_map.score.size(); ++k)
        CHECK(a.activity_map.score[k] == b.activity_map.score[k]);
}

TEST_CASE("cli simulate writes a deterministic capture with truth") {
    const std::string dir = testutil::scratch_dir("cli_sim");
    {
        std::ofstream scn(dir + "/scene.scn");
        scn << "snr_db = 18\nseed = 11\n";
        for (int s = 0; s < 3; ++s)
            scn << "subject." << s << ".range_m = " << 1.0 + 0.4 * s << "\n"
                << "subject." << s << ".azimuth_deg = " << -45 + 45 * s << "\n"
                << "subject." << s << ".br_per_min = " << 12 + 5 * s << "\n"
                << "subject." << s << ".hr_per_min = " << 65 + 12 * s << "\n";
    }

    const auto r1 = testutil::run_tool(
        "simulate --scene scene.scn --out cap_a.bin --truth truth.csv", dir);
    REQUIRE(r1.exit_code == 0);
    CHECK(testutil::kv_value(r1.out, "subjects") == 3);
    CHECK(testutil::kv_value(r1.out, "seed") == 11);

    const auto r2 =
        testutil::run_tool("simulate --scene scene.scn --out cap_b.bin", dir);
    REQUIRE(r2.exit_code == 0);
    CHECK(read_file(dir + "/cap_a.bin") == read_file(dir + "/cap_b.bin"));

    const auto r3 = testutil::run_tool(
        "simulate --scene scene.scn --out cap_c.bin --seed 12", dir);
    REQUIRE(r3.exit_code == 0);
    CHECK(read_file(dir + "/cap_a.bin") != read_file(dir + "/cap_c.bin"));

    const CsvTable truth = CsvTable::read_file(dir + "/truth.csv");
    REQUIRE(truth.rows.size() == 3);
    CHECK(truth.require_column("br_ref") >= 0);
    CHECK(truth.require_column("range_bin") >= 0);

    SUBCASE("process recovers the three subjects") {
        const auto rp = testutil::run_tool("process cap_a.bin --out-dir out", dir);
        REQUIRE(rp.exit_code == 0);
        CHECK(testutil::kv_value(rp.out, "detections") == 3);

        const CsvTable est = CsvTable::read_file(dir + "/out/estimates.csv");
        REQUIRE(est.rows.size() == 3);
        CHECK(est.column_index("br") == -1);  // no weights, no fused columns
        CHECK(est.column_index("hr") == -1);
        CHECK(est.require_column("br_f") >= 0);
        CHECK(est.require_column("hr_pc") >= 0);

        // bins line up with the truth file modulo detection order
        const CsvTable det = CsvTable::read_file(dir + "/out/detections.csv");
        REQUIRE(det.rows.size() == 3);
        const int db = det.require_column("range_bin");
        const int tb = truth.require_column("range_bin");
        std::vector<int> got, want;
        for (int r = 0; r < 3; ++r) {
            got.push_back(int(det.cell_double(r, db)));
            want.push_back(int(truth.cell_double(r, tb)));
        }
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        CHECK(got == want);
    }
    SUBCASE("dump-signals writes one file per detection") {
        const auto rp = testutil::run_tool(
            "process cap_a.bin --out-dir dumped --dump-signals", dir);
        REQUIRE(rp.exit_code == 0);
        for (int s = 0; s < 3; ++s) {
            const std::string path = dir + "/dumped/signals_" + std::to_string(s) + ".csv";
            REQUIRE(fs::exists(path));
            const CsvTable sig = CsvTable::read_file(path);
            CHECK(sig.rows.size() == 512);
            CHECK(sig.require_column("heart_comb_rad") >= 0);
        }
    }
}

TEST_CASE("cli handles the empty scene") {
    const std::string dir = testutil::scratch_dir("cli_empty");
    {
        std::ofstream scn(dir + "/empty.scn");
        scn << "snr_db = 20\nseed = 3\n";
    }
    const auto r = testutil::run_tool(
        "simulate --scene empty.scn --out noise.bin --truth truth.csv", dir);
    REQUIRE(r.exit_code == 0);
    CHECK(testutil::kv_value(r.out, "subjects") == 0);
    CHECK(fs::file_size(dir + "/noise.bin") > 32);

    const auto rp = testutil::run_tool("process noise.bin --out-dir out", dir);
    REQUIRE(rp.exit_code == 0);
}

TEST_CASE("cli exit codes") {
    const std::string dir = testutil::scratch_dir("cli_codes");

    SUBCASE("help exits cleanly") {
        CHECK(testutil::run_tool("--help", dir).exit_code == 0);
    }
    SUBCASE("missing scene file is an input error") {
        const auto r =
            testutil::run_tool("simulate --scene nope.scn --out x.bin", dir);
        CHECK(r.exit_code == 2);
        CHECK(r.out.find("error: input:") != std::string::npos);
    }
    SUBCASE("unreadable capture is an input error") {
        std::ofstream(dir + "/garbage.bin") << "not a capture";
        const auto r = testutil::run_tool("process garbage.bin --out-dir o", dir);
        CHECK(r.exit_code == 2);
    }
    SUBCASE("bad layout text is an input error") {
        std::ofstream(dir + "/s.scn") << "seed = 1\n";
        const auto r = testutil::run_tool(
            "simulate --scene s.scn --out x.bin --layout iq=sideways", dir);
        CHECK(r.exit_code == 2);
    }
    SUBCASE("invalid alpha is an input error") {
        std::ofstream(dir + "/s2.scn") << "seed = 1\n";
        auto r = testutil::run_tool("simulate --scene s2.scn --out c.bin", dir);
        REQUIRE(r.exit_code == 0);
        r = testutil::run_tool("process c.bin --out-dir o --alpha 1.5", dir);
        CHECK(r.exit_code == 2);
    }
    SUBCASE("rank-deficient calibration is a numerical error") {
        CsvTable cal;
        cal.columns = {"br_f", "br_a", "br_p", "br_ref",
                       "hr_f", "hr_a", "hr_p", "hr_fc", "hr_ac", "hr_pc", "hr_ref"};
        for (int p = 0; p < 8; ++p) {
            const double b = 12.0 + p;
            const double h = 60.0 + 3 * p;
            cal.rows.push_back({format_double(b), format_double(2 * b),
                                format_double(4 * b), format_double(b),
                                format_double(h), format_double(h + 0.5 * p),
                                format_double(h - 0.3 * p), format_double(h + 0.1),
                                format_double(h * 1.01), format_double(h * 0.99),
                                format_double(h)});
        }
        cal.write_file(dir + "/degenerate.csv");
        const auto r = testutil::run_tool(
            "calibrate degenerate.csv --out w.txt --folds 2", dir);
        CHECK(r.exit_code == 3);
        CHECK(r.out.find("error: numerical:") != std::string::npos);
        CHECK(r.out.find("rank deficient") != std::string::npos);
    }
}

TEST_CASE("cli evaluate against matching truth reports zero error") {
    const std::string dir = testutil::scratch_dir("cli_eval");
    {
        CsvTable est;
        est.columns = {"id", "br", "hr"};
        est.rows = {{"0", "15.2", "71.4"}, {"1", "22.8", "96.1"}};
        est.write_file(dir + "/est.csv");
        CsvTable truth;
        truth.columns = {"id", "br_ref", "hr_ref"};
        truth.rows = {{"0", "15.2", "71.4"}, {"1", "22.8", "96.1"}};
        truth.write_file(dir + "/truth.csv");
    }
    const auto r = testutil::run_tool("evaluate est.csv truth.csv --out report.csv", dir);
    REQUIRE(r.exit_code == 0);
    CHECK(testutil::kv_value(r.out, "rows") == 2);
    CHECK(testutil::kv_value(r.out, "mean_br_error_pct") == 0.0);
    CHECK(testutil::kv_value(r.out, "br_accuracy_pct") == 100.0);
    CHECK(testutil::kv_value(r.out, "hr_accuracy_pct") == 100.0);
    CHECK(fs::exists(dir + "/report.csv"));

    SUBCASE("asymmetric rows are reported as one input error") {
        CsvTable extra;
        extra.columns = {"id", "br", "hr"};
        extra.rows = {{"0", "15.2", "71.4"}, {"7", "10", "60"}};
        extra.write_file(dir + "/extra.csv");
        const auto bad = testutil::run_tool("evaluate extra.csv truth.csv", dir);
        CHECK(bad.exit_code == 2);
        CHECK(bad.out.find("unmatched") != std::string::npos);
        CHECK(bad.out.find("id '7'") != std::string::npos);
        CHECK(bad.out.find("id '1'") != std::string::npos);
    }
}
