// Stage-level benchmarks on the reference 3-subject scene plus a full
// end-to-end run. Shared fixtures are built once and reused.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "vitalradar/activity_map.hpp"
#include "vitalradar/beamform.hpp"
#include "vitalradar/capture.hpp"
#include "vitalradar/estimators.hpp"
#include "vitalradar/phase_pipeline.hpp"
#include "vitalradar/pipeline.hpp"
#include "vitalradar/simulator.hpp"

using namespace vitalradar;

namespace {

RadarConfig config() {
    RadarConfig cfg;
    cfg.validate();
    return cfg;
}

Scene reference_scene() {
    Scene scene;
    Subject a;
    a.range_m = 1.0; a.azimuth_deg = -45.0; a.br_per_min = 12.3; a.hr_per_min = 75.0;
    Subject b = a;
    b.range_m = 1.5; b.azimuth_deg = 0.0; b.br_per_min = 23.4; b.hr_per_min = 96.0;
    Subject c = a;
    c.range_m = 1.2; c.azimuth_deg = 45.0; c.br_per_min = 21.6; c.hr_per_min = 102.0;
    scene.subjects = {a, b, c};
    scene.snr_db = 15.0;
    scene.seed = 7;
    return scene;
}

const DataCube& cached_cube() {
    static const DataCube cube = synthesize_cube(reference_scene(), config(), 0);
    return cube;
}

const RangeSpectra& cached_spectra() {
    static const RangeSpectra spectra = compute_spectra(cached_cube(), config(), 0);
    return spectra;
}

}  // namespace

static void BM_SynthesizeCube(benchmark::State& state) {
    const RadarConfig cfg = config();
    const Scene scene = reference_scene();
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(synthesize_cube(scene, cfg, threads));
}
BENCHMARK(BM_SynthesizeCube)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_ComputeSpectra(benchmark::State& state) {
    const RadarConfig cfg = config();
    const DataCube& cube = cached_cube();
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(compute_spectra(cube, cfg, threads));
}
BENCHMARK(BM_ComputeSpectra)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_BuildActivityMap(benchmark::State& state) {
    const RangeSpectra& spectra = cached_spectra();
    for (auto _ : state) benchmark::DoNotOptimize(build_map(spectra));
}
BENCHMARK(BM_BuildActivityMap)->Unit(benchmark::kMillisecond);

static void BM_BandpassFiltfilt(benchmark::State& state) {
    const RadarConfig cfg = config();
    const RangeSpectra& spectra = cached_spectra();
    const PhaseSignal phase = mean_subtract_unwrap(extract_phase(spectra, 48, 4));
    const double fs = 1.0 / cfg.chirp_interval_s;
    const FirFilter breath = design_bandpass(kBreathBand, fs);
    for (auto _ : state) benchmark::DoNotOptimize(filtfilt(breath, phase.samples));
}
BENCHMARK(BM_BandpassFiltfilt)->Unit(benchmark::kMillisecond);

static void BM_Autocorrelate(benchmark::State& state) {
    std::mt19937 rng(13u);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> x(512);
    for (auto& v : x) v = dist(rng);
    for (auto _ : state) benchmark::DoNotOptimize(autocorrelate(x));
}
BENCHMARK(BM_Autocorrelate)->Unit(benchmark::kMicrosecond);

static void BM_CaptureRoundTrip(benchmark::State& state) {
    const RadarConfig cfg = config();
    const DataCube q = quantize_cube(cached_cube(), 30000.0);
    const CaptureLayout layout = CaptureLayout::parse("canonical");
    for (auto _ : state) {
        const auto bytes = encode_capture(q, layout, cfg);
        benchmark::DoNotOptimize(decode_capture(bytes, layout, cfg));
    }
}
BENCHMARK(BM_CaptureRoundTrip)->Unit(benchmark::kMillisecond);

static void BM_ProcessCube(benchmark::State& state) {
    const RadarConfig cfg = config();
    const DataCube& cube = cached_cube();
    PipelineOptions opt;
    opt.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(process_cube(cube, cfg, opt));
}
BENCHMARK(BM_ProcessCube)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
