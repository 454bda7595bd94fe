#include "vitalradar/pipeline.hpp"

#include "vitalradar/parallel.hpp"

namespace vitalradar {

SubjectRecord measure_subject(const RangeSpectra& spectra,
                              const SubjectDetection& det,
                              const PipelineOptions& opt) {
    SubjectRecord rec;
    rec.detection = det;

    const PhaseSignal wrapped = extract_phase(spectra, det.range_bin, det.azimuth_index);
    const PhaseSignal phase = mean_subtract_unwrap(wrapped);

    const BandSignal breath = bandpass(phase, kBreathBand);
    const BandSignal heart = bandpass(phase, kHeartBand);

    // The comb wants the respiration fundamental; take the spectral breath
    // estimate and fall back to a pass-through when it is unusable.
    const RateEstimate br_f = estimate_fft(breath, 1);
    const BandSignal heart_comb =
        br_f.usable() ? comb_filter(heart, br_f.per_min) : heart;

    rec.estimate = estimate_all(breath, heart, heart_comb);
    if (opt.weights) apply(*opt.weights, rec.estimate);

    if (opt.keep_signals)
        rec.signals = SignalDump{wrapped, phase, breath, heart, heart_comb};
    return rec;
}

PipelineResult process_cube(const DataCube& cube, const RadarConfig& config,
                            const PipelineOptions& opt) {
    const RangeSpectra spectra = compute_spectra(cube, config, opt.threads);

    PipelineResult result;
    result.magnitude_map = combined_magnitude_map(spectra);

    result.activity_map = build_map(spectra, opt.threads);
    const std::vector<SubjectDetection> detections =
        threshold_and_localize(result.activity_map, opt.alpha);

    result.subjects.resize(detections.size());
    parallel_for(detections.size(), opt.threads, [&](std::size_t s) {
        result.subjects[s] = measure_subject(spectra, detections[s], opt);
    });
    return result;
}

}  // namespace vitalradar
