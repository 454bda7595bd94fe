#pragma once

// End-to-end processing of one data cube: beamformed range spectra, activity
// map, per-detection phase extraction, band split, comb, and the nine rate
// estimates (plus fused rates when weights are supplied).

#include <optional>
#include <vector>

#include "vitalradar/activity_map.hpp"
#include "vitalradar/data_cube.hpp"
#include "vitalradar/estimators.hpp"
#include "vitalradar/fusion.hpp"

namespace vitalradar {

struct PipelineOptions {
    double alpha = 0.25;  // activity threshold, fraction of map peak
    int threads = 0;      // 0 = all hardware threads
    bool keep_signals = false;
    std::optional<FusionWeights> weights;
};

struct SignalDump {
    PhaseSignal wrapped;    // raw arg of the slow-time series
    PhaseSignal phase;      // unwrapped, mean-removed
    BandSignal breath;
    BandSignal heart;
    BandSignal heart_comb;
};

struct SubjectRecord {
    SubjectDetection detection;
    VitalEstimate estimate;
    std::optional<SignalDump> signals;  // present when keep_signals
};

struct PipelineResult {
    RangeAzimuthMap magnitude_map;
    VitalActivityMap activity_map;
    std::vector<SubjectRecord> subjects;  // sorted by activity score desc
};

// Runs the measurement chain for every detected subject. A detection whose
// spectral breath estimate is unusable still gets all nine estimates, but the
// comb stage degrades to a pass-through and comb_valid turns false.
PipelineResult process_cube(const DataCube&, const RadarConfig&,
                            const PipelineOptions& = {});

// The per-detection tail of process_cube, exposed for calibration runs that
// already hold spectra.
SubjectRecord measure_subject(const RangeSpectra&, const SubjectDetection&,
                              const PipelineOptions&);

}  // namespace vitalradar
