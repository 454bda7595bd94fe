#pragma once

// Vital activity localization: score every range-azimuth bin by how much
// coherent slow-time phase motion it carries, threshold relative to the map
// peak, and reduce 8-connected clusters to their peak bins.

#include <utility>
#include <vector>

#include "vitalradar/beamform.hpp"

namespace vitalradar {

struct VitalActivityMap {
    int num_bins = 0;
    int num_azimuths = 0;
    std::vector<double> range_axis_m;
    std::vector<double> azimuth_axis_deg;
    std::vector<double> score;  // bin * num_azimuths + az
    double threshold_used = 0.0;
    std::vector<std::pair<int, int>> surviving_bins;  // (bin, az), filled by localize

    double at(int bin, int az) const {
        return score[static_cast<std::size_t>(bin) * num_azimuths + az];
    }
    double& at(int bin, int az) {
        return score[static_cast<std::size_t>(bin) * num_azimuths + az];
    }
};

struct SubjectDetection {
    int range_bin = 0;
    int azimuth_index = 0;
    double range_m = 0.0;
    double azimuth_deg = 0.0;
    double score = 0.0;
};

// Phase variability of one slow-time series: variance of the unwrapped,
// mean-removed phase while the differenced phase carries a dominant spectral
// line (coherent oscillatory motion), otherwise the variance of the wrapped,
// mean-removed phase. The wrapped branch bounds incoherent noise near pi^2/3
// instead of letting its unwrapped random walk grow with the dwell length.
double phase_variability(const std::complex<double>* slow_time, int num_chirps);

// mean |Y| over chirps x phase_variability. Requires num_chirps >= 8.
double activity_score(const RangeSpectra&, int bin, int az);

VitalActivityMap build_map(const RangeSpectra&, int threads = 0);

// Keep bins scoring >= alpha * max, cluster 8-connected survivors, emit each
// cluster's peak. Detections sorted by score descending. An all-zero map
// yields no detections. Updates threshold_used and surviving_bins.
std::vector<SubjectDetection> threshold_and_localize(VitalActivityMap&, double alpha = 0.25);

}  // namespace vitalradar
