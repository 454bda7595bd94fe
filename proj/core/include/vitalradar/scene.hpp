#pragma once

// Scene description for the synthetic IF generator: breathing subjects plus
// static clutter, with an optional white-noise floor.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "vitalradar/radar_config.hpp"

namespace vitalradar {

struct Subject {
    double range_m = 1.0;
    double azimuth_deg = 0.0;
    double br_per_min = 15.0;
    double hr_per_min = 72.0;
    double breath_amp_m = 4e-3;
    double heart_amp_m = 2e-4;
    double breath_phase_rad = 0.0;
    double heart_phase_rad = 0.0;
    double reflectivity = 1.0;
    // Relative amplitudes of the 2nd, 3rd, ... breathing harmonics. Default
    // none: a plain sinusoid has no harmonics, which keeps oracles simple.
    std::vector<double> breath_harmonics;

    void validate(std::size_t index) const;
};

struct ClutterObject {
    double range_m = 1.0;
    double azimuth_deg = 0.0;
    double reflectivity = 1.0;

    void validate(std::size_t index) const;
};

struct Scene {
    std::vector<Subject> subjects;
    std::vector<ClutterObject> clutter;
    // Per-sample SNR of the strongest reflector; +inf disables noise.
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    bool path_loss = false;  // weight reflector amplitude by 1/R^2

    void validate() const;
    static Scene load(const std::string& path);
};

struct GroundTruthEntry {
    int subject_index = 0;
    double range_m = 0.0;
    double azimuth_deg = 0.0;
    int range_bin = 0;       // round(R / range_bin_width)
    int azimuth_index = 0;   // nearest azimuth grid entry
    double br_per_min = 0.0;
    double hr_per_min = 0.0;
};

std::vector<GroundTruthEntry> ground_truth(const Scene&, const RadarConfig&);

}  // namespace vitalradar
