#pragma once

// Chirp timing, array geometry and the FMCW relations the rest of the kit is
// built on. Everything is SI internally; rates appear in per-minute form only
// at the reporting boundary.

#include <cstdint>
#include <string>
#include <vector>

namespace vitalradar {

namespace constants {
inline constexpr double speed_of_light_m_s = 299792458.0;
}

struct RadarConfig {
    double f_min_hz = 77e9;                   // sweep start frequency
    double chirp_rate_hz_per_s = 29.982e12;   // sweep slope K_c
    double chirp_duration_s = 40e-6;          // fast-time span T_m
    double chirp_interval_s = 50e-3;          // slow-time spacing T_c
    int num_chirps = 512;                     // M slow-time snapshots
    int fast_time_samples = 96;               // N samples per chirp
    double fast_time_sample_rate_hz = 2.4e6;  // fs
    int num_virtual_rx = 8;                   // K array elements
    double element_spacing_m = 0.0;           // 0 -> half of longest wavelength
    std::vector<double> azimuth_grid_deg;     // empty -> -60..60 step 15
    int range_fft_size = 0;                   // 0 -> 4x fast_time_samples

    static std::vector<double> default_azimuth_grid();

    double wavelength_max_m() const;   // c / f_min, longest sweep wavelength
    double spacing_m() const;
    const std::vector<double>& azimuth_grid() const;
    int fft_size() const;
    int num_range_bins() const;        // positive-frequency half
    double slow_time_rate_hz() const;  // 1 / T_c

    double beat_frequency_hz(double range_m) const;     // 2 K_c R / c
    double range_from_beat_m(double beat_hz) const;     // c f_b / (2 K_c)
    double phase_from_range_rad(double range_m) const;  // 4 pi R / lambda_max
    double range_bin_width_m() const;   // c fs / (2 K_c fft_size)
    double unambiguous_range_m() const; // range mapped to fs / 2

    // Throws InputError naming the offending field.
    void validate() const;

    // Stable across runs and platforms; stored in captures and weight files
    // so stale artifacts are caught.
    std::uint64_t digest() const;

    static RadarConfig load(const std::string& path);
};

}  // namespace vitalradar
