#include "vitalradar/radar_config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "vitalradar/errors.hpp"
#include "vitalradar/kv_file.hpp"

namespace vitalradar {

using constants::speed_of_light_m_s;

std::vector<double> RadarConfig::default_azimuth_grid() {
    std::vector<double> grid;
    for (double a = -60.0; a <= 60.0 + 1e-9; a += 15.0) grid.push_back(a);
    return grid;
}

double RadarConfig::wavelength_max_m() const { return speed_of_light_m_s / f_min_hz; }

double RadarConfig::spacing_m() const {
    return element_spacing_m > 0.0 ? element_spacing_m : 0.5 * wavelength_max_m();
}

const std::vector<double>& RadarConfig::azimuth_grid() const {
    static const std::vector<double> fallback = default_azimuth_grid();
    return azimuth_grid_deg.empty() ? fallback : azimuth_grid_deg;
}

int RadarConfig::fft_size() const {
    return range_fft_size > 0 ? range_fft_size : 4 * fast_time_samples;
}

int RadarConfig::num_range_bins() const { return fft_size() / 2; }

double RadarConfig::slow_time_rate_hz() const { return 1.0 / chirp_interval_s; }

double RadarConfig::beat_frequency_hz(double range_m) const {
    return 2.0 * chirp_rate_hz_per_s * range_m / speed_of_light_m_s;
}

double RadarConfig::range_from_beat_m(double beat_hz) const {
    if (beat_hz < 0)
        throw InputError("range_from_beat: negative beat frequency " +
                         std::to_string(beat_hz));
    return speed_of_light_m_s * beat_hz / (2.0 * chirp_rate_hz_per_s);
}

double RadarConfig::phase_from_range_rad(double range_m) const {
    if (range_m < 0)
        throw InputError("phase_from_range: negative range " + std::to_string(range_m));
    return 4.0 * M_PI * range_m / wavelength_max_m();
}

double RadarConfig::range_bin_width_m() const {
    return speed_of_light_m_s * fast_time_sample_rate_hz /
           (2.0 * chirp_rate_hz_per_s * fft_size());
}

double RadarConfig::unambiguous_range_m() const {
    return range_from_beat_m(0.5 * fast_time_sample_rate_hz);
}

void RadarConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw InputError("radar config: " + field + " " + why);
    };
    if (!(f_min_hz > 0)) fail("f_min_hz", "must be positive");
    if (!(chirp_rate_hz_per_s > 0)) fail("chirp_rate_hz_per_s", "must be positive");
    if (!(chirp_duration_s > 0)) fail("chirp_duration_s", "must be positive");
    if (!(chirp_interval_s > 0)) fail("chirp_interval_s", "must be positive");
    if (chirp_duration_s > chirp_interval_s)
        fail("chirp_duration_s", "cannot exceed chirp_interval_s");
    if (num_chirps < 8) fail("num_chirps", "must be at least 8");
    if (fast_time_samples < 8) fail("fast_time_samples", "must be at least 8");
    if (!(fast_time_sample_rate_hz > 0))
        fail("fast_time_sample_rate_hz", "must be positive");
    if (fast_time_samples > fast_time_sample_rate_hz * chirp_duration_s + 1e-9)
        fail("fast_time_samples", "do not fit inside chirp_duration_s at the sample rate");
    if (num_virtual_rx < 1) fail("num_virtual_rx", "must be at least 1");
    if (element_spacing_m < 0) fail("element_spacing_m", "must be non-negative");
    if (fft_size() < fast_time_samples)
        fail("range_fft_size", "must be at least fast_time_samples");
    if (fft_size() % 2 != 0) fail("range_fft_size", "must be even");
    const auto& grid = azimuth_grid();
    if (grid.empty()) fail("azimuth_grid_deg", "must not be empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < -90.0 || grid[i] > 90.0)
            fail("azimuth_grid_deg", "entries must lie in [-90, 90]");
        if (i > 0 && grid[i] <= grid[i - 1])
            fail("azimuth_grid_deg", "must be strictly increasing");
    }
}

std::uint64_t RadarConfig::digest() const {
    // FNV-1a over a canonical text rendering
    std::ostringstream canon;
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g;", v);
        canon << buf;
    };
    put(f_min_hz);
    put(chirp_rate_hz_per_s);
    put(chirp_duration_s);
    put(chirp_interval_s);
    canon << num_chirps << ';' << fast_time_samples << ';';
    put(fast_time_sample_rate_hz);
    canon << num_virtual_rx << ';';
    put(spacing_m());
    for (double a : azimuth_grid()) put(a);
    canon << fft_size() << ';';
    const std::string s = canon.str();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

RadarConfig RadarConfig::load(const std::string& path) {
    KvFile kv = KvFile::parse_file(path);
    RadarConfig cfg;
    cfg.f_min_hz = kv.get_double("f_min_hz", cfg.f_min_hz);
    cfg.chirp_rate_hz_per_s = kv.get_double("chirp_rate_hz_per_s", cfg.chirp_rate_hz_per_s);
    cfg.chirp_duration_s = kv.get_double("chirp_duration_s", cfg.chirp_duration_s);
    cfg.chirp_interval_s = kv.get_double("chirp_interval_s", cfg.chirp_interval_s);
    cfg.num_chirps = static_cast<int>(kv.get_int("num_chirps", cfg.num_chirps));
    cfg.fast_time_samples =
        static_cast<int>(kv.get_int("fast_time_samples", cfg.fast_time_samples));
    cfg.fast_time_sample_rate_hz =
        kv.get_double("fast_time_sample_rate_hz", cfg.fast_time_sample_rate_hz);
    cfg.num_virtual_rx = static_cast<int>(kv.get_int("num_virtual_rx", cfg.num_virtual_rx));
    cfg.element_spacing_m = kv.get_double("element_spacing_m", cfg.element_spacing_m);
    if (kv.has("azimuth_grid_deg"))
        cfg.azimuth_grid_deg = kv.get_double_list("azimuth_grid_deg");
    cfg.range_fft_size = static_cast<int>(kv.get_int("range_fft_size", cfg.range_fft_size));
    for (const auto& [key, value] : kv.entries()) {
        (void)value;
        static const char* known[] = {
            "f_min_hz",        "chirp_rate_hz_per_s",      "chirp_duration_s",
            "chirp_interval_s", "num_chirps",              "fast_time_samples",
            "fast_time_sample_rate_hz", "num_virtual_rx",  "element_spacing_m",
            "azimuth_grid_deg", "range_fft_size"};
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw InputError(kv.where(key) + ": unknown radar config key");
    }
    cfg.validate();
    return cfg;
}

}  // namespace vitalradar
