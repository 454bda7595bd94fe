#pragma once

// Delay-and-sum beamforming over the virtual array followed by a windowed,
// zero-padded range FFT. The per-chirp, per-steering-angle range spectra feed
// both the magnitude map and the slow-time phase pipeline.

#include <complex>
#include <vector>

#include "vitalradar/data_cube.hpp"
#include "vitalradar/radar_config.hpp"

namespace vitalradar {

// w_i = exp(-j 2 pi i (d / lambda_max) sin(azimuth)) / sqrt(K).
std::vector<std::complex<double>> steering_weights(double azimuth_deg, const RadarConfig&);

// Beamformed beat signals for one steering angle, indexed m * N + n.
std::vector<std::complex<double>> beamform(const DataCube&, double azimuth_deg,
                                           const RadarConfig&);

// Hann-windowed, zero-padded FFT of one chirp; positive-frequency half.
std::vector<std::complex<double>> range_fft(const std::complex<double>* beat,
                                            const RadarConfig&);

// All range spectra, indexed so a bin's slow-time series is contiguous.
struct RangeSpectra {
    int num_chirps = 0;
    int num_bins = 0;
    int num_azimuths = 0;
    double range_bin_width_m = 0.0;
    double chirp_interval_s = 0.0;
    std::vector<double> azimuth_deg;
    std::vector<std::complex<double>> data;  // ((az * bins + bin) * chirps + m)

    std::size_t index(int m, int bin, int az) const {
        return (static_cast<std::size_t>(az) * num_bins + bin) * num_chirps + m;
    }
    const std::complex<double>* slow_time(int bin, int az) const {
        return data.data() + index(0, bin, az);
    }
    std::complex<double> at(int m, int bin, int az) const { return data[index(m, bin, az)]; }
};

RangeSpectra compute_spectra(const DataCube&, const RadarConfig&, int threads = 0);

struct RangeAzimuthMap {
    int num_bins = 0;
    int num_azimuths = 0;
    std::vector<double> range_axis_m;
    std::vector<double> azimuth_axis_deg;
    std::vector<double> values;  // bin * num_azimuths + az

    double& at(int bin, int az) { return values[static_cast<std::size_t>(bin) * num_azimuths + az]; }
    double at(int bin, int az) const {
        return values[static_cast<std::size_t>(bin) * num_azimuths + az];
    }
};

// Mean spectral magnitude over chirps.
RangeAzimuthMap combined_magnitude_map(const RangeSpectra&);

}  // namespace vitalradar
