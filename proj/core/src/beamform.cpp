#include "vitalradar/beamform.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

#include "vitalradar/errors.hpp"
#include "vitalradar/parallel.hpp"

namespace vitalradar {

namespace {

std::vector<double> hann_window(int n) {
    std::vector<double> w(n);
    for (int k = 0; k < n; ++k)
        w[k] = 0.5 - 0.5 * std::cos(2.0 * M_PI * k / (n - 1));
    return w;
}

}  // namespace

std::vector<std::complex<double>> steering_weights(double azimuth_deg,
                                                   const RadarConfig& config) {
    if (azimuth_deg < -90.0 || azimuth_deg > 90.0)
        throw InputError("steering: azimuth " + std::to_string(azimuth_deg) +
                         " deg outside [-90, 90]");
    const int K = config.num_virtual_rx;
    const double d_over_lambda = config.spacing_m() / config.wavelength_max_m();
    const double sin_az = std::sin(azimuth_deg * M_PI / 180.0);
    const double norm = 1.0 / std::sqrt(static_cast<double>(K));
    std::vector<std::complex<double>> w(K);
    for (int i = 0; i < K; ++i)
        w[i] = std::polar(norm, -2.0 * M_PI * i * d_over_lambda * sin_az);
    return w;
}

std::vector<std::complex<double>> beamform(const DataCube& cube, double azimuth_deg,
                                           const RadarConfig& config) {
    if (cube.num_rx != config.num_virtual_rx)
        throw InputError("beamform: cube has " + std::to_string(cube.num_rx) +
                         " receivers, config expects " +
                         std::to_string(config.num_virtual_rx));
    const auto w = steering_weights(azimuth_deg, config);
    const int M = cube.num_chirps;
    const int N = cube.num_samples;
    std::vector<std::complex<double>> out(static_cast<std::size_t>(M) * N);
    for (int m = 0; m < M; ++m) {
        for (int n = 0; n < N; ++n) {
            const std::complex<double>* rx = &cube.data[cube.index(m, n, 0)];
            std::complex<double> acc = 0.0;
            for (int i = 0; i < cube.num_rx; ++i) acc += rx[i] * w[i];
            out[static_cast<std::size_t>(m) * N + n] = acc;
        }
    }
    return out;
}

std::vector<std::complex<double>> range_fft(const std::complex<double>* beat,
                                            const RadarConfig& config) {
    const int N = config.fast_time_samples;
    const int F = config.fft_size();
    static thread_local Eigen::FFT<double> fft;
    const std::vector<double> window = hann_window(N);
    std::vector<std::complex<double>> padded(F, 0.0);
    for (int n = 0; n < N; ++n) padded[n] = beat[n] * window[n];
    std::vector<std::complex<double>> spectrum(F);
    fft.fwd(spectrum, padded);
    spectrum.resize(F / 2);
    return spectrum;
}

RangeSpectra compute_spectra(const DataCube& cube, const RadarConfig& config,
                             int threads) {
    config.validate();
    if (cube.num_chirps != config.num_chirps || cube.num_samples != config.fast_time_samples ||
        cube.num_rx != config.num_virtual_rx)
        throw InputError("spectra: cube " + std::to_string(cube.num_chirps) + "x" +
                         std::to_string(cube.num_samples) + "x" + std::to_string(cube.num_rx) +
                         " does not match config " + std::to_string(config.num_chirps) + "x" +
                         std::to_string(config.fast_time_samples) + "x" +
                         std::to_string(config.num_virtual_rx));

    RangeSpectra spectra;
    spectra.num_chirps = cube.num_chirps;
    spectra.num_bins = config.num_range_bins();
    spectra.azimuth_deg = config.azimuth_grid();
    spectra.num_azimuths = static_cast<int>(spectra.azimuth_deg.size());
    spectra.range_bin_width_m = config.range_bin_width_m();
    spectra.chirp_interval_s = config.chirp_interval_s;
    spectra.data.resize(static_cast<std::size_t>(spectra.num_azimuths) * spectra.num_bins *
                        spectra.num_chirps);

    const int N = config.fast_time_samples;
    parallel_for(static_cast<std::size_t>(spectra.num_azimuths), threads, [&](std::size_t a) {
        const auto beat = beamform(cube, spectra.azimuth_deg[a], config);
        for (int m = 0; m < spectra.num_chirps; ++m) {
            const auto spectrum = range_fft(&beat[static_cast<std::size_t>(m) * N], config);
            for (int b = 0; b < spectra.num_bins; ++b)
                spectra.data[spectra.index(m, b, static_cast<int>(a))] = spectrum[b];
        }
    });
    return spectra;
}

RangeAzimuthMap combined_magnitude_map(const RangeSpectra& spectra) {
    RangeAzimuthMap map;
    map.num_bins = spectra.num_bins;
    map.num_azimuths = spectra.num_azimuths;
    map.azimuth_axis_deg = spectra.azimuth_deg;
    map.range_axis_m.resize(spectra.num_bins);
    for (int b = 0; b < spectra.num_bins; ++b)
        map.range_axis_m[b] = b * spectra.range_bin_width_m;
    map.values.assign(static_cast<std::size_t>(map.num_bins) * map.num_azimuths, 0.0);
    for (int a = 0; a < map.num_azimuths; ++a) {
        for (int b = 0; b < map.num_bins; ++b) {
            const std::complex<double>* s = spectra.slow_time(b, a);
            double acc = 0.0;
            for (int m = 0; m < spectra.num_chirps; ++m) acc += std::abs(s[m]);
            map.at(b, a) = acc / spectra.num_chirps;
        }
    }
    return map;
}

}  // namespace vitalradar
