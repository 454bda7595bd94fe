#include "doctest.h"

#include <cmath>
#include <complex>

#include "vitalradar/beamform.hpp"
#include "vitalradar/errors.hpp"
#include "vitalradar/simulator.hpp"
#include "test_util.hpp"

using namespace vitalradar;

namespace {

RadarConfig fast_config() {
    RadarConfig cfg = testutil::default_config();
    cfg.num_chirps = 8;
    cfg.validate();
    return cfg;
}

}  // namespace

TEST_CASE("steering weights") {
    const RadarConfig cfg = testutil::default_config();
    const auto w0 = steering_weights(0.0, cfg);
    REQUIRE(static_cast<int>(w0.size()) == cfg.num_virtual_rx);
    const double inv_sqrt_k = 1.0 / std::sqrt(double(cfg.num_virtual_rx));
    double norm = 0.0;
    for (const auto& w : w0) {
        CHECK(w.real() == doctest::Approx(inv_sqrt_k).epsilon(1e-15));
        CHECK(w.imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
        norm += std::norm(w);
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(steering_weights(91.0, cfg), InputError);
    CHECK_THROWS_AS(steering_weights(-90.5, cfg), InputError);
}

TEST_CASE("coherent gain on a matched plane wave") {
    const RadarConfig cfg = testutil::default_config();
    const double az = 30.0;
    const double d_over_lambda = cfg.spacing_m() / cfg.wavelength_max_m();
    const double sin_az = std::sin(az * M_PI / 180.0);

    std::vector<std::complex<double>> snapshot(cfg.num_virtual_rx);
    for (int i = 0; i < cfg.num_virtual_rx; ++i)
        snapshot[i] = std::polar(1.0, 2.0 * M_PI * i * d_over_lambda * sin_az);

    auto respond = [&](double steer) {
        const auto w = steering_weights(steer, cfg);
        std::complex<double> acc = 0.0;
        for (int i = 0; i < cfg.num_virtual_rx; ++i) acc += snapshot[i] * w[i];
        return acc;
    };

    const double matched = std::abs(respond(az));
    CHECK(matched ==
          doctest::Approx(std::sqrt(double(cfg.num_virtual_rx))).epsilon(1e-12));
    // mis-steered broadside weights capture less of a 30 degree arrival
    CHECK(std::norm(respond(0.0)) < std::norm(respond(az)));
}

TEST_CASE("beamform basics") {
    RadarConfig cfg = fast_config();

    SUBCASE("single receiver passthrough") {
        cfg.num_virtual_rx = 1;
        cfg.validate();
        DataCube cube(cfg.num_chirps, cfg.fast_time_samples, 1);
        for (std::size_t k = 0; k < cube.data.size(); ++k)
            cube.data[k] = {std::sin(0.1 * k), std::cos(0.2 * k)};
        const auto y = beamform(cube, 42.0, cfg);
        REQUIRE(y.size() == cube.data.size());
        for (std::size_t k = 0; k < y.size(); ++k)
            CHECK(std::abs(y[k] - cube.data[k]) < 1e-15);
    }
    SUBCASE("zero cube stays zero") {
        DataCube cube(cfg.num_chirps, cfg.fast_time_samples, cfg.num_virtual_rx);
        for (const auto& v : beamform(cube, -15.0, cfg))
            CHECK(v == std::complex<double>(0.0, 0.0));
    }
    SUBCASE("linearity") {
        DataCube c1(cfg.num_chirps, cfg.fast_time_samples, cfg.num_virtual_rx);
        DataCube c2 = c1;
        for (std::size_t k = 0; k < c1.data.size(); ++k) {
            c1.data[k] = {std::sin(0.3 * k + 1.0), std::cos(0.7 * k)};
            c2.data[k] = {std::cos(0.11 * k), std::sin(0.05 * k - 2.0)};
        }
        const double a = 2.5, b = -1.25;
        DataCube mix = c1;
        for (std::size_t k = 0; k < mix.data.size(); ++k)
            mix.data[k] = a * c1.data[k] + b * c2.data[k];
        const auto y1 = beamform(c1, 15.0, cfg);
        const auto y2 = beamform(c2, 15.0, cfg);
        const auto ym = beamform(mix, 15.0, cfg);
        for (std::size_t k = 0; k < ym.size(); ++k) {
            const std::complex<double> want = a * y1[k] + b * y2[k];
            CHECK(std::abs(ym[k] - want) <=
                  1e-9 * std::max(1.0, std::abs(want)));
        }
    }
    SUBCASE("receiver count mismatch") {
        DataCube cube(cfg.num_chirps, cfg.fast_time_samples, 2);
        CHECK_THROWS_AS(beamform(cube, 0.0, cfg), InputError);
    }
}

TEST_CASE("range fft of a pure tone") {
    const RadarConfig cfg = testutil::default_config();
    const int N = cfg.fast_time_samples;
    const double f_b = cfg.beat_frequency_hz(2.0);

    std::vector<std::complex<double>> beat(N), shifted(N);
    const double phi = 1.234;
    for (int n = 0; n < N; ++n) {
        const double arg = 2.0 * M_PI * f_b * n / cfg.fast_time_sample_rate_hz;
        beat[n] = std::polar(1.0, arg);
        shifted[n] = std::polar(1.0, arg + phi);
    }

    const auto spec = range_fft(beat.data(), cfg);
    REQUIRE(static_cast<int>(spec.size()) == cfg.num_range_bins());

    int peak = 0;
    for (int b = 1; b < static_cast<int>(spec.size()); ++b)
        if (std::abs(spec[b]) > std::abs(spec[peak])) peak = b;
    const double expected_bin = f_b * cfg.fft_size() / cfg.fast_time_sample_rate_hz;
    CHECK(std::abs(peak - expected_bin) <= 1.0);

    SUBCASE("phase offset moves the peak-bin phase by exactly that offset") {
        const auto spec2 = range_fft(shifted.data(), cfg);
        double diff = std::arg(spec2[peak]) - std::arg(spec[peak]) - phi;
        diff -= 2.0 * M_PI * std::round(diff / (2.0 * M_PI));
        CHECK(std::abs(diff) < 1e-6);
    }
    SUBCASE("energy matches the windowed input") {
        // unnormalized FFT: sum |X|^2 = fft_size * sum |windowed x|^2, and a
        // mid-band tone leaves nothing measurable in the discarded half
        double spectral = 0.0;
        for (const auto& v : spec) spectral += std::norm(v);
        spectral /= cfg.fft_size();
        double windowed = 0.0;
        const double denom = N - 1;
        for (int n = 0; n < N; ++n) {
            const double w = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / denom);
            windowed += std::norm(beat[n] * w);
        }
        CHECK(spectral == doctest::Approx(windowed).epsilon(1e-6));
    }
    SUBCASE("zero input gives a zero spectrum") {
        const std::vector<std::complex<double>> zeros(N, 0.0);
        for (const auto& v : range_fft(zeros.data(), cfg))
            CHECK(v == std::complex<double>(0.0, 0.0));
    }
}

TEST_CASE("steering argmax lands exactly on the reflector's grid angle") {
    const RadarConfig cfg = fast_config();
    for (double az : {-60.0, -15.0, 0.0, 45.0}) {
        Scene scene;
        scene.clutter.push_back({1.5, az, 1.0});
        const RangeSpectra spectra = compute_spectra(synthesize_cube(scene, cfg), cfg, 2);
        const RangeAzimuthMap map = combined_magnitude_map(spectra);
        const int bin = std::lround(1.5 / cfg.range_bin_width_m());
        int best = 0;
        for (int a = 1; a < map.num_azimuths; ++a)
            if (map.at(bin, a) > map.at(bin, best)) best = a;
        CHECK(map.azimuth_axis_deg[best] == az);
    }
}

TEST_CASE("range accuracy across the working span") {
    const RadarConfig cfg = fast_config();
    for (double r : {0.5, 1.3, 2.45, 3.8, 5.0}) {
        Scene scene;
        scene.clutter.push_back({r, 0.0, 1.0});
        const RangeSpectra spectra = compute_spectra(synthesize_cube(scene, cfg), cfg, 2);
        const RangeAzimuthMap map = combined_magnitude_map(spectra);
        int best = 0;
        for (int b = 1; b < map.num_bins; ++b)
            if (map.at(b, 4) > map.at(best, 4)) best = b;
        CHECK(std::abs(best - std::lround(r / cfg.range_bin_width_m())) <= 1);
    }
}

TEST_CASE("combined map properties") {
    SUBCASE("single chirp map equals that chirp's magnitude") {
        RangeSpectra spectra;
        spectra.num_chirps = 1;
        spectra.num_bins = 6;
        spectra.num_azimuths = 2;
        spectra.range_bin_width_m = 0.03;
        spectra.azimuth_deg = {-10.0, 10.0};
        spectra.data.resize(12);
        for (std::size_t k = 0; k < spectra.data.size(); ++k)
            spectra.data[k] = {std::cos(double(k)), std::sin(0.5 * k)};
        const RangeAzimuthMap map = combined_magnitude_map(spectra);
        CHECK(map.num_bins == 6);
        CHECK(map.num_azimuths == 2);
        for (int b = 0; b < 6; ++b)
            for (int a = 0; a < 2; ++a)
                CHECK(map.at(b, a) ==
                      doctest::Approx(std::abs(spectra.at(0, b, a))).epsilon(1e-15));
        CHECK(map.range_axis_m[3] == doctest::Approx(0.09));
    }
    SUBCASE("chirp-constant spectra collapse to one chirp's magnitude") {
        RangeSpectra spectra;
        spectra.num_chirps = 5;
        spectra.num_bins = 4;
        spectra.num_azimuths = 3;
        spectra.azimuth_deg = {-15.0, 0.0, 15.0};
        spectra.data.resize(60);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 4; ++b)
                for (int m = 0; m < 5; ++m)
                    spectra.data[spectra.index(m, b, a)] = {double(a + 1), double(b)};
        const RangeAzimuthMap map = combined_magnitude_map(spectra);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 4; ++b)
                CHECK(map.at(b, a) ==
                      doctest::Approx(std::abs(spectra.at(2, b, a))).epsilon(1e-12));
    }
}

TEST_CASE("three subjects appear as local maxima at their true cells") {
    const RadarConfig cfg = testutil::default_config();
    Scene scene;
    scene.subjects.push_back(testutil::subject(1.0, -45.0, 12.3, 75.0));
    scene.subjects.push_back(testutil::subject(1.5, 0.0, 23.4, 96.0));
    scene.subjects.push_back(testutil::subject(1.2, 45.0, 21.6, 102.0));
    scene.snr_db = 15.0;
    scene.seed = 42;

    const RangeSpectra spectra = compute_spectra(synthesize_cube(scene, cfg), cfg, 0);
    const RangeAzimuthMap map = combined_magnitude_map(spectra);
    for (const auto& gt : ground_truth(scene, cfg)) {
        int best = std::max(gt.range_bin - 1, 1);
        for (int b = best; b <= gt.range_bin + 1 && b + 1 < map.num_bins; ++b)
            if (map.at(b, gt.azimuth_index) > map.at(best, gt.azimuth_index)) best = b;
        // a genuine local maximum along range at the true azimuth, within 1 bin
        CHECK(map.at(best, gt.azimuth_index) > map.at(best - 1, gt.azimuth_index));
        CHECK(map.at(best, gt.azimuth_index) > map.at(best + 1, gt.azimuth_index));
    }
}
