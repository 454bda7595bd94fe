#include "vitalradar/simulator.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "vitalradar/errors.hpp"
#include "vitalradar/parallel.hpp"

namespace vitalradar {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double to_unit(std::uint64_t h) {  // (0, 1]
    return 1.0 - static_cast<double>(h >> 11) * 0x1.0p-53;
}

struct Reflector {
    double rest_range_m;
    double sin_azimuth;
    double amplitude;
    const Subject* subject;  // nullptr for clutter
};

}  // namespace

double chest_displacement_m(const Subject& s, double t_s) {
    const double wb = kTwoPi * s.br_per_min / 60.0;
    const double wh = kTwoPi * s.hr_per_min / 60.0;
    double x = s.breath_amp_m * std::sin(wb * t_s + s.breath_phase_rad);
    for (std::size_t j = 0; j < s.breath_harmonics.size(); ++j) {
        const double k = static_cast<double>(j + 2);
        x += s.breath_amp_m * s.breath_harmonics[j] *
             std::sin(k * (wb * t_s + s.breath_phase_rad));
    }
    x += s.heart_amp_m * std::sin(wh * t_s + s.heart_phase_rad);
    return x;
}

std::complex<double> noise_sample(std::uint64_t seed, std::uint64_t m,
                                  std::uint64_t n, std::uint64_t i) {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ (m * 0x9e3779b97f4a7c15ull));
    k = splitmix64(k ^ (n * 0xc2b2ae3d27d4eb4full));
    k = splitmix64(k ^ (i * 0x165667b19e3779f9ull));
    const double u1 = to_unit(k);
    const double u2 = to_unit(splitmix64(k));
    const double r = std::sqrt(-2.0 * std::log(u1));
    // unit total power: each quadrature carries 1/2
    return {r * std::cos(kTwoPi * u2) * M_SQRT1_2,
            r * std::sin(kTwoPi * u2) * M_SQRT1_2};
}

DataCube synthesize_cube(const Scene& scene, const RadarConfig& config, int threads) {
    scene.validate();
    config.validate();

    // subjects that collapse onto one map cell cannot be separated downstream
    const auto gt = ground_truth(scene, config);
    for (std::size_t a = 0; a < gt.size(); ++a)
        for (std::size_t b = a + 1; b < gt.size(); ++b)
            if (gt[a].range_bin == gt[b].range_bin &&
                gt[a].azimuth_index == gt[b].azimuth_index)
                std::cerr << "warning: subjects " << a << " and " << b
                          << " share range bin " << gt[a].range_bin
                          << " and azimuth index " << gt[a].azimuth_index << "\n";

    const int M = config.num_chirps;
    const int N = config.fast_time_samples;
    const int K = config.num_virtual_rx;
    const double fs = config.fast_time_sample_rate_hz;
    const double lambda = config.wavelength_max_m();
    const double d_over_lambda = config.spacing_m() / lambda;

    std::vector<Reflector> reflectors;
    double strongest = 0.0;
    auto amplitude_of = [&](double reflectivity, double range) {
        return scene.path_loss ? reflectivity / (range * range) : reflectivity;
    };
    for (const Subject& s : scene.subjects) {
        reflectors.push_back({s.range_m, std::sin(s.azimuth_deg * M_PI / 180.0),
                              amplitude_of(s.reflectivity, s.range_m), &s});
        strongest = std::max(strongest, reflectors.back().amplitude);
    }
    for (const ClutterObject& c : scene.clutter) {
        reflectors.push_back({c.range_m, std::sin(c.azimuth_deg * M_PI / 180.0),
                              amplitude_of(c.reflectivity, c.range_m), nullptr});
        strongest = std::max(strongest, reflectors.back().amplitude);
    }

    const bool noisy = std::isfinite(scene.snr_db);
    // empty scenes fall back to a unit reference so snr_db still sets a floor
    const double reference = reflectors.empty() ? 1.0 : strongest;
    const double noise_scale =
        noisy ? reference * std::pow(10.0, -scene.snr_db / 20.0) : 0.0;

    DataCube cube(M, N, K);
    parallel_for(static_cast<std::size_t>(M), threads, [&](std::size_t mi) {
        const int m = static_cast<int>(mi);
        const double t_m = m * config.chirp_interval_s;
        for (const Reflector& r : reflectors) {
            const double range =
                r.rest_range_m + (r.subject ? chest_displacement_m(*r.subject, t_m) : 0.0);
            if (range <= 0.0)
                throw InputError("scene: reflector at " + std::to_string(r.rest_range_m) +
                                 " m reaches non-positive range at chirp " +
                                 std::to_string(m));
            const double f_b = config.beat_frequency_hz(range);
            if (f_b > 0.5 * fs)
                throw InputError(
                    "scene: reflector at " + std::to_string(r.rest_range_m) +
                    " m is beyond the unambiguous range (beat " + std::to_string(f_b) +
                    " Hz > fs/2 = " + std::to_string(0.5 * fs) + " Hz) at chirp " +
                    std::to_string(m));
            const double phi_r = config.phase_from_range_rad(range);
            const std::complex<double> step =
                std::polar(1.0, kTwoPi * f_b / fs);
            for (int i = 0; i < K; ++i) {
                const double psi = phi_r + kTwoPi * i * d_over_lambda * r.sin_azimuth;
                std::complex<double> value = std::polar(r.amplitude, psi);
                for (int n = 0; n < N; ++n) {
                    cube.at(m, n, i) += value;
                    value *= step;
                }
            }
        }
        if (noisy) {
            for (int n = 0; n < N; ++n)
                for (int i = 0; i < K; ++i)
                    cube.at(m, n, i) +=
                        noise_scale * noise_sample(scene.seed, mi, n, i);
        }
    });
    return cube;
}

DataCube quantize_cube(const DataCube& cube, double target_peak) {
    if (target_peak <= 0 || target_peak > 32767.0)
        throw InputError("quantize: target_peak must lie in (0, 32767]");
    double peak = 0.0;
    for (const auto& z : cube.data)
        peak = std::max({peak, std::abs(z.real()), std::abs(z.imag())});
    if (peak == 0.0) return cube;  // all-zero cube is already integer-valued

    const double scale = target_peak / peak;
    DataCube out(cube.num_chirps, cube.num_samples, cube.num_rx);
    for (std::size_t k = 0; k < cube.data.size(); ++k)
        out.data[k] = {std::round(cube.data[k].real() * scale),
                       std::round(cube.data[k].imag() * scale)};
    return out;
}

}  // namespace vitalradar
