#include "vitalradar/activity_map.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>

#include "vitalradar/errors.hpp"
#include "vitalradar/parallel.hpp"
#include "vitalradar/phase_pipeline.hpp"

namespace vitalradar {

namespace {

// share of the diff spectrum's total power held by its largest bin, above
// which the motion is treated as a coherent oscillation
constexpr double kLineShareGate = 0.2;

double variance(const std::vector<double>& x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double acc = 0.0;
    for (double v : x) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(x.size());
}

}  // namespace

double phase_variability(const std::complex<double>* slow_time, int num_chirps) {
    if (num_chirps < 8)
        throw InputError("phase_variability: need at least 8 chirps, got " +
                         std::to_string(num_chirps));
    std::vector<double> wrapped(num_chirps);
    for (int m = 0; m < num_chirps; ++m) wrapped[m] = std::arg(slow_time[m]);
    const std::vector<double> unwrapped = unwrap_phase(wrapped);

    std::vector<std::complex<double>> diff(num_chirps - 1);
    double diff_power = 0.0;
    for (int m = 0; m + 1 < num_chirps; ++m) {
        diff[m] = unwrapped[m + 1] - unwrapped[m];
        diff_power += std::norm(diff[m]);
    }
    bool coherent = false;
    if (diff_power > 0.0) {
        static thread_local Eigen::FFT<double> fft;
        std::vector<std::complex<double>> spectrum(diff.size());
        fft.fwd(spectrum, diff);
        double peak = 0.0, total = 0.0;
        for (const auto& z : spectrum) {
            const double p = std::norm(z);
            total += p;
            peak = std::max(peak, p);
        }
        coherent = total > 0.0 && peak >= kLineShareGate * total;
    }
    if (coherent) return variance(unwrapped);

    // fold the mean-removed wrapped phase back into (-pi, pi] and measure that
    double mean = 0.0;
    for (double v : wrapped) mean += v;
    mean /= static_cast<double>(wrapped.size());
    std::vector<double> folded(wrapped.size());
    for (std::size_t m = 0; m < wrapped.size(); ++m) {
        double d = std::fmod(wrapped[m] - mean, 2.0 * M_PI);
        if (d <= -M_PI) d += 2.0 * M_PI;
        if (d > M_PI) d -= 2.0 * M_PI;
        folded[m] = d;
    }
    return variance(folded);
}

double activity_score(const RangeSpectra& spectra, int bin, int az) {
    if (bin < 0 || bin >= spectra.num_bins || az < 0 || az >= spectra.num_azimuths)
        throw InputError("activity_score: bin (" + std::to_string(bin) + ", " +
                         std::to_string(az) + ") outside the map");
    const std::complex<double>* s = spectra.slow_time(bin, az);
    double mag = 0.0;
    for (int m = 0; m < spectra.num_chirps; ++m) mag += std::abs(s[m]);
    mag /= static_cast<double>(spectra.num_chirps);
    if (mag == 0.0) return 0.0;
    return mag * phase_variability(s, spectra.num_chirps);
}

VitalActivityMap build_map(const RangeSpectra& spectra, int threads) {
    VitalActivityMap map;
    map.num_bins = spectra.num_bins;
    map.num_azimuths = spectra.num_azimuths;
    map.azimuth_axis_deg = spectra.azimuth_deg;
    map.range_axis_m.resize(spectra.num_bins);
    for (int b = 0; b < spectra.num_bins; ++b)
        map.range_axis_m[b] = b * spectra.range_bin_width_m;
    map.score.assign(static_cast<std::size_t>(map.num_bins) * map.num_azimuths, 0.0);
    parallel_for(static_cast<std::size_t>(map.num_bins), threads, [&](std::size_t b) {
        for (int a = 0; a < map.num_azimuths; ++a)
            map.at(static_cast<int>(b), a) = activity_score(spectra, static_cast<int>(b), a);
    });
    return map;
}

std::vector<SubjectDetection> threshold_and_localize(VitalActivityMap& map, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InputError("localize: alpha must lie in (0, 1)");
    map.surviving_bins.clear();
    const double peak = map.score.empty()
                            ? 0.0
                            : *std::max_element(map.score.begin(), map.score.end());
    map.threshold_used = alpha * peak;
    if (peak <= 0.0) return {};

    const int B = map.num_bins, A = map.num_azimuths;
    std::vector<int> cluster(static_cast<std::size_t>(B) * A, -1);
    auto survives = [&](int b, int a) { return map.at(b, a) >= map.threshold_used; };

    for (int b = 0; b < B; ++b)
        for (int a = 0; a < A; ++a)
            if (survives(b, a)) map.surviving_bins.emplace_back(b, a);

    // 8-connected flood fill over surviving bins
    int num_clusters = 0;
    std::vector<std::pair<int, int>> stack;
    for (const auto& [b0, a0] : map.surviving_bins) {
        if (cluster[static_cast<std::size_t>(b0) * A + a0] >= 0) continue;
        const int id = num_clusters++;
        stack.assign(1, {b0, a0});
        cluster[static_cast<std::size_t>(b0) * A + a0] = id;
        while (!stack.empty()) {
            const auto [b, a] = stack.back();
            stack.pop_back();
            for (int db = -1; db <= 1; ++db) {
                for (int da = -1; da <= 1; ++da) {
                    if (db == 0 && da == 0) continue;
                    const int nb = b + db, na = a + da;
                    if (nb < 0 || nb >= B || na < 0 || na >= A) continue;
                    auto& slot = cluster[static_cast<std::size_t>(nb) * A + na];
                    if (slot >= 0 || !survives(nb, na)) continue;
                    slot = id;
                    stack.emplace_back(nb, na);
                }
            }
        }
    }

    std::vector<SubjectDetection> detections(num_clusters);
    std::vector<bool> seen(num_clusters, false);
    for (const auto& [b, a] : map.surviving_bins) {
        const int id = cluster[static_cast<std::size_t>(b) * A + a];
        if (!seen[id] || map.at(b, a) > detections[id].score) {
            seen[id] = true;
            detections[id] = {b, a, map.range_axis_m[b], map.azimuth_axis_deg[a],
                              map.at(b, a)};
        }
    }
    std::sort(detections.begin(), detections.end(),
              [](const SubjectDetection& x, const SubjectDetection& y) {
                  if (x.score != y.score) return x.score > y.score;
                  if (x.range_bin != y.range_bin) return x.range_bin < y.range_bin;
                  return x.azimuth_index < y.azimuth_index;
              });
    return detections;
}

}  // namespace vitalradar
