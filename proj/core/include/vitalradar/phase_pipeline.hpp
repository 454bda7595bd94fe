#pragma once

// Slow-time phase extraction at a range-azimuth bin and the vital-band filter
// chain: unwrap, mean removal, zero-phase band-pass split, and the harmonic
// comb that clears respiration overtones out of the heart band.

#include <vector>

#include "vitalradar/beamform.hpp"

namespace vitalradar {

struct Band {
    double low_per_min = 0.0;
    double high_per_min = 0.0;
    double low_hz() const { return low_per_min / 60.0; }
    double high_hz() const { return high_per_min / 60.0; }
};

inline constexpr Band kBreathBand{3.0, 36.0};
inline constexpr Band kHeartBand{48.0, 120.0};

struct PhaseSignal {
    std::vector<double> samples;  // rad
    double sample_interval_s = 0.0;
};

struct BandSignal {
    std::vector<double> samples;
    double sample_interval_s = 0.0;
    Band band;
    bool comb_applied = false;
};

// arg of the bin's slow-time series; NumericalError naming the chirp index
// when a sample has zero magnitude.
PhaseSignal extract_phase(const RangeSpectra&, int bin, int az);

// Consecutive differences folded into (-pi, pi].
std::vector<double> unwrap_phase(const std::vector<double>&);

// Unwrap, then subtract the mean of the unwrapped sequence.
PhaseSignal mean_subtract_unwrap(const PhaseSignal&);

struct FirFilter {
    std::vector<double> taps;  // symmetric, odd length
    double fs_hz = 0.0;
    // single-pass magnitude response
    double magnitude_at(double freq_hz) const;
};

// Windowed-sinc band-pass (Hamming), difference of two unity-DC low-passes.
FirFilter design_bandpass(Band, double fs_hz);

// Zero-phase forward-backward application with odd-reflection padding.
// Effective magnitude response is magnitude_at(...)^2.
std::vector<double> filtfilt(const FirFilter&, const std::vector<double>&);

BandSignal bandpass(const PhaseSignal&, Band);

struct BiquadCascade {
    struct Stage {
        double b0, b1, b2, a1, a2;
    };
    std::vector<Stage> stages;
    double fs_hz = 0.0;
    std::vector<double> notch_freqs_per_min;
    double magnitude_at(double freq_hz) const;  // single pass
};

// Notches at every integer multiple of br_fundamental inside the heart band.
// Applied forward-backward the response is -3 dB at +/- 1/min around each
// notch and bottoms out far below -30 dB.
BiquadCascade design_comb(double br_fundamental_per_min, Band heart_band, double fs_hz);

std::vector<double> filtfilt(const BiquadCascade&, const std::vector<double>&);

// heart-band signal with respiration harmonics notched out; sets comb_applied.
BandSignal comb_filter(const BandSignal& heart, double br_fundamental_per_min);

}  // namespace vitalradar
