#pragma once

// Three independent rate estimators per band: spectral peak, autocorrelation
// peak, and time-domain peak counting. Estimator failures become flags on the
// affected field, never aborted records.

#include <limits>
#include <vector>

#include "vitalradar/phase_pipeline.hpp"

namespace vitalradar {

enum class EstimateFlag { ok, out_of_band, no_signal, no_periodicity };

const char* flag_name(EstimateFlag);

struct RateEstimate {
    double per_min = 0.0;
    EstimateFlag flag = EstimateFlag::ok;
    bool usable() const { return flag == EstimateFlag::ok; }
};

// Mean frequency of the l largest in-band local maxima of the magnitude
// spectrum (Hann windowed, 4x zero padded; maxima below 0.1 x the in-band
// peak are noise wiggles, not peaks). Each maximum is refined by 3-point
// parabolic interpolation. With l = 1 the selected bin is exactly the
// in-band argmax.
RateEstimate estimate_fft(const BandSignal&, int l);

// Biased autocorrelation R[n] = (1/M) sum_m x[m] x[m+n] for n in [0, M).
std::vector<double> autocorrelate(const std::vector<double>&);

// First local maximum of R at n >= 1 with height >= 0.2 R[0]; the lag is
// refined parabolically on taper-corrected values R[n] M/(M-n) and mapped to
// 60 / (lag * T_c).
RateEstimate estimate_autocorr(const BandSignal&);

// Count local maxima with height >= 0.4 x the signal maximum, separated by
// at least 0.5 * (60 / band_high) seconds; rate = count / duration * 60.
// Zero peaks yields 0/min flagged out_of_band.
RateEstimate estimate_peaks(const BandSignal&);

struct VitalEstimate {
    RateEstimate br_f, br_a, br_p;        // breath band
    RateEstimate hr_f, hr_a, hr_p;        // heart band
    RateEstimate hr_fc, hr_ac, hr_pc;     // heart band after the comb
    bool comb_valid = true;               // false when no usable br_f existed
    double br_fused = std::numeric_limits<double>::quiet_NaN();
    double hr_fused = std::numeric_limits<double>::quiet_NaN();
};

VitalEstimate estimate_all(const BandSignal& breath, const BandSignal& heart,
                           const BandSignal& heart_comb);

}  // namespace vitalradar
