#include "vitalradar/estimators.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>

#include "vitalradar/errors.hpp"

namespace vitalradar {

namespace {

// local maxima below this fraction of the in-band peak are not counted
constexpr double kPeakFloor = 0.1;

double parabolic_offset(double ym, double y0, double yp) {
    const double denom = ym - 2.0 * y0 + yp;
    if (denom >= 0.0) return 0.0;  // flat or not a peak, keep the bin
    double delta = 0.5 * (ym - yp) / denom;
    return std::clamp(delta, -0.5, 0.5);
}

bool all_zero(const std::vector<double>& x) {
    for (double v : x)
        if (v != 0.0) return false;
    return true;
}

RateEstimate flag_band(RateEstimate e, const Band& band) {
    if (e.flag == EstimateFlag::ok &&
        (e.per_min < band.low_per_min || e.per_min > band.high_per_min))
        e.flag = EstimateFlag::out_of_band;
    return e;
}

}  // namespace

const char* flag_name(EstimateFlag f) {
    switch (f) {
        case EstimateFlag::ok: return "ok";
        case EstimateFlag::out_of_band: return "out_of_band";
        case EstimateFlag::no_signal: return "no_signal";
        case EstimateFlag::no_periodicity: return "no_periodicity";
    }
    return "unknown";
}

RateEstimate estimate_fft(const BandSignal& sig, int l) {
    if (sig.samples.empty()) throw InputError("estimate_fft: empty signal");
    if (l < 1) throw InputError("estimate_fft: l must be at least 1");
    if (all_zero(sig.samples)) return {0.0, EstimateFlag::no_signal};

    const int M = static_cast<int>(sig.samples.size());
    // Hann window plus 4x zero padding: a bare parabolic fit on a
    // rectangular-window spectrum is biased by up to a quarter bin at
    // fractional tone offsets, far too coarse against 2.34/min bins.
    int nfft = 1;
    while (nfft < M) nfft <<= 1;
    nfft *= 4;
    static thread_local Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in(nfft, 0.0), spectrum(nfft);
    const double wdenom = M > 1 ? M - 1.0 : 1.0;
    for (int m = 0; m < M; ++m)
        in[m] = sig.samples[m] * (0.5 - 0.5 * std::cos(2.0 * M_PI * m / wdenom));
    fft.fwd(spectrum, in);

    const int half = nfft / 2;
    std::vector<double> mag(half + 1);
    for (int k = 0; k <= half; ++k) mag[k] = std::abs(spectrum[k]);

    const double grid_duration_s = nfft * sig.sample_interval_s;
    auto per_min_of = [&](double k) { return k / grid_duration_s * 60.0; };
    int k_lo =
        static_cast<int>(std::ceil(sig.band.low_per_min / 60.0 * grid_duration_s - 1e-9));
    int k_hi =
        static_cast<int>(std::floor(sig.band.high_per_min / 60.0 * grid_duration_s + 1e-9));
    k_lo = std::max(k_lo, 1);
    k_hi = std::min(k_hi, half);
    if (k_lo > k_hi) return {0.0, EstimateFlag::no_signal};

    int k_best = k_lo;
    for (int k = k_lo; k <= k_hi; ++k)
        if (mag[k] > mag[k_best]) k_best = k;
    if (mag[k_best] <= 0.0) return {0.0, EstimateFlag::no_signal};

    struct Peak {
        int bin;
        double mag;
    };
    std::vector<Peak> peaks;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double left = mag[k - 1];
        const double right = k + 1 <= half ? mag[k + 1] : 0.0;
        if (mag[k] > left && mag[k] >= right && mag[k] >= kPeakFloor * mag[k_best])
            peaks.push_back({k, mag[k]});
    }
    // the in-band argmax always counts, even on a band edge where it is not
    // a strict local maximum
    bool have_best = false;
    for (const Peak& p : peaks) have_best = have_best || p.bin == k_best;
    if (!have_best) peaks.push_back({k_best, mag[k_best]});
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        if (a.mag != b.mag) return a.mag > b.mag;
        return a.bin < b.bin;
    });
    const int take = std::min<int>(l, static_cast<int>(peaks.size()));
    double sum = 0.0;
    for (int p = 0; p < take; ++p) {
        const int k = peaks[p].bin;
        const double right = k + 1 <= half ? mag[k + 1] : 0.0;
        const double delta = parabolic_offset(mag[k - 1], mag[k], right);
        sum += per_min_of(k + delta);
    }
    RateEstimate e{sum / take, EstimateFlag::ok};
    return flag_band(e, sig.band);
}

std::vector<double> autocorrelate(const std::vector<double>& x) {
    if (x.empty()) throw InputError("autocorrelate: empty signal");
    const int M = static_cast<int>(x.size());
    int L = 1;
    while (L < 2 * M) L <<= 1;
    static thread_local Eigen::FFT<double> fft;
    std::vector<std::complex<double>> in(L, 0.0), spectrum(L);
    for (int m = 0; m < M; ++m) in[m] = x[m];
    fft.fwd(spectrum, in);
    for (auto& z : spectrum) z = std::norm(z);
    std::vector<std::complex<double>> corr(L);
    fft.inv(corr, spectrum);
    std::vector<double> r(M);
    for (int n = 0; n < M; ++n) r[n] = corr[n].real() / M;
    return r;
}

RateEstimate estimate_autocorr(const BandSignal& sig) {
    if (sig.samples.empty()) throw InputError("estimate_autocorr: empty signal");
    if (all_zero(sig.samples)) return {0.0, EstimateFlag::no_signal};

    const std::vector<double> r = autocorrelate(sig.samples);
    const int M = static_cast<int>(r.size());
    if (r[0] <= 0.0) return {0.0, EstimateFlag::no_signal};

    for (int n = 1; n + 1 < M; ++n) {
        if (!(r[n] > r[n - 1] && r[n] >= r[n + 1])) continue;
        if (r[n] < 0.2 * r[0]) continue;
        // refine on taper-corrected values so the biased estimator's
        // (M - n)/M ramp does not drag the peak early
        auto corrected = [&](int j) { return r[j] * M / static_cast<double>(M - j); };
        const double delta = parabolic_offset(corrected(n - 1), corrected(n), corrected(n + 1));
        const double lag_s = (n + delta) * sig.sample_interval_s;
        if (lag_s <= 0.0) break;
        return flag_band({60.0 / lag_s, EstimateFlag::ok}, sig.band);
    }
    return {0.0, EstimateFlag::no_periodicity};
}

RateEstimate estimate_peaks(const BandSignal& sig) {
    if (sig.samples.empty()) throw InputError("estimate_peaks: empty signal");
    if (!(sig.band.high_per_min > 0)) throw InputError("estimate_peaks: band unset");
    const std::vector<double>& x = sig.samples;
    const int M = static_cast<int>(x.size());
    const double duration_s = M * sig.sample_interval_s;

    const double top = *std::max_element(x.begin(), x.end());
    if (top <= 0.0) return {0.0, EstimateFlag::out_of_band};
    const double height = 0.4 * top;
    const double sep_s = 0.5 * (60.0 / sig.band.high_per_min);
    const int min_sep = std::max(1, static_cast<int>(std::lround(sep_s / sig.sample_interval_s)));

    struct Peak {
        int idx;
        double value;
    };
    std::vector<Peak> candidates;
    for (int m = 1; m + 1 < M; ++m)
        if (x[m] > x[m - 1] && x[m] >= x[m + 1] && x[m] >= height)
            candidates.push_back({m, x[m]});
    std::sort(candidates.begin(), candidates.end(), [](const Peak& a, const Peak& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.idx < b.idx;
    });
    std::vector<int> kept;
    for (const Peak& c : candidates) {
        bool clear = true;
        for (int k : kept)
            if (std::abs(c.idx - k) < min_sep) {
                clear = false;
                break;
            }
        if (clear) kept.push_back(c.idx);
    }
    if (kept.empty()) return {0.0, EstimateFlag::out_of_band};
    const double rate = static_cast<double>(kept.size()) / duration_s * 60.0;
    return flag_band({rate, EstimateFlag::ok}, sig.band);
}

VitalEstimate estimate_all(const BandSignal& breath, const BandSignal& heart,
                           const BandSignal& heart_comb) {
    VitalEstimate v;
    v.br_f = estimate_fft(breath, 1);
    v.br_a = estimate_autocorr(breath);
    v.br_p = estimate_peaks(breath);
    v.hr_f = estimate_fft(heart, 6);
    v.hr_a = estimate_autocorr(heart);
    v.hr_p = estimate_peaks(heart);
    v.hr_fc = estimate_fft(heart_comb, 6);
    v.hr_ac = estimate_autocorr(heart_comb);
    v.hr_pc = estimate_peaks(heart_comb);
    v.comb_valid = heart_comb.comb_applied;
    return v;
}

}  // namespace vitalradar
