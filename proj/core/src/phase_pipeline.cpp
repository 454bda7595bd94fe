#include "vitalradar/phase_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "vitalradar/errors.hpp"

namespace vitalradar {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// transition budget shared by both band edges, Hz
constexpr double kTransitionHz = 0.165;

double fold_to_pi(double d) {
    // into (-pi, pi]
    d = std::fmod(d, kTwoPi);
    if (d <= -M_PI) d += kTwoPi;
    if (d > M_PI) d -= kTwoPi;
    return d;
}

// odd-reflection extension: pad samples each side continuing the end slopes
std::vector<double> odd_extend(const std::vector<double>& x, std::size_t pad) {
    const std::size_t n = x.size();
    std::vector<double> ext(n + 2 * pad);
    for (std::size_t j = 0; j < pad; ++j)
        ext[pad - 1 - j] = 2.0 * x.front() - x[j + 1];
    std::copy(x.begin(), x.end(), ext.begin() + pad);
    for (std::size_t j = 0; j < pad; ++j)
        ext[pad + n + j] = 2.0 * x.back() - x[n - 2 - j];
    return ext;
}

// centered convolution with a symmetric kernel; indices outside treated as 0
void centered_conv(const std::vector<double>& taps, std::vector<double>& x) {
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(taps.size() - 1) / 2;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    std::vector<double> out(x.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const std::ptrdiff_t klo = std::max<std::ptrdiff_t>(0, half - i);
        const std::ptrdiff_t khi =
            std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(taps.size()), n + half - i);
        for (std::ptrdiff_t k = klo; k < khi; ++k) acc += taps[k] * x[i + k - half];
        out[i] = acc;
    }
    x.swap(out);
}

std::vector<double> hamming(int n) {
    std::vector<double> w(n);
    for (int k = 0; k < n; ++k)
        w[k] = 0.54 - 0.46 * std::cos(kTwoPi * k / (n - 1));
    return w;
}

// unity-DC-gain windowed-sinc low-pass, odd length
std::vector<double> windowed_lowpass(double cutoff_hz, double fs_hz, int length) {
    const std::vector<double> w = hamming(length);
    const int c = (length - 1) / 2;
    std::vector<double> h(length);
    double sum = 0.0;
    for (int k = 0; k < length; ++k) {
        const double t = k - c;
        const double x = 2.0 * cutoff_hz / fs_hz * t;
        const double sinc = t == 0 ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
        h[k] = 2.0 * cutoff_hz / fs_hz * sinc * w[k];
        sum += h[k];
    }
    for (double& v : h) v /= sum;
    return h;
}

void forward_biquad(const BiquadCascade::Stage& s, std::vector<double>& x) {
    // steady-state initial conditions for a constant x[0] input
    const double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    double s1 = (dc - s.b0) * x.front();
    double s2 = (s.b2 - s.a2 * dc) * x.front();
    for (double& v : x) {
        const double in = v;
        const double out = s.b0 * in + s1;
        s1 = s.b1 * in - s.a1 * out + s2;
        s2 = s.b2 * in - s.a2 * out;
        v = out;
    }
}

}  // namespace

PhaseSignal extract_phase(const RangeSpectra& spectra, int bin, int az) {
    if (bin < 0 || bin >= spectra.num_bins || az < 0 || az >= spectra.num_azimuths)
        throw InputError("extract_phase: bin (" + std::to_string(bin) + ", " +
                         std::to_string(az) + ") outside the " +
                         std::to_string(spectra.num_bins) + " x " +
                         std::to_string(spectra.num_azimuths) + " map");
    const std::complex<double>* s = spectra.slow_time(bin, az);
    PhaseSignal out;
    out.sample_interval_s = spectra.chirp_interval_s;
    out.samples.resize(spectra.num_chirps);
    for (int m = 0; m < spectra.num_chirps; ++m) {
        if (s[m] == std::complex<double>(0.0, 0.0))
            throw NumericalError("extract_phase: zero magnitude at chirp " +
                                 std::to_string(m) + ", phase undefined");
        out.samples[m] = std::arg(s[m]);
    }
    return out;
}

std::vector<double> unwrap_phase(const std::vector<double>& wrapped) {
    std::vector<double> out(wrapped.size());
    if (wrapped.empty()) return out;
    out[0] = wrapped[0];
    for (std::size_t m = 1; m < wrapped.size(); ++m)
        out[m] = out[m - 1] + fold_to_pi(wrapped[m] - wrapped[m - 1]);
    return out;
}

PhaseSignal mean_subtract_unwrap(const PhaseSignal& in) {
    PhaseSignal out;
    out.sample_interval_s = in.sample_interval_s;
    out.samples = unwrap_phase(in.samples);
    if (out.samples.empty()) return out;
    double mean = 0.0;
    for (double v : out.samples) mean += v;
    mean /= static_cast<double>(out.samples.size());
    for (double& v : out.samples) v -= mean;
    return out;
}

double FirFilter::magnitude_at(double freq_hz) const {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < taps.size(); ++k)
        acc += taps[k] * std::polar(1.0, -kTwoPi * freq_hz * static_cast<double>(k) / fs_hz);
    return std::abs(acc);
}

FirFilter design_bandpass(Band band, double fs_hz) {
    if (!(band.low_per_min > 0) || !(band.high_per_min > band.low_per_min))
        throw InputError("bandpass: band must satisfy 0 < low < high");
    if (fs_hz <= 2.0 * band.high_hz())
        throw InputError("bandpass: sample rate " + std::to_string(fs_hz) +
                         " Hz cannot represent a band reaching " +
                         std::to_string(band.high_hz()) + " Hz");
    int length = static_cast<int>(std::ceil(3.3 * fs_hz / kTransitionHz));
    if (length % 2 == 0) ++length;
    FirFilter f;
    f.fs_hz = fs_hz;
    const auto high = windowed_lowpass(band.high_hz(), fs_hz, length);
    const auto low = windowed_lowpass(band.low_hz(), fs_hz, length);
    f.taps.resize(length);
    for (int k = 0; k < length; ++k) f.taps[k] = high[k] - low[k];
    return f;
}

std::vector<double> filtfilt(const FirFilter& f, const std::vector<double>& x) {
    if (x.size() < 2) return x;
    const std::size_t pad = std::min(x.size() - 1, f.taps.size() - 1);
    std::vector<double> ext = odd_extend(x, pad);
    centered_conv(f.taps, ext);  // symmetric taps: one centered pass is zero phase
    centered_conv(f.taps, ext);
    return {ext.begin() + pad, ext.begin() + pad + x.size()};
}

BandSignal bandpass(const PhaseSignal& phase, Band band) {
    if (phase.samples.empty()) throw InputError("bandpass: empty signal");
    if (!(phase.sample_interval_s > 0))
        throw InputError("bandpass: sample interval must be positive");
    const double fs = 1.0 / phase.sample_interval_s;
    const FirFilter f = design_bandpass(band, fs);
    BandSignal out;
    out.sample_interval_s = phase.sample_interval_s;
    out.band = band;
    out.samples = filtfilt(f, phase.samples);
    return out;
}

double BiquadCascade::magnitude_at(double freq_hz) const {
    const std::complex<double> z = std::polar(1.0, -kTwoPi * freq_hz / fs_hz);
    std::complex<double> acc = 1.0;
    for (const Stage& s : stages)
        acc *= (s.b0 + z * (s.b1 + z * s.b2)) / (1.0 + z * (s.a1 + z * s.a2));
    return std::abs(acc);
}

BiquadCascade design_comb(double br_fundamental_per_min, Band heart_band, double fs_hz) {
    if (br_fundamental_per_min < kBreathBand.low_per_min ||
        br_fundamental_per_min > kBreathBand.high_per_min)
        throw InputError("comb: fundamental " + std::to_string(br_fundamental_per_min) +
                         "/min outside the breath band");
    if (fs_hz <= 2.0 * heart_band.high_hz())
        throw InputError("comb: sample rate too low for the heart band");
    BiquadCascade comb;
    comb.fs_hz = fs_hz;
    const int k_lo =
        static_cast<int>(std::ceil(heart_band.low_per_min / br_fundamental_per_min - 1e-9));
    for (int k = std::max(k_lo, 1);; ++k) {
        const double f0_per_min = k * br_fundamental_per_min;
        if (f0_per_min > heart_band.high_per_min + 1e-9) break;
        const double f0_hz = f0_per_min / 60.0;
        // applied forward-backward, -3 dB at +/- 1/min  =>  single pass -1.5 dB
        const double q = 1.55694 * f0_per_min / 2.0;
        const double w0 = kTwoPi * f0_hz / fs_hz;
        const double alpha = std::sin(w0) / (2.0 * q);
        const double a0 = 1.0 + alpha;
        BiquadCascade::Stage s;
        s.b0 = 1.0 / a0;
        s.b1 = -2.0 * std::cos(w0) / a0;
        s.b2 = 1.0 / a0;
        s.a1 = -2.0 * std::cos(w0) / a0;
        s.a2 = (1.0 - alpha) / a0;
        comb.stages.push_back(s);
        comb.notch_freqs_per_min.push_back(f0_per_min);
    }
    return comb;
}

std::vector<double> filtfilt(const BiquadCascade& comb, const std::vector<double>& x) {
    if (comb.stages.empty() || x.size() < 2) return x;
    double r_max = 0.0;
    for (const auto& s : comb.stages)
        r_max = std::max(r_max, std::sqrt(std::max(0.0, s.a2)));
    const double ring = r_max < 1.0 ? 1.0 / (1.0 - r_max) : 1e6;
    const std::size_t pad =
        std::min(x.size() - 1, static_cast<std::size_t>(std::ceil(3.0 * ring)));
    std::vector<double> ext = odd_extend(x, pad);
    for (const auto& s : comb.stages) forward_biquad(s, ext);
    std::reverse(ext.begin(), ext.end());
    for (const auto& s : comb.stages) forward_biquad(s, ext);
    std::reverse(ext.begin(), ext.end());
    return {ext.begin() + pad, ext.begin() + pad + x.size()};
}

BandSignal comb_filter(const BandSignal& heart, double br_fundamental_per_min) {
    if (!(heart.sample_interval_s > 0))
        throw InputError("comb: sample interval must be positive");
    const double fs = 1.0 / heart.sample_interval_s;
    const BiquadCascade comb = design_comb(br_fundamental_per_min, heart.band, fs);
    BandSignal out = heart;
    out.samples = filtfilt(comb, heart.samples);
    out.comb_applied = true;
    return out;
}

}  // namespace vitalradar
