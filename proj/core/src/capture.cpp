#include "vitalradar/capture.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vitalradar/errors.hpp"

namespace vitalradar {

namespace {

constexpr char kMagic[4] = {'R', 'V', 'C', '1'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t get_u32(const std::uint8_t* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}
std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

std::string hex(std::uint64_t v) {
    std::ostringstream ss;
    ss << "0x" << std::hex << v;
    return ss.str();
}

// byte offset of the (chirp, sample, rx) sample pair within the payload
std::size_t pair_offset(const CaptureLayout& layout, int N, int p, int n, int r) {
    if (layout.interleave == LaneInterleave::chirp_contiguous)
        return ((static_cast<std::size_t>(p) * layout.num_physical_rx + r) * N + n) * 4;
    return ((static_cast<std::size_t>(p) * N + n) * layout.num_physical_rx + r) * 4;
}

}  // namespace

void CaptureLayout::validate() const {
    if (num_physical_rx < 1) throw InputError("capture layout: rx must be at least 1");
    if (num_tx < 1) throw InputError("capture layout: tx must be at least 1");
}

CaptureLayout CaptureLayout::parse(const std::string& text) {
    CaptureLayout layout;
    if (text.empty() || text == "canonical") return layout;
    std::istringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        std::size_t eq = token.find('=');
        if (eq == std::string::npos)
            throw InputError("capture layout: expected key=value, got '" + token + "'");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "iq") {
            if (value == "i") layout.iq_order = IqOrder::i_first;
            else if (value == "q") layout.iq_order = IqOrder::q_first;
            else throw InputError("capture layout: iq must be 'i' or 'q'");
        } else if (key == "lanes") {
            if (value == "chirp") layout.interleave = LaneInterleave::chirp_contiguous;
            else if (value == "sample") layout.interleave = LaneInterleave::sample_interleaved;
            else throw InputError("capture layout: lanes must be 'chirp' or 'sample'");
        } else if (key == "rx") {
            layout.num_physical_rx = std::stoi(value);
        } else if (key == "tx") {
            layout.num_tx = std::stoi(value);
        } else if (key == "header") {
            layout.header_bytes = value == "none" ? 0 : std::stoul(value);
        } else {
            throw InputError("capture layout: unknown key '" + key + "'");
        }
    }
    layout.validate();
    return layout;
}

std::string CaptureLayout::describe() const {
    std::ostringstream ss;
    ss << "iq=" << (iq_order == IqOrder::i_first ? 'i' : 'q') << ",lanes="
       << (interleave == LaneInterleave::chirp_contiguous ? "chirp" : "sample")
       << ",rx=" << num_physical_rx << ",tx=" << num_tx << ",header=" << header_bytes;
    return ss.str();
}

std::vector<std::uint8_t> encode_capture(const DataCube& cube, const CaptureLayout& layout,
                                         const RadarConfig& config) {
    layout.validate();
    if (cube.num_rx != layout.num_physical_rx)
        throw InputError("capture: cube has " + std::to_string(cube.num_rx) +
                         " receivers but the layout declares " +
                         std::to_string(layout.num_physical_rx));

    std::vector<std::uint8_t> out;
    const std::size_t payload =
        static_cast<std::size_t>(cube.num_chirps) * cube.num_samples * cube.num_rx * 4;
    out.reserve(layout.header_bytes + payload);

    if (layout.header_bytes > 0) {
        if (layout.header_bytes != CaptureLayout::kHeaderBytes)
            throw InputError("capture: writable headers are " +
                             std::to_string(CaptureLayout::kHeaderBytes) +
                             " bytes (or none), got " +
                             std::to_string(layout.header_bytes));
        out.insert(out.end(), kMagic, kMagic + 4);
        put_u16(out, kVersion);
        put_u16(out, static_cast<std::uint16_t>(layout.num_physical_rx));
        put_u16(out, static_cast<std::uint16_t>(layout.num_tx));
        put_u16(out, 0);  // reserved
        put_u32(out, static_cast<std::uint32_t>(cube.num_chirps));
        put_u32(out, static_cast<std::uint32_t>(cube.num_samples));
        put_u64(out, config.digest());
    }

    out.resize(layout.header_bytes + payload);
    std::uint8_t* base = out.data() + layout.header_bytes;
    const int N = cube.num_samples;
    for (int p = 0; p < cube.num_chirps; ++p) {
        for (int n = 0; n < N; ++n) {
            for (int r = 0; r < cube.num_rx; ++r) {
                const std::complex<double>& z = cube.at(p, n, r);
                auto quantize = [&](double v, const char* part) {
                    double rounded = std::nearbyint(v);
                    if (rounded != v || v < -32768.0 || v > 32767.0)
                        throw InputError(
                            "capture: sample (chirp " + std::to_string(p) + ", sample " +
                            std::to_string(n) + ", rx " + std::to_string(r) + ") " + part +
                            " = " + std::to_string(v) +
                            " is not an integer representable in int16; quantize first");
                    return static_cast<std::int16_t>(rounded);
                };
                const std::int16_t iv = quantize(z.real(), "I");
                const std::int16_t qv = quantize(z.imag(), "Q");
                std::uint8_t* dst = base + pair_offset(layout, N, p, n, r);
                const std::int16_t first = layout.iq_order == IqOrder::i_first ? iv : qv;
                const std::int16_t second = layout.iq_order == IqOrder::i_first ? qv : iv;
                dst[0] = static_cast<std::uint8_t>(first & 0xff);
                dst[1] = static_cast<std::uint8_t>((first >> 8) & 0xff);
                dst[2] = static_cast<std::uint8_t>(second & 0xff);
                dst[3] = static_cast<std::uint8_t>((second >> 8) & 0xff);
            }
        }
    }
    return out;
}

DataCube decode_capture(const std::vector<std::uint8_t>& stream, const CaptureLayout& layout,
                        const RadarConfig& config) {
    layout.validate();
    const int N = config.fast_time_samples;
    const int P = layout.num_physical_rx;
    const int physical_chirps = config.num_chirps * layout.num_tx;
    if (P * layout.num_tx != config.num_virtual_rx)
        throw InputError("capture: layout rx*tx = " + std::to_string(P * layout.num_tx) +
                         " does not match the configured " +
                         std::to_string(config.num_virtual_rx) + " virtual receivers");

    const std::size_t expected =
        layout.header_bytes + static_cast<std::size_t>(physical_chirps) * N * P * 4;
    if (stream.size() != expected)
        throw InputError("capture: expected " + std::to_string(expected) +
                         " bytes (header " + std::to_string(layout.header_bytes) + " + " +
                         std::to_string(physical_chirps) + " chirps x " + std::to_string(N) +
                         " samples x " + std::to_string(P) + " rx x 4), got " +
                         std::to_string(stream.size()));

    // foreign headers of other sizes are skipped blind
    if (layout.header_bytes == CaptureLayout::kHeaderBytes) {
        const std::uint8_t* h = stream.data();
        if (std::memcmp(h, kMagic, 4) != 0)
            throw InputError("capture: bad magic, not a capture file");
        const std::uint16_t version = get_u16(h + 4);
        if (version != kVersion)
            throw InputError("capture: unsupported version " + std::to_string(version));
        const std::uint16_t rx = get_u16(h + 6);
        const std::uint16_t tx = get_u16(h + 8);
        const std::uint32_t chirps = get_u32(h + 12);
        const std::uint32_t samples = get_u32(h + 16);
        const std::uint64_t digest = get_u64(h + 20);
        if (rx != P || tx != layout.num_tx)
            throw InputError("capture: header geometry rx=" + std::to_string(rx) +
                             ",tx=" + std::to_string(tx) + " does not match layout " +
                             layout.describe());
        if (chirps != static_cast<std::uint32_t>(physical_chirps) ||
            samples != static_cast<std::uint32_t>(N))
            throw InputError("capture: header declares " + std::to_string(chirps) +
                             " chirps x " + std::to_string(samples) +
                             " samples, config expects " + std::to_string(physical_chirps) +
                             " x " + std::to_string(N));
        if (digest != config.digest())
            throw InputError("capture: config digest mismatch: capture " + hex(digest) +
                             ", config " + hex(config.digest()));
    }

    DataCube cube(physical_chirps, N, P);
    const std::uint8_t* base = stream.data() + layout.header_bytes;
    for (int p = 0; p < physical_chirps; ++p) {
        for (int n = 0; n < N; ++n) {
            for (int r = 0; r < P; ++r) {
                const std::uint8_t* src = base + pair_offset(layout, N, p, n, r);
                const std::int16_t first = static_cast<std::int16_t>(src[0] | (src[1] << 8));
                const std::int16_t second = static_cast<std::int16_t>(src[2] | (src[3] << 8));
                const double iv = layout.iq_order == IqOrder::i_first ? first : second;
                const double qv = layout.iq_order == IqOrder::i_first ? second : first;
                cube.at(p, n, r) = {iv, qv};
            }
        }
    }
    return cube;
}

DataCube read_capture(const std::string& path, const CaptureLayout& layout,
                      const RadarConfig& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::vector<std::uint8_t> stream((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return decode_capture(stream, layout, config);
}

void write_capture(const std::string& path, const DataCube& cube,
                   const CaptureLayout& layout, const RadarConfig& config) {
    const std::vector<std::uint8_t> stream = encode_capture(cube, layout, config);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(stream.data()),
              static_cast<std::streamsize>(stream.size()));
    if (!out) throw InputError("failed writing '" + path + "'");
}

DataCube tdm_demux(const DataCube& physical, int num_tx) {
    if (num_tx < 1) throw InputError("tdm_demux: num_tx must be at least 1");
    if (physical.num_chirps % num_tx != 0)
        throw InputError("tdm_demux: " + std::to_string(physical.num_chirps) +
                         " physical chirps are not divisible by num_tx = " +
                         std::to_string(num_tx));
    if (num_tx == 1) return physical;
    const int M = physical.num_chirps / num_tx;
    const int N = physical.num_samples;
    const int P = physical.num_rx;
    DataCube virt(M, N, P * num_tx);
    for (int v = 0; v < M; ++v)
        for (int k = 0; k < num_tx; ++k)
            for (int n = 0; n < N; ++n)
                for (int r = 0; r < P; ++r)
                    virt.at(v, n, k * P + r) = physical.at(v * num_tx + k, n, r);
    return virt;
}

DataCube tdm_mux(const DataCube& virtual_cube, int num_tx) {
    if (num_tx < 1) throw InputError("tdm_mux: num_tx must be at least 1");
    if (virtual_cube.num_rx % num_tx != 0)
        throw InputError("tdm_mux: " + std::to_string(virtual_cube.num_rx) +
                         " virtual receivers are not divisible by num_tx = " +
                         std::to_string(num_tx));
    if (num_tx == 1) return virtual_cube;
    const int P = virtual_cube.num_rx / num_tx;
    const int N = virtual_cube.num_samples;
    DataCube phys(virtual_cube.num_chirps * num_tx, N, P);
    for (int v = 0; v < virtual_cube.num_chirps; ++v)
        for (int k = 0; k < num_tx; ++k)
            for (int n = 0; n < N; ++n)
                for (int r = 0; r < P; ++r)
                    phys.at(v * num_tx + k, n, r) = virtual_cube.at(v, n, k * P + r);
    return phys;
}

}  // namespace vitalradar
