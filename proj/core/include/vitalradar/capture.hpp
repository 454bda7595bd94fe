#pragma once

// Raw capture container: little-endian int16 I/Q pairs behind a small header
// (magic, version, geometry, config digest). Two payload arrangements are
// supported: the canonical chirp-contiguous order and a sample-interleaved
// order matching lane-multiplexed capture cards. Headerless raw streams are
// accepted with header_bytes = 0.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vitalradar/data_cube.hpp"
#include "vitalradar/radar_config.hpp"

namespace vitalradar {

enum class IqOrder { i_first, q_first };
enum class LaneInterleave { chirp_contiguous, sample_interleaved };

struct CaptureLayout {
    IqOrder iq_order = IqOrder::i_first;
    LaneInterleave interleave = LaneInterleave::chirp_contiguous;
    int num_physical_rx = 8;
    int num_tx = 1;
    std::size_t header_bytes = kHeaderBytes;

    static constexpr std::size_t kHeaderBytes = 32;

    // "canonical" or comma separated tokens:
    //   iq=i|q, lanes=chirp|sample, rx=<n>, tx=<n>, header=<bytes>|none
    static CaptureLayout parse(const std::string& text);
    std::string describe() const;
    void validate() const;
};

// Physical-domain cube: num_chirps = physical chirps, num_rx = physical
// receivers. With num_tx = 1 this already is the virtual cube.
DataCube read_capture(const std::string& path, const CaptureLayout&, const RadarConfig&);
DataCube decode_capture(const std::vector<std::uint8_t>& stream, const CaptureLayout&,
                        const RadarConfig&);

// Samples must be integer-valued within int16; throws InputError otherwise.
void write_capture(const std::string& path, const DataCube&, const CaptureLayout&,
                   const RadarConfig&);
std::vector<std::uint8_t> encode_capture(const DataCube&, const CaptureLayout&,
                                         const RadarConfig&);

// Time-division MIMO: physical chirp v*num_tx + k carries TX k, whose
// receivers land on virtual elements [k*P, (k+1)*P). The configured
// chirp_interval_s is the virtual (per snapshot) spacing.
DataCube tdm_demux(const DataCube& physical, int num_tx);
DataCube tdm_mux(const DataCube& virtual_cube, int num_tx);  // exact inverse

}  // namespace vitalradar
