#pragma once

// Synthetic IF generator: the measurement oracle the processing chain is
// verified against. Chirps use stop-and-hop timing (target range frozen at
// the chirp start t_m = m * T_c).

#include <complex>
#include <cstdint>

#include "vitalradar/data_cube.hpp"
#include "vitalradar/radar_config.hpp"
#include "vitalradar/scene.hpp"

namespace vitalradar {

// Chest excursion around the rest range at time t, meters.
double chest_displacement_m(const Subject&, double t_s);

// Unit-power complex white Gaussian noise for sample (chirp m, sample n,
// rx i). Counter based: the value depends only on the key, never on how many
// workers consume the stream.
std::complex<double> noise_sample(std::uint64_t seed, std::uint64_t m,
                                  std::uint64_t n, std::uint64_t i);

// Cube in virtual-receiver form. Throws InputError when a reflector crosses
// the unambiguous range during the dwell.
DataCube synthesize_cube(const Scene&, const RadarConfig&, int threads = 1);

// Scale so the cube peak lands on target_peak and round to integer counts,
// ready for the int16 capture format. Integer counts survive capture round
// trips bit-exactly; all downstream processing is scale-invariant.
DataCube quantize_cube(const DataCube&, double target_peak = 30000.0);

}  // namespace vitalradar
