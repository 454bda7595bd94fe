#pragma once

// Complex IF samples indexed by (chirp, fast-time sample, virtual receiver).
// Receiver is the fastest varying index so the beamformer walks contiguous
// memory.

#include <complex>
#include <cstddef>
#include <vector>

namespace vitalradar {

struct DataCube {
    int num_chirps = 0;
    int num_samples = 0;
    int num_rx = 0;
    std::vector<std::complex<double>> data;

    DataCube() = default;
    DataCube(int chirps, int samples, int rx)
        : num_chirps(chirps),
          num_samples(samples),
          num_rx(rx),
          data(static_cast<std::size_t>(chirps) * samples * rx) {}

    std::size_t index(int m, int n, int i) const {
        return (static_cast<std::size_t>(m) * num_samples + n) * num_rx + i;
    }
    std::complex<double>& at(int m, int n, int i) { return data[index(m, n, i)]; }
    const std::complex<double>& at(int m, int n, int i) const {
        return data[index(m, n, i)];
    }
    std::size_t size() const { return data.size(); }
};

}  // namespace vitalradar
