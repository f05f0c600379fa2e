// SPDX-License-Identifier: Apache-2.0
#include "ntnpos/obs_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ntnpos {

static_assert(std::endian::native == std::endian::little,
              "observation dump assumes a little-endian host");

namespace {
constexpr std::array<char, 8> kMagic = {'T', 'N', 'N', 'T', 'O', 'B', 'S', '1'};
}

void dump_observation(const ObservationGrid& grid, std::ostream& os) {
    os.write(kMagic.data(), kMagic.size());
    const std::uint32_t n = static_cast<std::uint32_t>(grid.samples.rows());
    const std::uint32_t m = static_cast<std::uint32_t>(grid.samples.cols());
    os.write(reinterpret_cast<const char*>(&n), 4);
    os.write(reinterpret_cast<const char*>(&m), 4);
    os.write(reinterpret_cast<const char*>(&grid.noise_variance), 8);
    for (std::uint32_t r = 0; r < n; ++r) {
        for (std::uint32_t c = 0; c < m; ++c) {
            const float re = static_cast<float>(grid.samples(r, c).real());
            const float im = static_cast<float>(grid.samples(r, c).imag());
            os.write(reinterpret_cast<const char*>(&re), 4);
            os.write(reinterpret_cast<const char*>(&im), 4);
        }
    }
    if (!os) throw std::runtime_error("observation dump: write failure");
}

void dump_observation(const ObservationGrid& grid, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("observation dump: cannot open " + path);
    dump_observation(grid, os);
}

ObservationGrid load_observation(std::istream& is) {
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic)
        throw std::runtime_error("observation load: bad magic");
    std::uint32_t n = 0, m = 0;
    double sigma2 = 0.0;
    is.read(reinterpret_cast<char*>(&n), 4);
    is.read(reinterpret_cast<char*>(&m), 4);
    is.read(reinterpret_cast<char*>(&sigma2), 8);
    if (!is) throw std::runtime_error("observation load: truncated header");
    ObservationGrid grid;
    grid.noise_variance = sigma2;
    grid.samples.resize(n, m);
    for (std::uint32_t r = 0; r < n; ++r) {
        for (std::uint32_t c = 0; c < m; ++c) {
            float re = 0.0f, im = 0.0f;
            is.read(reinterpret_cast<char*>(&re), 4);
            is.read(reinterpret_cast<char*>(&im), 4);
            grid.samples(r, c) = cplx(re, im);
        }
    }
    if (!is) throw std::runtime_error("observation load: truncated payload");
    return grid;
}

ObservationGrid load_observation(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("observation load: cannot open " + path);
    return load_observation(is);
}

}  // namespace ntnpos
