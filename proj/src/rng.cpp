#include "rng.hpp"

#include <cmath>

namespace aclab {

namespace {

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    const uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
}

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        const std::array<uint32_t, 4> next = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1],
                                              lo0};
        ctr = next;
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

double RngStream::uniform(uint32_t step, uint32_t cell) const {
    const auto r = block(step, cell);
    const uint64_t bits = (static_cast<uint64_t>(r[0]) << 32) | r[1];
    // 53-bit mantissa in (0,1): (bits >> 11) + 0.5 scaled.
    return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

void RngStream::normal_pair(uint32_t step, uint32_t cell, double& z0, double& z1) const {
    const auto r = block(step, cell);
    const uint64_t b0 = (static_cast<uint64_t>(r[0]) << 32) | r[1];
    const uint64_t b1 = (static_cast<uint64_t>(r[2]) << 32) | r[3];
    const double u1 = (static_cast<double>(b0 >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    const double u2 = (static_cast<double>(b1 >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    z0 = rad * std::cos(ang);
    z1 = rad * std::sin(ang);
}

double RngStream::normal(uint32_t step, uint32_t cell) const {
    double z0, z1;
    normal_pair(step, cell, z0, z1);
    return z0;
}

}  // namespace aclab
