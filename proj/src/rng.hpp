#pragma once

#include <array>
#include <cstdint>

namespace aclab {

// Philox 4x32-10 counter-based generator (Salmon et al., SC'11 constants).
// Output is a pure function of (key, counter), so parallel consumers can
// draw order-independently: we key by the master seed and index the counter
// by (purpose, path, step, cell).
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter, std::array<uint32_t, 2> key);

// Distinct counter namespaces so different samplers never collide.
enum class RngPurpose : uint32_t {
    spde_noise = 0,     // shared by the full and the linear equation (coupling)
    sde_noise = 1,
    generic_draws = 2,  // test utilities, random states, trials
};

// One logical stream = (master seed, purpose, path index).  Stateless: each
// draw names its (step, cell) coordinates explicitly.
class RngStream {
  public:
    RngStream(uint64_t master_seed, RngPurpose purpose, uint32_t path_index)
        : key_{static_cast<uint32_t>(master_seed & 0xffffffffu),
               static_cast<uint32_t>(master_seed >> 32)},
          purpose_(static_cast<uint32_t>(purpose)),
          path_(path_index) {}

    // Uniform in (0,1), never exactly 0 or 1.
    double uniform(uint32_t step, uint32_t cell) const;
    // Standard normal via Box-Muller on the two uniforms of one Philox block.
    double normal(uint32_t step, uint32_t cell) const;
    // Both Box-Muller outputs of one block (used when two normals are needed).
    void normal_pair(uint32_t step, uint32_t cell, double& z0, double& z1) const;

    uint32_t path_index() const { return path_; }

  private:
    std::array<uint32_t, 4> block(uint32_t step, uint32_t cell) const {
        return philox4x32({step, cell, path_, purpose_}, key_);
    }

    std::array<uint32_t, 2> key_;
    uint32_t purpose_;
    uint32_t path_;
};

}  // namespace aclab
