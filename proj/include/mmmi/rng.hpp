#pragma once

#include <array>
#include <cstdint>

namespace mmmi {

// Identifies one reproducible substream of the counter-based generator.
// Streams with distinct (master_seed, stream_index) are independent.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

// One block of Philox 4x32 with 10 rounds. Pure function of its inputs,
// so any block of any stream can be generated directly.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Inverse of the standard normal CDF (rational approximations accurate
// to ~1e-15 across (0,1)). Returns +-infinity at the endpoints.
double inverse_normal_cdf(double p);

// Random-access view of one substream. Draw `index` never depends on
// earlier draws, so disjoint index ranges can be filled concurrently
// and out of order with identical results.
//
// Layout: key = master_seed, counter = (block index, stream_index),
// two 64-bit draws per block. Uniforms take the top 53 bits plus a
// half-ulp offset, staying strictly inside (0,1); normals map uniforms
// through inverse_normal_cdf.
class CounterRng {
 public:
  explicit CounterRng(SeedSpec seed)
      : key_{static_cast<std::uint32_t>(seed.master_seed),
             static_cast<std::uint32_t>(seed.master_seed >> 32)},
        substream_(seed.stream_index) {}

  std::uint64_t u64_at(std::uint64_t index) const;
  double uniform_at(std::uint64_t index) const;
  double normal_at(std::uint64_t index) const;

  // Sequential interface over the same sequence.
  std::uint64_t next_u64() { return u64_at(cursor_++); }
  double next_uniform() { return uniform_at(cursor_++); }
  double next_normal() { return normal_at(cursor_++); }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t substream_ = 0;
  std::uint64_t cursor_ = 0;
};

}  // namespace mmmi
